import bisect
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from core.chain import Chain
from core.validation import ChainValidator


class Origin(str, Enum):
    VIRTUAL = 'virtual'
    EXTERNAL = 'external'


class Lifecycle(str, Enum):
    BURNABLE = 'burnable'
    REUSABLE = 'reusable'


@dataclass(frozen=True)
class ResourceKind:
    """Тип ресурса: происхождение и жизненный цикл."""
    name: str
    origin: Origin
    lifecycle: Lifecycle

    @property
    def burnable(self) -> bool:
        return self.lifecycle == Lifecycle.BURNABLE

    @property
    def virtual(self) -> bool:
        return self.origin == Origin.VIRTUAL


POW_KIND = ResourceKind('pow', Origin.EXTERNAL, Lifecycle.BURNABLE)
POS_KIND = ResourceKind('pos', Origin.VIRTUAL, Lifecycle.REUSABLE)
SPACE_KIND = ResourceKind('space', Origin.EXTERNAL, Lifecycle.REUSABLE)

RESOURCE_KINDS: Dict[str, ResourceKind] = {kind.name: kind for kind in (POW_KIND, POS_KIND, SPACE_KIND)}


class ResourceDistribution(Mapping[int, int]):
    """Отображение процесс → бюджет. Отсутствующий процесс имеет бюджет 0."""

    def __init__(self, entries: Optional[Mapping[int, int]] = None):
        entries = dict(entries or {})
        for process, budget in entries.items():
            if budget < 0:
                raise ValueError(f"Отрицательный бюджет процесса {process}: {budget}")
        self._entries: Dict[int, int] = dict(sorted(entries.items()))

    def __getitem__(self, process: int) -> int:
        return self._entries.get(process, 0)

    def __contains__(self, process: object) -> bool:
        return process in self._entries

    def __iter__(self) -> Iterator[int]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ResourceDistribution):
            return self._entries == other._entries
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self._entries.items()))

    def __repr__(self) -> str:
        return f"ResourceDistribution({self._entries})"

    def total(self) -> int:
        return sum(self._entries.values())

    def restricted(self, processes: Iterable[int]) -> 'ResourceDistribution':
        keep = set(processes)
        return ResourceDistribution({p: r for p, r in self._entries.items() if p in keep})

    def subtotal(self, processes: Iterable[int]) -> int:
        return sum(self[p] for p in set(processes))


class ResourceTrace:
    """Внешний ресурс: Alloc(p, t) как ступенчатая функция времени.

    По умолчанию бюджет постоянен; изменения задаются парами (шаг, бюджет).
    """

    def __init__(self, base: Mapping[int, int],
                 steps: Iterable[Tuple[int, int, int]] = ()):
        self._steps: Dict[int, List[Tuple[int, int]]] = {
            process: [(0, budget)] for process, budget in base.items()
        }
        for step, process, budget in steps:
            self.set_from(process, step, budget)

    def set_from(self, process: int, step: int, budget: int) -> None:
        """С шага step процесс располагает бюджетом budget."""
        if budget < 0:
            raise ValueError(f"Отрицательный бюджет процесса {process}: {budget}")
        points = self._steps.setdefault(process, [(0, 0)])
        index = bisect.bisect_left(points, (step, -1))
        if index < len(points) and points[index][0] == step:
            points[index] = (step, budget)
        else:
            points.insert(index, (step, budget))

    def alloc(self, process: int, t: int) -> int:
        points = self._steps.get(process)
        if not points or t < 0:
            return 0
        index = bisect.bisect_right(points, (t, float('inf'))) - 1
        return points[index][1] if index >= 0 else 0

    def total(self, processes: Iterable[int], t: int) -> int:
        return sum(self.alloc(p, t) for p in processes)

    @property
    def processes(self) -> List[int]:
        return sorted(self._steps)


def state_alloc(process: int, chain: Chain, validator: ChainValidator, measure: str = 'stake') -> int:
    """StateAlloc(p, C): бюджет процесса по состоянию цепочки.

    Args:
        measure: 'stake': ликвидный плюс заложенный баланс, 'space': только заложенный.
    """
    ledger = validator.ledger(chain)
    return ledger.space(process) if measure == 'space' else ledger.stake(process)


def distribution_of(chain: Chain, validator: ChainValidator, measure: str = 'stake') -> ResourceDistribution:
    """Распределение 𝕊 по состоянию цепочки."""
    ledger = validator.ledger(chain)
    if measure == 'space':
        return ResourceDistribution(ledger.space_distribution())
    return ResourceDistribution(ledger.stake_distribution())
