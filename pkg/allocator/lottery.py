import math
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

from core.oracle import Digest, HashOracle
from .resources import ResourceDistribution

# Ключ таблицы T: (процесс, дайджест префикса, слот) -> ρ
TableKey = Tuple[int, Digest, int]


def election_probability(budget: int, rho: float) -> float:
    """1 - (1 - ϱ)^r без потери точности при малых ϱ."""
    if budget <= 0:
        return 0.0
    if rho >= 1.0:
        return 1.0
    return -math.expm1(budget * math.log1p(-rho))


@dataclass(frozen=True)
class LotteryState:
    """Состояние лотереи: слот, эпоха и таблица выданных случайностей T.

    Таблица только пополняется и разделяется между копиями состояния,
    которые возвращает advance_slot.
    """
    slot: int = 0
    epoch: int = 0
    q: int = 96
    k: int = 6
    table: Dict[TableKey, int] = field(default_factory=dict, compare=False, repr=False)

    def lookup(self, process: int, prefix: Digest, slot: int) -> Optional[int]:
        return self.table.get((process, prefix, slot))

    def record(self, process: int, prefix: Digest, slot: int, randomness: int) -> None:
        key = (process, prefix, slot)
        if key in self.table:
            raise ValueError(f"Случайность для {key} уже выдана")
        self.table[key] = randomness

    def contains(self, process: int, prefix: Digest, randomness: int, slot: int) -> bool:
        return self.table.get((process, prefix, slot)) == randomness


def advance_slot(state: LotteryState) -> LotteryState:
    """Timeout: slot += 1, эпоха растёт, когда slot mod q = 0."""
    slot = state.slot + 1
    epoch = state.epoch + 1 if slot % state.q == 0 else state.epoch
    return replace(state, slot=slot, epoch=epoch)


def leader_select(dist: ResourceDistribution, slot: int, randomness: int, candidate: int,
                  rho: float, oracle: HashOracle) -> bool:
    """Процесс выбора лидера для одного кандидата.

    u = PRF(ρ, slot, candidate) / 2^λ; кандидат избран, если u < 1 - (1 - ϱ)^{r_i}.
    """
    budget = dist[candidate]
    if budget <= 0:
        return False
    return oracle.unit('leader', randomness, slot, candidate) < election_probability(budget, rho)


def external_verify(budget: int, pledged: int, randomness: int, oracle: HashOracle) -> bool:
    """Проверка внешнего ресурса E(r, r'; ρ): истина с вероятностью r / r'."""
    if budget <= 0 or pledged <= 0 or budget > pledged:
        return False
    return oracle.below_ratio(budget, pledged, 'E', randomness)
