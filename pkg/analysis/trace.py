import bisect
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from core.blocks import Transaction
from core.chain import Chain
from core.oracle import Digest


@dataclass(frozen=True)
class BlockRecord:
    """Происхождение блока: производитель, византийский ли он, шаг создания."""
    producer: int
    byzantine: bool
    step: int


@dataclass(frozen=True)
class CommitRecord:
    step: int
    process: int
    budget: Optional[int]
    weight: int
    success: bool
    byzantine: bool


@dataclass(frozen=True)
class CorruptionRecord:
    step: int
    process: int
    spent: int


@dataclass
class RunTrace:
    """След одного прогона; во время прогона только дополняется.

    Снимки C_local хранятся при старте и при каждой смене цепочки:
    состояние на шаге t: последний снимок не позже t.
    """
    seed: int
    allocator: str
    k: int
    delta: int
    horizon: int
    steps_per_slot: int = 1
    steps: int = 0
    processes: Dict[int, bool] = field(default_factory=dict)
    join_steps: Dict[int, int] = field(default_factory=dict)
    corrupted: Dict[int, int] = field(default_factory=dict)
    dormant: Set[int] = field(default_factory=set)
    snapshots: Dict[int, List[Tuple[int, Chain]]] = field(default_factory=dict)
    deliveries: Dict[int, List[Tuple[int, Transaction]]] = field(default_factory=dict)
    provenance: Dict[Digest, BlockRecord] = field(default_factory=dict)
    commits: List[CommitRecord] = field(default_factory=list)
    commit_counts: Dict[int, List[int]] = field(default_factory=dict)
    corruption: List[CorruptionRecord] = field(default_factory=list)
    alloc_log: Dict[int, List[Tuple[int, int]]] = field(default_factory=dict)
    final_chains: Dict[int, Chain] = field(default_factory=dict)

    # ------------------------------------------------------------ процессы

    def add_process(self, process: int, byzantine: bool, step: int) -> None:
        self.processes[process] = byzantine
        self.join_steps[process] = step

    def correct_processes(self) -> List[int]:
        """Процессы, которые ни разу не были под контролем противника."""
        return sorted(p for p, byzantine in self.processes.items()
                      if not byzantine and p not in self.corrupted)

    def is_byzantine(self, process: int) -> bool:
        return self.processes.get(process, False) or process in self.corrupted

    # -------------------------------------------------------------- снимки

    def record_snapshot(self, process: int, step: int, chain: Chain) -> None:
        history = self.snapshots.setdefault(process, [])
        if history and history[-1][1] is chain:
            return
        if history and history[-1][0] == step:
            history[-1] = (step, chain)
        else:
            history.append((step, chain))

    def chain_at(self, process: int, step: int) -> Optional[Chain]:
        history = self.snapshots.get(process)
        if not history:
            return None
        index = bisect.bisect_right(history, step, key=lambda item: item[0]) - 1
        return history[index][1] if index >= 0 else None

    # --------------------------------------------------------- журналы

    def record_block(self, digest: Digest, producer: int, byzantine: bool, step: int) -> None:
        if digest not in self.provenance:
            self.provenance[digest] = BlockRecord(producer, byzantine, step)

    def record_commit(self, step: int, process: int, budget: Optional[int], weight: int,
                      success: bool, byzantine: bool) -> None:
        # Подробный журнал ведётся для византийских процессов, для честных: счётчики
        counts = self.commit_counts.setdefault(process, [0, 0])
        counts[0] += 1
        counts[1] += int(success)
        if byzantine:
            self.commits.append(CommitRecord(step, process, budget, weight, success, byzantine))

    def record_corruption(self, step: int, process: int, spent: int) -> None:
        self.corrupted[process] = step
        self.corruption.append(CorruptionRecord(step, process, spent))

    def log_alloc(self, process: int, step: int, value: int) -> None:
        history = self.alloc_log.setdefault(process, [])
        if not history or history[-1][1] != value:
            history.append((step, value))

    def alloc(self, process: int, step: int) -> int:
        """Alloc(p, t) по журналу; до первой записи 0."""
        history = self.alloc_log.get(process)
        if not history:
            return 0
        index = bisect.bisect_right(history, step, key=lambda item: item[0]) - 1
        return history[index][1] if index >= 0 else 0

    def corruption_spent(self) -> int:
        return sum(record.spent for record in self.corruption)

    def delivered(self, process: int) -> List[Transaction]:
        return [tx for _, tx in self.deliveries.get(process, [])]
