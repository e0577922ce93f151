from dataclasses import dataclass, field
from typing import List, Optional


@dataclass
class AttackOutcome:
    """Плоский итог атаки для отчёта.

    Поля, не относящиеся к стратегии, остаются со значениями по умолчанию.
    """
    strategy: str
    success: bool = False
    timed_out: bool = False
    start_step: Optional[int] = None
    end_step: Optional[int] = None
    overtake_step: Optional[int] = None
    fork_height: Optional[int] = None
    fork_length: int = 0
    published_blocks: int = 0
    corrupted: List[int] = field(default_factory=list)
    corruption_spent: int = 0
    cost_burn: int = 0
    cost_reuse: int = 0
    # Ничего-на-кону: слоты с хотя бы одним выигрышем среди вершин
    win_slots: int = 0
    measured_slots: int = 0
    fork_persistence: int = 0
    # Истощение ресурса: рост цепочек до и после первой границы окна пересчёта
    fork_growth_before: float = 0.0
    fork_growth_after: float = 0.0
    honest_growth_before: float = 0.0
    honest_growth_after: float = 0.0
    fork_resource: int = 0
    honest_resource: int = 0
    detectable: bool = False

    @property
    def steps(self) -> int:
        if self.start_step is None or self.end_step is None:
            return 0
        return self.end_step - self.start_step

    @property
    def win_frequency(self) -> float:
        return self.win_slots / self.measured_slots if self.measured_slots else 0.0
