from typing import Dict, FrozenSet, Optional, Tuple

from scipy.optimize import brentq

from core.chain import Chain
from core.oracle import Digest
from .lottery import election_probability
from .resources import ResourceDistribution

# Верхняя граница пересчитанной вероятности
RHO_CAP = 1.0 - 1e-12
_RHO_FLOOR = 1e-15


class RetargetPolicy:
    """Пересчёт ϱ по каждой цепочке раз в W слотов.

    Для слота из окна w >= 1 активными считаются производители блоков цепочки
    со слотами из [(w-1)W, wW). Неактивные процессы выбывают из распределения,
    а ϱ' подбирается так, чтобы ожидаемое число лидеров за слот равнялось target.
    """

    def __init__(self, window: int, target: float = 1.0):
        if window < 1:
            raise ValueError(f"Окно пересчёта должно быть положительным: {window}")
        if target <= 0:
            raise ValueError(f"Целевая частота должна быть положительной: {target}")
        self.window = window
        self.target = target
        self._active: Dict[Tuple[Digest, int], FrozenSet[int]] = {}
        self._solved: Dict[Tuple[int, ...], float] = {}

    def window_index(self, slot: int) -> int:
        return slot // self.window

    def active_producers(self, chain: Chain, slot: int) -> Optional[FrozenSet[int]]:
        """Производители блоков предыдущего окна или None для первого окна."""
        index = self.window_index(slot)
        if index == 0:
            return None
        start, end = (index - 1) * self.window, index * self.window
        anchor = chain.ancestor_by_slot(end - 1)
        key = (anchor.digest, index)
        cached = self._active.get(key)
        if cached is not None:
            return cached
        producers = set()
        node = anchor
        while node.parent is not None and node.tip.slot >= start:
            producers.add(node.tip.producer)
            node = node.parent
        result = frozenset(producers)
        self._active[key] = result
        return result

    def solve(self, dist: ResourceDistribution) -> float:
        """ϱ', при котором Σ_active (1 - (1 - ϱ')^{r_i}) = target."""
        budgets = tuple(sorted(budget for budget in dist.values() if budget > 0))
        cached = self._solved.get(budgets)
        if cached is not None:
            return cached

        def excess(rho: float) -> float:
            return sum(election_probability(budget, rho) for budget in budgets) - self.target

        if excess(RHO_CAP) <= 0:
            value = RHO_CAP
        else:
            value = brentq(excess, _RHO_FLOOR, RHO_CAP, xtol=1e-15)
        self._solved[budgets] = value
        return value

    def effective(self, chain: Chain, slot: int, dist: ResourceDistribution,
                  rho: float) -> Tuple[float, ResourceDistribution]:
        """Вероятность и распределение, действующие для цепочки в данном слоте."""
        active = self.active_producers(chain, slot)
        if active is None:
            return rho, dist
        restricted = dist.restricted(active)
        if restricted.total() == 0:
            return rho, dist
        return self.solve(restricted), restricted
