from typing import NamedTuple

from .lottery import election_probability


class ThresholdResult(NamedTuple):
    """Наибольший допустимый бюджет противника и признак неразрешимости."""
    max_budget: int
    infeasible: bool


def honest_probability(total: int, adversary: int, rho: float) -> float:
    """ϱ_H = 1 - (1 - ϱ)^{R - R_A}."""
    return election_probability(total - adversary, rho)


def adversary_probability(adversary: int, rho: float) -> float:
    """ϱ_A = 1 - (1 - ϱ)^{R_A}."""
    return election_probability(adversary, rho)


def honest_majority_holds(total: int, adversary: int, rho: float, delta: int) -> bool:
    """Условие честного большинства: ϱ_A < 1 / (Δ - 1 + 1/ϱ_H)."""
    rho_h = honest_probability(total, adversary, rho)
    if rho_h <= 0.0:
        return False
    # ϱ_A · ((Δ-1)·ϱ_H + 1) < ϱ_H: при Δ = 1 сводится к точному ϱ_A < ϱ_H
    return adversary_probability(adversary, rho) * ((delta - 1) * rho_h + 1.0) < rho_h


def honest_majority_max_budget(total: int, rho: float, delta: int) -> ThresholdResult:
    """Наибольший целый R_A из 0..R, при котором выполняется условие честного большинства.

    Raises:
        ValueError: При R < 1, ϱ вне (0, 1) или Δ < 1.
    """
    if total < 1:
        raise ValueError(f"R должно быть не меньше 1: {total}")
    if not 0.0 < rho < 1.0:
        raise ValueError(f"ϱ должна лежать в (0, 1): {rho}")
    if delta < 1:
        raise ValueError(f"Δ должна быть не меньше 1: {delta}")
    best = None
    for adversary in range(total + 1):
        if honest_majority_holds(total, adversary, rho, delta):
            best = adversary
    if best is None:
        return ThresholdResult(0, True)
    return ThresholdResult(best, False)
