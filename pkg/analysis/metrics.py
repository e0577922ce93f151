import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from scipy.stats import binom, binomtest

from allocator.resources import ResourceKind
from core.chain import Chain
from .trace import RunTrace


def chain_growth_bound(rho: float, t: int, eps: float) -> Tuple[float, float]:
    """Границы Чернова для роста цепочки за t шагов при вероятности блока ϱ.

    Returns:
        (нижний хвост exp(-ϱtε²/2), верхний хвост exp(-ϱtε²/3)).

    Raises:
        ValueError: Если ε вне (0, 1).
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"ε должна лежать в (0, 1): {eps}")
    mean = rho * t
    return math.exp(-mean * eps ** 2 / 2), math.exp(-mean * eps ** 2 / 3)


# ----------------------------------------------------------------- затраты

def _segments(trace: RunTrace, process: int, t1: int, t2: int) -> List[Tuple[int, int, int]]:
    """Куски [start, end] окна с постоянным Alloc(p, t)."""
    if t1 > t2:
        raise ValueError(f"Окно [{t1}, {t2}] пусто")
    history = trace.alloc_log.get(process, [])
    points = [step for step, _ in history if t1 < step <= t2]
    starts = [t1] + points
    ends = [step - 1 for step in points] + [t2]
    return [(start, end, trace.alloc(process, start)) for start, end in zip(starts, ends)]


def burn_cost(trace: RunTrace, process: int, t1: int, t2: int) -> int:
    """Cost_burn(p, t₁, t₂) = Σ_{t=t₁}^{t₂} Alloc(p, t)."""
    return sum((end - start + 1) * value for start, end, value in _segments(trace, process, t1, t2))


def reuse_cost(trace: RunTrace, process: int, t1: int, t2: int) -> int:
    """Cost_reuse(p, t₁, t₂) = max_{t∈[t₁, t₂]} Alloc(p, t)."""
    return max(value for _, _, value in _segments(trace, process, t1, t2))


def extension_cost(trace: RunTrace, process: int, t1: int, t2: int, kind: ResourceKind) -> int:
    """Затраты процесса на продление цепочки в окне [t₁, t₂] для типа ресурса kind."""
    if kind.burnable:
        return burn_cost(trace, process, t1, t2)
    return reuse_cost(trace, process, t1, t2)


# ---------------------------------------------------------------- цепочки

@dataclass(frozen=True)
class ChainMetrics:
    honest_blocks: int
    byz_blocks: int
    longest_len: int
    forks: int


def reference_chain(trace: RunTrace) -> Optional[Chain]:
    """Самая длинная финальная C_local среди корректных процессов."""
    best = None
    for process in trace.correct_processes():
        chain = trace.final_chains.get(process)
        if chain is not None and (best is None or len(chain) > len(best)):
            best = chain
    return best


def chain_metrics(trace: RunTrace) -> ChainMetrics:
    """Состав итоговой цепочки и число валидных блоков вне её."""
    chain = reference_chain(trace)
    if chain is None:
        return ChainMetrics(0, 0, 0, 0)
    honest = byzantine = 0
    on_chain = set()
    for node in chain.nodes()[1:]:
        on_chain.add(node.digest)
        record = trace.provenance.get(node.digest)
        if record is not None and record.byzantine:
            byzantine += 1
        else:
            honest += 1
    forks = sum(1 for digest in trace.provenance if digest not in on_chain)
    return ChainMetrics(honest, byzantine, len(chain), forks)


def measured_growth(trace: RunTrace) -> float:
    """Блоков самой длинной корректной цепочки на шаг."""
    chain = reference_chain(trace)
    if chain is None or trace.steps == 0:
        return 0.0
    return chain.height / trace.steps


# ------------------------------------------------------------- статистика

def binomial_stderr(successes: int, trials: int) -> float:
    """Стандартная ошибка частоты successes / trials."""
    if trials <= 0:
        return 0.0
    p = successes / trials
    return float(binom(trials, p).std()) / trials


def frequency_with_error(flags: Sequence[bool]) -> Tuple[float, float]:
    n = len(flags)
    if n == 0:
        return 0.0, 0.0
    hits = sum(1 for flag in flags if flag)
    return hits / n, binomial_stderr(hits, n)


def binomial_pvalue(successes: int, trials: int, p: float) -> float:
    """Двусторонний биномиальный тест гипотезы о вероятности p."""
    return float(binomtest(successes, trials, p).pvalue)


def mean(values: Iterable[float]) -> float:
    items = list(values)
    return sum(items) / len(items) if items else 0.0
