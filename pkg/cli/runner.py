import math
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Dict, List, Optional, Sequence

from adversary import AttackOutcome, build_adversary
from allocator.threshold import honest_majority_max_budget
from analysis.checkers import (AGREEMENT, COMMON_PREFIX, LIVENESS, NO_DUPLICATION, TOTAL_ORDER,
                               check_all)
from analysis.metrics import chain_metrics
from config.settings import ScenarioConfig, validate_config
from network.engine import Simulation
from utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass
class SeedRow:
    """Итог одного зерна: строка CSV плюс подробности для проверок."""
    seed: int
    allocator: str
    attack: str
    steps: int
    honest_blocks: int
    byz_blocks: int
    longest_len: int
    forks: int
    cp_violations: int
    to_violations: int
    live_violations: int
    attack_success: Optional[bool]
    cost_burn: int
    cost_reuse: int
    violations: Dict[str, int] = field(default_factory=dict)
    outcome: Optional[AttackOutcome] = None

    @property
    def total_violations(self) -> int:
        return self.cp_violations + self.to_violations + self.live_violations


@dataclass
class RunReport:
    config: ScenarioConfig
    rows: List[SeedRow] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def has_violations(self) -> bool:
        return any(row.total_violations for row in self.rows)


def agreement_slack(config: ScenarioConfig) -> int:
    """Δ + ⌈k / ϱ_total⌉ шагов на «в конце концов» доставки."""
    return config.delta + math.ceil(config.k / max(config.total_rate, 1e-12))


def threshold_warning(config: ScenarioConfig) -> Optional[str]:
    """Предупреждение, если R_A нарушает условие честного большинства."""
    result = honest_majority_max_budget(config.total_budget, config.rho, config.delta)
    if result.infeasible:
        return (f"условие честного большинства невыполнимо при R={config.total_budget}, "
                f"ϱ={config.rho}, Δ={config.delta}")
    if config.adversary_budget > result.max_budget:
        return (f"R_A={config.adversary_budget} превышает допустимый максимум "
                f"{result.max_budget} при Δ={config.delta}")
    return None


def run_seed(config: ScenarioConfig, seed: int) -> SeedRow:
    """
    Выполняет один прогон, проверки и метрики для зерна seed.

    Args:
        config: Проверенная конфигурация сценария
        seed: Зерно прогона

    Returns:
        Строка отчёта.
    """
    engine = Simulation(config, seed)
    adversary = build_adversary(engine, config.attack)
    if adversary is not None:
        engine.attach(adversary)
    trace = engine.run()
    outcome = adversary.outcome if adversary is not None else None

    grouped = check_all(trace, config.k, config.liveness_u(), agreement_slack(config))
    counts = {kind: len(items) for kind, items in grouped.items()}
    metrics = chain_metrics(trace)
    row = SeedRow(
        seed=seed,
        allocator=config.allocator,
        attack=config.attack.strategy,
        steps=trace.steps,
        honest_blocks=metrics.honest_blocks,
        byz_blocks=metrics.byz_blocks,
        longest_len=metrics.longest_len,
        forks=metrics.forks,
        cp_violations=counts[COMMON_PREFIX],
        to_violations=counts[TOTAL_ORDER] + counts[AGREEMENT] + counts[NO_DUPLICATION],
        live_violations=counts[LIVENESS],
        attack_success=outcome.success if outcome is not None else None,
        cost_burn=outcome.cost_burn if outcome is not None else 0,
        cost_reuse=outcome.cost_reuse if outcome is not None else 0,
        violations=counts,
        outcome=outcome,
    )
    logger.info(f"Зерно {seed}: длина {row.longest_len}, нарушения cp={row.cp_violations} "
                f"to={row.to_violations} live={row.live_violations}")
    return row


def _run_seed_job(job) -> SeedRow:
    config, seed = job
    return run_seed(config, seed)


def run_scenario(config: ScenarioConfig, seeds: Optional[Sequence[int]] = None,
                 jobs: int = 1) -> RunReport:
    """
    Прогоняет сценарий по всем зёрнам и собирает отчёт.

    Args:
        config: Конфигурация сценария
        seeds: Зёрна вместо config.seeds
        jobs: Число параллельных процессов

    Returns:
        Отчёт со строками по возрастанию зерна.

    Raises:
        ConfigError: Если конфигурация невалидна.
    """
    validate_config(config)
    report = RunReport(config)
    warning = threshold_warning(config)
    if warning:
        logger.warning(f"Этап 0: {warning}")
        report.warnings.append(warning)

    ordered = sorted(seeds if seeds is not None else config.seeds)
    logger.info(f"Этап 1: {len(ordered)} прогонов сценария {config.allocator}/{config.attack.strategy}")
    if jobs > 1 and len(ordered) > 1:
        with Pool(min(jobs, len(ordered))) as pool:
            report.rows = pool.map(_run_seed_job, [(config, seed) for seed in ordered])
    else:
        report.rows = [run_seed(config, seed) for seed in ordered]
    logger.info(f"Этап 2: сценарий завершён, прогонов с нарушениями: "
                f"{sum(1 for row in report.rows if row.total_violations)}")
    return report
