from .checkers import (AGREEMENT, COMMON_PREFIX, LIVENESS, NO_DUPLICATION, TOTAL_ORDER, Violation,
                       check_all, check_common_prefix, check_liveness, check_total_order)
from .metrics import (ChainMetrics, binomial_pvalue, binomial_stderr, burn_cost, chain_growth_bound,
                      chain_metrics, extension_cost, frequency_with_error, measured_growth,
                      reference_chain, reuse_cost)
from .trace import BlockRecord, CommitRecord, CorruptionRecord, RunTrace


__all__ = [
    'AGREEMENT', 'COMMON_PREFIX', 'LIVENESS', 'NO_DUPLICATION', 'TOTAL_ORDER', 'Violation',
    'check_all', 'check_common_prefix', 'check_liveness', 'check_total_order',
    'ChainMetrics', 'binomial_pvalue', 'binomial_stderr', 'burn_cost', 'chain_growth_bound',
    'chain_metrics', 'extension_cost', 'frequency_with_error', 'measured_growth',
    'reference_chain', 'reuse_cost',
    'BlockRecord', 'CommitRecord', 'CorruptionRecord', 'RunTrace',
]
