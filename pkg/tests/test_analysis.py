import math

import pytest

from allocator.resources import RESOURCE_KINDS
from analysis import checkers
from analysis.checkers import AGREEMENT, COMMON_PREFIX, LIVENESS, NO_DUPLICATION, TOTAL_ORDER
from analysis.metrics import (binomial_pvalue, binomial_stderr, burn_cost, chain_growth_bound,
                              chain_metrics, extension_cost, frequency_with_error, reuse_cost)
from analysis.trace import RunTrace
from core.blocks import Transaction


def _trace(processes=(0, 1), steps: int = 100, genesis=None) -> RunTrace:
    trace = RunTrace(seed=0, allocator='pow', k=2, delta=1, horizon=steps, steps=steps)
    for process in processes:
        trace.add_process(process, False, 0)
        if genesis is not None:
            trace.record_snapshot(process, 0, genesis)
    return trace


def _tx(name: str) -> Transaction:
    return Transaction.payload_tx(9, name.encode(), 1)


class TestCommonPrefix:
    def test_deep_divergence_is_reported(self, env, extend_chain):
        trace = _trace(genesis=env.genesis)
        trace.record_snapshot(0, 5, extend_chain(env.genesis, env.oracle, [0] * 5, tag=1))
        trace.record_snapshot(1, 5, extend_chain(env.genesis, env.oracle, [1] * 5, tag=2))
        violations = checkers.check_common_prefix(trace, 2)
        assert violations
        assert {v.kind for v in violations} == {COMMON_PREFIX}
        assert violations[0].step == 5 and violations[0].position == 3

    def test_divergence_within_k_is_allowed(self, env, extend_chain):
        trace = _trace(genesis=env.genesis)
        trace.record_snapshot(0, 5, extend_chain(env.genesis, env.oracle, [0, 0], tag=1))
        trace.record_snapshot(1, 5, extend_chain(env.genesis, env.oracle, [1, 1], tag=2))
        assert checkers.check_common_prefix(trace, 2) == []

    def test_stale_process_versus_joiner(self, env, extend_chain):
        chain = extend_chain(env.genesis, env.oracle, [0] * 5)
        trace = _trace(processes=(0,), genesis=env.genesis)
        trace.record_snapshot(0, 3, chain)
        trace.add_process(2, False, 4)
        trace.record_snapshot(2, 4, env.genesis)
        trace.record_snapshot(2, 6, chain)
        # Присоединившийся процесс проверяется только после синхронизации
        assert checkers.check_common_prefix(trace, 2) == []

        trace.add_process(1, False, 0)
        trace.record_snapshot(1, 0, env.genesis)
        violations = checkers.check_common_prefix(trace, 2)
        assert [v.processes for v in violations] == [(0, 1)]

    def test_corrupted_processes_are_ignored(self, env, extend_chain):
        trace = _trace(genesis=env.genesis)
        trace.record_snapshot(0, 5, extend_chain(env.genesis, env.oracle, [0] * 5, tag=1))
        trace.record_snapshot(1, 5, extend_chain(env.genesis, env.oracle, [1] * 5, tag=2))
        trace.record_corruption(6, 1, 0)
        assert trace.correct_processes() == [0]
        assert checkers.check_common_prefix(trace, 2) == []


class TestLiveness:
    def test_steady_honest_growth(self, env, extend_chain):
        trace = _trace(processes=(0,), steps=30, genesis=env.genesis)
        chain = env.genesis
        for step in range(3, 30, 3):
            chain = extend_chain(chain, env.oracle, [0], tag=step)
            trace.record_block(chain.digest, 0, False, step)
            trace.record_snapshot(0, step, chain)
        assert checkers.check_liveness(trace, 5) == []

    def test_byzantine_only_blocks_collapse_into_one_violation(self, env, extend_chain):
        trace = _trace(processes=(0,), steps=20, genesis=env.genesis)
        honest = extend_chain(env.genesis, env.oracle, [0])
        trace.record_block(honest.digest, 0, False, 2)
        trace.record_snapshot(0, 2, honest)
        chain = honest
        for step in (10, 11, 12):
            chain = extend_chain(chain, env.oracle, [1], tag=step)
            trace.record_block(chain.digest, 1, True, step)
        trace.record_snapshot(0, 12, chain)
        violations = checkers.check_liveness(trace, 5)
        assert len(violations) == 1
        assert violations[0].kind == LIVENESS and violations[0].step == 2

    def test_disabled_window(self, env):
        assert checkers.check_liveness(_trace(genesis=env.genesis), 0) == []


class TestTotalOrder:
    def test_diverging_sequences(self):
        trace = _trace()
        trace.deliveries = {0: [(1, _tx('a')), (2, _tx('b'))], 1: [(1, _tx('a')), (3, _tx('c'))]}
        kinds = [(v.kind, v.step, v.position) for v in checkers.check_total_order(trace, slack=200)]
        assert kinds == [(TOTAL_ORDER, 3, 1)]

    def test_duplicate_delivery(self):
        trace = _trace(processes=(0,))
        trace.deliveries = {0: [(1, _tx('a')), (4, _tx('a'))]}
        violations = checkers.check_total_order(trace)
        assert [(v.kind, v.position) for v in violations] == [(NO_DUPLICATION, 1)]

    def test_agreement_respects_slack(self):
        trace = _trace()
        trace.deliveries = {0: [(1, _tx('a'))], 1: []}
        violations = checkers.check_total_order(trace, slack=10)
        assert [(v.kind, v.processes) for v in violations] == [(AGREEMENT, (0, 1))]
        assert checkers.check_total_order(trace, slack=99) == []

    def test_check_all_groups_by_kind(self, env):
        trace = _trace(genesis=env.genesis)
        trace.deliveries = {0: [(1, _tx('a'))], 1: [(1, _tx('a'))]}
        grouped = checkers.check_all(trace, 2, 0, 0)
        assert set(grouped) == {COMMON_PREFIX, LIVENESS, TOTAL_ORDER, NO_DUPLICATION, AGREEMENT}
        assert not any(grouped.values())


class TestCosts:
    @pytest.fixture
    def trace(self) -> RunTrace:
        trace = _trace(processes=(4,))
        for step, value in ((0, 10), (5, 0), (8, 20)):
            trace.log_alloc(4, step, value)
        return trace

    def test_burn_sums_and_reuse_takes_maximum(self, trace):
        assert burn_cost(trace, 4, 0, 9) == 10 * 5 + 20 * 2
        assert reuse_cost(trace, 4, 0, 9) == 20
        assert burn_cost(trace, 4, 1, 4) == 40
        assert reuse_cost(trace, 4, 1, 4) == 10
        assert reuse_cost(trace, 4, 5, 7) == 0

    def test_extension_cost_follows_resource_kind(self, trace):
        assert extension_cost(trace, 4, 0, 9, RESOURCE_KINDS['pow']) == 90
        assert extension_cost(trace, 4, 0, 9, RESOURCE_KINDS['space']) == 20

    def test_empty_window(self, trace):
        with pytest.raises(ValueError):
            burn_cost(trace, 4, 5, 4)

    def test_unknown_process_costs_nothing(self, trace):
        assert burn_cost(trace, 7, 0, 9) == 0


class TestMetrics:
    def test_chain_growth_bound(self):
        lower, upper = chain_growth_bound(0.1, 100, 0.5)
        assert lower == pytest.approx(math.exp(-1.25))
        assert upper == pytest.approx(math.exp(-10 * 0.25 / 3))
        for eps in (0.0, 1.0):
            with pytest.raises(ValueError):
                chain_growth_bound(0.1, 100, eps)

    def test_chain_metrics(self, env, extend_chain):
        trace = _trace(processes=(0,))
        chain = extend_chain(env.genesis, env.oracle, [0, 1, 0])
        for node in chain.nodes()[1:]:
            trace.record_block(node.digest, node.tip.producer, node.tip.producer == 1, 0)
        orphan = extend_chain(env.genesis, env.oracle, [0], tag=5)
        trace.record_block(orphan.digest, 0, False, 0)
        trace.final_chains[0] = chain
        metrics = chain_metrics(trace)
        assert (metrics.honest_blocks, metrics.byz_blocks, metrics.longest_len, metrics.forks) == (2, 1, 4, 1)
        assert chain_metrics(_trace()).longest_len == 0

    def test_binomial_statistics(self):
        assert binomial_stderr(25, 100) == pytest.approx(math.sqrt(0.25 * 0.75 / 100))
        assert binomial_stderr(0, 0) == 0.0
        assert frequency_with_error([True, False, False, True])[0] == 0.5
        assert frequency_with_error([]) == (0.0, 0.0)
        assert binomial_pvalue(50, 100, 0.5) == pytest.approx(1.0)
        assert binomial_pvalue(90, 100, 0.5) < 1e-6
