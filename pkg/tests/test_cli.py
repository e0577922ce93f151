import csv

import pytest

from cli import (HEADER, RunReport, SeedRow, aggregate_row, run_scenario, run_seed, threshold_warning,
                 warning_row, write_report)
from main import EXIT_ERROR, EXIT_OK, main, select_seeds

SMALL_INI = """
[scenario]
version = 1
allocator = pow
n_processes = 5
total_budget = 50
rho = 0.004
k = 4
horizon = 300
seeds = 0..1
tx_interval = 5

[attack]
strategy = none
"""


def _row(seed: int, success=None, cp: int = 0, burn: int = 0) -> SeedRow:
    return SeedRow(seed=seed, allocator='pow', attack='private', steps=100, honest_blocks=10 + seed,
                   byz_blocks=seed, longest_len=11, forks=1, cp_violations=cp, to_violations=0,
                   live_violations=0, attack_success=success, cost_burn=burn, cost_reuse=30)


def _read(path):
    with open(path, encoding='utf-8', newline='') as handle:
        return list(csv.reader(handle))


class TestReport:
    def test_empty_report_has_only_header(self, small_config, tmp_path):
        path = write_report(RunReport(small_config()), str(tmp_path / 'out' / 'empty.csv'))
        assert _read(path) == [HEADER]

    def test_rows_sorted_with_aggregate(self, small_config, tmp_path):
        report = RunReport(small_config(), rows=[_row(2, True, cp=1, burn=90), _row(1, False, burn=30)])
        lines = _read(write_report(report, str(tmp_path / 'report.csv')))
        assert [line[0] for line in lines] == ['seed', '1', '2', 'AGG']
        assert lines[1][HEADER.index('attack_success')] == '0'
        assert lines[2][HEADER.index('attack_success')] == '1'

    def test_aggregate_format(self):
        values = dict(zip(HEADER, aggregate_row([_row(1, True, cp=2, burn=90), _row(2, False, cp=1, burn=30)])))
        assert values['seed'] == 'AGG'
        assert values['cost_burn'] == '60.000'
        assert values['honest_blocks'] == '11.500'
        assert values['cp_violations'] == '3'
        assert values['attack_success'] == '0.500±0.354'

    def test_honest_rows_leave_success_empty(self):
        values = dict(zip(HEADER, aggregate_row([_row(1), _row(2)])))
        assert values['attack_success'] == ''


class TestRunner:
    def test_report_is_reproducible(self, small_config, tmp_path):
        config = small_config(seeds=[0, 1])
        first = write_report(run_scenario(config), str(tmp_path / 'a.csv'))
        second = write_report(run_scenario(config), str(tmp_path / 'b.csv'))
        assert first.read_bytes() == second.read_bytes()

    def test_seed_rows_are_independent(self, small_config):
        config = small_config()
        report = run_scenario(config, seeds=[2, 0])
        assert [row.seed for row in report.rows] == [0, 2]
        assert report.rows[1] == run_seed(config, 2)

    def test_threshold_warning(self, small_config):
        assert threshold_warning(small_config()) is None
        warning = threshold_warning(small_config(adversary_budget=30))
        assert 'R_A=30' in warning

    def test_warning_is_kept_in_report(self, small_config, tmp_path):
        report = run_scenario(small_config(adversary_budget=30, horizon=100), seeds=[0])
        assert report.warnings and not report.rows[0].attack_success
        lines = _read(write_report(report, str(tmp_path / 'report.csv')))
        assert [line[0] for line in lines] == ['seed', '0', 'AGG', 'WARNING']
        assert lines[-1] == warning_row(report, report.warnings[0])
        assert 'R_A=30' in lines[-1][HEADER.index('steps')]


class TestMain:
    @pytest.fixture
    def scenario(self, tmp_path):
        path = tmp_path / 'small.ini'
        path.write_text(SMALL_INI, encoding='utf-8')
        return path

    def test_honest_run(self, scenario, tmp_path):
        out = tmp_path / 'report.csv'
        assert main(['run', '--config', str(scenario), '--out', str(out), '--quiet']) == EXIT_OK
        assert [line[0] for line in _read(out)] == ['seed', '0', '1', 'AGG']

    def test_seed_override_and_trials(self, scenario, tmp_path, monkeypatch):
        out = tmp_path / 'report.csv'
        monkeypatch.setenv('RCL_SEED_OFFSET', '10')
        code = main(['run', '--config', str(scenario), '--out', str(out), '--seeds', '3..5',
                     '--trials', '1', '--quiet'])
        assert code == EXIT_OK
        assert [line[0] for line in _read(out)] == ['seed', '13', 'AGG']

    def test_missing_config(self, tmp_path):
        assert main(['run', '--config', str(tmp_path / 'nope.ini'), '--out', str(tmp_path / 'x.csv'),
                     '--quiet']) == EXIT_ERROR
        assert not (tmp_path / 'x.csv').exists()

    def test_invalid_config(self, tmp_path):
        path = tmp_path / 'bad.ini'
        path.write_text(SMALL_INI.replace('version = 1', 'version = 7'), encoding='utf-8')
        assert main(['run', '--config', str(path), '--out', str(tmp_path / 'x.csv'), '--quiet']) == EXIT_ERROR

    def test_bad_seed_offset(self, scenario, tmp_path, monkeypatch):
        monkeypatch.setenv('RCL_SEED_OFFSET', 'many')
        assert main(['run', '--config', str(scenario), '--out', str(tmp_path / 'x.csv'),
                     '--quiet']) == EXIT_ERROR

    def test_argument_errors(self, scenario):
        with pytest.raises(SystemExit):
            main(['run', '--config', str(scenario), '--out', 'x.csv', '--trials', '0'])
        with pytest.raises(SystemExit):
            main(['run', '--config', str(scenario)])

    def test_select_seeds(self):
        assert select_seeds([0, 1, 2], 2) == [0, 1]
        assert select_seeds([5, 7], 4) == [5, 7, 6, 8]
        assert select_seeds([0, 1], None, offset=100) == [100, 101]
