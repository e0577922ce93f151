from .report import HEADER, aggregate_row, warning_row, write_report
from .runner import RunReport, SeedRow, agreement_slack, run_scenario, run_seed, threshold_warning


__all__ = ['HEADER', 'aggregate_row', 'warning_row', 'write_report', 'RunReport', 'SeedRow', 'agreement_slack',
           'run_scenario', 'run_seed', 'threshold_warning']
