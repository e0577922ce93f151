import csv
from pathlib import Path
from typing import List

from analysis.metrics import frequency_with_error, mean
from utils.exceptions import ReportError
from utils.logger import setup_logger
from .runner import RunReport, SeedRow

logger = setup_logger(__name__)

HEADER = ['seed', 'allocator', 'attack', 'steps', 'honest_blocks', 'byz_blocks', 'longest_len',
          'forks', 'cp_violations', 'to_violations', 'live_violations', 'attack_success',
          'cost_burn', 'cost_reuse']

_MEAN_COLUMNS = ('steps', 'honest_blocks', 'byz_blocks', 'longest_len', 'forks', 'cost_burn', 'cost_reuse')
_TOTAL_COLUMNS = ('cp_violations', 'to_violations', 'live_violations')
# Текст предупреждения в строке seed=WARNING
_WARNING_COLUMN = 'steps'


def _row_values(row: SeedRow) -> List[str]:
    success = '' if row.attack_success is None else str(int(row.attack_success))
    return [str(row.seed), row.allocator, row.attack, str(row.steps), str(row.honest_blocks),
            str(row.byz_blocks), str(row.longest_len), str(row.forks), str(row.cp_violations),
            str(row.to_violations), str(row.live_violations), success, str(row.cost_burn),
            str(row.cost_reuse)]


def aggregate_row(rows: List[SeedRow]) -> List[str]:
    """Строка seed=AGG: средние для счётчиков и затрат, суммы нарушений, частота успеха±ошибка."""
    values = {'seed': 'AGG', 'allocator': rows[0].allocator, 'attack': rows[0].attack}
    for column in _MEAN_COLUMNS:
        values[column] = f"{mean(getattr(row, column) for row in rows):.3f}"
    for column in _TOTAL_COLUMNS:
        values[column] = str(sum(getattr(row, column) for row in rows))
    flags = [row.attack_success for row in rows if row.attack_success is not None]
    if flags:
        frequency, stderr = frequency_with_error(flags)
        values['attack_success'] = f"{frequency:.3f}±{stderr:.3f}"
    else:
        values['attack_success'] = ''
    return [values[column] for column in HEADER]


def warning_row(report: RunReport, message: str) -> List[str]:
    values = {column: '' for column in HEADER}
    values.update(seed='WARNING', allocator=report.config.allocator, attack=report.config.attack.strategy)
    values[_WARNING_COLUMN] = message
    return [values[column] for column in HEADER]


def write_report(report: RunReport, path: str) -> Path:
    """
    Записывает отчёт в CSV: заголовок, строки по возрастанию зерна, строку AGG
    и по строке seed=WARNING на каждое предупреждение в порядке появления.

    Args:
        report: Отчёт прогона
        path: Путь к CSV-файлу

    Returns:
        Путь к записанному файлу.

    Raises:
        ReportError: Если файл не удаётся записать.
    """
    target = Path(path)
    rows = sorted(report.rows, key=lambda row: row.seed)
    try:
        if target.parent and not target.parent.exists():
            target.parent.mkdir(parents=True, exist_ok=True)
        with target.open('w', encoding='utf-8', newline='') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(HEADER)
            for row in rows:
                writer.writerow(_row_values(row))
            if rows:
                writer.writerow(aggregate_row(rows))
            for message in report.warnings:
                writer.writerow(warning_row(report, message))
    except OSError as e:
        logger.error(f"Не удалось записать отчёт {path}: {e}")
        raise ReportError(f"Не удалось записать отчёт {path}: {e}")
    logger.info(f"Отчёт сохранён: {target}")
    return target
