import argparse
import logging
import os
import sys
from typing import List, Optional, Sequence

from cli.report import write_report
from cli.runner import run_scenario
from config.settings import load_config, parse_seeds
from utils.exceptions import ConfigError, ReportError, SimulationError
from utils.logger import configure_logging, setup_logger

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATIONS = 2


def _seed_range(value: str) -> List[int]:
    try:
        return parse_seeds(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"{value!r}: {e}")


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} не является целым числом")
    if number < 1:
        raise argparse.ArgumentTypeError(f"{value!r} должно быть не меньше 1")
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='rcl', description="Симулятор цепочек с распределителями ресурсов")
    commands = parser.add_subparsers(dest='command', required=True)
    run = commands.add_parser('run', help="Прогнать сценарий и записать CSV-отчёт")
    run.add_argument('--config', required=True, help="INI-файл сценария")
    run.add_argument('--out', required=True, help="Путь к CSV-отчёту")
    run.add_argument('--seeds', type=_seed_range, help="Зёрна: a..b или список через запятую")
    run.add_argument('--trials', type=_positive_int, help="Число прогонов")
    run.add_argument('--jobs', type=_positive_int, default=1, help="Параллельные процессы")
    run.add_argument('--quiet', action='store_true', help="Только предупреждения и ошибки")
    return parser


def select_seeds(seeds: Sequence[int], trials: Optional[int], offset: int = 0) -> List[int]:
    """Первые trials зёрен (при нехватке счёт вверх от первого) со сдвигом offset."""
    chosen = list(seeds)
    if trials is not None:
        if trials <= len(chosen):
            chosen = chosen[:trials]
        else:
            taken = set(chosen)
            candidate = chosen[0] if chosen else 0
            while len(chosen) < trials:
                if candidate not in taken:
                    chosen.append(candidate)
                    taken.add(candidate)
                candidate += 1
    return [seed + offset for seed in chosen]


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        configure_logging(logging.WARNING if args.quiet else logging.INFO, config.log_file)
        offset = int(os.environ.get('RCL_SEED_OFFSET', '0') or 0)
        seeds = select_seeds(args.seeds or config.seeds, args.trials, offset)
        report = run_scenario(config, seeds=seeds, jobs=args.jobs)
        write_report(report, args.out)
    except KeyboardInterrupt:
        logger.info("Прогон остановлен пользователем")
        return EXIT_ERROR
    except ValueError as e:
        # RCL_SEED_OFFSET не число
        logger.error(f"Ошибка конфигурации: {e}")
        return EXIT_ERROR
    except (ConfigError, ReportError, OSError) as e:
        logger.error(f"Ошибка: {e}")
        return EXIT_ERROR
    except SimulationError as e:
        logger.error(f"Критическая ошибка симуляции: {e}")
        return EXIT_ERROR

    if report.has_violations:
        logger.warning("Обнаружены нарушения свойств (ожидаемо для сценариев атак)")
        return EXIT_VIOLATIONS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
