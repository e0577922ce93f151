import logging
from typing import Any, Dict, Optional

_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Уровни, применяемые ко всем логгерам проекта
_settings: Dict[str, Any] = {'level': logging.INFO, 'log_file': None}
_loggers: Dict[str, logging.Logger] = {}


def _attach_file_handler(logger: logging.Logger, log_file: str) -> None:
    for handler in logger.handlers:
        if isinstance(handler, logging.FileHandler) and handler.baseFilename.endswith(log_file):
            return
    file_handler = logging.FileHandler(log_file, encoding='utf-8')
    file_handler.setFormatter(logging.Formatter(_FORMAT))
    logger.addHandler(file_handler)


def setup_logger(name: str) -> Any:
    """
    Настраивает и возвращает логгер.

    Повторный вызов с тем же именем не добавляет новых обработчиков.

    Args:
        name: Имя логгера.

    Returns:
        Настроенный логгер.
    """
    logger = logging.getLogger(name)
    logger.setLevel(_settings['level'])
    logger.propagate = False

    if not logger.handlers:
        formatter = logging.Formatter(_FORMAT)

        # Консольный вывод
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    if _settings['log_file']:
        _attach_file_handler(logger, _settings['log_file'])

    _loggers[name] = logger
    return logger


def configure_logging(level: int = logging.INFO, log_file: Optional[str] = None) -> None:
    """
    Меняет уровень и файл логов для всех логгеров, созданных через setup_logger.

    Args:
        level: Новый уровень логирования.
        log_file: Путь к файлу логов или None.
    """
    _settings['level'] = level
    _settings['log_file'] = log_file
    for logger in _loggers.values():
        logger.setLevel(level)
        if log_file:
            _attach_file_handler(logger, log_file)
