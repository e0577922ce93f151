class ConfigError(Exception):
    """Ошибка конфигурации сценария."""
    pass

class SimulationError(Exception):
    """Ошибка выполнения симуляции."""
    pass

class ReportError(Exception):
    """Ошибка записи отчёта."""
    pass
