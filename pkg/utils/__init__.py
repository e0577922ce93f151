from utils.exceptions import ConfigError, SimulationError, ReportError
from utils.logger import setup_logger, configure_logging

__all__ = ['ConfigError', 'SimulationError', 'ReportError', 'setup_logger', 'configure_logging']
