from config.settings import (AttackConfig, ScenarioConfig, dump_config, load_config, parse_config,
                             parse_seeds, validate_config)


__all__ = ['AttackConfig', 'ScenarioConfig', 'dump_config', 'load_config', 'parse_config',
           'parse_seeds', 'validate_config']
