import configparser
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from allocator.threshold import adversary_probability, honest_probability
from utils.exceptions import ConfigError
from utils.logger import setup_logger

logger = setup_logger(__name__)

CONFIG_VERSION = 1

ALLOCATORS = ('pow', 'pos', 'space')
DELAY_MODELS = ('fixed', 'uniform')
STRATEGIES = ('none', 'private', 'long_range', 'nothing_at_stake', 'resource_bleeding')
NAS_MODES = ('live', 'deep', 'shallow')


@dataclass
class AttackConfig:
    """Параметры стратегии противника (секция [attack])."""
    strategy: str = 'none'
    fork_height: int = 0
    corruption_budget: Optional[int] = None
    release_schedule: List[Tuple[int, int]] = field(default_factory=list)
    patience: int = 0
    start_step: int = 0
    tips: int = 2
    nas_mode: str = 'live'
    observer_join: bool = True


@dataclass
class ScenarioConfig:
    """Параметры эксперимента (секция [scenario]).

    Поля со значением None получают значения по умолчанию в resolve():
    q = 16·k, число византийских процессов: 1 при R_A > 0.
    """
    allocator: str = 'pow'
    n_processes: int = 20
    total_budget: int = 100
    adversary_budget: int = 0
    rho: float = 0.005
    delta: int = 1
    k: int = 6
    q: Optional[int] = None
    steps_per_slot: int = 1
    horizon: int = 5000
    seeds: List[int] = field(default_factory=lambda: list(range(10)))
    attack: AttackConfig = field(default_factory=AttackConfig)
    delay_model: str = 'fixed'
    retarget_window: Optional[int] = None
    block_size_cap: Optional[int] = None
    n_byzantine: Optional[int] = None
    distribution: Dict[int, int] = field(default_factory=dict)
    budget_steps: List[Tuple[int, int, int]] = field(default_factory=list)
    lambda_bits: int = 64
    tx_interval: int = 10
    block_reward: int = 0
    retarget_target: float = 1.0
    liveness_window: Optional[int] = None
    log_file: Optional[str] = None

    def resolve(self) -> 'ScenarioConfig':
        """Подставляет вычисляемые значения по умолчанию."""
        if self.q is None:
            self.q = 16 * self.k
        if self.n_byzantine is None:
            self.n_byzantine = 1 if self.adversary_budget > 0 else 0
        if self.attack.corruption_budget is None:
            self.attack.corruption_budget = self.adversary_budget
        return self

    # ------------------------------------------------------------ производные

    @property
    def honest_rate(self) -> float:
        """ϱ_H: вероятность хотя бы одного честного блока за шаг."""
        return honest_probability(self.total_budget, self.adversary_budget, self.rho)

    @property
    def adversary_rate(self) -> float:
        return adversary_probability(self.adversary_budget, self.rho)

    @property
    def total_rate(self) -> float:
        return honest_probability(self.total_budget, 0, self.rho)

    def liveness_u(self) -> int:
        if self.liveness_window is not None:
            return self.liveness_window
        rate = self.honest_rate
        return math.ceil(50 / rate) if rate > 0 else self.horizon

    def byzantine_ids(self) -> List[int]:
        count = self.n_byzantine or 0
        return list(range(self.n_processes - count, self.n_processes))

    def honest_ids(self) -> List[int]:
        return list(range(self.n_processes - (self.n_byzantine or 0)))

    def initial_distribution(self) -> Dict[int, int]:
        """Начальные бюджеты: явное распределение или равные доли R - R_A и R_A."""
        if self.distribution:
            return dict(sorted(self.distribution.items()))
        result: Dict[int, int] = {}
        result.update(_split(self.total_budget - self.adversary_budget, self.honest_ids()))
        result.update(_split(self.adversary_budget, self.byzantine_ids()))
        return result


def _split(amount: int, processes: List[int]) -> Dict[int, int]:
    if not processes:
        return {}
    share, remainder = divmod(amount, len(processes))
    return {p: share + (1 if index < remainder else 0) for index, p in enumerate(processes)}


# ---------------------------------------------------------------- разбор значений

def _parse_optional_int(value: str) -> Optional[int]:
    return int(value) if value.strip() else None


def _parse_optional_str(value: str) -> Optional[str]:
    return value.strip() or None


def _parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f"ожидалось логическое значение, получено {value!r}")


def _items(value: str) -> List[str]:
    return [item.strip() for item in value.split(',') if item.strip()]


def parse_seeds(value: str) -> List[int]:
    """Список зёрен: '1,2,5' или диапазон '0..9' (включительно)."""
    text = value.strip()
    if '..' in text and ',' not in text:
        start, end = text.split('..', 1)
        first, last = int(start), int(end)
        if last < first:
            raise ValueError(f"пустой диапазон зёрен {text}")
        return list(range(first, last + 1))
    return [int(item) for item in _items(text)]


def _parse_schedule(value: str, width: int) -> List[Tuple[int, ...]]:
    result = []
    for item in _items(value):
        parts = tuple(int(part) for part in item.split(':'))
        if len(parts) != width:
            raise ValueError(f"элемент {item!r} должен содержать {width} чисел через ':'")
        result.append(parts)
    return result


def _parse_distribution(value: str) -> Dict[int, int]:
    return {process: budget for process, budget in _parse_schedule(value, 2)}


_SCENARIO_PARSERS: Dict[str, Callable[[str], Any]] = {
    'allocator': str.strip,
    'n_processes': int,
    'total_budget': int,
    'adversary_budget': int,
    'rho': float,
    'delta': int,
    'k': int,
    'q': _parse_optional_int,
    'steps_per_slot': int,
    'horizon': int,
    'seeds': parse_seeds,
    'delay_model': str.strip,
    'retarget_window': _parse_optional_int,
    'block_size_cap': _parse_optional_int,
    'n_byzantine': _parse_optional_int,
    'distribution': _parse_distribution,
    'budget_steps': lambda value: _parse_schedule(value, 3),
    'lambda_bits': int,
    'tx_interval': int,
    'block_reward': int,
    'retarget_target': float,
    'liveness_window': _parse_optional_int,
    'log_file': _parse_optional_str,
}

_ATTACK_PARSERS: Dict[str, Callable[[str], Any]] = {
    'strategy': str.strip,
    'fork_height': int,
    'corruption_budget': _parse_optional_int,
    'release_schedule': lambda value: _parse_schedule(value, 2),
    'patience': int,
    'start_step': int,
    'tips': int,
    'nas_mode': str.strip,
    'observer_join': _parse_bool,
}


def _read_section(section: configparser.SectionProxy, parsers: Dict[str, Callable[[str], Any]],
                  prefix: str) -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for key, raw in section.items():
        if key == 'version':
            continue
        parser = parsers.get(key)
        if parser is None:
            raise ConfigError(f"{prefix}.{key}: неизвестный параметр")
        try:
            values[key] = parser(raw)
        except ValueError as e:
            raise ConfigError(f"{prefix}.{key}: некорректное значение {raw!r} ({e})")
    return values


def parse_config(text: str) -> ScenarioConfig:
    """
    Разбирает текст INI-сценария.

    Args:
        text: Содержимое файла с секциями [scenario] и [attack].

    Returns:
        Проверенная конфигурация сценария.

    Raises:
        ConfigError: Если конфигурация невалидна.
    """
    parser = configparser.ConfigParser(default_section='__defaults__', interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"scenario: ошибка синтаксиса INI: {e}")
    if not parser.has_section('scenario'):
        raise ConfigError("scenario: отсутствует секция [scenario]")

    scenario = parser['scenario']
    version = scenario.get('version')
    if version is None:
        raise ConfigError("scenario.version: отсутствует обязательный параметр")
    if version.strip() != str(CONFIG_VERSION):
        raise ConfigError(f"scenario.version: неподдерживаемая версия {version}")

    values = _read_section(scenario, _SCENARIO_PARSERS, 'scenario')
    attack_values = {}
    if parser.has_section('attack'):
        attack_values = _read_section(parser['attack'], _ATTACK_PARSERS, 'attack')
    config = ScenarioConfig(**values, attack=AttackConfig(**attack_values)).resolve()
    validate_config(config)
    return config


def load_config(config_path: str = 'config.ini') -> ScenarioConfig:
    """
    Загружает и валидирует конфигурацию из файла.

    Args:
        config_path: Путь к конфигурационному файлу.

    Returns:
        Конфигурация сценария.

    Raises:
        ConfigError: Если файл не найден или конфигурация невалидна.
    """
    path = Path(config_path)
    if not path.is_file():
        raise ConfigError(f"config: конфигурационный файл {config_path} не найден")
    config = parse_config(path.read_text(encoding='utf-8'))
    logger.info(f"Конфигурация {config_path} успешно загружена")
    return config


# -------------------------------------------------------------- сериализация

def _format_value(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, dict):
        return ', '.join(f"{key}:{item}" for key, item in value.items())
    if isinstance(value, list):
        if value and isinstance(value[0], tuple):
            return ', '.join(':'.join(str(part) for part in item) for item in value)
        return ', '.join(str(item) for item in value)
    return str(value)


def dump_config(config: ScenarioConfig) -> str:
    """Сериализует конфигурацию в INI; parse_config(dump_config(cfg)) == cfg."""
    lines = ['[scenario]', f'version = {CONFIG_VERSION}']
    for item in fields(ScenarioConfig):
        if item.name == 'attack':
            continue
        lines.append(f"{item.name} = {_format_value(getattr(config, item.name))}")
    lines.append('')
    lines.append('[attack]')
    for item in fields(AttackConfig):
        lines.append(f"{item.name} = {_format_value(getattr(config.attack, item.name))}")
    lines.append('')
    return '\n'.join(lines)


# ---------------------------------------------------------------- валидация

def _require(condition: bool, field_name: str, message: str) -> None:
    if not condition:
        raise ConfigError(f"{field_name}: {message}")


def validate_config(config: ScenarioConfig) -> None:
    """
    Проверяет согласованность параметров сценария.

    Raises:
        ConfigError: С именем первого нарушающего поля.
    """
    config.resolve()
    attack = config.attack
    _require(config.allocator in ALLOCATORS, 'scenario.allocator',
             f"ожидалось одно из {ALLOCATORS}, получено {config.allocator!r}")
    _require(config.delay_model in DELAY_MODELS, 'scenario.delay_model',
             f"ожидалось одно из {DELAY_MODELS}, получено {config.delay_model!r}")
    _require(config.n_processes >= 1, 'scenario.n_processes', "должно быть не меньше 1")
    _require(config.total_budget >= 1, 'scenario.total_budget', "должно быть не меньше 1")
    _require(0 <= config.adversary_budget <= config.total_budget, 'scenario.adversary_budget',
             "требуется 0 ≤ R_A ≤ R")
    _require(0.0 < config.rho < 1.0, 'scenario.rho', "ϱ должна лежать в (0, 1)")
    _require(config.delta >= 1, 'scenario.delta', "Δ должна быть не меньше 1")
    _require(config.k >= 1, 'scenario.k', "k должно быть не меньше 1")
    _require(config.q >= 1, 'scenario.q', "q должно быть не меньше 1")
    _require(config.steps_per_slot >= 1, 'scenario.steps_per_slot', "должно быть не меньше 1")
    _require(config.horizon >= config.q, 'scenario.horizon', "горизонт должен быть не меньше q")
    _require(bool(config.seeds), 'scenario.seeds', "список зёрен пуст")
    _require(0 <= config.n_byzantine <= config.n_processes, 'scenario.n_byzantine',
             "должно лежать в [0, n_processes]")
    _require(config.lambda_bits % 8 == 0 and 16 <= config.lambda_bits <= 512,
             'scenario.lambda_bits', "должно быть кратно 8 и лежать в [16, 512]")
    _require(config.tx_interval >= 0, 'scenario.tx_interval', "не может быть отрицательным")
    _require(config.block_reward >= 0, 'scenario.block_reward', "не может быть отрицательным")
    _require(config.retarget_target > 0, 'scenario.retarget_target', "должно быть положительным")
    _require(config.retarget_window is None or config.retarget_window >= 1,
             'scenario.retarget_window', "должно быть не меньше 1")
    _require(config.block_size_cap is None or config.block_size_cap >= 0,
             'scenario.block_size_cap', "не может быть отрицательным")
    _require(config.liveness_window is None or config.liveness_window >= 0,
             'scenario.liveness_window', "не может быть отрицательным")
    for process, budget in config.distribution.items():
        _require(0 <= process < config.n_processes and budget >= 0, 'scenario.distribution',
                 f"некорректный элемент {process}:{budget}")
    for step, process, budget in config.budget_steps:
        _require(step >= 0 and process >= 0 and budget >= 0, 'scenario.budget_steps',
                 f"некорректный элемент {step}:{process}:{budget}")

    _require(attack.strategy in STRATEGIES, 'attack.strategy',
             f"ожидалось одно из {STRATEGIES}, получено {attack.strategy!r}")
    _require(attack.nas_mode in NAS_MODES, 'attack.nas_mode',
             f"ожидалось одно из {NAS_MODES}, получено {attack.nas_mode!r}")
    _require(attack.patience >= 0, 'attack.patience', "не может быть отрицательным")
    _require(attack.start_step >= 0, 'attack.start_step', "не может быть отрицательным")
    _require(0 <= attack.corruption_budget <= config.total_budget, 'attack.corruption_budget',
             "должно лежать в [0, R]")
    for step, process in attack.release_schedule:
        _require(step >= 0 and 0 <= process < config.n_processes, 'attack.release_schedule',
                 f"некорректный элемент {step}:{process}")
    if attack.strategy != 'none':
        _require(config.n_byzantine >= 1, 'scenario.n_byzantine',
                 "стратегии противника нужен хотя бы один византийский процесс")
    if attack.strategy == 'long_range':
        _require(attack.fork_height >= 1, 'attack.fork_height', "должно быть не меньше 1")
        _require(bool(attack.release_schedule), 'attack.release_schedule',
                 "атаке дальнего действия нужно расписание освобождения ресурсов")
    if attack.strategy == 'nothing_at_stake':
        _require(attack.tips >= 2, 'attack.tips', "нужно не меньше двух вершин")
    if attack.strategy == 'resource_bleeding':
        _require(config.allocator in ('pos', 'space'), 'attack.strategy',
                 "сжигаемый ресурс нельзя использовать дважды: нужен pos или space")
        _require(config.retarget_window is not None, 'scenario.retarget_window',
                 "атаке истощения нужен пересчёт вероятности лидера")
