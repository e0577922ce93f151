from typing import TYPE_CHECKING, Optional

from config.settings import AttackConfig
from .base import Adversary
from .bleeding import ResourceBleedingAttack, run_resource_bleeding
from .long_range import LongRangeAttack, run_long_range
from .nothing_at_stake import NothingAtStakeAttack, run_nothing_at_stake
from .outcome import AttackOutcome
from .private import PrivateAttack, run_private_attack
from .shifting import detect_shifting_event, select_majority

if TYPE_CHECKING:
    from network.engine import Simulation

STRATEGY_CLASSES = {
    'private': PrivateAttack,
    'long_range': LongRangeAttack,
    'nothing_at_stake': NothingAtStakeAttack,
    'resource_bleeding': ResourceBleedingAttack,
}


def build_adversary(engine: 'Simulation', attack: AttackConfig) -> Optional[Adversary]:
    """Создаёт противника по стратегии; для 'none' византийские процессы
    исполняют честный код и противник не нужен."""
    if attack.strategy == 'none':
        return None
    strategy = STRATEGY_CLASSES.get(attack.strategy)
    if strategy is None:
        raise ValueError(f"Неизвестная стратегия: {attack.strategy}")
    return strategy(engine, attack)


__all__ = [
    'Adversary', 'AttackOutcome', 'PrivateAttack', 'LongRangeAttack', 'NothingAtStakeAttack',
    'ResourceBleedingAttack', 'STRATEGY_CLASSES', 'build_adversary', 'detect_shifting_event',
    'select_majority', 'run_private_attack', 'run_long_range', 'run_nothing_at_stake',
    'run_resource_bleeding',
]
