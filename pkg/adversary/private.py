from typing import TYPE_CHECKING, Optional

from config.settings import AttackConfig
from core.chain import Chain
from utils.logger import setup_logger
from .base import Adversary
from .outcome import AttackOutcome

if TYPE_CHECKING:
    from network.engine import Simulation

logger = setup_logger(__name__)


class PrivateAttack(Adversary):
    """Приватная цепочка: блоки удерживаются, честные блоки не принимаются.

    Форк начинается с C[:fork_height] самой длинной честной цепочки
    (при fork_height = 0 с её текущей вершины) и публикуется, как только
    становится строго длиннее C_local каждого корректного процесса, а точка
    форка уходит в честной цепочке на глубину k.
    """

    name = 'private'

    def __init__(self, engine: 'Simulation', attack: AttackConfig):
        super().__init__(engine, attack)
        self.fork: Optional[Chain] = None

    def act(self, engine: 'Simulation', t: int) -> None:
        honest = self.honest_tip(engine)
        if self.fork is None:
            height = self.attack.fork_height or len(honest)
            self.fork = honest[:min(height, len(honest))]
            self.outcome.fork_height = self.fork.height
            logger.info(f"Этап 1: приватный форк от высоты {self.fork.height} на шаге {t}")
        extended = self.mine(engine, t, self.fork)
        if extended is not None:
            self.fork = extended
            self.outcome.fork_length = extended.height - self.outcome.fork_height
        # Успех: откат блока глубиной не меньше k в честной цепочке
        confirmed = honest.height - self.outcome.fork_height >= engine.config.k
        if confirmed and len(self.fork) > len(honest):
            self.publish(engine, self.fork, t)
            self.outcome.success = True
            self.outcome.overtake_step = t
            logger.info(f"Этап 2: приватная цепочка длины {len(self.fork)} опубликована на шаге {t}")
            self.stop(t)
        elif self.give_up_due(t):
            self.stop(t, timed_out=True)


def run_private_attack(engine: 'Simulation', attack: AttackConfig) -> AttackOutcome:
    """Выполняет прогон с приватной атакой и возвращает её итог."""
    adversary = PrivateAttack(engine, attack)
    engine.attach(adversary)
    engine.run()
    return adversary.outcome
