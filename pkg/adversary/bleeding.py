from typing import TYPE_CHECKING, Optional, Tuple

from allocator.resources import distribution_of
from config.settings import AttackConfig
from core.chain import Chain
from utils.logger import setup_logger
from .base import Adversary
from .outcome import AttackOutcome

if TYPE_CHECKING:
    from network.engine import Simulation

logger = setup_logger(__name__)


class ResourceBleedingAttack(Adversary):
    """Истощение ресурса через пересчёт вероятности лидера.

    Противник держит полный многоразовый ресурс на честной цепочке и
    публикует там не больше одного блока за окно пересчёта, оставаясь
    активным. Параллельно он растит приватный форк: после первой границы
    окна неактивные честные процессы выпадают из распределения форка,
    и вероятность выбора противника на форке растёт.
    """

    name = 'resource_bleeding'

    def __init__(self, engine: 'Simulation', attack: AttackConfig):
        super().__init__(engine, attack)
        self.window = engine.config.retarget_window
        self.fork: Optional[Chain] = None
        self.last_window = -1
        self.start: Tuple[int, int, int] = (0, 0, 0)
        self.boundary: Optional[int] = None
        self.at_boundary: Optional[Tuple[int, int]] = None

    def act(self, engine: 'Simulation', t: int) -> None:
        slot = t // engine.config.steps_per_slot
        honest = self.honest_tip(engine)
        if self.fork is None:
            self.fork = honest
            self.outcome.fork_height = honest.height
            self.start = (slot, honest.height, honest.height)
            # Первое окно, предыдущее окно которого целиком лежит после начала форка
            self.boundary = (-(-slot // self.window) + 1) * self.window
            self.last_window = slot // self.window
            logger.info(f"Этап 1: приватный форк от высоты {honest.height}, "
                        f"граница пересчёта на слоте {self.boundary}")

        window = slot // self.window
        if window != self.last_window:
            block_chain = self.mine(engine, t, honest)
            if block_chain is not None:
                self.publish(engine, block_chain, t)
                self.last_window = window

        extended = self.mine(engine, t, self.fork)
        if extended is not None:
            self.fork = extended
            self.outcome.fork_length = extended.height - self.outcome.fork_height

        if self.at_boundary is None and slot >= self.boundary:
            self.at_boundary = (self.fork.height, self.honest_tip(engine).height)

        honest = self.honest_tip(engine)
        if len(self.fork) > len(honest):
            self.publish(engine, self.fork, t)
            self.outcome.success = True
            self.outcome.overtake_step = t
            logger.info(f"Этап 2: форк длины {len(self.fork)} обогнал честную цепочку на шаге {t}")
            self.stop(t)
        elif self.give_up_due(t):
            self.stop(t, timed_out=True)

    def _visible_resource(self, engine: 'Simulation', chain: Chain, slot: int) -> int:
        """Ресурс производителей последнего полного окна цепочки."""
        retarget = getattr(engine.allocator, 'retarget', None)
        measure = getattr(engine.allocator, 'measure', 'stake')
        active = retarget.active_producers(chain, slot) if retarget is not None else None
        dist = distribution_of(chain, engine.validator, measure)
        return dist.subtotal(active) if active is not None else dist.total()

    def finish(self, engine: 'Simulation') -> AttackOutcome:
        outcome = super().finish(engine)
        if self.fork is None:
            return outcome
        end_slot = outcome.end_step // engine.config.steps_per_slot
        start_slot, fork_start, honest_start = self.start
        honest = self.honest_tip(engine)
        if self.at_boundary is not None and self.boundary is not None:
            fork_mid, honest_mid = self.at_boundary
            before = max(self.boundary - start_slot, 1)
            after = max(end_slot - self.boundary, 1)
            outcome.fork_growth_before = (fork_mid - fork_start) / before
            outcome.honest_growth_before = (honest_mid - honest_start) / before
            outcome.fork_growth_after = (self.fork.height - fork_mid) / after
            outcome.honest_growth_after = (honest.height - honest_mid) / after
        outcome.fork_resource = self._visible_resource(engine, self.fork, end_slot)
        outcome.honest_resource = self._visible_resource(engine, honest, end_slot)
        outcome.detectable = outcome.fork_resource < outcome.honest_resource
        logger.info(f"Этап 3: рост форка {outcome.fork_growth_before:.3f} → {outcome.fork_growth_after:.3f}, "
                    f"видимый ресурс форка {outcome.fork_resource} против {outcome.honest_resource}")
        return outcome


def run_resource_bleeding(engine: 'Simulation', attack: AttackConfig) -> AttackOutcome:
    """Выполняет прогон с атакой истощения ресурса и возвращает её итог."""
    adversary = ResourceBleedingAttack(engine, attack)
    engine.attach(adversary)
    engine.run()
    return adversary.outcome
