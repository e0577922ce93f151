import math
from typing import TYPE_CHECKING, Dict, List, Optional

from config.settings import AttackConfig
from core.blocks import Transaction, TxKind
from core.chain import Chain
from utils.logger import setup_logger
from .base import Adversary
from .outcome import AttackOutcome
from .shifting import select_majority

if TYPE_CHECKING:
    from network.engine import Simulation

logger = setup_logger(__name__)

_OMITTED = (TxKind.TRANSFER, TxKind.RELEASE)


class LongRangeAttack(Adversary):
    """Атака дальнего действия.

    Противник ждёт смещения ресурса между высотой h₀ и текущей высотой
    честной цепочки, подкупает 𝒫_maj, строит C* от C[:h₀], повторяя
    транзакции честной цепочки без переводов и освобождений 𝒫_maj,
    и публикует C*, как только она строго длиннее C_local всех корректных
    процессов. После публикации может присоединиться новый наблюдатель.
    """

    name = 'long_range'

    def __init__(self, engine: 'Simulation', attack: AttackConfig):
        super().__init__(engine, attack)
        self.majority: List[int] = []
        self.fork: Optional[Chain] = None
        self.queue: Dict[Transaction, None] = {}
        self.measure = 'space' if engine.config.allocator == 'space' else 'stake'
        self.settle_until: Optional[int] = None

    # ------------------------------------------------------------ этапы

    def act(self, engine: 'Simulation', t: int) -> None:
        if self.settle_until is not None:
            if t >= self.settle_until:
                self.stop(t)
            return
        if self.fork is None:
            self._watch(engine, t)
        if self.fork is not None:
            self._grow(engine, t)
        if self.fork is None and self.give_up_due(t):
            self.stop(t, timed_out=True)

    def _watch(self, engine: 'Simulation', t: int) -> None:
        honest = self.honest_tip(engine)
        h0, h1 = self.attack.fork_height, len(honest)
        if h1 <= h0:
            return
        config = engine.config
        majority = select_majority(honest, h0, h1, config.total_budget, config.adversary_budget,
                                   engine.validator, self.measure, exclude=tuple(self.members))
        if majority is None:
            return
        logger.info(f"Этап 1: шаг {t}, смещение ресурса между высотами {h0} и {h1}, "
                    f"𝒫_maj = {majority}")
        self.majority = self.corrupt(engine, majority, t, honest)
        self.fork = honest[:h0]
        self.outcome.fork_height = h0
        for block in honest.blocks[h0:]:
            for tx in block.txs:
                self._enqueue(tx)

    def _enqueue(self, tx: Transaction) -> None:
        if tx.sender in self.majority and tx.kind in _OMITTED:
            return
        self.queue.setdefault(tx, None)

    def _grow(self, engine: 'Simulation', t: int) -> None:
        for tx in self.seen_txs:
            self._enqueue(tx)
        self.seen_txs.clear()
        txs = engine.validator.select_txs(self.fork, self.queue, engine.config.block_size_cap)
        extended = self.mine(engine, t, self.fork, txs)
        if extended is not None:
            self.fork = extended
            self.outcome.fork_length = extended.height - self.outcome.fork_height + 1
            for tx in txs:
                self.queue.pop(tx, None)
        honest = self.honest_tip(engine)
        if len(self.fork) > len(honest):
            sent = self.publish(engine, self.fork, t)
            self.outcome.success = True
            self.outcome.overtake_step = t
            logger.info(f"Этап 2: C* длины {len(self.fork)} опубликована на шаге {t} "
                        f"({sent} блоков), честная длина {len(honest)}")
            if self.attack.observer_join:
                engine.schedule_join()
            config = engine.config
            rate = max(config.honest_rate, 1e-9)
            self.settle_until = t + 4 * config.delta + 8 * math.ceil((config.k + 2) / rate)
        elif self.give_up_due(t):
            self.stop(t, timed_out=True)


def run_long_range(engine: 'Simulation', attack: AttackConfig) -> AttackOutcome:
    """Выполняет прогон с атакой дальнего действия и возвращает её итог."""
    adversary = LongRangeAttack(engine, attack)
    engine.attach(adversary)
    engine.run()
    return adversary.outcome
