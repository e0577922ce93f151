import math
from typing import TYPE_CHECKING, List, Optional

from config.settings import AttackConfig
from core.blocks import Block, Transaction
from core.chain import Chain
from utils.logger import setup_logger
from .base import Adversary
from .outcome import AttackOutcome

if TYPE_CHECKING:
    from network.engine import Simulation

logger = setup_logger(__name__)


class NothingAtStakeAttack(Adversary):
    """Коммит одного ресурса сразу на несколько вершин.

    Режимы:
        live: все известные вершины не короче самой длинной минус один блок,
               выигрыши публикуются;
        deep: m ветвей от генезиса, измерение начинается, когда каждая ветвь
               ушла за горизонт отсечения префикса;
        shallow: m соседних вершин с общим префиксом, обновляются после выигрыша.

    Сжигаемый бюджет делится поровну между вершинами, многоразовый
    коммитится на каждую вершину целиком. За слот засчитывается выигрыш,
    если хотя бы одна вершина дала доказательство.
    """

    name = 'nothing_at_stake'

    def __init__(self, engine: 'Simulation', attack: AttackConfig):
        super().__init__(engine, attack)
        self.mode = attack.nas_mode
        self.tips: List[Chain] = []
        self.branches: List[Chain] = []
        self.anchor: Optional[Chain] = None
        self.measuring = False

    # ------------------------------------------------------------ вершины

    def _payload(self, process: int, base: Chain, index: int, t: int) -> Transaction:
        nonce = self.view.validator.ledger(base).nonces.get(process, -1) + 1
        return Transaction.payload_tx(process, f"branch-{index}-{t}".encode(), nonce)

    def _commit_all(self, engine: 'Simulation', t: int, bases: List[Chain],
                    variants: int = 1) -> List[List[Block]]:
        """Коммиты всех процессов противника на каждую вершину.

        Для каждой вершины возвращает блоки первого выигравшего процесса;
        при variants > 1 блоки различаются полезной нагрузкой.
        """
        ways = len(bases) * variants
        budgets = self.budgets(engine, t, bases[0], ways) if bases else {}
        wins: List[List[Block]] = []
        for position, base in enumerate(bases):
            produced: List[Block] = []
            for process, shares in budgets.items():
                for variant in range(variants):
                    budget = shares[position * variants + variant]
                    txs = (self._payload(process, base, variant, t),) if variants > 1 else ()
                    block = self.try_extend(engine, t, base, process, budget, txs)
                    if block is not None:
                        produced.append(block)
                if produced:
                    break
            wins.append(produced)
        return wins

    def _live_tips(self) -> List[Chain]:
        longest = self.view.longest()
        tips = [tip for tip in self.view.tips() if tip.height >= longest.height - 1]
        tips.sort(key=lambda chain: (-chain.height, chain.digest))
        return tips[:max(self.attack.tips, 1)]

    def _pruned(self, engine: 'Simulation', tip: Chain, slot: int) -> bool:
        prefix = getattr(engine.allocator, 'prefix', None)
        return prefix is None or prefix(tip, slot).digest == tip.digest

    # --------------------------------------------------------------- ход

    def act(self, engine: 'Simulation', t: int) -> None:
        if t % engine.config.steps_per_slot:
            return
        slot = t // engine.config.steps_per_slot
        if self.mode == 'live':
            self._act_live(engine, t)
        elif not self.tips:
            self._bootstrap(engine, t)
        elif self.mode == 'deep' and not self.measuring:
            self.measuring = all(self._pruned(engine, tip, slot) for tip in self.tips)
            if self.measuring:
                logger.info(f"Этап 2: ветви ушли за горизонт отсечения на слоте {slot}")
        if self.measuring and self.mode != 'live':
            self._measure(engine, t)
        if self.give_up_due(t):
            self.stop(t)

    def _bootstrap(self, engine: 'Simulation', t: int) -> None:
        # Ветви копятся, пока их не станет m; у лотерейных распределителей
        # один выигрыш сразу даёт все m вариантов блока
        base = engine.genesis if self.mode == 'deep' else (self.anchor or self.view.longest())
        missing = self.attack.tips - len(self.branches)
        for block in self._commit_all(engine, t, [base], variants=missing)[0][:missing]:
            self.branches.append(self.adopt(engine, base, block, t))
        if len(self.branches) >= self.attack.tips:
            self.tips, self.branches = self.branches, []
            self.measuring = self.mode == 'shallow'
            logger.info(f"Этап 1: {len(self.tips)} соседних вершин над высотой {base.height} на шаге {t}")

    def _measure(self, engine: 'Simulation', t: int) -> None:
        wins = self._commit_all(engine, t, self.tips)
        self._count(any(wins))
        if self.mode == 'shallow':
            for tip, produced in zip(self.tips, wins):
                if produced:
                    # Обновление: новые соседние вершины над выигравшей
                    self.anchor = self.adopt(engine, tip, produced[0], t)
                    self.tips = []
                    self.measuring = False
                    break

    def _act_live(self, engine: 'Simulation', t: int) -> None:
        tips = self._live_tips()
        if not tips:
            return
        wins = self._commit_all(engine, t, tips)
        self._count(any(wins))
        for tip, produced in zip(tips, wins):
            if produced:
                chain = self.adopt(engine, tip, produced[0], t)
                self.publish(engine, chain, t)

    def _count(self, won: bool) -> None:
        self.outcome.measured_slots += 1
        self.outcome.win_slots += int(won)

    def finish(self, engine: 'Simulation') -> AttackOutcome:
        outcome = super().finish(engine)
        n = outcome.measured_slots
        baseline = engine.config.adversary_rate
        if n:
            margin = 3 * math.sqrt(max(baseline * (1 - baseline), 1e-12) / n)
            outcome.success = outcome.win_frequency > baseline + margin
        logger.info(f"Этап 3: выигрыш хотя бы на одной вершине в {outcome.win_slots} из {n} слотов "
                    f"(частота {outcome.win_frequency:.4f}, одна вершина {baseline:.4f})")
        return outcome


def run_nothing_at_stake(engine: 'Simulation', attack: AttackConfig) -> AttackOutcome:
    """Выполняет прогон с атакой «ничего на кону» и возвращает её итог."""
    adversary = NothingAtStakeAttack(engine, attack)
    engine.attach(adversary)
    engine.run()
    return adversary.outcome
