from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Set

from allocator.commitments import CommitRequest
from analysis.metrics import burn_cost, reuse_cost
from config.settings import AttackConfig
from core.blocks import Block, Transaction
from core.chain import Chain, ChainState, common_ancestor
from core.oracle import Digest
from core.signatures import SigningKey
from protocol.messages import Message, MessageKind
from protocol.view import ChainView
from utils.exceptions import SimulationError
from utils.logger import setup_logger
from .outcome import AttackOutcome

if TYPE_CHECKING:
    from network.engine import Simulation

logger = setup_logger(__name__)


class Adversary:
    """Единый контроллер византийских процессов.

    Получает доказательства только через тот же распределитель, что и
    корректные процессы, хранит собственное представление цепочек и
    решает, что и когда публиковать. Ходит после корректных процессов.
    """

    name = 'passive'

    def __init__(self, engine: 'Simulation', attack: AttackConfig):
        self.attack = attack
        self.members: List[int] = engine.config.byzantine_ids()
        self.keys: Dict[int, SigningKey] = {p: engine.registry.key_for(p) for p in self.members}
        genesis = engine.genesis
        self.view = ChainView(engine.validator, engine.allocator,
                              {genesis.digest: genesis.tip}, {genesis.digest: genesis})
        self.rng = engine.adversary_rng
        self.budget = attack.corruption_budget or 0
        self.spent = 0
        self.finished = False
        self.published: Set[Digest] = set()
        self.seen_txs: Dict[Transaction, None] = {}
        self.outcome = AttackOutcome(strategy=self.name)
        self._answered: Set[Digest] = set()

    # ---------------------------------------------------------- входящие

    def on_step(self, engine: 'Simulation', t: int, due: Dict[int, list]) -> None:
        """Ход противника на шаге t: приём сообщений и действие стратегии."""
        seen: Set[int] = set()
        for process in self.members:
            for envelope in due.get(process, []):
                if id(envelope.message) in seen:
                    continue
                seen.add(id(envelope.message))
                self._receive(engine, envelope.message, t)
        if t >= self.attack.start_step and not self.finished:
            if self.outcome.start_step is None:
                self.outcome.start_step = t
            self.act(engine, t)

    def _receive(self, engine: 'Simulation', message: Message, t: int) -> None:
        if message.kind == MessageKind.OP:
            self.seen_txs[message.tx] = None
        elif message.kind == MessageKind.BLK:
            received = self.view.receive(message.block)
            if received.request and self.members:
                engine.broadcast(Message.request(message.block), self.members[0], t)
        elif message.kind == MessageKind.REQUEST:
            self._answer(engine, message.block, t)

    def _answer(self, engine: 'Simulation', block: Block, t: int) -> None:
        # Противник переотправляет только уже опубликованные собственные блоки
        digest = self.view.digest_of(block)
        chain = self.view.chains.get(digest)
        if chain is None or digest not in self.published or digest in self._answered:
            return
        self._answered.add(digest)
        for node in chain.nodes()[1:]:
            if node.digest in self.published:
                engine.broadcast(Message.blk(node.tip), node.tip.producer, t)

    def act(self, engine: 'Simulation', t: int) -> None:
        """Действие стратегии; пассивный противник ничего не делает."""

    # ------------------------------------------------------------- ресурсы

    def corrupt(self, engine: 'Simulation', processes: Iterable[int], t: int,
                chain: Optional[Chain] = None) -> List[int]:
        """Подкупает процессы, пока хватает бюджета R_A.

        Стоимость подкупа: Alloc(p, t) на момент подкупа.
        """
        taken = []
        for process in processes:
            if process in self.keys:
                continue
            cost = engine.alloc(process, t, chain)
            if self.spent + cost > self.budget:
                logger.warning(f"Шаг {t}: бюджета подкупа не хватает для процесса {process}")
                continue
            self.spent += cost
            self.keys[process] = engine.corrupt(process, t, cost)
            self.members.append(process)
            taken.append(process)
        self.outcome.corrupted.extend(taken)
        self.outcome.corruption_spent = self.spent
        return taken

    def budgets(self, engine: 'Simulation', t: int, chain: Chain, ways: int = 1) -> Dict[int, List[Optional[int]]]:
        """Бюджеты каждого процесса противника на ways коммитов в шаге t.

        Сжигаемый ресурс делится поровну, так что Σ r_i <= Alloc(p, t);
        многоразовый коммитится целиком в каждый коммит, виртуальный: ⊥.
        """
        result: Dict[int, List[Optional[int]]] = {}
        for process in sorted(self.members):
            if engine.kind.virtual:
                result[process] = [None] * ways
                continue
            available = engine.alloc(process, t, chain)
            if engine.kind.burnable:
                share, remainder = divmod(available, ways)
                result[process] = [share + (1 if i < remainder else 0) for i in range(ways)]
            else:
                result[process] = [available] * ways
        return result

    # ------------------------------------------------------------- майнинг

    def try_extend(self, engine: 'Simulation', t: int, chain: Chain, process: int,
                   budget: Optional[int], txs: Iterable[Transaction] = ()) -> Optional[Block]:
        """Один RA-commit от имени process на вершину chain; при успехе подписанный блок."""
        if not engine.kind.virtual and not budget:
            return None
        slot = t // engine.config.steps_per_slot
        candidate = Block(parent=chain.digest, txs=tuple(txs), producer=process, slot=slot)
        response = engine.commit(CommitRequest(process, ChainState(chain, candidate), budget, t),
                                 byzantine=True)
        if not response.success:
            return None
        return self.sign(candidate, response.proof)

    def sign(self, candidate: Block, proof) -> Block:
        unsigned = candidate.with_commitment(proof, None)
        key = self.keys.get(candidate.producer)
        if key is None:
            raise SimulationError(f"У противника нет ключа процесса {candidate.producer}")
        return unsigned.with_commitment(proof, key.sign(unsigned.signing_bytes))

    def adopt(self, engine: 'Simulation', chain: Chain, block: Block, t: int) -> Chain:
        """Сохраняет собственный блок в представлении противника."""
        extended = self.view.add(ChainState(chain, block))
        engine.record_block(block, True, t)
        return extended

    def mine(self, engine: 'Simulation', t: int, chain: Chain,
             txs: Iterable[Transaction] = ()) -> Optional[Chain]:
        """Все процессы противника коммитят на одну вершину; первый выигрыш продлевает её."""
        txs = tuple(txs)
        for process, budgets in self.budgets(engine, t, chain).items():
            block = self.try_extend(engine, t, chain, process, budgets[0], txs)
            if block is not None:
                return self.adopt(engine, chain, block, t)
        return None

    def publish(self, engine: 'Simulation', chain: Chain, t: int) -> int:
        """Рассылает все ещё не опубликованные блоки цепочки по порядку."""
        sent = 0
        for node in chain.nodes()[1:]:
            if node.digest in self.published:
                continue
            if engine.trace.provenance.get(node.digest) is None or \
                    not engine.trace.provenance[node.digest].byzantine:
                # Честные блоки уже разосланы их производителями
                self.published.add(node.digest)
                continue
            self.published.add(node.digest)
            engine.broadcast(Message.blk(node.tip), node.tip.producer, t)
            sent += 1
        self.outcome.published_blocks += sent
        return sent

    def honest_tip(self, engine: 'Simulation') -> Chain:
        return engine.longest_correct_chain()

    def give_up_due(self, t: int) -> bool:
        patience = self.attack.patience
        start = self.outcome.start_step
        return patience > 0 and start is not None and t - start >= patience

    def stop(self, t: int, timed_out: bool = False) -> None:
        self.finished = True
        self.outcome.end_step = t
        self.outcome.timed_out = timed_out
        if timed_out:
            logger.warning(f"Шаг {t}: атака {self.name} не удалась за отведённое время")

    # ------------------------------------------------------------- итог

    def finish(self, engine: 'Simulation') -> AttackOutcome:
        """Заполняет итоговые поля: затраты на продление и устойчивость форка."""
        outcome = self.outcome
        if outcome.end_step is None:
            outcome.end_step = engine.clock - 1
        if outcome.start_step is not None and outcome.end_step >= outcome.start_step:
            window = (outcome.start_step, outcome.end_step)
            own = [p for p in self.members if p not in engine.trace.corrupted]
            outcome.cost_burn = sum(burn_cost(engine.trace, p, *window) for p in own)
            outcome.cost_reuse = sum(reuse_cost(engine.trace, p, *window) for p in own)
        honest = self.honest_tip(engine)
        persistence = 0
        for tip in self.view.tips():
            if tip.digest in self.published or tip.height == 0:
                continue
            depth = tip.height - common_ancestor(tip, honest).height
            persistence = max(persistence, depth)
        outcome.fork_persistence = max(outcome.fork_persistence, persistence)
        return outcome
