from dataclasses import replace
from typing import Iterable, List, Optional, Tuple

from allocator.base import ResourceAllocator
from allocator.commitments import AllocatorResponse, CommitRequest
from core.blocks import Block, Transaction
from core.chain import Chain, ChainState, is_prefix, truncate
from core.signatures import SigningKey
from core.validation import ChainValidator
from utils.logger import setup_logger
from .messages import Message, MessageKind
from .state import ProcessState
from .view import ChainView

logger = setup_logger(__name__)


class Process:
    """Корректный процесс: рассылка транзакций, проверка блоков, правило
    самой длинной цепочки, Extend и упорядоченная доставка.

    Обработчики возвращают исходящие сообщения; их рассылает движок.
    """

    def __init__(self, process: int, genesis: Chain, validator: ChainValidator,
                 allocator: ResourceAllocator, key: SigningKey, k: int,
                 block_size_cap: Optional[int] = None, byzantine: bool = False,
                 joined_at: int = 0):
        """Инициализация процесса.

        Args:
            process: Идентификатор процесса
            genesis: Цепочка [B₀]
            validator: Предикаты валидности прогона
            allocator: Распределитель ресурсов
            key: Ключ подписи этого процесса
            k: Параметр общего префикса
            block_size_cap: Предельное число транзакций в блоке
            byzantine: Процесс под контролем противника
            joined_at: Шаг, на котором процесс присоединился
        """
        self.id = process
        self.state = ProcessState.initial(process, genesis, k, byzantine)
        self.validator = validator
        self.allocator = allocator
        self.key = key
        self.block_size_cap = block_size_cap
        self.joined_at = joined_at
        self.view = ChainView(validator, allocator, self.state.blocks, self.state.chains)
        self.burnable = allocator.kind.burnable
        self.virtual = allocator.kind.virtual
        self._next_nonce = validator.ledger(genesis).nonces.get(process, -1) + 1
        self._answered: set = set()
        # Extend нужен после принятия новой цепочки или неудачного коммита
        self.dirty = True
        self.retry = False

    # ------------------------------------------------------------------ бюджет

    def begin_step(self, alloc: int) -> None:
        """Начало активации: r_i = Alloc(p_i, t) для внешних ресурсов."""
        self.state.r_i = None if self.virtual else alloc

    @property
    def needs_extend(self) -> bool:
        return self.dirty or self.retry

    def next_nonce(self) -> int:
        nonce = self._next_nonce
        self._next_nonce += 1
        return nonce

    # ------------------------------------------------------------- транзакции

    def a_broadcast(self, tx: Transaction) -> Message:
        return Message.op(tx)

    def on_gossip_tx(self, tx: Transaction) -> None:
        if tx not in self.state.delivered_set:
            self.state.unordered[tx] = None

    # ------------------------------------------------------------------ блоки

    def receive(self, message: Message, step: int) -> List[Message]:
        """Разбирает входящее сообщение сети."""
        if message.kind == MessageKind.OP:
            self.on_gossip_tx(message.tx)
            return []
        if message.kind == MessageKind.BLK:
            return self.on_gossip_block(message.block, step)
        return self.on_gossip_request(message.block)

    def on_gossip_block(self, block: Block, step: int = 0) -> List[Message]:
        """Проверяет блок; для блока без известного родителя запрашивает родителей."""
        try:
            received = self.view.receive(block)
        except (AttributeError, TypeError) as e:
            logger.debug(f"Процесс {self.id}: некорректный блок отброшен: {e}")
            return []
        for chain in received.chains:
            self._consider(chain)
        if received.request:
            return [Message.request(block)]
        return []

    def on_gossip_request(self, block: Block) -> List[Message]:
        """Переотправляет все блоки цепочки, оканчивающейся запрошенным блоком."""
        digest = self.view.digest_of(block)
        chain = self.state.chains.get(digest)
        if chain is None or digest in self._answered:
            return []
        self._answered.add(digest)
        return [Message.blk(b) for b in chain.blocks[1:]]

    def on_is_committed(self, state: ChainState, committed: bool) -> bool:
        """RA-is-committed: при успехе блок сохраняется, более длинная цепочка принимается.

        Returns:
            True, если локальная цепочка сменилась.
        """
        if not committed:
            return False
        return self._consider(self.view.add(state))

    def _consider(self, chain: Chain) -> bool:
        # Строгое неравенство: цепочка равной длины не вытесняет текущую
        if len(chain) > len(self.state.c_local):
            self.state.c_local = chain
            self.dirty = True
            return True
        return False

    # ----------------------------------------------------------------- Extend

    def deliver_prefix(self, step: int) -> List[Transaction]:
        """a-deliver всех ещё не доставленных транзакций из C_local[:-k] по порядку."""
        state = self.state
        prefix = truncate(state.c_local, state.k)
        watermark = state.delivered_tip
        if watermark is not None and watermark.digest == prefix.digest:
            return []
        if watermark is not None and is_prefix(watermark, prefix):
            nodes = []
            node = prefix
            while node.height > watermark.height:
                nodes.append(node)
                node = node.parent
            nodes.reverse()
        else:
            # Начальное распределение генезиса не доставляется
            nodes = prefix.nodes()[1:]
        fresh = []
        for node in nodes:
            for tx in node.tip.txs:
                if tx not in state.delivered_set:
                    state.delivered_set.add(tx)
                    state.delivered.append(tx)
                    state.delivered_steps.append(step)
                    state.unordered.pop(tx, None)
                    fresh.append(tx)
        state.delivered_tip = prefix
        return fresh

    def extend(self, step: int, slot: int) -> CommitRequest:
        """Extend: доставка префикса, сборка B_com и RA-commit на вершину C_local."""
        state = self.state
        self.deliver_prefix(step)
        txs = self.validator.select_txs(state.c_local, state.unordered, self.block_size_cap)
        state.b_com = Block(parent=state.c_local.digest, txs=txs, producer=self.id, slot=slot)
        request = CommitRequest(self.id, ChainState(state.c_local, state.b_com), state.r_i, step)
        if self.burnable:
            state.r_i = 0
        self.dirty = False
        self.retry = False
        return request

    def on_assign(self, response: AllocatorResponse) -> List[Message]:
        """RA-assign: при успехе блок подписывается и рассылается, иначе повтор Extend."""
        state = self.state
        if self.burnable and response.returned_budget is not None:
            state.r_i = (state.r_i or 0) + response.returned_budget
        if response.proof is None:
            self.retry = True
            return []
        block = replace(response.state.block, proof=response.proof)
        block = block.with_commitment(response.proof, self.key.sign(block.signing_bytes))
        state.b_com = None
        return [Message.blk(block)]

    # --------------------------------------------------------------- доставка

    def delivered_sequence(self) -> Tuple[Transaction, ...]:
        return tuple(self.state.delivered)

    def delivery_log(self) -> List[Tuple[int, Transaction]]:
        return list(zip(self.state.delivered_steps, self.state.delivered))

    def pending_transactions(self) -> Iterable[Transaction]:
        return iter(self.state.unordered)

    def __repr__(self) -> str:
        return f"Process(id={self.id}, len={len(self.state.c_local)})"
