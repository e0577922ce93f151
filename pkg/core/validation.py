from typing import Any, Callable, Dict, Iterable, List, Optional, Set, Tuple

from .blocks import Block, Transaction
from .chain import Chain, ChainState
from .ledger import LedgerState, genesis_ledger
from .oracle import Digest, HashOracle
from .signatures import SignatureRegistry
from utils.logger import setup_logger

logger = setup_logger(__name__)

# RA-validate(p, st, π)
RaValidate = Callable[[int, ChainState, Any], bool]


class ChainValidator:
    """Предикаты валидности одного прогона: ℙ(C, tx̄) и проверка цепочек.

    Хранит кеш балансов по дайджесту цепочки и множества уже проверенных
    цепочек отдельно для каждой функции RA-validate, поэтому проверка новой цепочки стоит столько, сколько новых
    блоков поверх уже проверенного префикса.
    """

    def __init__(self, oracle: HashOracle, registry: SignatureRegistry, genesis: Chain,
                 block_reward: int = 0):
        self.oracle = oracle
        self.registry = registry
        self.genesis = genesis
        self.block_reward = block_reward
        self._valid: Dict[RaValidate, Set[Digest]] = {}
        self._ledgers: Dict[Digest, LedgerState] = {genesis.digest: genesis_ledger(genesis.tip)}

    def _valid_for(self, ra_validate: RaValidate) -> Set[Digest]:
        return self._valid.setdefault(ra_validate, {self.genesis.digest})

    def record_valid(self, chain: Chain, ra_validate: RaValidate) -> None:
        """Отмечает цепочку проверенной относительно ra_validate (все блоки уже прошли проверку вызывающим)."""
        self._valid_for(ra_validate).add(chain.digest)

    def ledger(self, chain: Chain) -> LedgerState:
        """Балансы после применения всех блоков цепочки.

        Неприемлемые транзакции непроверенной цепочки пропускаются.
        """
        cached = self._ledgers.get(chain.digest)
        if cached is not None:
            return cached
        pending: List[Chain] = []
        node: Optional[Chain] = chain
        while node is not None and node.digest not in self._ledgers:
            pending.append(node)
            node = node.parent
        state = self._ledgers[node.digest] if node is not None else LedgerState()
        for item in reversed(pending):
            state = state.copy()
            block = item.tip
            if block.is_genesis:
                for tx in block.txs:
                    state.apply(tx)
            else:
                for tx in block.txs:
                    if state.accepts(tx):
                        state.apply(tx)
                if block.producer is not None:
                    state.credit(block.producer, self.block_reward)
            self._ledgers[item.digest] = state
        return state

    def validate_txs(self, chain: Chain, txs: Iterable[Transaction]) -> bool:
        """ℙ(C, tx̄): покрытие балансов, свежие возрастающие nonce, неотрицательные суммы."""
        try:
            return self.ledger(chain).copy().apply_valid(txs)
        except (AttributeError, TypeError) as e:
            logger.debug(f"Некорректный список транзакций отклонён: {e}")
            return False

    def select_txs(self, chain: Chain, candidates: Iterable[Transaction],
                   cap: Optional[int] = None) -> Tuple[Transaction, ...]:
        """Жадно набирает ℙ-валидный tx̄ из кандидатов в порядке поступления."""
        state = self.ledger(chain).copy()
        chosen: List[Transaction] = []
        for tx in candidates:
            if cap is not None and len(chosen) >= cap:
                break
            if state.accepts(tx):
                state.apply(tx)
                chosen.append(tx)
        return tuple(chosen)

    def check_link(self, node: Chain, ra_validate: RaValidate) -> bool:
        """Проверяет последний блок цепочки относительно её (проверенного) префикса."""
        block: Block = node.tip
        prefix = node.parent
        if prefix is None or block.parent != prefix.digest or block.producer is None:
            return False
        if block.signature is None or block.proof is None:
            return False
        if not self.registry.verify(block.producer, block.signing_bytes, block.signature):
            return False
        if not self.validate_txs(prefix, block.txs):
            return False
        return bool(ra_validate(block.producer, ChainState(prefix, block), block.proof))

    def validate_chain(self, chain: Chain, ra_validate: RaValidate) -> bool:
        """Полная валидность цепочки.

        Цепочка должна начинаться с настроенного генезиса, каждая ссылка
        h_j = H(B_{j-1}), подписи и доказательства проверяются, ℙ выполняется
        поблочно. Проверенные префиксы кешируются для каждого ra_validate
        отдельно.
        """
        valid = self._valid_for(ra_validate)
        if chain.digest in valid:
            return True
        pending: List[Chain] = []
        node: Optional[Chain] = chain
        while node is not None and node.digest not in valid:
            pending.append(node)
            node = node.parent
        if node is None:
            return False
        for item in reversed(pending):
            if not self.check_link(item, ra_validate):
                return False
            valid.add(item.digest)
        return True
