from typing import Dict, List, NamedTuple, Optional, Set, Tuple

from allocator.base import ResourceAllocator
from core.blocks import Block
from core.chain import Chain, ChainState
from core.oracle import Digest
from core.validation import ChainValidator


class Received(NamedTuple):
    """Итог приёма блока: новые валидные цепочки и нужен ли запрос родителей."""
    chains: List[Chain]
    request: bool


class ChainView:
    """Локальное хранилище блоков и валидных цепочек процесса.

    Блоки с неизвестным родителем откладываются и проверяются заново,
    как только родитель становится известен.
    """

    def __init__(self, validator: ChainValidator, allocator: ResourceAllocator,
                 blocks: Dict[Digest, Block], chains: Dict[Digest, Chain]):
        self.validator = validator
        self.allocator = allocator
        self.oracle = validator.oracle
        self.blocks = blocks
        self.chains = chains
        self.orphans: Dict[Digest, List[Tuple[Digest, Block]]] = {}
        self._orphan_digests: Set[Digest] = set()
        self._requested: Set[Digest] = set()

    def digest_of(self, block: Block) -> Digest:
        return self.oracle.hash(block.encoded)

    def knows(self, digest: Digest) -> bool:
        return digest in self.blocks or digest in self._orphan_digests

    def signature_ok(self, block: Block) -> bool:
        if block.is_genesis or block.producer is None or block.signature is None:
            return False
        return self.validator.registry.verify(block.producer, block.signing_bytes, block.signature)

    def add(self, state: ChainState, digest: Optional[Digest] = None) -> Chain:
        """Добавляет уже проверенную цепочку C ∥ B."""
        chain = state.chain.extend(state.block, self.oracle, digest)
        existing = self.chains.get(chain.digest)
        if existing is not None:
            return existing
        self.blocks[chain.digest] = state.block
        self.chains[chain.digest] = chain
        self.validator.record_valid(chain, self.allocator.validate)
        return chain

    def receive(self, block: Block) -> Received:
        digest = self.digest_of(block)
        if self.knows(digest) or not self.signature_ok(block):
            return Received([], False)
        parent = self.chains.get(block.parent)
        if parent is None:
            self.orphans.setdefault(block.parent, []).append((digest, block))
            self._orphan_digests.add(digest)
            first_request = digest not in self._requested
            self._requested.add(digest)
            return Received([], first_request)
        return Received(self._admit(parent, block, digest), False)

    def _admit(self, parent: Chain, block: Block, digest: Digest) -> List[Chain]:
        accepted: List[Chain] = []
        pending = [(parent, block, digest)]
        while pending:
            parent, block, digest = pending.pop(0)
            if not self.validator.validate_txs(parent, block.txs):
                continue
            state = ChainState(parent, block)
            if not self.allocator.validate(block.producer, state, block.proof):
                continue
            chain = self.add(state, digest)
            accepted.append(chain)
            for orphan_digest, orphan in self.orphans.pop(digest, []):
                self._orphan_digests.discard(orphan_digest)
                pending.append((chain, orphan, orphan_digest))
        return accepted

    def longest(self) -> Chain:
        """Самая длинная известная цепочка (при равенстве с меньшим дайджестом)."""
        return max(self.chains.values(), key=lambda chain: (chain.height, -chain.digest))

    def tips(self) -> List[Chain]:
        """Цепочки, которые не являются префиксом другой известной цепочки."""
        parents = {chain.parent.digest for chain in self.chains.values() if chain.parent is not None}
        return [chain for digest, chain in self.chains.items() if digest not in parents]
