from itertools import count
from typing import Any

import numpy as np

from core.blocks import Block
from core.chain import ChainState
from core.oracle import HashOracle, encode_parts
from core.validation import ChainValidator
from .base import ResourceAllocator
from .commitments import AllocatorResponse, CommitRequest, PowNonce
from .resources import POW_KIND


class PowAllocator(ResourceAllocator):
    """Распределитель Proof-of-Work.

    Успех коммита бюджета r разыгрывается как r независимых испытаний
    Бернулли(ϱ) одним вызовом генератора, после чего подходящий nonce
    подбирается запросами к оракулу. Бюджет всегда возвращается.
    """

    kind = POW_KIND

    def __init__(self, oracle: HashOracle, validator: ChainValidator, rho: float,
                 rng: np.random.Generator):
        super().__init__(oracle, validator, rho, rng)
        self.threshold = int(rho * oracle.modulus)

    def proof_hash(self, block: Block, nonce: int) -> int:
        """H(h || tx̄ || nonce)."""
        return self.oracle.hash(block.candidate_bytes + encode_parts((nonce,)))

    def meets_threshold(self, block: Block, nonce: int) -> bool:
        return self.proof_hash(block, nonce) <= self.threshold

    def _find_nonce(self, block: Block) -> int:
        start = int(self.rng.integers(0, 1 << 62))
        for offset in count():
            nonce = start + offset
            if self.meets_threshold(block, nonce):
                return nonce
        raise AssertionError("недостижимо")

    def _commit(self, request: CommitRequest) -> AllocatorResponse:
        budget = request.budget or 0
        if budget < 0:
            raise ValueError(f"Отрицательный бюджет в коммите процесса {request.process}")
        state = request.state
        failure = AllocatorResponse(request.process, state, budget, None, budget)
        if budget == 0 or not self.state_is_valid(state):
            return failure
        if self.rng.binomial(budget, self.rho) == 0:
            return failure
        proof = PowNonce(self._find_nonce(state.block))
        self.issued.add((state.block.candidate_bytes, proof.nonce))
        return AllocatorResponse(request.process, state, budget, proof, budget)

    def validate(self, process: int, state: ChainState, proof: Any) -> bool:
        if not isinstance(proof, PowNonce):
            return False
        if state.block.parent != state.chain.digest:
            return False
        if not self.meets_threshold(state.block, proof.nonce):
            return False
        return self.validator.validate_chain(state.chain, self.validate)
