from typing import Any, Dict, Optional, Tuple

import numpy as np

from core.chain import Chain, ChainState
from core.oracle import Digest, HashOracle
from core.validation import ChainValidator
from utils.logger import setup_logger
from .base import ResourceAllocator
from .commitments import AllocatorResponse, CommitRequest, Ticket
from .lottery import LotteryState, advance_slot, leader_select
from .resources import POS_KIND, ResourceDistribution, distribution_of
from .retarget import RetargetPolicy

logger = setup_logger(__name__)

_CACHE_LIMIT = 8192


class PosAllocator(ResourceAllocator):
    """Распределитель Proof-of-Stake.

    Распределение ставок берётся из префикса цепочки, обрезанного по слотам
    старше двух эпох. Случайность ρ выдаётся один раз на (процесс, префикс,
    слот) и хранится в таблице T, поэтому повторные коммиты дают тот же исход.
    """

    kind = POS_KIND
    measure = 'stake'

    def __init__(self, oracle: HashOracle, validator: ChainValidator, rho: float,
                 rng: np.random.Generator, q: int, k: int,
                 retarget: Optional[RetargetPolicy] = None):
        super().__init__(oracle, validator, rho, rng)
        self.lottery = LotteryState(q=q, k=k)
        self.retarget = retarget
        self._prefixes: Dict[Tuple[Digest, int], Chain] = {}
        self._distributions: Dict[Digest, ResourceDistribution] = {}

    @property
    def slot(self) -> int:
        return self.lottery.slot

    def advance_slot(self) -> None:
        self.lottery = advance_slot(self.lottery)

    def prefix_cutoff(self, slot: int) -> int:
        """Блоки со слотом больше этого значения отбрасываются."""
        return (slot // self.lottery.q - 2) * self.lottery.q

    def prefix(self, chain: Chain, slot: int) -> Chain:
        """C_prefix; при полном отсечении [B₀]."""
        cutoff = self.prefix_cutoff(slot)
        key = (chain.digest, cutoff)
        cached = self._prefixes.get(key)
        if cached is None:
            if len(self._prefixes) > _CACHE_LIMIT:
                self._prefixes.clear()
            cached = chain.ancestor_by_slot(cutoff)
            self._prefixes[key] = cached
        return cached

    def distribution(self, prefix: Chain) -> ResourceDistribution:
        cached = self._distributions.get(prefix.digest)
        if cached is None:
            cached = distribution_of(prefix, self.validator, self.measure)
            self._distributions[prefix.digest] = cached
        return cached

    def effective(self, chain: Chain, slot: int,
                  dist: ResourceDistribution) -> Tuple[float, ResourceDistribution]:
        if self.retarget is None:
            return self.rho, dist
        return self.retarget.effective(chain, slot, dist, self.rho)

    def _sample_randomness(self) -> int:
        return int.from_bytes(self.rng.bytes(self.oracle.bits // 8), 'big')

    def _slot_ok(self, state: ChainState, slot: int) -> bool:
        return state.block.slot == slot and slot > state.chain.tip.slot

    def _weight(self, request: CommitRequest, dist: ResourceDistribution) -> int:
        return dist[request.process]

    def _extra_gate(self, request: CommitRequest, dist: ResourceDistribution, randomness: int) -> bool:
        return True

    def _failure(self, request: CommitRequest, weight: int = 0) -> AllocatorResponse:
        return AllocatorResponse(request.process, request.state, None, None, weight)

    def _commit(self, request: CommitRequest) -> AllocatorResponse:
        state = request.state
        slot = self.lottery.slot
        if not self._slot_ok(state, slot) or not self.state_is_valid(state):
            return self._failure(request)
        prefix = self.prefix(state.chain, slot)
        randomness = self.lottery.lookup(request.process, prefix.digest, slot)
        if randomness is None:
            randomness = self._sample_randomness()
            self.lottery.record(request.process, prefix.digest, slot, randomness)
        dist = self.distribution(prefix)
        weight = self._weight(request, dist)
        rho, active = self.effective(state.chain, slot, dist)
        if not leader_select(active, slot, randomness, request.process, rho, self.oracle):
            return self._failure(request, weight)
        if not self._extra_gate(request, dist, randomness):
            return self._failure(request, weight)
        ticket = Ticket(request.process, randomness, slot)
        self.issued.add(ticket)
        return AllocatorResponse(request.process, state, None, ticket, weight)

    def validate(self, process: int, state: ChainState, proof: Any) -> bool:
        if not isinstance(proof, Ticket) or proof.process != process:
            return False
        if state.block.parent != state.chain.digest or not self._slot_ok(state, proof.slot):
            return False
        if not self.validator.validate_chain(state.chain, self.validate):
            return False
        prefix = self.prefix(state.chain, proof.slot)
        if not self.lottery.contains(process, prefix.digest, proof.randomness, proof.slot):
            return False
        dist = self.distribution(prefix)
        rho, active = self.effective(state.chain, proof.slot, dist)
        return leader_select(active, proof.slot, proof.randomness, process, rho, self.oracle)
