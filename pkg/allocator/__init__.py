from typing import Optional

import numpy as np

from core.oracle import HashOracle
from core.validation import ChainValidator
from .base import ResourceAllocator
from .commitments import AllocatorResponse, Commitment, CommitRequest, PowNonce, Ticket
from .lottery import (LotteryState, advance_slot, election_probability, external_verify,
                      leader_select)
from .pos import PosAllocator
from .pow import PowAllocator
from .resources import (POS_KIND, POW_KIND, RESOURCE_KINDS, SPACE_KIND, Lifecycle, Origin,
                        ResourceDistribution, ResourceKind, ResourceTrace, distribution_of,
                        state_alloc)
from .retarget import RetargetPolicy
from .space import SpaceAllocator
from .threshold import (ThresholdResult, adversary_probability, honest_majority_holds,
                        honest_majority_max_budget, honest_probability)


def build_allocator(kind: str, oracle: HashOracle, validator: ChainValidator, rho: float,
                    rng: np.random.Generator, q: int, k: int,
                    retarget: Optional[RetargetPolicy] = None) -> ResourceAllocator:
    """Создаёт распределитель по имени типа ресурса ('pow', 'pos', 'space')."""
    if kind == 'pow':
        return PowAllocator(oracle, validator, rho, rng)
    if kind == 'pos':
        return PosAllocator(oracle, validator, rho, rng, q, k, retarget)
    if kind == 'space':
        return SpaceAllocator(oracle, validator, rho, rng, q, k, retarget)
    raise ValueError(f"Неизвестный распределитель: {kind}")


__all__ = [
    'ResourceAllocator', 'PowAllocator', 'PosAllocator', 'SpaceAllocator', 'build_allocator',
    'AllocatorResponse', 'Commitment', 'CommitRequest', 'PowNonce', 'Ticket',
    'LotteryState', 'advance_slot', 'election_probability', 'external_verify', 'leader_select',
    'POS_KIND', 'POW_KIND', 'SPACE_KIND', 'RESOURCE_KINDS', 'Lifecycle', 'Origin',
    'ResourceDistribution', 'ResourceKind', 'ResourceTrace', 'distribution_of', 'state_alloc',
    'RetargetPolicy',
    'ThresholdResult', 'adversary_probability', 'honest_majority_holds',
    'honest_majority_max_budget', 'honest_probability',
]
