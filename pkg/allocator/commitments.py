from dataclasses import dataclass
from typing import Any, Optional, Tuple

from core.chain import ChainState


@dataclass(frozen=True)
class PowNonce:
    """Доказательство PoW: nonce с H(h || tx̄ || nonce) <= ϱ·2^λ."""
    nonce: int

    def as_parts(self) -> Tuple[Any, ...]:
        return ('pow', self.nonce)


@dataclass(frozen=True)
class Ticket:
    """Билет лотереи (PoS/хранилище): процесс, случайность ρ и слот."""
    process: int
    randomness: int
    slot: int

    def as_parts(self) -> Tuple[Any, ...]:
        return ('ticket', self.process, self.randomness, self.slot)


Commitment = Any  # PowNonce | Ticket


@dataclass(frozen=True)
class CommitRequest:
    """Событие RA-commit(p, st, r). Для виртуальных ресурсов budget = None."""
    process: int
    state: ChainState
    budget: Optional[int]
    time_step: int


@dataclass(frozen=True)
class AllocatorResponse:
    """Событие RA-assign(p, st, r, π).

    weight: ресурс, который лотерея фактически учла: бюджет для внешних
    ресурсов и ставка/залог по префиксу для лотерейных распределителей.
    """
    process: int
    state: ChainState
    returned_budget: Optional[int]
    proof: Optional[Commitment]
    weight: int = 0

    @property
    def success(self) -> bool:
        return self.proof is not None
