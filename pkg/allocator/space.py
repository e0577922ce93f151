from typing import Any

from core.chain import ChainState
from .commitments import CommitRequest, Ticket
from .lottery import external_verify
from .pos import PosAllocator
from .resources import SPACE_KIND, ResourceDistribution


class SpaceAllocator(PosAllocator):
    """Распределитель Proof-of-Storage.

    Отличия от PoS: префикс обрезается по слотам старше sl - k, распределение
    строится по заложенному объёму (power table), а избранный лидер
    дополнительно проходит проверку внешнего ресурса E(r, r'; ρ).
    """

    kind = SPACE_KIND
    measure = 'space'

    def prefix_cutoff(self, slot: int) -> int:
        return slot - self.lottery.k

    def _weight(self, request: CommitRequest, dist: ResourceDistribution) -> int:
        return request.budget or 0

    def _extra_gate(self, request: CommitRequest, dist: ResourceDistribution, randomness: int) -> bool:
        return external_verify(request.budget or 0, dist[request.process], randomness, self.oracle)

    def validate(self, process: int, state: ChainState, proof: Any) -> bool:
        # Исход проверки E фиксируется в момент выдачи билета
        return isinstance(proof, Ticket) and proof in self.issued and super().validate(process, state, proof)
