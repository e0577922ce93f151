from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set

from core.blocks import Block, Transaction
from core.chain import Chain
from core.oracle import Digest


@dataclass
class ProcessState:
    """Состояние корректного процесса.

    unordered: упорядоченное множество (словарь с порядком поступления),
    delivered: доставленные транзакции без повторов.
    """
    id: int
    k: int
    c_local: Chain
    blocks: Dict[Digest, Block] = field(default_factory=dict)
    chains: Dict[Digest, Chain] = field(default_factory=dict)
    unordered: Dict[Transaction, None] = field(default_factory=dict)
    delivered: List[Transaction] = field(default_factory=list)
    delivered_steps: List[int] = field(default_factory=list)
    delivered_set: Set[Transaction] = field(default_factory=set)
    b_com: Optional[Block] = None
    r_i: Optional[int] = None
    byzantine: bool = False
    # Префикс C[:-k], до которого транзакции уже доставлены
    delivered_tip: Optional[Chain] = None

    @classmethod
    def initial(cls, process: int, genesis: Chain, k: int, byzantine: bool = False) -> 'ProcessState':
        return cls(id=process, k=k, c_local=genesis,
                   blocks={genesis.digest: genesis.tip},
                   chains={genesis.digest: genesis},
                   byzantine=byzantine)
