from dataclasses import dataclass
from enum import Enum
from typing import Optional

from core.blocks import Block, Transaction


class MessageKind(str, Enum):
    OP = 'op'
    BLK = 'blk'
    REQUEST = 'request'


@dataclass(frozen=True)
class Message:
    """Сообщение протокола: ⟨op, tx⟩, ⟨blk, B⟩ или ⟨request, B⟩."""
    kind: MessageKind
    tx: Optional[Transaction] = None
    block: Optional[Block] = None

    @classmethod
    def op(cls, tx: Transaction) -> 'Message':
        return cls(MessageKind.OP, tx=tx)

    @classmethod
    def blk(cls, block: Block) -> 'Message':
        return cls(MessageKind.BLK, block=block)

    @classmethod
    def request(cls, block: Block) -> 'Message':
        return cls(MessageKind.REQUEST, block=block)
