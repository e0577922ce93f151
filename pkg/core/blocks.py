from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Any, Optional, Tuple

from .oracle import Digest, encode_parts
from .signatures import Signature


class TxKind(str, Enum):
    """Виды транзакций."""
    ALLOCATE = 'allocate'   # только в генезисе: начальное распределение
    TRANSFER = 'transfer'
    PLEDGE = 'pledge'
    RELEASE = 'release'
    PAYLOAD = 'payload'


@dataclass(frozen=True)
class Transaction:
    """Транзакция.

    Для transfer получатель задаётся полем recipient, для pledge/release
    средства перемещаются между ликвидным и заложенным балансом отправителя.
    """
    kind: TxKind
    sender: int
    nonce: int
    amount: int = 0
    recipient: Optional[int] = None
    payload: bytes = b''

    @classmethod
    def transfer(cls, sender: int, recipient: int, amount: int, nonce: int) -> 'Transaction':
        return cls(TxKind.TRANSFER, sender, nonce, amount, recipient)

    @classmethod
    def pledge(cls, process: int, amount: int, nonce: int) -> 'Transaction':
        return cls(TxKind.PLEDGE, process, nonce, amount)

    @classmethod
    def release(cls, process: int, amount: int, nonce: int) -> 'Transaction':
        return cls(TxKind.RELEASE, process, nonce, amount)

    @classmethod
    def payload_tx(cls, sender: int, data: bytes, nonce: int) -> 'Transaction':
        return cls(TxKind.PAYLOAD, sender, nonce, 0, None, data)

    @cached_property
    def parts(self) -> Tuple[Any, ...]:
        return (self.kind.value, self.sender, self.nonce, self.amount, self.recipient, self.payload)

    def __str__(self) -> str:
        target = f"->{self.recipient}" if self.recipient is not None else ''
        return f"{self.kind.value}({self.sender}{target}, {self.amount}, n={self.nonce})"


@dataclass(frozen=True)
class Block:
    """Блок B = (h, tx̄, π, σ) с производителем и слотом.

    Генезис: единственный блок с parent = proof = signature = None.
    """
    parent: Optional[Digest]
    txs: Tuple[Transaction, ...] = field(default_factory=tuple)
    proof: Any = None
    signature: Optional[Signature] = None
    producer: Optional[int] = None
    slot: int = 0

    @property
    def is_genesis(self) -> bool:
        return self.parent is None

    @cached_property
    def tx_parts(self) -> Tuple[Any, ...]:
        return tuple(tx.parts for tx in self.txs)

    @cached_property
    def proof_parts(self) -> Tuple[Any, ...]:
        return self.proof.as_parts() if self.proof is not None else ()

    @cached_property
    def candidate_bytes(self) -> bytes:
        """h || tx̄: вход хеша для PoW-доказательства."""
        return encode_parts(('cand', self.parent, self.tx_parts))

    @cached_property
    def signing_bytes(self) -> bytes:
        """h || tx̄ || π || sl: сообщение, которое подписывает производитель."""
        return encode_parts(('sig', self.parent, self.tx_parts, self.proof_parts, self.slot))

    @cached_property
    def encoded(self) -> bytes:
        signature = (self.signature.signer, self.signature.message_digest) if self.signature else None
        return encode_parts(('blk', self.parent, self.tx_parts, self.proof_parts,
                             signature, self.producer, self.slot))

    def with_commitment(self, proof: Any, signature: Signature) -> 'Block':
        return replace(self, proof=proof, signature=signature)

    @property
    def proof_kind(self) -> str:
        if self.proof is None:
            return '-'
        return self.proof.as_parts()[0]
