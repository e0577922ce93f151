from dataclasses import dataclass
from typing import Set, Tuple

from .oracle import Digest, HashOracle


@dataclass(frozen=True)
class Signature:
    """Идеализированная подпись: запись (подписант, дайджест сообщения)."""
    signer: int
    message_digest: Digest


class SigningKey:
    """Дескриптор процесса, через который только и можно подписывать."""

    def __init__(self, registry: 'SignatureRegistry', process: int):
        self._registry = registry
        self.process = process

    def sign(self, message: bytes) -> Signature:
        return self._registry._sign(self.process, message)

    def __repr__(self) -> str:
        return f"SigningKey(process={self.process})"


class SignatureRegistry:
    """Реестр подписей прогона.

    verify(p, m, σ) истинно тогда и только тогда, когда σ была выдана
    sign(p, m) раньше в этом же прогоне.
    """

    def __init__(self, oracle: HashOracle):
        self._oracle = oracle
        self._records: Set[Tuple[int, Digest]] = set()

    def key_for(self, process: int) -> SigningKey:
        return SigningKey(self, process)

    def _sign(self, process: int, message: bytes) -> Signature:
        digest = self._oracle.hash(message)
        self._records.add((process, digest))
        return Signature(process, digest)

    def verify(self, process: int, message: bytes, signature: object) -> bool:
        if not isinstance(signature, Signature) or signature.signer != process:
            return False
        digest = self._oracle.hash(message)
        if signature.message_digest != digest:
            return False
        return (process, digest) in self._records

    def __len__(self) -> int:
        return len(self._records)
