import hashlib
import struct
from typing import Any, Iterable

# Дайджест хранится как целое число из λ бит
Digest = int

_UNIT_BITS = 53


def encode_parts(parts: Iterable[Any]) -> bytes:
    """Детерминированно кодирует набор значений в байты.

    Поддерживаются None, bool, int, bytes, str и вложенные кортежи/списки.
    Каждое значение снабжается тегом и длиной, поэтому разные наборы
    не дают одинаковой последовательности байт.

    Raises:
        TypeError: Если встречен неподдерживаемый тип.
    """
    out = bytearray()
    for part in parts:
        if part is None:
            out += b'N'
        elif isinstance(part, bool):
            out += b'T' if part else b'F'
        elif isinstance(part, int):
            raw = part.to_bytes((part.bit_length() + 8) // 8, 'big', signed=True)
            out += b'I' + struct.pack('>H', len(raw)) + raw
        elif isinstance(part, (bytes, bytearray)):
            out += b'Y' + struct.pack('>I', len(part)) + bytes(part)
        elif isinstance(part, str):
            raw = part.encode('utf-8')
            out += b'S' + struct.pack('>I', len(raw)) + raw
        elif isinstance(part, (tuple, list)):
            out += b'L' + struct.pack('>I', len(part)) + encode_parts(part)
        else:
            raise TypeError(f"Неподдерживаемый тип для кодирования: {type(part).__name__}")
    return bytes(out)


class HashOracle:
    """Идеализированный случайный оракул H для одного прогона.

    Реализован как ключевая PRF (BLAKE2b с ключом, выведенным из seed сценария),
    поэтому повторные запросы дают тот же ответ, а разные прогоны с одним seed
    совпадают побайтно.
    """

    def __init__(self, key: bytes, bits: int = 64):
        if bits % 8 or not 16 <= bits <= 512:
            raise ValueError(f"Недопустимая разрядность дайджеста: {bits}")
        self.bits = bits
        self._digest_size = bits // 8
        self._key = hashlib.blake2b(key, digest_size=32, person=b'rcl-oracle').digest()
        self.queries = 0

    @classmethod
    def from_seed(cls, seed: int, bits: int = 64) -> 'HashOracle':
        return cls(seed.to_bytes(16, 'big', signed=True), bits)

    @property
    def modulus(self) -> int:
        """2^λ."""
        return 1 << self.bits

    def hash(self, data: bytes) -> Digest:
        self.queries += 1
        raw = hashlib.blake2b(data, digest_size=self._digest_size, key=self._key).digest()
        return int.from_bytes(raw, 'big')

    def prf(self, *parts: Any) -> Digest:
        """PRF(parts) как λ-битное число."""
        return self.hash(encode_parts(parts))

    def unit(self, *parts: Any) -> float:
        """PRF(parts) / 2^λ, значение из [0, 1)."""
        return self.prf(*parts) / self.modulus

    def uniform_bits(self, *parts: Any) -> int:
        """Старшие 53 бита PRF для точного сравнения с рациональным порогом."""
        value = self.prf(*parts)
        if self.bits >= _UNIT_BITS:
            return value >> (self.bits - _UNIT_BITS)
        return value << (_UNIT_BITS - self.bits)

    def below_ratio(self, numerator: int, denominator: int, *parts: Any) -> bool:
        """Истина, если 53-битная равномерная величина меньше numerator/denominator."""
        return self.uniform_bits(*parts) * denominator < numerator << _UNIT_BITS

    def to_hex(self, digest: Digest) -> str:
        return format(digest, f'0{self.bits // 4}x')
