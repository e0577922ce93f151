from typing import Iterable, Iterator, List, NamedTuple, Optional, Union

from .blocks import Block
from .oracle import Digest, HashOracle


class Chain:
    """Цепочка блоков, начинающаяся с генезиса.

    Хранится как неизменяемый связный список узлов: каждый узел знает свой
    последний блок, дайджест H(C[-1]), высоту и родительскую цепочку. Поэтому
    C[:-k] и C[0:h] не копируют блоки. Переход к предку идёт по указателям
    с пропусками.
    """

    __slots__ = ('tip', 'digest', 'height', 'parent', '_jump')

    def __init__(self, tip: Block, digest: Digest, parent: Optional['Chain'] = None):
        self.tip = tip
        self.digest = digest
        self.parent = parent
        self.height = 0 if parent is None else parent.height + 1
        self._jump: Optional['Chain'] = None
        if parent is not None:
            target = self.height - (self.height & -self.height)
            self._jump = parent.ancestor(target)

    @classmethod
    def genesis(cls, block: Block, oracle: HashOracle) -> 'Chain':
        return cls(block, oracle.hash(block.encoded))

    @classmethod
    def from_blocks(cls, blocks: Iterable[Block], oracle: HashOracle) -> 'Chain':
        """Связывает блоки в цепочку без проверки ссылок на родителей."""
        chain: Optional[Chain] = None
        for block in blocks:
            chain = cls(block, oracle.hash(block.encoded), chain)
        if chain is None:
            raise ValueError("Цепочка не может быть пустой")
        return chain

    def extend(self, block: Block, oracle: HashOracle, digest: Optional[Digest] = None) -> 'Chain':
        """C ∥ B."""
        return Chain(block, digest if digest is not None else oracle.hash(block.encoded), self)

    def ancestor(self, height: int) -> 'Chain':
        """Префикс, последний блок которого стоит на высоте height."""
        if not 0 <= height <= self.height:
            raise IndexError(f"Высота {height} вне цепочки длины {len(self)}")
        node = self
        while node.height > height:
            jump = node._jump
            if jump is not None and jump.height >= height:
                node = jump
            else:
                node = node.parent
        return node

    def ancestor_by_slot(self, max_slot: int) -> 'Chain':
        """Самый длинный префикс, все блоки которого имеют slot <= max_slot.

        Предполагает возрастание слотов вдоль цепочки; генезис не отбрасывается.
        """
        node = self
        while node.parent is not None and node.tip.slot > max_slot:
            jump = node._jump
            if jump is not None and jump.parent is not None and jump.tip.slot > max_slot:
                node = jump
            else:
                node = node.parent
        return node

    def __len__(self) -> int:
        return self.height + 1

    def __getitem__(self, index: Union[int, slice]) -> Union[Block, 'Chain']:
        if isinstance(index, slice):
            start, stop, step = index.indices(len(self))
            if start != 0 or step != 1:
                raise IndexError("Поддерживаются только префиксы цепочки")
            if stop <= 0:
                raise IndexError("Пустой префикс не является цепочкой")
            return self.ancestor(stop - 1)
        if index < 0:
            index += len(self)
        return self.ancestor(index).tip

    def __iter__(self) -> Iterator[Block]:
        return iter(self.blocks)

    @property
    def blocks(self) -> List[Block]:
        out = []
        node: Optional[Chain] = self
        while node is not None:
            out.append(node.tip)
            node = node.parent
        out.reverse()
        return out

    def nodes(self) -> List['Chain']:
        """Все префиксы от генезиса до самой цепочки."""
        out = []
        node: Optional[Chain] = self
        while node is not None:
            out.append(node)
            node = node.parent
        out.reverse()
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Chain) and self.digest == other.digest and self.height == other.height

    def __hash__(self) -> int:
        return hash((self.digest, self.height))

    def __repr__(self) -> str:
        return f"Chain(len={len(self)}, tip={self.digest:x})"


def is_prefix(a: Chain, b: Chain) -> bool:
    """a ⪯ b."""
    if a.height > b.height:
        return False
    return b.ancestor(a.height).digest == a.digest


def truncate(chain: Chain, k: int) -> Chain:
    """C[:-k]; при |C| <= k возвращает [B₀]."""
    if k < 0:
        raise ValueError(f"Параметр k должен быть неотрицательным: {k}")
    if k == 0:
        return chain
    return chain.ancestor(max(chain.height - k, 0))


def common_ancestor(a: Chain, b: Chain) -> Chain:
    """Самый длинный общий префикс двух цепочек с одним генезисом."""
    height = min(a.height, b.height)
    x, y = a.ancestor(height), b.ancestor(height)
    while x.digest != y.digest:
        if x.parent is None or y.parent is None:
            raise ValueError("У цепочек разные генезис-блоки")
        x, y = x.parent, y.parent
    return x


def dump_chain(chain: Chain, oracle: HashOracle) -> str:
    """Построчный текстовый дамп цепочки для отладки.

    Формат строки: высота, дайджест, родитель, производитель, слот,
    вид доказательства, число транзакций.
    """
    lines = []
    for node in chain.nodes():
        block = node.tip
        parent = oracle.to_hex(block.parent) if block.parent is not None else '-'
        producer = block.producer if block.producer is not None else '-'
        lines.append(f"{node.height} {oracle.to_hex(node.digest)} {parent} {producer} "
                     f"{block.slot} {block.proof_kind} {len(block.txs)}")
    return '\n'.join(lines) + '\n'


class ChainState(NamedTuple):
    """Состояние st = (C, B): цепочка и блок-кандидат поверх неё."""
    chain: Chain
    block: Block
