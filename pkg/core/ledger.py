from typing import Dict, Iterable, Mapping, Optional

from .blocks import Block, Transaction, TxKind


class LedgerState:
    """Балансы процессов, вычисленные по цепочке.

    У каждого процесса есть ликвидный и заложенный баланс и последний
    использованный nonce. Ставка (PoS): их сумма, мощность хранилища: заложенная часть.
    """

    __slots__ = ('liquid', 'pledged', 'nonces')

    def __init__(self, liquid: Optional[Dict[int, int]] = None,
                 pledged: Optional[Dict[int, int]] = None,
                 nonces: Optional[Dict[int, int]] = None):
        self.liquid: Dict[int, int] = liquid or {}
        self.pledged: Dict[int, int] = pledged or {}
        self.nonces: Dict[int, int] = nonces or {}

    def copy(self) -> 'LedgerState':
        return LedgerState(dict(self.liquid), dict(self.pledged), dict(self.nonces))

    def stake(self, process: int) -> int:
        return self.liquid.get(process, 0) + self.pledged.get(process, 0)

    def space(self, process: int) -> int:
        return self.pledged.get(process, 0)

    def total(self) -> int:
        return sum(self.liquid.values()) + sum(self.pledged.values())

    def stake_distribution(self) -> Dict[int, int]:
        processes = set(self.liquid) | set(self.pledged)
        return {p: self.stake(p) for p in sorted(processes) if self.stake(p) > 0}

    def space_distribution(self) -> Dict[int, int]:
        return {p: amount for p, amount in sorted(self.pledged.items()) if amount > 0}

    def accepts(self, tx: Transaction) -> bool:
        """Проверяет одну транзакцию относительно текущих балансов (без генезис-видов)."""
        if tx.kind == TxKind.ALLOCATE or tx.amount < 0:
            return False
        if tx.nonce <= self.nonces.get(tx.sender, -1):
            return False
        if tx.kind == TxKind.TRANSFER:
            return tx.recipient is not None and self.liquid.get(tx.sender, 0) >= tx.amount
        if tx.kind == TxKind.PLEDGE:
            return self.liquid.get(tx.sender, 0) >= tx.amount
        if tx.kind == TxKind.RELEASE:
            return self.pledged.get(tx.sender, 0) >= tx.amount
        return tx.kind == TxKind.PAYLOAD

    def apply(self, tx: Transaction) -> None:
        """Применяет транзакцию без проверки."""
        sender = tx.sender
        self.nonces[sender] = max(tx.nonce, self.nonces.get(sender, -1))
        if tx.kind == TxKind.ALLOCATE:
            self.liquid[sender] = self.liquid.get(sender, 0) + tx.amount
        elif tx.kind == TxKind.TRANSFER:
            self.liquid[sender] = self.liquid.get(sender, 0) - tx.amount
            self.liquid[tx.recipient] = self.liquid.get(tx.recipient, 0) + tx.amount
        elif tx.kind == TxKind.PLEDGE:
            self.liquid[sender] = self.liquid.get(sender, 0) - tx.amount
            self.pledged[sender] = self.pledged.get(sender, 0) + tx.amount
        elif tx.kind == TxKind.RELEASE:
            self.pledged[sender] = self.pledged.get(sender, 0) - tx.amount
            self.liquid[sender] = self.liquid.get(sender, 0) + tx.amount

    def apply_valid(self, txs: Iterable[Transaction]) -> bool:
        """Применяет список, пока все транзакции проходят проверку; иначе False."""
        for tx in txs:
            if not self.accepts(tx):
                return False
            self.apply(tx)
        return True

    def credit(self, process: int, amount: int) -> None:
        if amount:
            self.liquid[process] = self.liquid.get(process, 0) + amount


def make_genesis(distribution: Mapping[int, int], pledge: bool = False) -> Block:
    """Генезис-блок: tx̄ несёт начальное распределение ресурсов.

    Args:
        distribution: Бюджет каждого процесса.
        pledge: Сразу заложить весь бюджет (для хранилища).
    """
    txs = []
    for process in sorted(distribution):
        amount = distribution[process]
        txs.append(Transaction(TxKind.ALLOCATE, process, 0, amount, process))
        if pledge:
            txs.append(Transaction.pledge(process, amount, 1))
    return Block(parent=None, txs=tuple(txs))


def genesis_ledger(genesis: Block) -> LedgerState:
    state = LedgerState()
    for tx in genesis.txs:
        state.apply(tx)
    return state
