from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Set

import numpy as np

from protocol.messages import Message


@dataclass(frozen=True)
class Envelope:
    """Сообщение в пути к одному получателю."""
    message: Message
    sender: int
    recipient: int
    send_step: int
    deliver_step: int


class DelayModel:
    """Задержка честной доставки, от 1 до Δ шагов."""

    def __init__(self, delta: int):
        if delta < 1:
            raise ValueError(f"Δ должна быть не меньше 1: {delta}")
        self.delta = delta

    def sample(self) -> int:
        raise NotImplementedError


class FixedDelay(DelayModel):
    """Худший случай: каждое сообщение идёт ровно Δ шагов."""

    def sample(self) -> int:
        return self.delta


class UniformDelay(DelayModel):
    """Задержка равномерна на {1, …, Δ}."""

    def __init__(self, delta: int, rng: np.random.Generator):
        super().__init__(delta)
        self.rng = rng

    def sample(self) -> int:
        return int(self.rng.integers(1, self.delta + 1))


def build_delay_model(name: str, delta: int, rng: np.random.Generator) -> DelayModel:
    if name == 'fixed':
        return FixedDelay(delta)
    if name == 'uniform':
        return UniformDelay(delta, rng)
    raise ValueError(f"Неизвестная модель задержек: {name}")


class GossipNetwork:
    """Очередь доставки сообщений по шагам.

    Каждое сообщение доставляется каждому живому процессу ровно один раз.
    Если отправитель или получатель византийский, задержка равна одному шагу.
    Себе процесс получает сообщение через один шаг.
    """

    def __init__(self, delay: DelayModel):
        self.delay = delay
        self.live: List[int] = []
        self.byzantine: Set[int] = set()
        self._queue: Dict[int, List[Envelope]] = defaultdict(list)
        self.sent = 0

    @property
    def delta(self) -> int:
        return self.delay.delta

    def register(self, process: int, byzantine: bool = False) -> None:
        if process not in self.live:
            self.live.append(process)
            self.live.sort()
        if byzantine:
            self.byzantine.add(process)

    def mark_byzantine(self, process: int) -> None:
        self.byzantine.add(process)

    def _delay_for(self, sender: int, recipient: int) -> int:
        if sender == recipient or sender in self.byzantine or recipient in self.byzantine:
            return 1
        return self.delay.sample()

    def gossip_broadcast(self, message: Message, sender: int, send_step: int,
                         recipients: Optional[Iterable[int]] = None) -> List[Envelope]:
        """Планирует доставку сообщения всем живым процессам (или заданным получателям)."""
        targets = self.live if recipients is None else sorted(set(recipients))
        scheduled = []
        for recipient in targets:
            deliver_step = send_step + self._delay_for(sender, recipient)
            envelope = Envelope(message, sender, recipient, send_step, deliver_step)
            self._queue[deliver_step].append(envelope)
            scheduled.append(envelope)
        self.sent += 1
        return scheduled

    def due(self, step: int) -> Dict[int, List[Envelope]]:
        """Забирает сообщения, которые надо доставить на шаге step, по получателям."""
        by_recipient: Dict[int, List[Envelope]] = defaultdict(list)
        for envelope in self._queue.pop(step, []):
            by_recipient[envelope.recipient].append(envelope)
        return by_recipient

    def pending(self) -> int:
        return sum(len(items) for items in self._queue.values())
