from collections import defaultdict
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional

import numpy as np

from allocator import RESOURCE_KINDS, SPACE_KIND, ResourceTrace, RetargetPolicy, build_allocator, state_alloc
from allocator.commitments import AllocatorResponse, CommitRequest
from analysis.trace import RunTrace
from config.settings import ScenarioConfig
from core.blocks import Block, Transaction
from core.chain import Chain
from core.ledger import make_genesis
from core.oracle import HashOracle
from core.signatures import SignatureRegistry, SigningKey
from core.validation import ChainValidator
from protocol.messages import Message
from protocol.process import Process
from utils.exceptions import SimulationError
from utils.logger import setup_logger
from .gossip import Envelope, GossipNetwork, build_delay_model

if TYPE_CHECKING:
    from adversary.base import Adversary

logger = setup_logger(__name__)


class Simulation:
    """Дискретное время: доставка сообщений, активация процессов, распределитель.

    На шаге t сначала доставляются все сообщения, срок которых наступил,
    затем по возрастанию id активируются корректные процессы, после них
    ходит противник. Ответ распределителя приходит в том же шаге.
    """

    def __init__(self, config: ScenarioConfig, seed: int):
        """
        Args:
            config: Проверенная конфигурация сценария
            seed: Зерно прогона; от него порождаются все генераторы
        """
        config.resolve()
        self.config = config
        self.seed = seed
        oracle_seq, allocator_seq, delay_seq, workload_seq, adversary_seq = \
            np.random.SeedSequence(seed).spawn(5)
        self.oracle = HashOracle(oracle_seq.generate_state(4, np.uint64).tobytes(), config.lambda_bits)
        self.registry = SignatureRegistry(self.oracle)
        self.kind = RESOURCE_KINDS[config.allocator]

        distribution = config.initial_distribution()
        self.genesis = Chain.genesis(make_genesis(distribution, pledge=self.kind is SPACE_KIND), self.oracle)
        self.validator = ChainValidator(self.oracle, self.registry, self.genesis, config.block_reward)

        # Освобождение ресурсов по расписанию обнуляет внешний бюджет процесса
        drops = [(step, process, 0) for step, process in config.attack.release_schedule]
        self.resources = ResourceTrace(distribution, list(config.budget_steps) + drops)

        retarget = None
        if config.retarget_window is not None:
            retarget = RetargetPolicy(config.retarget_window, config.retarget_target)
        self.allocator = build_allocator(config.allocator, self.oracle, self.validator, config.rho,
                                         np.random.default_rng(allocator_seq), config.q, config.k,
                                         retarget)
        self.network = GossipNetwork(build_delay_model(config.delay_model, config.delta,
                                                       np.random.default_rng(delay_seq)))
        self.workload_rng = np.random.default_rng(workload_seq)
        self.adversary_rng = np.random.default_rng(adversary_seq)

        self.trace = RunTrace(seed=seed, allocator=config.allocator, k=config.k, delta=config.delta,
                              horizon=config.horizon, steps_per_slot=config.steps_per_slot)
        self.processes: Dict[int, Process] = {}
        self.adversary: Optional['Adversary'] = None
        self.clock = 0
        self.next_id = config.n_processes
        self._pending_joins: List[int] = []
        self._releases: Dict[int, List[int]] = defaultdict(list)
        for step, process in config.attack.release_schedule:
            self._releases[step].append(process)
        self._burned: Dict[int, int] = {}
        self._reference: Optional[Chain] = None

        byzantine = set(config.byzantine_ids())
        for process in range(config.n_processes):
            self._spawn(process, byzantine=process in byzantine, step=0)

    # ------------------------------------------------------------- процессы

    def _spawn(self, process: int, byzantine: bool, step: int) -> Process:
        node = Process(process, self.genesis, self.validator, self.allocator,
                       self.registry.key_for(process), self.config.k,
                       block_size_cap=self.config.block_size_cap, byzantine=byzantine,
                       joined_at=step)
        self.processes[process] = node
        self.network.register(process, byzantine)
        self.trace.add_process(process, byzantine, step)
        self.trace.record_snapshot(process, step, node.state.c_local)
        return node

    def attach(self, adversary: 'Adversary') -> None:
        """Передаёт византийские процессы под управление противника."""
        self.adversary = adversary
        for process in adversary.members:
            self.processes.pop(process, None)
            self.trace.snapshots.pop(process, None)

    def join(self, step: int) -> int:
        """Новый корректный процесс со следующим id; стартует с [B₀]."""
        process = self.next_id
        self.next_id += 1
        self._spawn(process, byzantine=False, step=step)
        logger.info(f"Шаг {step}: к сети присоединился процесс {process}")
        return process

    def schedule_join(self) -> None:
        """Присоединение нового процесса в начале следующего шага."""
        self._pending_joins.append(self.clock + 1)

    def dormant_key(self) -> int:
        """Свежий ключ без процесса: получатель переводов по расписанию."""
        process = self.next_id
        self.next_id += 1
        self.trace.dormant.add(process)
        return process

    def corrupt(self, process: int, step: int, spent: int) -> SigningKey:
        """Переводит процесс под контроль противника и возвращает его ключ."""
        self.processes.pop(process, None)
        self.network.mark_byzantine(process)
        self.trace.record_corruption(step, process, spent)
        logger.info(f"Шаг {step}: процесс {process} скомпрометирован (затраты {spent})")
        return self.registry.key_for(process)

    def correct_processes(self) -> List[Process]:
        return [node for pid, node in sorted(self.processes.items()) if not node.state.byzantine]

    def longest_correct_chain(self) -> Chain:
        """Самая длинная C_local среди корректных процессов (при равенстве меньший id)."""
        if self._reference is None:
            best = self.genesis
            for node in self.correct_processes():
                if len(node.state.c_local) > len(best):
                    best = node.state.c_local
            self._reference = best
        return self._reference

    # ---------------------------------------------------------------- ресурсы

    def alloc(self, process: int, t: int, chain: Optional[Chain] = None) -> int:
        """Alloc(p, t): внешний бюджет по трассе, виртуальный: по состоянию цепочки."""
        if not self.kind.virtual:
            return self.resources.alloc(process, t)
        return state_alloc(process, chain or self.longest_correct_chain(), self.validator, 'stake')

    def commit(self, request: CommitRequest, byzantine: bool = False) -> AllocatorResponse:
        """Передаёт RA-commit распределителю, проверив бюджет по Alloc(p, t).

        Raises:
            SimulationError: Если бюджет превышает доступный ресурс.
        """
        process, step = request.process, request.time_step
        if self.kind.virtual:
            if request.budget is not None:
                raise SimulationError(f"Процесс {process}: бюджет виртуального ресурса должен быть ⊥")
        else:
            budget = request.budget or 0
            available = self.resources.alloc(process, step)
            if self.kind.burnable:
                available -= self._burned.get(process, 0)
            if budget < 0 or budget > available:
                raise SimulationError(
                    f"Шаг {step}: процесс {process} коммитит {budget} при доступных {available}")
            if self.kind.burnable:
                self._burned[process] = self._burned.get(process, 0) + budget
        response = self.allocator.commit(request)
        self.trace.record_commit(step, process, request.budget, response.weight,
                                 response.success, byzantine)
        return response

    # ---------------------------------------------------------------- сообщения

    def broadcast(self, message: Message, sender: int, step: int,
                  recipients: Optional[Iterable[int]] = None) -> List[Envelope]:
        return self.network.gossip_broadcast(message, sender, step, recipients)

    def record_block(self, block: Block, byzantine: bool, step: int) -> None:
        self.trace.record_block(self.oracle.hash(block.encoded), block.producer, byzantine, step)

    def _send_transaction(self, node: Process, tx: Transaction, step: int) -> None:
        self.broadcast(node.a_broadcast(tx), node.id, step)

    # ------------------------------------------------------------ расписание

    def _run_workload(self, t: int) -> None:
        for joined in [s for s in self._pending_joins if s == t]:
            self._pending_joins.remove(joined)
            self.join(t)
        for process in self._releases.get(t, []):
            self._release(process, t)
        interval = self.config.tx_interval
        if interval <= 0 or t == 0 or t % interval != 0:
            return
        senders = self.correct_processes()
        if not senders:
            return
        node = senders[(t // interval) % len(senders)]
        payload = f"{node.id}:{t}".encode()
        self._send_transaction(node, Transaction.payload_tx(node.id, payload, node.next_nonce()), t)

    def _release(self, process: int, t: int) -> None:
        """Процесс выводит весь ресурс на свежий спящий ключ."""
        node = self.processes.get(process)
        if node is None:
            return
        ledger = self.validator.ledger(node.state.c_local)
        liquid, pledged = ledger.liquid.get(process, 0), ledger.pledged.get(process, 0)
        if liquid + pledged == 0:
            return
        recipient = self.dormant_key()
        if pledged > 0:
            self._send_transaction(node, Transaction.release(process, pledged, node.next_nonce()), t)
        self._send_transaction(node, Transaction.transfer(process, recipient, liquid + pledged,
                                                          node.next_nonce()), t)
        logger.debug(f"Шаг {t}: процесс {process} переводит {liquid + pledged} на ключ {recipient}")

    # -------------------------------------------------------------------- шаг

    def _activate(self, node: Process, envelopes: List[Envelope], t: int, slot: int) -> None:
        before = node.state.c_local
        node.begin_step(self.alloc(node.id, t))
        outgoing: List[Message] = []
        for envelope in envelopes:
            outgoing.extend(node.receive(envelope.message, t))
        if node.needs_extend:
            request = node.extend(t, slot)
            response = self.commit(request, byzantine=node.state.byzantine)
            for message in node.on_assign(response):
                self.record_block(message.block, node.state.byzantine, t)
                outgoing.append(message)
        for message in outgoing:
            self.broadcast(message, node.id, t)
        if node.state.c_local is not before:
            self.trace.record_snapshot(node.id, t, node.state.c_local)
            self._reference = None

    def step(self, t: int) -> None:
        """Один шаг времени t.

        Raises:
            SimulationError: Если t не совпадает с часами движка.
        """
        if t != self.clock:
            raise SimulationError(f"Ожидался шаг {self.clock}, получен {t}")
        if t > 0 and t % self.config.steps_per_slot == 0:
            self.allocator.advance_slot()
        slot = t // self.config.steps_per_slot
        self._burned = {}
        self._reference = None

        self._run_workload(t)
        due = self.network.due(t)
        for pid in sorted(self.processes):
            node = self.processes.get(pid)
            if node is not None:
                self._activate(node, due.pop(pid, []), t, slot)
        if self.adversary is not None:
            self.adversary.on_step(self, t, due)

        for process in sorted(self.network.byzantine):
            if process in self.trace.processes:
                self.trace.log_alloc(process, t, self.alloc(process, t))
        self.clock = t + 1
        self.trace.steps = self.clock

    def run(self) -> RunTrace:
        """
        Выполняет прогон до горизонта.

        Returns:
            След прогона для проверок и метрик.

        Raises:
            SimulationError: При нарушении инвариантов движка.
        """
        logger.info(f"Этап 1: прогон зерна {self.seed} ({self.config.allocator}, "
                    f"n={self.config.n_processes}, горизонт {self.config.horizon})")
        try:
            for t in range(self.clock, self.config.horizon):
                self.step(t)
                if self.adversary is not None and self.adversary.finished:
                    break
        except SimulationError:
            raise
        except Exception as e:
            logger.error(f"Ошибка на шаге {self.clock}: {e}")
            raise SimulationError(f"Шаг {self.clock}: {e}") from e

        for pid, node in self.processes.items():
            self.trace.deliveries[pid] = node.delivery_log()
            self.trace.final_chains[pid] = node.state.c_local
        if self.adversary is not None:
            self.adversary.finish(self)
        logger.info(f"Этап 2: прогон зерна {self.seed} завершён на шаге {self.clock}, "
                    f"длина цепочки {len(self.longest_correct_chain())}")
        return self.trace


def step(engine: Simulation, t: int) -> None:
    """Выполняет шаг t движка."""
    engine.step(t)
