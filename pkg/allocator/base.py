from abc import ABC, abstractmethod
from typing import Any, Set

import numpy as np

from core.chain import ChainState
from core.oracle import HashOracle
from core.validation import ChainValidator
from utils.exceptions import SimulationError
from utils.logger import setup_logger
from .commitments import AllocatorResponse, CommitRequest
from .resources import ResourceKind

logger = setup_logger(__name__)


class ResourceAllocator(ABC):
    """Распределитель ресурсов: обрабатывает RA-commit и RA-validate.

    Каждый запрос получает ответ в том же шаге времени. Все выданные
    доказательства попадают в журнал issued.
    """

    kind: ResourceKind

    def __init__(self, oracle: HashOracle, validator: ChainValidator, rho: float,
                 rng: np.random.Generator):
        if not 0.0 < rho < 1.0:
            raise ValueError(f"ϱ должна лежать в (0, 1): {rho}")
        self.oracle = oracle
        self.validator = validator
        self.rho = rho
        self.rng = rng
        self.issued: Set[Any] = set()
        self.commits = 0
        self.successes = 0

    @property
    def slot(self) -> int:
        return 0

    def advance_slot(self) -> None:
        """Переход к следующему слоту (для PoW ничего не меняет)."""

    def state_is_valid(self, state: ChainState) -> bool:
        """Цепочка валидна и блок-кандидат ссылается на её последний блок."""
        return (state.block.parent == state.chain.digest
                and self.validator.validate_chain(state.chain, self.validate))

    def commit(self, request: CommitRequest) -> AllocatorResponse:
        """
        RA-commit: ответ распределителя в том же шаге.

        Raises:
            ValueError: Если бюджет запроса отрицателен.
            SimulationError: При непредвиденной ошибке распределителя.
        """
        self.commits += 1
        try:
            response = self._commit(request)
        except ValueError:
            raise
        except Exception as e:
            logger.error(f"Ошибка коммита процесса {request.process} на шаге {request.time_step}: {e}")
            raise SimulationError(f"Ошибка распределителя: {e}") from e
        if response.proof is not None:
            self.successes += 1
        return response

    @abstractmethod
    def _commit(self, request: CommitRequest) -> AllocatorResponse:
        """RA-commit → RA-assign."""

    @abstractmethod
    def validate(self, process: int, state: ChainState, proof: Any) -> bool:
        """RA-validate → RA-is-committed."""
