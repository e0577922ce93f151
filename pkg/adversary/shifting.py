from typing import Dict, List, Optional, Tuple

from allocator.resources import distribution_of
from core.chain import Chain
from core.validation import ChainValidator
from utils.logger import setup_logger

logger = setup_logger(__name__)


def select_majority(chain: Chain, h0: int, h1: int, total: int, adversary: int,
                    validator: ChainValidator, measure: str = 'stake',
                    exclude: Tuple[int, ...] = ()) -> Optional[List[int]]:
    """Ищет 𝒫_maj: Σ бюджетов на C[0:h₀] > R - R_A и Σ на C[0:h₁] <= R_A.

    Поиск точный (рюкзак по бюджетам на h₀). Из подходящих множеств
    выбирается самое дешёвое для подкупа: с наименьшим бюджетом на h₁,
    затем с наименьшим числом процессов и меньшими id. Результат никогда
    не дороже жадного отбора по убыванию бюджета.

    Returns:
        Отсортированный список процессов или None, если такого множества нет.
    """
    if not 0 < h0 < h1 <= len(chain):
        return None
    before = distribution_of(chain[:h0], validator, measure)
    after = distribution_of(chain[:h1], validator, measure)
    # reach[v]: самый дешёвый набор с суммарным бюджетом v на h₀
    reach: Dict[int, Tuple[int, Tuple[int, ...]]] = {0: (0, ())}
    for process in sorted(before):
        if process in exclude:
            continue
        value, weight = before[process], after[process]
        if value == 0 or weight > adversary:
            continue
        for reached, (cost, members) in list(reach.items()):
            candidate = (cost + weight, members + (process,))
            if candidate[0] > adversary:
                continue
            current = reach.get(reached + value)
            if current is None or _rank(candidate) < _rank(current):
                reach[reached + value] = candidate
    options = [item for reached, item in reach.items() if reached > total - adversary]
    if not options:
        return None
    return sorted(min(options, key=_rank)[1])


def _rank(item: Tuple[int, Tuple[int, ...]]) -> Tuple[int, int, Tuple[int, ...]]:
    cost, members = item
    return cost, len(members), members


def detect_shifting_event(chain: Chain, h0: int, h1: int, total: int, adversary: int,
                          validator: ChainValidator, measure: str = 'stake') -> bool:
    """Истина, если между высотами h₀ и h₁ произошло смещение виртуального ресурса."""
    found = select_majority(chain, h0, h1, total, adversary, validator, measure) is not None
    if found:
        logger.debug(f"Смещение ресурса между высотами {h0} и {h1} обнаружено")
    return found
