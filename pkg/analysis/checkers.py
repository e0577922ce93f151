from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from core.chain import Chain, common_ancestor, is_prefix, truncate
from core.oracle import Digest
from .trace import RunTrace

COMMON_PREFIX = 'common_prefix'
LIVENESS = 'liveness'
TOTAL_ORDER = 'total_order'
NO_DUPLICATION = 'no_duplication'
AGREEMENT = 'agreement'


@dataclass(frozen=True)
class Violation:
    """Нарушение свойства: вид, шаг и свидетели (процессы и позиция/высота)."""
    kind: str
    step: int
    processes: Tuple[int, ...]
    position: Optional[int] = None
    detail: str = ''


def _events(trace: RunTrace, processes: List[int]) -> Dict[int, List[Tuple[int, Chain]]]:
    by_step: Dict[int, List[Tuple[int, Chain]]] = defaultdict(list)
    for process in processes:
        for step, chain in trace.snapshots.get(process, []):
            by_step[step].append((process, chain))
    return by_step


def check_common_prefix(trace: RunTrace, k: int) -> List[Violation]:
    """C_local^{t₁}(p)[:-k] ⪯ C_local^{t₂}(q) для всех t₁ <= t₂ и корректных p, q.

    Вместо всех пар хранится фронт максимальных обрезанных префиксов:
    если фронт: префикс цепочки, то и все более ранние префиксы тоже.
    Присоединившийся процесс проверяется с момента первой синхронизации.
    """
    processes = trace.correct_processes()
    events = _events(trace, processes)
    current: Dict[int, Chain] = {}
    frontier: List[Chain] = []
    violations: List[Violation] = []
    owners: Dict[Digest, int] = {}

    def checked(process: int, chain: Chain) -> bool:
        return chain.height > 0 or trace.join_steps.get(process, 0) == 0

    for step in sorted(events):
        changed = []
        for process, chain in events[step]:
            current[process] = chain
            changed.append(process)
        fresh = []
        for process in changed:
            prefix = truncate(current[process], k)
            if any(is_prefix(prefix, item) for item in frontier):
                continue
            frontier = [item for item in frontier if not is_prefix(item, prefix)]
            frontier.append(prefix)
            owners[prefix.digest] = process
            fresh.append(prefix)

        flagged: Set[int] = set()
        targets = [(p, current[p]) for p in sorted(current) if checked(p, current[p])]
        for process, chain in targets:
            pool = frontier if process in changed else fresh
            for prefix in pool:
                if not is_prefix(prefix, chain):
                    if process not in flagged:
                        flagged.add(process)
                        violations.append(Violation(
                            COMMON_PREFIX, step, (owners.get(prefix.digest, -1), process),
                            prefix.height,
                            f"префикс высоты {prefix.height} не является префиксом цепочки длины {len(chain)}"))
                    break
    return violations


def _last_honest_height(trace: RunTrace, chain: Chain, memo: Dict[Digest, int]) -> int:
    """Высота последнего честного блока цепочки (0, если таких нет)."""
    stack = []
    node: Optional[Chain] = chain
    while node is not None and node.digest not in memo:
        record = trace.provenance.get(node.digest)
        if node.parent is None:
            memo[node.digest] = 0
            break
        if record is None or not record.byzantine:
            memo[node.digest] = node.height
            break
        stack.append(node)
        node = node.parent
    value = memo[node.digest] if node is not None else 0
    for item in stack:
        memo[item.digest] = value
    return value


def check_liveness(trace: RunTrace, u: int) -> List[Violation]:
    """В каждом окне [t, t+u] у корректного процесса появляется честный блок.

    Подряд идущие неудачные окна одного процесса дают одно нарушение.
    """
    if u <= 0:
        return []
    violations: List[Violation] = []
    memo: Dict[Digest, int] = {}
    last = trace.steps - 1
    for process in trace.correct_processes():
        start = trace.join_steps.get(process, 0)
        cache: Dict[Tuple[Digest, Digest], bool] = {}
        failing_since: Optional[int] = None
        for t in range(start, last - u + 1):
            before, after = trace.chain_at(process, t), trace.chain_at(process, t + u)
            key = (before.digest, after.digest)
            ok = cache.get(key)
            if ok is None:
                base = common_ancestor(before, after).height
                ok = _last_honest_height(trace, after, memo) > base
                cache[key] = ok
            if not ok and failing_since is None:
                failing_since = t
            elif ok and failing_since is not None:
                violations.append(Violation(LIVENESS, failing_since, (process,), None,
                                            f"нет честного блока в окнах с {failing_since} по {t - 1}"))
                failing_since = None
        if failing_since is not None:
            violations.append(Violation(LIVENESS, failing_since, (process,), None,
                                        f"нет честного блока в окнах с {failing_since} до конца"))
    return violations


def check_total_order(trace: RunTrace, slack: int = 0) -> List[Violation]:
    """Свойства упорядоченной доставки у корректных процессов.

    total_order: последовательности попарно сравнимы по префиксу;
    no_duplication: транзакция доставлена процессом не больше одного раза;
    agreement: транзакция, доставленная кем-то не позже конца прогона минус
    slack, к концу доставлена всеми корректными процессами.
    """
    processes = [p for p in trace.correct_processes() if p in trace.deliveries]
    violations: List[Violation] = []
    sequences = {p: trace.deliveries[p] for p in processes}

    for process in processes:
        seen: Set = set()
        for position, (step, tx) in enumerate(sequences[process]):
            if tx in seen:
                violations.append(Violation(NO_DUPLICATION, step, (process,), position, str(tx)))
            seen.add(tx)

    for i, p in enumerate(processes):
        for q in processes[i + 1:]:
            a, b = sequences[p], sequences[q]
            for position in range(min(len(a), len(b))):
                if a[position][1] != b[position][1]:
                    step = max(a[position][0], b[position][0])
                    violations.append(Violation(
                        TOTAL_ORDER, step, (p, q), position,
                        f"{a[position][1]} против {b[position][1]}"))
                    break

    deadline = trace.steps - 1 - slack
    delivered_by = {p: {tx for _, tx in sequences[p]} for p in processes}
    reported: Set = set()
    for p in processes:
        for step, tx in sequences[p]:
            if step > deadline or tx in reported:
                continue
            missing = tuple(q for q in processes if tx not in delivered_by[q])
            if missing:
                reported.add(tx)
                violations.append(Violation(AGREEMENT, step, (p,) + missing, None, str(tx)))
    return violations


def check_all(trace: RunTrace, k: int, u: int, slack: int) -> Dict[str, List[Violation]]:
    """Все проверки одного следа, сгруппированные по виду нарушения."""
    grouped: Dict[str, List[Violation]] = {kind: [] for kind in
                                           (COMMON_PREFIX, LIVENESS, TOTAL_ORDER, NO_DUPLICATION, AGREEMENT)}
    for violation in (check_common_prefix(trace, k) + check_liveness(trace, u)
                      + check_total_order(trace, slack)):
        grouped[violation.kind].append(violation)
    return grouped
