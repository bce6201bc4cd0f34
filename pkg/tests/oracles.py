"""Independent brute-force oracles used to pin down solver results.

Everything here is deliberately naive: plain enumeration over Fractions,
sharing no code paths with the package under test.
"""

from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from maxminalloc.model import HEAVY, Instance


def item_weight(inst: Instance, j: int) -> Fraction:
    if inst.items[j].kind == HEAVY:
        return Fraction(1)
    return Fraction(inst.epsilon.numerator, inst.epsilon.denominator)


def bundle_weight(inst: Instance, items) -> Fraction:
    return sum((item_weight(inst, j) for j in items), Fraction(0))


def naive_opt(inst: Instance) -> Fraction:
    """Max over all assignments (item -> agent or unassigned) of the min
    agent value.  Exponential; keep n*m tiny."""
    best = Fraction(0)
    values = [Fraction(0)] * inst.n

    def go(j: int):
        nonlocal best
        if j == inst.m:
            best = max(best, min(values))
            return
        go(j + 1)  # leave item j unassigned
        for i in range(inst.n):
            if j in inst.interests[i]:
                values[i] += item_weight(inst, j)
                go(j + 1)
                values[i] -= item_weight(inst, j)

    go(0)
    return best


def brute_heavy_matching(inst: Instance) -> int:
    """Max agent/heavy-item matching size by exhaustive search."""
    heavy = sorted(inst.heavy_ids)

    def go(i: int, used: Set[int]) -> int:
        if i == inst.n:
            return 0
        best = go(i + 1, used)
        for j in heavy:
            if j not in used and j in inst.interests[i]:
                used.add(j)
                best = max(best, 1 + go(i + 1, used))
                used.remove(j)
        return best

    return go(0, set())


def brute_count_feasible(inst: Instance, t: int) -> bool:
    """Can every agent receive t interested items, all disjoint?"""

    def go(i: int, used: Set[int]) -> bool:
        if i == inst.n:
            return True
        pool = sorted(inst.interests[i] - used)
        for combo in combinations(pool, t):
            used.update(combo)
            if go(i + 1, used):
                used.difference_update(combo)
                return True
            used.difference_update(combo)
        return False

    return go(0, set())


def brute_disjoint_paths(
    succ: Dict[object, List[object]],
    sources: Sequence[int],
    sinks: Sequence[int],
) -> int:
    """Max number of node-disjoint paths from agent sources to agent sinks."""
    sink_set = {("A", t) for t in sinks}

    def paths_from(start, banned: Set[object]):
        # all simple paths from start avoiding banned nodes
        out = []
        stack = [(start, [start])]
        while stack:
            node, path = stack.pop()
            if node in sink_set:
                out.append(path)
                # a sink may also continue, but stopping here is enough:
                # longer paths only ban more nodes
            for nxt in succ.get(node, ()):
                if nxt not in banned and nxt not in path:
                    stack.append((nxt, path + [nxt]))
        return out

    srcs = sorted(set(sources))

    def go(idx: int, banned: Set[object]) -> int:
        if idx == len(srcs):
            return 0
        best = go(idx + 1, banned)  # skip this source
        start = ("A", srcs[idx])
        if start not in banned:
            for path in paths_from(start, banned):
                best = max(best, 1 + go(idx + 1, banned | set(path)))
        return best

    return go(0, set())


def brute_min_knapsack(
    inst: Instance, agent: int, T: Fraction, z: Sequence[float]
) -> Optional[float]:
    """Min sum of z over all bundles of weight >= T; None if no bundle."""
    pool = sorted(inst.interests[agent])
    best = None
    for size in range(len(pool) + 1):
        for combo in combinations(pool, size):
            if bundle_weight(inst, combo) >= T:
                cost = sum(z[j] for j in combo)
                if best is None or cost < best:
                    best = cost
    return best
