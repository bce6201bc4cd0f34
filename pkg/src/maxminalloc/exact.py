"""Exact optimum oracle for desk-scale instances.

Feasibility of a T-allocation is decided by a depth-first search over
(agent prefix, used-item bitmask) states, transitioning only through
inclusion-minimal satisfying bundles (extra items never help), with
memoization of failed states.  The optimum is the largest lattice value
that is feasible (feasibility is monotone decreasing in T).
"""

from __future__ import annotations

import itertools
from typing import Dict, FrozenSet, List, Optional, Tuple

from .model import (
    Allocation,
    Instance,
    LatticeValue,
    ZERO,
    lattice_values,
    lights_needed,
)

DEFAULT_SIZE_CAP = 22


class InstanceTooLarge(ValueError):
    """Instance exceeds the exact-mode item cap."""


def _minimal_count_pairs(T, eps, max_h: int, max_l: int) -> List[Tuple[int, int]]:
    """Inclusion-minimal (heavy, light) count pairs reaching weight >= T."""
    pairs = []
    prev_l = None
    for h in range(max_h + 1):
        l = lights_needed(T, eps, h)
        if h > 0 and prev_l is not None and l >= prev_l:
            break  # extra heavies no longer reduce the light need: not minimal
        if l <= max_l:
            pairs.append((h, l))
        prev_l = l
        if l == 0:
            break
    return pairs


def feasible_at(
    inst: Instance, T: LatticeValue, size_cap: int = DEFAULT_SIZE_CAP
) -> Tuple[bool, Optional[Allocation]]:
    """Decide whether a T-allocation exists; return a witness when it does."""
    if inst.m > size_cap:
        raise InstanceTooLarge(f"{inst.m} items exceeds exact-mode cap {size_cap}")
    eps = inst.epsilon
    if T.key(eps) <= 0:
        return True, {i: frozenset() for i in range(inst.n)}

    heavy = [sorted(inst.b1(i)) for i in range(inst.n)]
    light = [sorted(inst.beps(i)) for i in range(inst.n)]
    # quick reject: some agent cannot reach T even with everything it likes
    for i in range(inst.n):
        if lights_needed(T, eps, len(heavy[i])) > len(light[i]):
            return False, None

    n = inst.n
    failed: set = set()
    assignment: List[FrozenSet[int]] = [frozenset()] * n

    def go(i: int, used: int) -> bool:
        if i == n:
            return True
        if (i, used) in failed:
            return False
        ah = [j for j in heavy[i] if not (used >> j) & 1]
        al = [j for j in light[i] if not (used >> j) & 1]
        for h, l in _minimal_count_pairs(T, eps, len(ah), len(al)):
            for hs in itertools.combinations(ah, h):
                for ls in itertools.combinations(al, l):
                    mask = used
                    for j in hs:
                        mask |= 1 << j
                    for j in ls:
                        mask |= 1 << j
                    if go(i + 1, mask):
                        assignment[i] = frozenset(hs + ls)
                        return True
        failed.add((i, used))
        return False

    if go(0, 0):
        return True, {i: assignment[i] for i in range(n)}
    return False, None


def opt(
    inst: Instance, size_cap: int = DEFAULT_SIZE_CAP
) -> Tuple[LatticeValue, Allocation]:
    """Largest feasible lattice value plus a witness allocation."""
    values = lattice_values(inst)
    # binary search on the monotone feasibility predicate
    lo, hi = 0, len(values) - 1
    best = ZERO
    best_witness: Allocation = {i: frozenset() for i in range(inst.n)}
    while lo <= hi:
        mid = (lo + hi) // 2
        ok, witness = feasible_at(inst, values[mid], size_cap)
        if ok:
            best, best_witness = values[mid], witness
            lo = mid + 1
        else:
            hi = mid - 1
    return best, best_witness
