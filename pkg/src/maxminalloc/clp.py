"""Configuration-LP feasibility via column generation.

The master maximizes the fractional coverage level lambda subject to the
per-agent covering and per-item packing constraints; new bundle columns
are priced in by an exact two-class knapsack separation oracle.  Also
contains the lattice binary search for the feasibility threshold, the
minimal-solution transform and the support hypergraph used by the
integrality-gap certification matcher.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

import numpy as np

from . import simplex
from .model import (
    Epsilon,
    Instance,
    LatticeValue,
    ZERO,
    k_of,
    lattice_values,
    lights_needed,
)

DEFAULT_TOL = 1e-9
PRICE_TOL = 1e-7
MAX_ROUNDS = 300


class NoConfiguration(ValueError):
    """Agent cannot reach T even when given every item it likes."""


@dataclass(frozen=True)
class Column:
    agent: int
    items: FrozenSet[int]


@dataclass
class ClpResult:
    T: LatticeValue
    lambda_star: float
    feasible: bool
    converged: bool
    columns: List[Tuple[Column, float]]  # positive-mass primal columns
    duals_y: List[float]
    duals_z: List[float]


@dataclass
class SupportSolution:
    """Per-agent heavy-only / light-only configurations with fractional mass."""

    T: LatticeValue
    k: int
    heavy: Dict[int, Dict[FrozenSet[int], float]]
    light: Dict[int, Dict[FrozenSet[int], float]]


@dataclass
class SupportHypergraph:
    heavy_edges: Set[Tuple[int, int]]  # (agent, heavy item)
    light_configs: Dict[int, List[FrozenSet[int]]]
    r: int


def separate(
    inst: Instance,
    agent: int,
    T: LatticeValue,
    z: Sequence[float],
) -> Tuple[float, FrozenSet[int]]:
    """Cheapest configuration of agent under item prices z, exactly.

    For each heavy count h, the optimum takes the h cheapest heavy prices
    plus the minimally required number of cheapest light prices (prices
    are non-negative, so extra items never help).  Raises NoConfiguration
    when C(agent, T) is empty.
    """
    eps = inst.epsilon
    heavies = sorted(inst.b1(agent), key=lambda j: (z[j], j))
    lights = sorted(inst.beps(agent), key=lambda j: (z[j], j))
    hcost = np.cumsum([0.0] + [z[j] for j in heavies])
    lcost = np.cumsum([0.0] + [z[j] for j in lights])
    best = None
    for h in range(len(heavies) + 1):
        l = lights_needed(T, eps, h)
        if l > len(lights):
            continue
        cost = hcost[h] + lcost[l]
        if best is None or cost < best[0] - 1e-15:
            best = (cost, h, l)
        if l == 0:
            break  # adding more heavies only raises the cost
    if best is None:
        raise NoConfiguration(f"agent {agent} cannot reach T")
    cost, h, l = best
    return float(cost), frozenset(heavies[:h] + lights[:l])


def _initial_columns(inst: Instance, T: LatticeValue) -> List[Column]:
    cols = []
    zeros = [0.0] * inst.m
    for i in range(inst.n):
        _, s = separate(inst, i, T, zeros)
        cols.append(Column(i, s))
    return cols


def solve_clp(
    inst: Instance,
    T: LatticeValue,
    tol: float = DEFAULT_TOL,
    pool: Optional[Set[Column]] = None,
) -> ClpResult:
    """Column generation on the max-lambda master; feasible iff lambda* >= 1-tol."""
    eps = inst.epsilon
    if T.key(eps) <= 0:
        return ClpResult(T, 1.0, True, True, [], [0.0] * inst.n, [0.0] * inst.m)
    try:
        columns: List[Column] = _initial_columns(inst, T)
    except NoConfiguration:
        return ClpResult(T, 0.0, False, True, [], [0.0] * inst.n, [0.0] * inst.m)
    seen: Set[Column] = set(columns)
    tkey = T.key(eps)
    if pool:
        for col in pool:
            if col in seen:
                continue
            if inst.bundle_value(col.items).key(eps) >= tkey and col.items <= inst.interests[col.agent]:
                columns.append(col)
                seen.add(col)

    n, m = inst.n, inst.m
    lam = 0.0
    x = np.zeros(0)
    y = [0.0] * n
    z = [0.0] * m
    converged = False
    for _ in range(MAX_ROUNDS):
        nc = len(columns)
        # variables: lambda, then one per column
        A = np.zeros((n + m, 1 + nc))
        b = np.zeros(n + m)
        c = np.zeros(1 + nc)
        c[0] = 1.0
        for i in range(n):
            A[i, 0] = 1.0  # lambda - sum_S x_{i,S} <= 0
        for idx, col in enumerate(columns):
            A[col.agent, 1 + idx] = -1.0
            for j in col.items:
                A[n + j, 1 + idx] = 1.0
        b[n:] = 1.0
        sol, obj, duals = simplex.solve(c, A, b)
        lam, x = sol[0], sol[1:]
        y = [float(duals[i]) for i in range(n)]
        z = [float(duals[n + j]) for j in range(m)]
        added = False
        for i in range(n):
            cost, s = separate(inst, i, T, z)
            if y[i] - cost > PRICE_TOL:
                col = Column(i, s)
                if col not in seen:
                    columns.append(col)
                    seen.add(col)
                    added = True
        if not added:
            converged = True
            break
    if pool is not None:
        pool.update(seen)

    positive = [
        (columns[idx], float(x[idx]))
        for idx in range(len(columns))
        if idx < len(x) and x[idx] > 1e-12
    ]
    return ClpResult(T, float(lam), lam >= 1.0 - tol, converged, positive, y, z)


def estimate_Tstar(
    inst: Instance, tol: float = DEFAULT_TOL
) -> LatticeValue:
    """Largest lattice value T with CLP(T) feasible.

    C(i,T) only changes at lattice points, so the threshold is a lattice
    value and binary search over the (monotone) feasibility predicate
    applies.  A column pool is warm-started across probes.
    """
    values = lattice_values(inst)
    pool: Set[Column] = set()
    lo, hi, best = 0, len(values) - 1, ZERO
    while lo <= hi:
        mid = (lo + hi) // 2
        if values[mid].is_zero() or solve_clp(inst, values[mid], tol, pool).feasible:
            best = values[mid]
            lo = mid + 1
        else:
            hi = mid - 1
    return best


def minimalize(inst: Instance, res: ClpResult, T: LatticeValue) -> SupportSolution:
    """Split every positive column into its heavy restriction or keep the
    all-light column, then assert the covering/packing/shape properties."""
    if not res.feasible:
        raise ValueError("minimalize requires a feasible CLP result")
    eps = inst.epsilon
    k = k_of(T, eps)
    heavy: Dict[int, Dict[FrozenSet[int], float]] = {}
    light: Dict[int, Dict[FrozenSet[int], float]] = {}
    for col, mass in res.columns:
        hs = col.items & inst.heavy_ids
        if hs:
            bucket = heavy.setdefault(col.agent, {})
            bucket[hs] = bucket.get(hs, 0.0) + mass
        else:
            bucket = light.setdefault(col.agent, {})
            bucket[col.items] = bucket.get(col.items, 0.0) + mass
    sol = SupportSolution(T, k, heavy, light)
    _check_support(inst, sol)
    return sol


def _check_support(inst: Instance, sol: SupportSolution, tol: float = 1e-6):
    load = [0.0] * inst.m
    for i in range(inst.n):
        cover = 0.0
        for s, mass in sol.heavy.get(i, {}).items():
            if not (s <= inst.heavy_ids and len(s) >= 1 and s <= inst.b1(i)):
                raise AssertionError(f"bad heavy configuration {sorted(s)} for {i}")
            cover += mass
            for j in s:
                load[j] += mass
        for s, mass in sol.light.get(i, {}).items():
            if not (s <= inst.light_ids and len(s) >= sol.k and s <= inst.beps(i)):
                raise AssertionError(f"bad light configuration {sorted(s)} for {i}")
            cover += mass
            for j in s:
                load[j] += mass
        if cover < 1.0 - tol:
            raise AssertionError(f"covering constraint violated for agent {i}: {cover}")
    for j in range(inst.m):
        if load[j] > 1.0 + tol:
            raise AssertionError(f"packing constraint violated for item {j}: {load[j]}")


def build_support_hypergraph(sol: SupportSolution, r: int) -> SupportHypergraph:
    """Heavy edges materialized; light r-subsets represented by their parent
    configurations and enumerated lazily by the tree search."""
    heavy_edges: Set[Tuple[int, int]] = set()
    light_configs: Dict[int, List[FrozenSet[int]]] = {}
    agents = set(sol.heavy) | set(sol.light)
    for i, bucket in sol.heavy.items():
        for s in bucket:
            for j in s:
                heavy_edges.add((i, j))
    for i, bucket in sol.light.items():
        for s in bucket:
            if len(s) < r:
                raise ValueError(f"light configuration smaller than r={r}")
            light_configs.setdefault(i, []).append(s)
    if not agents:
        raise AssertionError("empty support (covering constraint violated)")
    return SupportHypergraph(heavy_edges, light_configs, r)
