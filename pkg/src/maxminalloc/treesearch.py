"""Alternating-tree local search over heavy edges and r-light edges.

Grows a tree of addable edges and the matching edges that block them,
rooted at an unmatched agent; an unblocked addable edge triggers a
contraction that swaps it into the matching.  Two edge-selection policies:
ARBITRARY (first addable edge; exponential signature bound) and CLOSEST
(minimum light-edge distance from the root; quasi-polynomial bound).
Addable edges can be drawn from the full interest sets or from a CLP
support hypergraph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .model import (
    Allocation,
    Epsilon,
    Instance,
    LatticeValue,
    ZERO,
    k_of,
    lattice_values,
    min_value,
)
from . import flowkit
from .clp import ClpResult, SupportHypergraph, build_support_hypergraph, minimalize

ARBITRARY = "arbitrary"
CLOSEST = "closest"

MATCHED = "matched"
STALLED = "stalled"
BUDGET_EXCEEDED = "budget"

DEFAULT_BUDGET = 10**6

HEAVY_KIND = "H"
LIGHT_KIND = "L"

Bundle = Tuple[str, FrozenSet[int]]


class TreeInvariantError(AssertionError):
    """A structural invariant of the alternating tree was violated."""


class CertificationError(RuntimeError):
    """The support matcher stalled despite a feasible CLP point."""


@dataclass
class AddEdge:
    agent: int
    items: FrozenSet[int]
    kind: str
    ts: int
    dist: int
    blockers: Set[int] = field(default_factory=set)  # live blocking-edge owners


@dataclass
class BlockEdge:
    agent: int  # owner of the blocking matching edge
    kind: str
    ts: int
    dist: int


@dataclass
class Candidate:
    agent: int
    items: FrozenSet[int]
    kind: str
    dist: int


class TreeState:
    def __init__(self, inst: Instance, M: Dict[int, Bundle], owner: Dict[int, int],
                 i0: int, r: int, policy: str,
                 support: Optional[SupportHypergraph] = None):
        self.inst = inst
        self.M = M
        self.owner = owner  # item -> agent holding it in M
        self.i0 = i0
        self.r = r
        self.policy = policy
        self.support = support
        self.edges: List[AddEdge] = []       # addable edges, timestamp order
        self.blockers: Dict[int, BlockEdge] = {}  # owner agent -> blocking edge
        self.tree_items: Set[int] = set()
        self.ts = 0
        self.last_signature = None

    # -- structure helpers -----------------------------------------------

    def agents_in_tree(self) -> List[int]:
        return sorted({self.i0} | set(self.blockers))

    def dist_of_agent(self, i: int) -> int:
        return 0 if i == self.i0 else self.blockers[i].dist

    def blocking_of(self, items: FrozenSet[int]) -> Set[int]:
        return {self.owner[j] for j in items if j in self.owner}

    def rebuild_items(self):
        items: Set[int] = set()
        for e in self.edges:
            items |= e.items
        for a in self.blockers:
            items |= self.M[a][1]
        self.tree_items = items

    # -- signatures --------------------------------------------------------

    def signature(self):
        if self.policy == ARBITRARY:
            return tuple(len(e.blockers) for e in self.edges) + (math.inf,)
        maxd = 0
        for e in self.edges:
            maxd = max(maxd, e.dist)
        for b in self.blockers.values():
            maxd = max(maxd, b.dist)
        coords = []
        for d in range(maxd + 1):
            x_d = sum(1 for e in self.edges if e.dist == d)
            if d % 2 == 0:
                b_d = sum(
                    1 for b in self.blockers.values()
                    if b.dist == d and b.kind == HEAVY_KIND
                )
            else:
                b_d = sum(
                    1 for b in self.blockers.values()
                    if b.dist == d + 1 and b.kind == LIGHT_KIND
                )
            coords += [-x_d, b_d]
        return tuple(coords) + (math.inf,)

    def check_signature_decreased(self):
        sig = self.signature()
        if self.last_signature is not None and not sig < self.last_signature:
            raise TreeInvariantError(
                f"signature did not decrease: {self.last_signature} -> {sig}"
            )
        self.last_signature = sig

    def check_structure(self):
        """Distance parity / blocker-kind invariants."""
        for e in self.edges:
            if e.kind == LIGHT_KIND and e.dist % 2 == 0:
                raise TreeInvariantError("light addable edge at even distance")
            if e.kind == HEAVY_KIND and e.dist % 2 == 1:
                raise TreeInvariantError("heavy addable edge at odd distance")
        for b in self.blockers.values():
            if b.dist % 2 == 1:
                raise TreeInvariantError("blocking edge at odd distance")
            if b.agent not in self.M:
                raise TreeInvariantError("blocker is not a matching edge")
        for e in self.edges:
            if e.kind == HEAVY_KIND and len(e.blockers) > 1:
                raise TreeInvariantError("heavy edge with more than one blocker")
            for a in e.blockers:
                if self.M[a][0] != e.kind:
                    raise TreeInvariantError("blocker kind mismatch")

    # -- candidate enumeration ----------------------------------------------

    def _heavy_items_for(self, i: int):
        if self.support is None:
            return sorted(self.inst.b1(i))
        return sorted(j for (a, j) in self.support.heavy_edges if a == i)

    def _light_pools_for(self, i: int):
        if self.support is None:
            return [self.inst.beps(i)]
        return self.support.light_configs.get(i, [])

    def candidates(self) -> List[Candidate]:
        out: List[Candidate] = []
        for i in self.agents_in_tree():
            base = self.dist_of_agent(i)
            for j in self._heavy_items_for(i):
                if j not in self.tree_items:
                    out.append(Candidate(i, frozenset([j]), HEAVY_KIND, base))
                    break  # lowest item id suffices for either policy
            best_pool = None
            for pool in self._light_pools_for(i):
                fresh = sorted(pool - self.tree_items)
                if len(fresh) >= self.r:
                    pick = tuple(fresh[: self.r])
                    if best_pool is None or pick < best_pool:
                        best_pool = pick
            if best_pool is not None:
                out.append(Candidate(i, frozenset(best_pool), LIGHT_KIND, base + 1))
        return out


def find_addable(state: TreeState) -> Optional[Candidate]:
    cands = state.candidates()
    if not cands:
        return None
    if state.policy == CLOSEST:
        return min(cands, key=lambda c: (c.dist, c.agent, sorted(c.items)))
    return min(cands, key=lambda c: (c.agent, c.kind != HEAVY_KIND, sorted(c.items)))


def _set_bundle(state: TreeState, agent: int, kind: str, items: FrozenSet[int]):
    old = state.M.get(agent)
    if old is not None:
        for j in old[1]:
            del state.owner[j]
    state.M[agent] = (kind, items)
    for j in items:
        state.owner[j] = agent


def add_edge(state: TreeState, cand: Candidate) -> AddEdge:
    if cand.items & state.tree_items:
        raise TreeInvariantError("edge items collide with the tree")
    state.ts += 1
    blocking = state.blocking_of(cand.items)
    e = AddEdge(cand.agent, cand.items, cand.kind, state.ts, cand.dist, set(blocking))
    state.edges.append(e)
    state.tree_items |= e.items
    bdist = cand.dist + (1 if cand.kind == LIGHT_KIND else 0)
    for a in sorted(blocking):
        if a not in state.blockers:
            state.blockers[a] = BlockEdge(a, state.M[a][0], state.ts, bdist)
            state.tree_items |= state.M[a][1]
    return e


def contract(state: TreeState, cand: Candidate) -> bool:
    """Swap the unblocked edge into the matching; True iff the root got matched.

    Evicts the blocking edge that introduced the edge's agent, truncates
    all tree edges added after it and cascades on any edge whose blocker
    set empties.
    """
    while True:
        if cand.agent == state.i0:
            _set_bundle(state, state.i0, cand.kind, cand.items)
            return True
        f = state.blockers[cand.agent]
        _set_bundle(state, cand.agent, cand.kind, cand.items)
        ts_f = f.ts
        state.edges = [e for e in state.edges if e.ts <= ts_f]
        state.blockers = {
            a: b for a, b in state.blockers.items() if b.ts <= ts_f and a != f.agent
        }
        emptied: List[AddEdge] = []
        for e in state.edges:
            if f.agent in e.blockers:
                e.blockers.discard(f.agent)
                if not e.blockers:
                    emptied.append(e)
        state.rebuild_items()
        if not emptied:
            return False
        if len(emptied) > 1:
            raise TreeInvariantError("multiple edges emptied by one eviction")
        nxt = emptied[0]
        state.edges.remove(nxt)
        state.rebuild_items()
        cand = Candidate(nxt.agent, nxt.items, nxt.kind, nxt.dist)


@dataclass
class ExtendStats:
    iterations: int = 0
    contractions: int = 0


def extend_matching(
    inst: Instance,
    M: Dict[int, Bundle],
    owner: Dict[int, int],
    i0: int,
    r: int,
    policy: str = CLOSEST,
    support: Optional[SupportHypergraph] = None,
    budget: int = DEFAULT_BUDGET,
    stats: Optional[ExtendStats] = None,
) -> str:
    """Grow M so that i0 gets a heavy item or r light items.

    Returns MATCHED, STALLED or BUDGET_EXCEEDED.  Previously matched agents
    stay matched (their bundles may be reshuffled).
    """
    if i0 in M:
        raise ValueError("root already matched")
    state = TreeState(inst, M, owner, i0, r, policy, support)
    stats = stats if stats is not None else ExtendStats()
    matched_before = set(M)
    while stats.iterations < budget:
        stats.iterations += 1
        cand = find_addable(state)
        if cand is None:
            return STALLED
        if not state.blocking_of(cand.items):
            stats.contractions += 1
            if contract(state, cand):
                if not matched_before <= set(M):
                    raise TreeInvariantError("a matched agent lost its bundle")
                return MATCHED
        else:
            add_edge(state, cand)
        state.check_signature_decreased()
        state.check_structure()
    return BUDGET_EXCEEDED


def matching_allocation(M: Dict[int, Bundle]) -> Allocation:
    return {a: items for a, (kind, items) in M.items()}


def _probe(
    inst: Instance,
    r: int,
    policy: str,
    support: Optional[SupportHypergraph],
    budget: int,
) -> Tuple[str, Dict[int, Bundle], ExtendStats]:
    M: Dict[int, Bundle] = {}
    owner: Dict[int, int] = {}
    stats = ExtendStats()
    for i0 in range(inst.n):
        outcome = extend_matching(
            inst, M, owner, i0, r, policy, support, budget, stats
        )
        if outcome != MATCHED:
            return outcome, M, stats
    return MATCHED, M, stats


def t_probe_candidates(inst: Instance) -> List[LatticeValue]:
    """Positive lattice values up to the 3/2 normalization cap."""
    eps = inst.epsilon
    out = []
    for v in lattice_values(inst):
        if v.key(eps) <= 0:
            continue
        if 2 * v.key(eps) <= 3 * eps.denominator:  # v <= 3/2
            out.append(v)
    return out


def _quasi_r(k: int, eps: Epsilon) -> int:
    # r = ceil(k / (3 + 4*eps)) computed over integers
    num = k * eps.denominator
    den = 3 * eps.denominator + 4 * eps.numerator
    return -(-num // den)


@dataclass
class SolveReport:
    value: LatticeValue
    allocation: Allocation
    algo: str
    certified_T: Optional[LatticeValue] = None
    r: Optional[int] = None
    iterations: int = 0
    meta: Dict[str, object] = field(default_factory=dict)


def quasi_solve(inst: Instance, budget: int = DEFAULT_BUDGET) -> SolveReport:
    """Binary search on T with the CLOSEST-policy matcher; a stalled probe is
    treated as evidence that T exceeds the optimum.  Falls back to the
    1/eps count baseline, which dominates for eps >= 1/4."""
    eps = inst.epsilon
    base_val, base_alloc = flowkit.baseline_solve(inst)
    report = SolveReport(base_val, base_alloc, "quasi(baseline)")
    cands = t_probe_candidates(inst)
    lo, hi = 0, len(cands) - 1
    best: Optional[Tuple[LatticeValue, int, Dict[int, Bundle], int]] = None
    while lo <= hi:
        mid = (lo + hi) // 2
        T = cands[mid]
        r = _quasi_r(k_of(T, eps), eps)
        outcome, M, stats = _probe(inst, r, CLOSEST, None, budget)
        if outcome == MATCHED:
            best = (T, r, M, stats.iterations)
            lo = mid + 1
        else:
            hi = mid - 1
    if best is not None:
        T, r, M, iters = best
        alloc = matching_allocation(M)
        value = min_value(inst, alloc)
        if value.key(eps) > base_val.key(eps):
            report = SolveReport(value, alloc, "quasi", T, r, iters)
        else:
            report.certified_T = T
            report.r = r
    return report


def gap3_certify(inst: Instance, clpres: ClpResult, T: LatticeValue,
                 budget: int = DEFAULT_BUDGET) -> Allocation:
    """Round a feasible CLP(T) point into an allocation of value >= T/3.

    Builds the minimal support hypergraph with r = ceil(k/3) and runs the
    ARBITRARY-policy matcher on it.  The support hypergraph always admits
    a perfect matching at this r, so a stall indicates a bug and raises.
    """
    eps = inst.epsilon
    k = k_of(T, eps)
    r = -(-k // 3)
    sol = minimalize(inst, clpres, T)
    support = build_support_hypergraph(sol, r)
    outcome, M, _ = _probe(inst, r, ARBITRARY, support, budget)
    if outcome != MATCHED:
        raise CertificationError(
            f"support matcher stalled at T={T}; this should be impossible"
        )
    return matching_allocation(M)
