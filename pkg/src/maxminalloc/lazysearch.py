"""Layered local search with lazy updates, polynomial signature bound.

Heavy edges never enter the layered structure; they live in the residual
digraph over heavy items and connect blocking light edges to addable
light edges via node-disjoint paths.  Layers hold blocked size-p addable
edges (X_i) and the size-r matching edges blocking them (Y_i); unblocked
addable edges collect in I.  A layer collapses once enough of its
blockers can be swapped out along flow paths, and collapsing layer 0
matches the root agent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .model import Allocation, Instance, LatticeValue, k_of, min_value
from .flowkit import (
    HeavyMatching,
    PathFlow,
    ResidualDigraph,
    baseline_solve,
    max_heavy_matching,
)
from .treesearch import (
    Bundle,
    HEAVY_KIND,
    LIGHT_KIND,
    MATCHED,
    STALLED,
    BUDGET_EXCEEDED,
    DEFAULT_BUDGET,
    SolveReport,
    t_probe_candidates,
)

MU_DEFAULT = 1e-10


class LazyInvariantError(AssertionError):
    """A structural invariant of the layered search was violated."""


@dataclass(frozen=True)
class Params:
    r: int
    p: int
    mu: float = MU_DEFAULT

    def validate(self, k: int):
        if not 0 < self.r < self.p < k:
            raise ValueError(f"need 0 < r < p < k, got r={self.r} p={self.p} k={k}")
        if not 0.0 < self.mu < 1.0:
            raise ValueError("mu must lie in (0,1)")


@dataclass(frozen=True)
class LightEdge:
    agent: int
    items: FrozenSet[int]


@dataclass
class LazyStats:
    iterations: int = 0
    collapses: int = 0
    layers_peak: int = 0


class LazyState:
    """Layers, the unblocked set I and the matching, for one root agent."""

    def __init__(self, inst: Instance, M: Dict[int, Bundle], i0: int,
                 params: Params, agents: Set[int], heavy_items: Set[int]):
        self.inst = inst
        self.M = M
        self.i0 = i0
        self.params = params
        self.agents = agents
        self.heavy_items = heavy_items
        # layer 0 holds the dummy blocking edge (i0, {}) and no X edges
        self.X: List[List[LightEdge]] = [[]]
        self.Y: List[Set[int]] = [{i0}]
        self.I: List[LightEdge] = []

    # -- derived views ------------------------------------------------------

    def heavy_matching(self) -> HeavyMatching:
        return {
            a: next(iter(items))
            for a, (kind, items) in self.M.items()
            if kind == HEAVY_KIND and a in self.agents
        }

    def owner_light(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for a, (kind, items) in self.M.items():
            if kind == LIGHT_KIND:
                for j in items:
                    out[j] = a
        return out

    def tree_lights(self) -> Set[int]:
        items: Set[int] = set()
        for layer in self.X:
            for e in layer:
                items |= e.items
        for e in self.I:
            items |= e.items
        for yi in self.Y:
            for a in yi:
                if a in self.M:  # the layer-0 dummy carries no items
                    items |= self.M[a][1]
        return items

    def digraph(self) -> ResidualDigraph:
        return ResidualDigraph(
            self.inst, self.heavy_matching(), self.agents, self.heavy_items
        )

    def free_items_of(self, e: LightEdge, owner: Dict[int, int]) -> List[int]:
        return sorted(j for j in e.items if j not in owner)

    # -- invariants ---------------------------------------------------------

    def signature(self):
        mu = self.params.mu
        scale = -math.log1p(-mu)
        coords = []
        for i in range(1, len(self.Y)):
            if not self.Y[i]:
                coords.append(-math.inf)
            else:
                coords.append(
                    math.floor(
                        (math.log(len(self.Y[i])) - 2 * i * math.log(mu)) / scale
                    )
                )
        return tuple(coords) + (math.inf,)

    def check_invariants(self):
        r, p = self.params.r, self.params.p
        owner = self.owner_light()
        # layers partition: Y_i is exactly the blocker set of X_i
        for i in range(1, len(self.Y)):
            blockers = {
                owner[j] for e in self.X[i] for j in e.items if j in owner
            }
            if blockers != self.Y[i]:
                raise LazyInvariantError(f"Y_{i} is not blocking(X_{i})")
        # counting bound: every blocked edge has >= p-r+1 blocked items
        x_total = y_total = 0
        for i in range(1, len(self.Y)):
            x_total += len(self.X[i])
            y_total += len(self.Y[i]) + (1 if i == 1 else 0)  # dummy in Y_<=t
            if (p - r + 1) * x_total > r * y_total:
                raise LazyInvariantError(f"counting bound fails at layer {i}")
        for e in self.I:
            if len(self.free_items_of(e, owner)) < r:
                raise LazyInvariantError("blocked edge in I")
        # Fact 1, from scratch: f(Y_<=t-1, X_<=t u I) >= |X_<=t|
        for t in range(1, len(self.Y)):
            sources = set()
            for i in range(t):
                sources |= self.Y[i]
            sinks = {e.agent for i in range(1, t + 1) for e in self.X[i]}
            sinks |= {e.agent for e in self.I}
            pf = PathFlow(self.digraph())
            for a in sources:
                pf.add_source(a)
            for a in sinks:
                pf.add_sink(a)
            pf.augment_to_max()
            need = sum(len(self.X[i]) for i in range(1, t + 1))
            if pf.value < need:
                raise LazyInvariantError(
                    f"flow invariant fails at layer {t}: {pf.value} < {need}"
                )


def preprocess(inst: Instance) -> Tuple[Set[int], Set[int], Dict[int, int], HeavyMatching]:
    """Assign degree-1 heavy items to their unique agent, cascading, then
    match the residue.  Returns (remaining agents, remaining heavy items,
    forced assignments, max heavy matching on the residue)."""
    agents = set(range(inst.n))
    heavy = set(inst.heavy_ids)
    forced: Dict[int, int] = {}
    while True:
        degree: Dict[int, List[int]] = {j: [] for j in heavy}
        for i in sorted(agents):
            for j in inst.b1(i):
                if j in heavy:
                    degree[j].append(i)
        pick = None
        for j in sorted(heavy):
            if len(degree[j]) == 1:
                pick = (degree[j][0], j)
                break
        if pick is None:
            break
        i, j = pick
        forced[i] = j
        agents.discard(i)
        heavy.discard(j)
    matching = max_heavy_matching(inst, agents, heavy)
    return agents, heavy, forced, matching


def addable_test(pf: PathFlow, agent: int) -> bool:
    """True iff a new edge at `agent` raises the node-disjoint path count."""
    return pf.would_increase(agent)


def _addability_flow(state: LazyState) -> PathFlow:
    pf = PathFlow(state.digraph())
    for yi in state.Y:
        for a in yi:
            pf.add_source(a)
    for layer in state.X:
        for e in layer:
            pf.add_sink(e.agent)
    for e in state.I:
        pf.add_sink(e.agent)
    pf.augment_to_max()
    return pf


def build_layer(state: LazyState) -> Tuple[int, int]:
    """Scan for addable edges; returns (#added to I, #added to X_{l+1}).

    A new layer is appended only when some addable edge is blocked.
    """
    r, p = state.params.r, state.params.p
    pf = _addability_flow(state)
    owner = state.owner_light()
    tree = state.tree_lights()
    new_x: List[LightEdge] = []
    added_i = 0
    changed = True
    while changed:
        changed = False
        for i in sorted(state.agents):
            fresh = sorted(state.inst.beps(i) - tree)
            if len(fresh) < p:
                continue
            if not addable_test(pf, i):
                continue
            e = LightEdge(i, frozenset(fresh[:p]))
            if len(state.free_items_of(e, owner)) >= r:
                state.I.append(e)
                added_i += 1
            else:
                new_x.append(e)
            pf.add_sink(i)
            if pf.augment_to_max() != 1:
                raise LazyInvariantError("addable edge did not raise the flow")
            tree |= e.items
            changed = True
    if new_x:
        blockers = {owner[j] for e in new_x for j in e.items if j in owner}
        if not blockers:
            raise LazyInvariantError("blocked edges without blockers")
        state.X.append(new_x)
        state.Y.append(blockers)
    return added_i, len(new_x)


def compute_W(state: LazyState) -> Tuple[List[List[List[object]]], List[List[LightEdge]]]:
    """Layer-ordered flow F(Y_<=l, I); returns per-layer paths W_i and the
    unblocked edges I_i they reach."""
    pf = PathFlow(state.digraph())
    for e in state.I:
        pf.add_sink(e.agent)
    prefix = []
    for yi in state.Y:
        for a in sorted(yi):
            pf.add_source(a)
        pf.augment_to_max(allowed_sources=set(yi))
        prefix.append(pf.value)
    layer_of = {a: i for i, yi in enumerate(state.Y) for a in yi}
    W: List[List[List[object]]] = [[] for _ in state.Y]
    for path in pf.paths():
        W[layer_of[path[0][1]]].append(path)
    total = 0
    for i, wi in enumerate(W):
        total += len(wi)
        if total != prefix[i]:
            raise LazyInvariantError("layered flow does not match prefix values")
    by_agent = {e.agent: e for e in state.I}
    I_layers = [[by_agent[path[-1][1]] for path in wi] for wi in W]
    return W, I_layers


def _reverse_path(state: LazyState, path: List[object]):
    """Reverse every heavy arc on the path, reassigning the heavy items."""
    removals = []
    additions = []
    for a, b in zip(path, path[1:]):
        if a[0] == "A":  # forward arc agent -> unmatched heavy item
            additions.append((a[1], b[1]))
        else:  # matched arc heavy item -> agent
            removals.append((b[1], a[1]))
    for i, j in removals:
        if state.M.get(i) != (HEAVY_KIND, frozenset([j])):
            raise LazyInvariantError("path does not follow the matching")
        del state.M[i]
    for i, j in additions:
        state.M[i] = (HEAVY_KIND, frozenset([j]))


def collapse(state: LazyState, t: int, W: List[List[List[object]]],
             I_layers: List[List[LightEdge]]) -> bool:
    """Collapse layer t; True iff the root agent got matched (t = 0).

    Swaps each reached blocker for a fresh r-light edge carved out of the
    unblocked edge at the other end of its path, reversing the heavy arcs
    in between, then truncates the layers above t and re-admits any X_t
    edge the swaps unblocked.
    """
    r = state.params.r
    owner_before = state.owner_light()
    heavy_before = sum(1 for kind, _ in state.M.values() if kind == HEAVY_KIND)
    swapped: Set[int] = set()
    for path, e2 in zip(W[t], I_layers[t]):
        u = path[0][1]
        v = path[-1][1]
        if e2.agent != v:
            raise LazyInvariantError("path endpoint does not own the I edge")
        free = state.free_items_of(e2, owner_before)
        if len(free) < r:
            raise LazyInvariantError("consumed edge is not unblocked")
        if t == 0:
            if u != state.i0 or u in state.M:
                raise LazyInvariantError("layer-0 source is not the root")
        else:
            del state.M[u]
            swapped.add(u)
        _reverse_path(state, path)
        state.M[v] = (LIGHT_KIND, frozenset(free[:r]))
    heavy_after = sum(1 for kind, _ in state.M.values() if kind == HEAVY_KIND)
    if heavy_after != heavy_before:
        raise LazyInvariantError("collapse changed the heavy-matching size")
    if t == 0:
        return True
    state.Y[t] -= swapped
    # Step-(2): keep only the unblocked edges reached below layer t
    kept = {e.agent for i in range(t) for e in I_layers[i]}
    state.I = [e for e in state.I if e.agent in kept]
    # Step-(3): drop the layers above, release newly unblocked X_t edges
    del state.X[t + 1 :]
    del state.Y[t + 1 :]
    owner = state.owner_light()
    released = [
        e for e in state.X[t] if len(state.free_items_of(e, owner)) >= r
    ]
    state.X[t] = [
        e for e in state.X[t] if len(state.free_items_of(e, owner)) < r
    ]
    state.Y[t] &= {owner[j] for e in state.X[t] for j in e.items if j in owner}
    pf = _addability_flow(state)
    for e in sorted(released, key=lambda e: e.agent):
        if addable_test(pf, e.agent):
            state.I.append(e)
            pf.add_sink(e.agent)
            pf.augment_to_max()
    return False


def extend_matching_poly(
    inst: Instance,
    M: Dict[int, Bundle],
    i0: int,
    params: Params,
    budget: int = DEFAULT_BUDGET,
    agents: Optional[Set[int]] = None,
    heavy_items: Optional[Set[int]] = None,
    stats: Optional[LazyStats] = None,
) -> str:
    """Grow M so that i0 gets a heavy item or r light items.

    Alternates collapse (earliest qualifying layer first) and layer
    building; returns MATCHED, STALLED or BUDGET_EXCEEDED.
    """
    if i0 in M:
        raise ValueError("root already matched")
    if agents is None:
        agents = set(range(inst.n))
    if heavy_items is None:
        heavy_items = set(inst.heavy_ids)
    state = LazyState(inst, M, i0, params, agents, heavy_items)
    stats = stats if stats is not None else LazyStats()
    matched_before = set(M)
    mu = params.mu
    last_sig = None
    while stats.iterations < budget:
        stats.iterations += 1
        progressed = False
        while True:
            W, I_layers = compute_W(state)
            t = None
            for i in range(len(state.Y)):
                need = max(1, math.ceil(mu * len(state.Y[i])))
                if len(I_layers[i]) >= need:
                    t = i
                    break
            if t is not None:
                stats.collapses += 1
                if collapse(state, t, W, I_layers):
                    if not matched_before <= set(state.M):
                        raise LazyInvariantError("a matched agent lost its bundle")
                    return MATCHED
                progressed = True
                break
            added_i, added_x = build_layer(state)
            if added_x:
                stats.layers_peak = max(stats.layers_peak, len(state.Y) - 1)
                progressed = True
                break
            if not added_i:
                return STALLED
            # only I grew: no signature movement yet, retry the collapse
        state.check_invariants()
        sig = state.signature()
        if last_sig is not None and not sig < last_sig:
            raise LazyInvariantError(
                f"signature did not decrease: {last_sig} -> {sig}"
            )
        last_sig = sig
        assert progressed
    return BUDGET_EXCEEDED


def _poly_r(k: int) -> int:
    return max(-(-k // 9), math.ceil((k - 10) / (3 + 2 * math.sqrt(2))), 1)


def _p_candidates(r: int, k: int, sweep: bool) -> List[int]:
    if sweep:
        return list(range(r + 1, k))
    out = []
    for p in (3 * r - 1, math.ceil((2 + math.sqrt(2)) * r) - 1):
        if r < p < k and p not in out:
            out.append(p)
    return out


def _probe(inst: Instance, params: Params, budget: int):
    agents, heavy, forced, matching = preprocess(inst)
    M: Dict[int, Bundle] = {
        i: (HEAVY_KIND, frozenset([j])) for i, j in matching.items()
    }
    stats = LazyStats()
    for i0 in sorted(agents):
        if i0 in M:
            continue
        outcome = extend_matching_poly(
            inst, M, i0, params, budget, agents, heavy, stats
        )
        if outcome != MATCHED:
            return outcome, None, stats
    for i, j in forced.items():
        M[i] = (HEAVY_KIND, frozenset([j]))
    alloc = {a: items for a, (kind, items) in M.items()}
    return MATCHED, alloc, stats


def poly_solve(
    inst: Instance,
    mu: float = MU_DEFAULT,
    p_sweep: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> SolveReport:
    """Binary search on T with the layered matcher; falls back to the
    1/eps count baseline, which covers the k <= 9 regime."""
    eps = inst.epsilon
    base_val, base_alloc = baseline_solve(inst)
    report = SolveReport(base_val, base_alloc, "poly(baseline)")
    cands = t_probe_candidates(inst)
    lo, hi = 0, len(cands) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        T = cands[mid]
        k = k_of(T, eps)
        r = _poly_r(k)
        ok = None
        for p in _p_candidates(r, k, p_sweep):
            params = Params(r, p, mu)
            params.validate(k)
            outcome, alloc, stats = _probe(inst, params, budget)
            if outcome == MATCHED:
                ok = (T, r, p, alloc, stats)
                break
        if ok is not None:
            best = ok
            lo = mid + 1
        else:
            hi = mid - 1
    if best is not None:
        T, r, p, alloc, stats = best
        value = min_value(inst, alloc)
        meta = {
            "certified_T": str(T.as_fraction(eps)),
            "r": r,
            "p": p,
            "layers_peak": stats.layers_peak,
            "collapses": stats.collapses,
        }
        if value.key(eps) > base_val.key(eps):
            return SolveReport(value, alloc, "poly", T, r, stats.iterations, meta)
        report.certified_T = T
        report.r = r
        report.meta = meta
    return report
