"""Instance/allocation data model with exact lattice arithmetic.

Every bundle weight in the (1, eps)-restricted problem has the form
h + l*eps with integer h, l >= 0, so all values (including optima and LP
thresholds) live on a finite lattice and compare exactly via integer
arithmetic.  No floats are used anywhere in this module.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Tuple

HEAVY = "heavy"
LIGHT = "light"


class ParseError(ValueError):
    """Raised on malformed instance/allocation files."""


@dataclass(frozen=True)
class Epsilon:
    """Light-item weight eps = numerator/denominator, 0 < eps < 1, lowest terms."""

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0 or self.numerator <= 0:
            raise ParseError("epsilon out of range")
        if self.numerator >= self.denominator:
            raise ParseError("epsilon out of range")
        g = math.gcd(self.numerator, self.denominator)
        if g != 1:
            object.__setattr__(self, "numerator", self.numerator // g)
            object.__setattr__(self, "denominator", self.denominator // g)

    @classmethod
    def parse(cls, text: str) -> "Epsilon":
        try:
            p, q = text.strip().split("/")
            return cls(int(p), int(q))
        except ParseError:
            raise
        except Exception:
            raise ParseError(f"bad epsilon {text!r}") from None

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


@dataclass(frozen=True, order=False)
class LatticeValue:
    """Exact value h + l*eps stored as the integer pair (h, l).

    Comparison needs the eps context: use key(eps).  h1+l1*eps <= h2+l2*eps
    iff h1*q + l1*p <= h2*q + l2*p where eps = p/q.
    """

    h: int
    l: int

    def key(self, eps: Epsilon) -> int:
        """Value scaled by eps.denominator; exact integer comparison key."""
        return self.h * eps.denominator + self.l * eps.numerator

    def as_fraction(self, eps: Epsilon) -> Fraction:
        return self.h + self.l * eps.fraction

    def is_zero(self) -> bool:
        return self.h == 0 and self.l == 0

    def __repr__(self) -> str:
        return f"LatticeValue({self.h}, {self.l})"


ZERO = LatticeValue(0, 0)


@dataclass(frozen=True)
class Item:
    id: int
    kind: str  # HEAVY or LIGHT


class Instance:
    """Immutable (1, eps)-restricted allocation instance.

    Items carry dense ids 0..m-1; agents carry dense ids 0..n-1.  The
    per-agent interest sets are deduplicated and validated at construction.
    """

    def __init__(self, epsilon: Epsilon, items: List[Item], interests: List[Iterable[int]]):
        self.epsilon = epsilon
        self.items = list(items)
        if [it.id for it in self.items] != list(range(len(self.items))):
            seen = set()
            for it in self.items:
                if it.id in seen:
                    raise ParseError(f"duplicate item id {it.id}")
                seen.add(it.id)
            raise ParseError("item ids must be dense 0..m-1")
        for it in self.items:
            if it.kind not in (HEAVY, LIGHT):
                raise ParseError(f"bad item kind {it.kind!r}")
        if len(interests) < 1:
            raise ParseError("need at least one agent")
        self.interests: List[FrozenSet[int]] = []
        for i, ids in enumerate(interests):
            s = frozenset(ids)
            for j in s:
                if not (isinstance(j, int) and 0 <= j < len(self.items)):
                    raise ParseError(f"unknown item id {j}")
            self.interests.append(s)
        self.heavy_ids = frozenset(it.id for it in self.items if it.kind == HEAVY)
        self.light_ids = frozenset(it.id for it in self.items if it.kind == LIGHT)
        self._b1 = [self.interests[i] & self.heavy_ids for i in range(self.n)]
        self._beps = [self.interests[i] & self.light_ids for i in range(self.n)]

    @property
    def n(self) -> int:
        return len(self.interests)

    @property
    def m(self) -> int:
        return len(self.items)

    def kind(self, j: int) -> str:
        return self.items[j].kind

    def b1(self, i: int) -> FrozenSet[int]:
        """Heavy items agent i is interested in."""
        return self._b1[i]

    def beps(self, i: int) -> FrozenSet[int]:
        """Light items agent i is interested in."""
        return self._beps[i]

    def bundle_value(self, items: Iterable[int]) -> LatticeValue:
        h = l = 0
        for j in items:
            if self.items[j].kind == HEAVY:
                h += 1
            else:
                l += 1
        return LatticeValue(h, l)


Allocation = Dict[int, FrozenSet[int]]


def parse_instance(text: bytes) -> Instance:
    try:
        doc = json.loads(text.decode("utf-8"))
    except Exception as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    try:
        eps = Epsilon.parse(doc["epsilon"])
        raw_items = doc["items"]
        raw_agents = doc["agents"]
    except (KeyError, TypeError):
        raise ParseError("missing epsilon/items/agents") from None
    items_by_id = {}
    for it in raw_items:
        jid = it["id"]
        if jid in items_by_id:
            raise ParseError(f"duplicate item id {jid}")
        items_by_id[jid] = Item(jid, it["kind"])
    if set(items_by_id) != set(range(len(items_by_id))):
        raise ParseError("item ids must be dense 0..m-1")
    items = [items_by_id[j] for j in range(len(items_by_id))]
    agents_by_id = {}
    for ag in raw_agents:
        aid = ag["id"]
        if aid in agents_by_id:
            raise ParseError(f"duplicate agent id {aid}")
        agents_by_id[aid] = ag.get("interests", [])
    if set(agents_by_id) != set(range(len(agents_by_id))):
        raise ParseError("agent ids must be dense 0..n-1")
    interests = [agents_by_id[i] for i in range(len(agents_by_id))]
    for ids in interests:
        for j in ids:
            if j not in items_by_id:
                raise ParseError(f"unknown item id {j}")
    return Instance(eps, items, interests)


def serialize_instance(inst: Instance) -> bytes:
    doc = {
        "epsilon": str(inst.epsilon),
        "items": [{"id": it.id, "kind": it.kind} for it in inst.items],
        "agents": [
            {"id": i, "interests": sorted(inst.interests[i])} for i in range(inst.n)
        ],
    }
    return json.dumps(doc, indent=1, sort_keys=True).encode("utf-8")


def parse_allocation(text: bytes) -> Allocation:
    try:
        doc = json.loads(text.decode("utf-8"))
        raw = doc["assignment"]
        return {int(a): frozenset(int(j) for j in js) for a, js in raw.items()}
    except Exception as exc:
        raise ParseError(f"malformed allocation: {exc}") from None


def serialize_allocation(alloc: Allocation) -> bytes:
    doc = {"assignment": {str(a): sorted(js) for a, js in sorted(alloc.items())}}
    return json.dumps(doc, indent=1, sort_keys=True).encode("utf-8")


def verify_allocation(inst: Instance, alloc: Allocation) -> List[str]:
    """Return a list of violation messages; empty iff the allocation is valid."""
    report = []
    seen: Dict[int, int] = {}
    for i, js in alloc.items():
        if not (0 <= i < inst.n):
            report.append(f"unknown agent {i}")
            continue
        for j in js:
            if not (0 <= j < inst.m):
                report.append(f"unknown item {j}")
                continue
            if j in seen:
                report.append(f"duplicate item {j} (agents {seen[j]} and {i})")
            else:
                seen[j] = i
            if j not in inst.interests[i]:
                report.append(f"agent {i} not interested in item {j}")
    return report


def min_value(inst: Instance, alloc: Allocation) -> LatticeValue:
    """Minimum received weight over ALL agents; unassigned agents count (0,0)."""
    report = verify_allocation(inst, alloc)
    if report:
        raise ValueError("invalid allocation: " + "; ".join(report))
    eps = inst.epsilon
    best = None
    for i in range(inst.n):
        v = inst.bundle_value(alloc.get(i, frozenset()))
        if best is None or v.key(eps) < best.key(eps):
            best = v
    return best


def lattice_values(inst: Instance) -> List[LatticeValue]:
    """Sorted, deduplicated {h + l*eps : 0<=h<=#heavy, 0<=l<=#light}."""
    eps = inst.epsilon
    H, L = len(inst.heavy_ids), len(inst.light_ids)
    by_key: Dict[int, LatticeValue] = {}
    for h in range(H + 1):
        for l in range(L + 1):
            v = LatticeValue(h, l)
            k = v.key(eps)
            # keep the representation with the smallest heavy part
            if k not in by_key or (h, l) < (by_key[k].h, by_key[k].l):
                by_key[k] = v
    return [by_key[k] for k in sorted(by_key)]


def k_of(T: LatticeValue, eps: Epsilon) -> int:
    """ceil(T / eps), exactly.  T must be positive."""
    tkey = T.key(eps)
    if tkey <= 0:
        raise ValueError("k_of requires T > 0")
    # T/eps = (h*q + l*p) / p
    return -(-tkey // eps.numerator)


def lights_needed(T: LatticeValue, eps: Epsilon, heavies: int) -> int:
    """Minimum light count l with heavies + l*eps >= T (0 if already enough)."""
    need = T.key(eps) - heavies * eps.denominator
    if need <= 0:
        return 0
    return -(-need // eps.numerator)
