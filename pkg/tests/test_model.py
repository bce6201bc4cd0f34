import math
import random
from fractions import Fraction

import pytest

from maxminalloc.model import (
    HEAVY,
    LIGHT,
    Epsilon,
    Instance,
    Item,
    LatticeValue,
    ParseError,
    k_of,
    lattice_values,
    lights_needed,
    min_value,
    parse_allocation,
    parse_instance,
    serialize_allocation,
    serialize_instance,
    verify_allocation,
)


def tiny_instance(eps="1/2"):
    text = (
        '{"epsilon": "%s", "items": [{"id": 0, "kind": "heavy"}],'
        ' "agents": [{"id": 0, "interests": [0]}]}' % eps
    )
    return text.encode()


class TestEpsilon:
    def test_parse_and_reduce(self):
        e = Epsilon.parse("2/4")
        assert (e.numerator, e.denominator) == (1, 2)
        assert e.fraction == Fraction(1, 2)

    @pytest.mark.parametrize("bad", ["3/2", "0/5", "1/1", "-1/2", "1/-3"])
    def test_out_of_range(self, bad):
        with pytest.raises(ParseError, match="epsilon"):
            Epsilon.parse(bad)

    def test_garbage(self):
        with pytest.raises(ParseError):
            Epsilon.parse("one half")


class TestLatticeValue:
    def test_key_matches_fraction_order(self):
        rng = random.Random(0)
        for _ in range(10_000):
            q = rng.randint(2, 40)
            p = rng.randint(1, q - 1)
            if math.gcd(p, q) != 1:
                continue
            eps = Epsilon(p, q)
            a = LatticeValue(rng.randint(0, 6), rng.randint(0, 30))
            b = LatticeValue(rng.randint(0, 6), rng.randint(0, 30))
            fa = a.h + a.l * Fraction(p, q)
            fb = b.h + b.l * Fraction(p, q)
            assert (a.key(eps) < b.key(eps)) == (fa < fb)
            assert (a.key(eps) == b.key(eps)) == (fa == fb)
            assert a.as_fraction(eps) == fa

    def test_k_of_and_lights_needed(self):
        rng = random.Random(1)
        for _ in range(10_000):
            q = rng.randint(2, 30)
            p = rng.randint(1, q - 1)
            eps = Epsilon(p, q)  # reduces itself
            T = LatticeValue(rng.randint(0, 3), rng.randint(0, 20))
            t = T.as_fraction(eps)
            if t > 0:
                assert k_of(T, eps) == math.ceil(t / eps.fraction)
            h = rng.randint(0, 4)
            want = lights_needed(T, eps, h)
            assert h + want * eps.fraction >= t
            assert want == 0 or h + (want - 1) * eps.fraction < t

    def test_k_of_rejects_zero(self):
        with pytest.raises(ValueError):
            k_of(LatticeValue(0, 0), Epsilon(1, 2))


class TestParsing:
    def test_smallest_instance(self):
        inst = parse_instance(tiny_instance())
        assert inst.n == 1 and inst.m == 1
        assert inst.b1(0) == frozenset({0})

    def test_round_trip(self):
        inst = parse_instance(tiny_instance())
        again = parse_instance(serialize_instance(inst))
        assert again.interests == inst.interests
        assert again.items == inst.items
        assert again.epsilon == inst.epsilon

    def test_epsilon_range_error(self):
        with pytest.raises(ParseError, match="epsilon out of range"):
            parse_instance(tiny_instance(eps="3/2"))

    def test_unknown_item_id(self):
        text = (
            b'{"epsilon": "1/2", "items": [{"id": 0, "kind": "heavy"}],'
            b' "agents": [{"id": 0, "interests": [0, 1]}]}'
        )
        with pytest.raises(ParseError, match="unknown item id 1"):
            parse_instance(text)

    def test_duplicate_item_id(self):
        text = (
            b'{"epsilon": "1/2", "items": [{"id": 0, "kind": "heavy"},'
            b' {"id": 0, "kind": "light"}], "agents": [{"id": 0, "interests": []}]}'
        )
        with pytest.raises(ParseError, match="duplicate item id"):
            parse_instance(text)

    def test_malformed_json(self):
        with pytest.raises(ParseError, match="malformed"):
            parse_instance(b"{nope")

    def test_empty_interest_agent_preserved(self):
        inst = Instance(
            Epsilon(1, 3),
            [Item(0, LIGHT)],
            [[0], []],
        )
        again = parse_instance(serialize_instance(inst))
        assert again.interests[1] == frozenset()

    def test_allocation_round_trip(self):
        alloc = {0: frozenset({1, 2}), 3: frozenset()}
        assert parse_allocation(serialize_allocation(alloc)) == alloc


class TestVerifyAndMinValue:
    def setup_method(self):
        self.inst = Instance(
            Epsilon(1, 2),
            [Item(0, HEAVY), Item(1, LIGHT), Item(2, LIGHT)],
            [[0, 1], [1, 2]],
        )

    def test_valid(self):
        assert verify_allocation(self.inst, {0: frozenset({0}), 1: frozenset({1})}) == []

    def test_duplicate_item(self):
        msgs = verify_allocation(self.inst, {0: frozenset({1}), 1: frozenset({1})})
        assert any("duplicate item" in m for m in msgs)

    def test_not_interested(self):
        msgs = verify_allocation(self.inst, {0: frozenset({2})})
        assert any("not interested" in m for m in msgs)

    def test_min_value_counts_unassigned(self):
        assert min_value(self.inst, {0: frozenset({0})}) == LatticeValue(0, 0)

    def test_min_value_mixed_bundle(self):
        one_agent = Instance(
            Epsilon(1, 2),
            [Item(0, HEAVY), Item(1, LIGHT)],
            [[0, 1]],
        )
        assert min_value(one_agent, {0: frozenset({0, 1})}) == LatticeValue(1, 1)

    def test_min_value_rejects_invalid(self):
        with pytest.raises(ValueError, match="invalid allocation"):
            min_value(self.inst, {0: frozenset({2})})


class TestLattice:
    def test_values_sorted_unique(self):
        inst = Instance(
            Epsilon(1, 2),
            [Item(0, HEAVY), Item(1, LIGHT), Item(2, LIGHT)],
            [[0, 1, 2]],
        )
        vals = lattice_values(inst)
        eps = inst.epsilon
        keys = [v.key(eps) for v in vals]
        assert keys == sorted(set(keys))
        # 1 == 2*eps here, so the duplicate key collapses
        assert LatticeValue(0, 2) in vals and LatticeValue(1, 0) not in vals
        fracs = {v.as_fraction(eps) for v in vals}
        assert fracs == {Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)}
