import random
from fractions import Fraction

import pytest

from maxminalloc import exact, gen
from maxminalloc.model import Epsilon, Instance, Item, LIGHT, lattice_values, min_value

from oracles import naive_opt


def random_tiny(rng):
    n = rng.randint(1, 3)
    m = rng.randint(1, 12 // n)
    mh = rng.randint(0, m)
    return gen.gen_random(n, mh, m - mh, rng.uniform(0.2, 1.0), Epsilon(1, rng.randint(2, 4)), rng.randrange(2**30))


class TestAgainstNaive:
    def test_matches_naive_enumeration(self):
        rng = random.Random(7)
        for _ in range(120):
            inst = random_tiny(rng)
            v, alloc = exact.opt(inst)
            assert v.as_fraction(inst.epsilon) == naive_opt(inst)
            assert min_value(inst, alloc).key(inst.epsilon) >= v.key(inst.epsilon)


class TestFeasibility:
    def test_monotone_in_T(self):
        rng = random.Random(9)
        for _ in range(20):
            inst = random_tiny(rng)
            flags = [exact.feasible_at(inst, t)[0] for t in lattice_values(inst)]
            # once infeasible, stays infeasible (lattice is sorted ascending)
            assert flags == sorted(flags, reverse=True)

    def test_witness_meets_value(self):
        inst = gen.gen_random(3, 2, 5, 0.8, Epsilon(1, 3), 42)
        v, _ = exact.opt(inst)
        ok, witness = exact.feasible_at(inst, v)
        assert ok and min_value(inst, witness).key(inst.epsilon) >= v.key(inst.epsilon)

    def test_empty_interest_agent(self):
        inst = Instance(Epsilon(1, 2), [Item(0, LIGHT)], [[0], []])
        v, _ = exact.opt(inst)
        assert v.is_zero()


class TestSizeCap:
    def test_reject_large(self):
        inst = gen.gen_random(2, 0, 30, 1.0, Epsilon(1, 2), 0)
        with pytest.raises(exact.InstanceTooLarge):
            exact.opt(inst)

    def test_cap_override(self):
        inst = gen.gen_random(2, 0, 14, 1.0, Epsilon(1, 2), 0)
        v, _ = exact.opt(inst, size_cap=14)
        assert v.as_fraction(inst.epsilon) == Fraction(7, 2)  # 7 lights each
