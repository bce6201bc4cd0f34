import random
from fractions import Fraction
from itertools import permutations

import pytest

from maxminalloc import exact, gen
from maxminalloc.model import Epsilon, parse_instance, serialize_instance


def brute_has_perfect_matching(h):
    """Independent exhaustive check over index permutations."""
    edges = set(h.edges)
    idx = range(h.size)
    for ys in permutations(idx):
        for zs in permutations(idx):
            if all((x, ys[x], zs[x]) in edges for x in idx):
                return True
    return False


class TestHypergraph:
    def test_yes_instances_have_planted_matching(self):
        for size in range(1, 5):
            for seed in range(5):
                h, planted = gen.gen_3dm_yes(size, extra_edges=3, seed=seed)
                assert h.is_perfect_matching(planted)
                assert brute_has_perfect_matching(h)

    def test_no_instances_lack_matching(self):
        for size in range(2, 5):
            for seed in range(5):
                h = gen.gen_3dm_no(size, seed=seed)
                assert not brute_has_perfect_matching(h)
                assert not h.has_perfect_matching()

    def test_determinism(self):
        a, _ = gen.gen_3dm_yes(3, 2, seed=9)
        b, _ = gen.gen_3dm_yes(3, 2, seed=9)
        assert a == b


class TestReduction:
    def test_size_accounting(self):
        for seed in range(5):
            h, _ = gen.gen_3dm_yes(3, 4, seed=seed)
            inst = gen.reduce_3dm(h, Epsilon(1, 2))
            assert inst.n == len(h.edges)
            assert len(inst.light_ids) == 2 * h.size
            assert len(inst.heavy_ids) == len(h.edges) - h.size

    def test_agent_interest_shape(self):
        h, _ = gen.gen_3dm_yes(2, 2, seed=0)
        inst = gen.reduce_3dm(h, Epsilon(1, 2))
        for i, (x, y, z) in enumerate(h.edges):
            lights = sorted(inst.beps(i))
            assert lights == sorted({x, h.size + y})
            assert len(inst.b1(i)) == h.z_degree(z) - 1

    def test_round_trips_through_files(self):
        h, _ = gen.gen_3dm_yes(3, 3, seed=1)
        inst = gen.reduce_3dm(h, Epsilon(1, 3))
        again = parse_instance(serialize_instance(inst))
        assert again.interests == inst.interests

    def test_eps_above_half_warns(self):
        h, _ = gen.gen_3dm_yes(2, 0, seed=0)
        with pytest.warns(UserWarning):
            gen.reduce_3dm(h, Epsilon(2, 3))

    def test_dichotomy_small(self):
        eps = Epsilon(1, 2)
        for seed in range(4):
            h, _ = gen.gen_3dm_yes(3, 2, seed=seed)
            v, _ = exact.opt(gen.reduce_3dm(h, eps))
            assert v.as_fraction(eps) == 2 * eps.fraction
            hn = gen.gen_3dm_no(3, seed=seed)
            v, _ = exact.opt(gen.reduce_3dm(hn, eps))
            assert v.as_fraction(eps) <= eps.fraction


class TestGapWitness:
    def test_reaches_ratio_two(self):
        eps = Epsilon(1, 2)
        inst, tstar, opt_v = gen.search_gap_witness(
            n_max=4, m_max=6, eps=eps, budget=300, seed=0
        )
        assert inst is not None
        ratio = tstar.as_fraction(eps) / opt_v.as_fraction(eps)
        assert ratio == Fraction(2)

    def test_deterministic(self):
        eps = Epsilon(1, 2)
        a = gen.search_gap_witness(4, 6, eps, budget=50, seed=3)
        b = gen.search_gap_witness(4, 6, eps, budget=50, seed=3)
        assert serialize_instance(a[0]) == serialize_instance(b[0])
