import numpy as np
import pytest
from scipy.optimize import linprog

from maxminalloc import simplex


def random_lp(rng, m, n):
    """max c.x s.t. Ax <= b, x >= 0 with b >= 0 (slack basis feasible)."""
    A = rng.uniform(-1, 1, size=(m, n))
    b = rng.uniform(0.1, 2.0, size=m)
    c = rng.uniform(-1, 1, size=n)
    return c, A, b


class TestAgainstScipy:
    def test_objective_matches(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            m, n = rng.integers(1, 6), rng.integers(1, 6)
            c, A, b = random_lp(rng, m, n)
            try:
                x, obj, duals = simplex.solve(c, A, b)
            except simplex.SimplexError:
                # claimed unbounded: a huge box must yield a huge objective
                boxed = linprog(-c, A_ub=A, b_ub=b, bounds=(0, 1e9), method="highs")
                assert boxed.status == 0 and -boxed.fun > 1e6
                continue
            ref = linprog(-c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
            assert ref.status == 0
            assert obj == pytest.approx(-ref.fun, abs=1e-7)
            # primal feasibility
            assert np.all(A @ x <= b + 1e-7) and np.all(x >= -1e-9)
            # weak duality at optimum: b.y == c.x, y >= 0
            assert np.all(duals >= -1e-9)
            assert float(b @ duals) == pytest.approx(obj, abs=1e-7)

    def test_degenerate_does_not_cycle(self):
        # many redundant constraints through the origin
        c = np.array([1.0, 1.0])
        A = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 1.0], [2.0, 2.0]])
        b = np.array([1.0, 1.0, 1.0, 1.0, 2.0])
        x, obj, _ = simplex.solve(c, A, b)
        assert obj == pytest.approx(1.0)

    def test_dual_prices_identify_binding_rows(self):
        # max x+y s.t. x <= 1, y <= 2
        x, obj, duals = simplex.solve(
            np.array([1.0, 1.0]),
            np.array([[1.0, 0.0], [0.0, 1.0]]),
            np.array([1.0, 2.0]),
        )
        assert obj == pytest.approx(3.0)
        assert duals == pytest.approx([1.0, 1.0])
