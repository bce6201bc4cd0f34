"""Dense tableau simplex for the small column-generation masters.

Solves  max c.x  s.t.  A x <= b, x >= 0  with b >= 0, so the slack basis
is primal feasible and no phase-one is needed.  Dantzig pricing with a
switch to Bland's rule after a degeneracy threshold guarantees
termination; duals are read off the slack columns of the final tableau.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

TOL = 1e-9
BLAND_AFTER = 200
MAX_ITERS = 20000


class SimplexError(RuntimeError):
    pass


def solve(c: np.ndarray, A: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, float, np.ndarray]:
    """Return (x, objective, duals) for max c.x s.t. Ax <= b, x >= 0."""
    m, n = A.shape
    if np.any(b < -TOL):
        raise SimplexError("negative rhs; slack basis infeasible")
    # tableau: rows = constraints, cols = structural + slacks + rhs
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = np.maximum(b, 0.0)
    T[m, :n] = -c  # objective row holds reduced costs (negated for max)
    basis = list(range(n, n + m))

    for it in range(MAX_ITERS):
        red = T[m, :-1]
        if it < BLAND_AFTER:
            enter = int(np.argmin(red))
            if red[enter] >= -TOL:
                break
        else:
            neg = np.nonzero(red < -TOL)[0]
            if len(neg) == 0:
                break
            enter = int(neg[0])  # Bland: lowest index
        col = T[:m, enter]
        pos = np.nonzero(col > TOL)[0]
        if len(pos) == 0:
            raise SimplexError("unbounded master LP")
        ratios = T[pos, -1] / col[pos]
        best = ratios.min()
        cand = pos[ratios <= best + TOL]
        # tie-break by lowest basis variable index (Bland-compatible)
        leave = int(min(cand, key=lambda r: basis[r]))
        piv = T[leave, enter]
        T[leave, :] /= piv
        for r in range(m + 1):
            if r != leave and abs(T[r, enter]) > 0:
                T[r, :] -= T[r, enter] * T[leave, :]
        basis[leave] = enter
    else:
        raise SimplexError("simplex iteration cap exceeded")

    x = np.zeros(n + m)
    for r, v in enumerate(basis):
        x[v] = T[r, -1]
    duals = T[m, n : n + m].copy()
    duals[np.abs(duals) < TOL] = 0.0
    return x[:n], float(T[m, -1]), duals
