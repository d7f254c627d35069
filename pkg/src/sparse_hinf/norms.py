"""H-infinity norm oracles: frequency-grid search and LMI bisection.

The two paths are independent of each other on purpose; the grid oracle is
used to cross-check every certificate the LMI machinery produces.
"""

from __future__ import annotations

import numpy as np

from .errors import UnstableSystemError
from .lmi import (LmiProblem, MatrixVariable, SolveStatus, SolverOptions,
                  block_matrix, solve)
from .lti import StateSpace, is_stable

GRID_POINTS = 2048
REFINE_TOL = 1e-6

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0

# continuous-time grids span at least [1e-4, 1e+6] rad/s plus w = 0
_CT_LOG_LO = -4.0
_CT_LOG_HI = 6.0


def _sigma_max(sys: StateSpace, zeta: complex) -> float:
    return float(np.linalg.svd(sys.freq_response([zeta])[0], compute_uv=False)[0])


def _golden_max(f, a: float, b: float, tol: float) -> float:
    """Golden-section maximization of f on [a, b]; returns the best value."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    best = max(f1, f2)
    while (b - a) > tol * max(1.0, abs(a) + abs(b)):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        best = max(best, f1, f2)
    return best


def hinf_norm_grid(sys: StateSpace, n_grid: int = GRID_POINTS,
                   refine_tol: float = REFINE_TOL) -> float:
    """Peak gain over frequency via a coarse grid plus local refinement.

    Discrete systems are swept over the angle [0, pi]; continuous systems
    over a log grid of [1e-4, 1e+6] rad/s plus w = 0.  The three best grid
    brackets are refined by golden-section search.
    """
    if not is_stable(sys):
        raise UnstableSystemError("H-infinity norm is infinite for an unstable system")
    if sys.n_states == 0:
        return float(np.linalg.svd(sys.D, compute_uv=False)[0]) if sys.D.size else 0.0

    if sys.is_discrete:
        grid = np.linspace(0.0, np.pi, n_grid)
        def gain(u):
            return _sigma_max(sys, np.exp(1j * u))
    else:
        grid = np.concatenate([[ -np.inf], np.linspace(_CT_LOG_LO, _CT_LOG_HI, n_grid)])
        def gain(u):
            w = 0.0 if np.isinf(u) else 10.0 ** u
            return _sigma_max(sys, 1j * w)

    vals = np.array([gain(u) for u in grid])
    best = float(vals.max())
    # refine around the few best local brackets
    order = np.argsort(vals)[::-1][:3]
    for i in order:
        lo = grid[max(int(i) - 1, 1 if not sys.is_discrete else 0)]
        hi = grid[min(int(i) + 1, len(grid) - 1)]
        if np.isinf(lo) or np.isinf(grid[int(i)]):
            continue
        best = max(best, _golden_max(gain, float(lo), float(hi), refine_tol))
    return best


def bounded_real_problem(sys: StateSpace, mu: float) -> LmiProblem:
    """Feasibility program for the discrete bounded-real condition.

    Feasible with a symmetric P iff the squared H-infinity norm of ``sys``
    is below ``mu``.
    """
    A, B, C, D = sys.A, sys.B, sys.C, sys.D
    n = A.shape[0]
    nw = B.shape[1]
    nz = C.shape[0]
    Zw = np.zeros((n, nw))
    Zz = np.zeros((n, nz))
    Iw = np.eye(nw)
    Imu = mu * np.eye(nz)

    def constraint(vals):
        P = vals["P"]
        top = A @ P
        right = P @ C.T
        return block_matrix([
            [P, top, B, Zz],
            [top.T, P, Zw, right],
            [B.T, Zw.T, Iw, D.T],
            [Zz.T, right.T, D, Imu],
        ])

    return LmiProblem(
        variables=[MatrixVariable("P", (n, n), symmetric=True)],
        constraints=[constraint],
    )


def hinf_norm_lmi_bisect(sys: StateSpace, tol: float = 1e-6,
                         options: SolverOptions | None = None) -> float:
    """H-infinity norm of a stable discrete system by bisecting the
    bounded-real LMI over the squared bound.

    The initial upper bracket comes from the grid oracle; the returned value
    is the square root of the final bracket midpoint.
    """
    if not sys.is_discrete:
        raise UnstableSystemError("LMI bisection is defined for discrete systems")
    if not is_stable(sys):
        raise UnstableSystemError("H-infinity norm is infinite for an unstable system")
    gamma_hi = hinf_norm_grid(sys) * 1.1 + 1.0
    lo, hi = 0.0, gamma_hi ** 2
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        outcome = solve(bounded_real_problem(sys, mid), options)
        if outcome.status is SolveStatus.FEASIBLE:
            hi = mid
        else:
            lo = mid
    return float(np.sqrt(0.5 * (lo + hi)))
