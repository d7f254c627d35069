"""Sparsity pattern discovery by reweighted l1 minimization.

Each pass minimizes an entrywise weighted l1 norm of the packed gain over
the jointly affine relaxation (Lyapunov factor free, no pattern
constraints), then reweights every entry inversely to its magnitude; small
entries get ever larger weights and collapse toward zero.  The final gain's
support is the discovered pattern.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounded_real import build_augmented, certificate_matrix_relaxed
from .errors import InfeasibleRelaxation
from .fir import (FirController, SparsityPattern, pattern_of, unpack_gain,
                  PATTERN_REL_THRESHOLD)
from .lmi import (LmiProblem, MatrixVariable, SolveStatus, SolverOptions,
                  solve, solve_min_weighted_l1)
from .lti import GeneralizedPlant


@dataclass
class DiscoveryConfig:
    """Reweighted-l1 settings.

    ``max_iter`` caps the reweighting passes; by default iteration stops
    early once the gain stops moving (disable with ``stop_when_stable``).
    ``eps_inside_abs`` switches the reweighting denominator from
    |g| + eps to |g + eps|.
    """

    mu: float
    n_taps: int = 1
    max_iter: int = 20
    eps: float = 1e-3
    rel_threshold: float = PATTERN_REL_THRESHOLD
    eps_inside_abs: bool = False
    stop_when_stable: bool = True
    stable_tol: float = 1e-6
    solver: SolverOptions | None = None

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class DiscoveryResult:
    pattern: SparsityPattern
    controller: FirController
    gain: np.ndarray
    trace: list[tuple[int, float, int]] = field(default_factory=list)
    monotone_tail: bool = True


def discover(plant: GeneralizedPlant, cfg: DiscoveryConfig) -> DiscoveryResult:
    """Run the reweighted-l1 loop and extract the surviving pattern.

    The trace rows are (iteration, l1 objective, entries above the relative
    threshold); ``monotone_tail`` flags whether that count was non-increasing
    over the trailing iterations.
    """
    if not plant.is_discrete:
        raise ValueError("discovery requires a discrete plant; discretize first")
    if np.any(plant.D22 != 0):
        raise ValueError("discovery requires D22 = 0")
    aug = build_augmented(plant, cfg.n_taps)
    d = aug.dims
    n, nu, ny_aug = d["nx"], d["nu"], d["ny"]
    # first-order backend by default: the interior-point path is reliable on
    # the small margin/descent solves but crawls on these l1 programs
    options = cfg.solver or SolverOptions(backend="scs", scs_eps=1e-6,
                                          scs_max_iters=20000)

    base = LmiProblem(
        variables=[MatrixVariable("P", (n, n), symmetric=True),
                   MatrixVariable("gain", (nu, ny_aug))],
        constraints=[lambda v: certificate_matrix_relaxed(v["P"], v["gain"], aug, cfg.mu)],
    )

    W = np.ones((nu, ny_aug))
    gain = None
    trace: list[tuple[int, float, int]] = []
    counts: list[int] = []
    for it in range(cfg.max_iter):
        outcome = solve_min_weighted_l1(base, W, "gain", options)
        if outcome.status is SolveStatus.INFEASIBLE:
            raise InfeasibleRelaxation(
                f"weighted-l1 pass certified infeasible at mu={cfg.mu}; raise mu")
        gain_new = outcome.values["gain"]
        if outcome.margin < 0:
            # keep the gain but repair the free Lyapunov factor so the
            # iterate satisfies the relaxed certificate by reassembly
            repair = LmiProblem(
                variables=[MatrixVariable("P", (n, n), symmetric=True)],
                constraints=[
                    lambda v, g=gain_new: certificate_matrix_relaxed(v["P"], g, aug, cfg.mu)
                ],
            )
            fix = solve(repair, options)
            if fix.values is not None and fix.margin >= 0:
                outcome.values["P"] = fix.values["P"]

        scale = np.abs(gain_new).max()
        nnz = int(np.sum(np.abs(gain_new) >= cfg.rel_threshold * scale)) if scale > 0 else 0
        obj = outcome.objective_value if outcome.objective_value is not None else float("nan")
        trace.append((it, float(obj), nnz))
        counts.append(nnz)

        moved = np.inf if gain is None else float(np.abs(gain_new - gain).max())
        gain = gain_new
        if cfg.stop_when_stable and moved < cfg.stable_tol * (1.0 + float(scale)):
            break
        W = 1.0 / np.abs(gain + cfg.eps) if cfg.eps_inside_abs else 1.0 / (np.abs(gain) + cfg.eps)

    ctrl = unpack_gain(gain, cfg.n_taps, plant.dims["ny"], ts=plant.ts)
    tail = max(3, cfg.max_iter // 4)
    tail_counts = counts[-tail:]
    monotone = all(b <= a for a, b in zip(tail_counts, tail_counts[1:]))
    pattern = pattern_of(ctrl, cfg.rel_threshold)
    return DiscoveryResult(pattern=pattern, controller=ctrl, gain=gain,
                           trace=trace, monotone_tail=monotone)
