"""Sparse H-infinity synthesis by alternating convex programs.

The FIR restriction reduces the design to static output feedback on an
augmented plant.  The driver below alternates between two kinds of convex
solves on the bounded-real certificate: Lyapunov steps (gain fixed) and
gain steps (Lyapunov factor fixed).  While no certificate exists the steps
maximize the certificate margin; once the loop is stabilized the gain steps
instead minimize the certified norm bound, which is carried as an extra
affine decision scalar.  The grid norm oracle independently validates every
accepted gain, and the final certificate is re-checked by eigenvalue
reassembly, never trusted from the solver.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np

from .bounded_real import (build_augmented, certificate_matrix,
                           certificate_matrix_relaxed, certificate_min_eig,
                           close_static_gain)
from .errors import InfeasibleRelaxation, NoConvergence, NumericFailure
from .fir import (FirController, SparsityPattern, pattern_constraints,
                  unpack_gain)
from .lmi import (LmiProblem, MatrixVariable, SolveStatus, SolverOptions,
                  solve)
from .lti import GeneralizedPlant, spectral_radius
from .norms import hinf_norm_grid

# SCS iterations granted per unit of the "solver iterations" knob
ITER_SCALE = 50


@dataclass
class SynthesisConfig:
    """Inputs of the synthesis driver.

    ``mu`` bounds the squared closed-loop norm; ``pattern`` is the binary
    sparsity pattern (None = unconstrained); ``k`` are the three iteration
    caps honoured when ``cap_mode='iterates'`` (the default staged mode runs
    every inner program to convergence and records that in the trace).
    ``polish='descent'`` keeps improving the certified bound until it
    stalls; ``polish='none'`` returns the first certificate found.
    """

    mu: float
    n_taps: int = 1
    pattern: SparsityPattern | None = None
    k: tuple[int, int, int] = (2, 5, 2)
    max_outer: int = 200
    regularize_init: bool = False
    polish: str = "descent"
    cap_mode: str = "staged"
    descent_headroom: float = 0.08
    descent_rel_tol: float = 2e-3
    descent_patience: int = 3
    extra_seeds: bool = True
    solver: SolverOptions | None = None

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if self.n_taps < 1:
            raise ValueError("n_taps must be >= 1")
        if any(ki < 1 for ki in self.k):
            raise ValueError("iteration caps must be >= 1")
        if self.polish not in ("descent", "none"):
            raise ValueError("polish must be 'descent' or 'none'")
        if self.cap_mode not in ("staged", "iterates"):
            raise ValueError("cap_mode must be 'staged' or 'iterates'")


@dataclass
class Certificate:
    """A verified synthesis result: Lyapunov matrix, packed gain, and the
    independently re-checked stability/performance witnesses."""

    P: np.ndarray
    gain: np.ndarray
    mu: float
    min_eig: float
    closed_loop_norm: float
    n_outer: int
    trace: list[tuple[int, str, str, float]] = field(default_factory=list)
    semantics: str = "staged"


class _Workspace:
    """Shared problem data for one synthesis run."""

    def __init__(self, plant: GeneralizedPlant, cfg: SynthesisConfig):
        if not plant.is_discrete:
            raise ValueError("synthesis requires a discrete plant; discretize first")
        if np.any(plant.D22 != 0):
            raise ValueError("synthesis requires D22 = 0")
        self.cfg = cfg
        self.plant = plant
        self.aug = build_augmented(plant, cfg.n_taps)
        d = self.aug.dims
        self.n = d["nx"]
        self.nu = d["nu"]
        self.ny_aug = d["ny"]
        pattern = cfg.pattern or SparsityPattern.full(plant.dims["nu"], plant.dims["ny"])
        if pattern.S.shape != (plant.dims["nu"], plant.dims["ny"]):
            raise ValueError(
                f"pattern shape {pattern.S.shape} does not match controller "
                f"shape {(plant.dims['nu'], plant.dims['ny'])}")
        self.pattern = pattern
        self.zero_entries = tuple(pattern_constraints(pattern, cfg.n_taps))
        self.options = cfg.solver or SolverOptions()
        self.trace: list[tuple[int, str, str, float]] = []
        self._outer = 0

    def gain_var(self) -> MatrixVariable:
        return MatrixVariable("gain", (self.nu, self.ny_aug),
                              zero_entries=self.zero_entries)

    def lyap_var(self) -> MatrixVariable:
        return MatrixVariable("P", (self.n, self.n), symmetric=True)

    def record(self, stage: str, status: str, margin: float):
        self.trace.append((self._outer, stage, status, float(margin)))

    def cap(self, which: int) -> int | None:
        if self.cfg.cap_mode == "iterates":
            return self.cfg.k[which] * ITER_SCALE
        return None

    def min_eig(self, P, gain, mu=None) -> float:
        return certificate_min_eig(P, gain, self.aug, self.cfg.mu if mu is None else mu)

    def grid_norm(self, gain) -> float | None:
        """Grid norm of the closed loop, or None when not Schur stable."""
        cl = close_static_gain(self.aug, gain)
        if spectral_radius(cl.A) >= 1.0 - 1e-9:
            return None
        return hinf_norm_grid(cl, n_grid=1024)

    # ---- inner convex programs -------------------------------------------------

    def relaxed_seed(self):
        """Margin-maximizing solve of the jointly affine relaxation (the
        initial-guess program); certified infeasibility raises."""
        cfg = self.cfg
        objective = None
        if cfg.regularize_init:
            # spectral-norm regularizer via epigraph scalars
            s_vars = [MatrixVariable("s_P", (1, 1)), MatrixVariable("s_G", (1, 1))]

            def obj(vals):
                return vals["s_P"][0, 0] + vals["s_G"][0, 0]

            def p_bound(vals):
                return vals["s_P"][0, 0] * np.eye(self.n) - vals["P"]

            def g_bound(vals):
                G = vals["gain"]
                return cp.bmat([
                    [vals["s_G"][0, 0] * np.eye(self.nu), G],
                    [G.T, vals["s_G"][0, 0] * np.eye(self.ny_aug)],
                ]) if isinstance(G, cp.expressions.expression.Expression) else np.block([
                    [vals["s_G"][0, 0] * np.eye(self.nu), G],
                    [G.T, vals["s_G"][0, 0] * np.eye(self.ny_aug)],
                ])

            problem = LmiProblem(
                variables=[self.lyap_var(), self.gain_var()] + s_vars,
                constraints=[
                    lambda v: certificate_matrix_relaxed(v["P"], v["gain"], self.aug, cfg.mu),
                    p_bound, g_bound,
                ],
                objective=obj,
                iter_cap=self.cap(0),
            )
        else:
            problem = LmiProblem(
                variables=[self.lyap_var(), self.gain_var()],
                constraints=[
                    lambda v: certificate_matrix_relaxed(v["P"], v["gain"], self.aug, cfg.mu)
                ],
                iter_cap=self.cap(0),
            )
        outcome = solve(problem, self.options)
        self.record("p0", outcome.status.value, outcome.margin)
        if outcome.status is SolveStatus.INFEASIBLE:
            raise InfeasibleRelaxation(
                f"relaxation certified infeasible at mu={cfg.mu} "
                "(mu too small or pattern too restrictive)")
        return outcome.values["P"], outcome.values["gain"]

    def identity_metric_seed(self) -> np.ndarray | None:
        """Auxiliary gain seed: margin-max gain step with P frozen at I."""
        problem = LmiProblem(
            variables=[self.gain_var()],
            constraints=[
                lambda v: certificate_matrix(np.eye(self.n), v["gain"], self.aug, self.cfg.mu)
            ],
        )
        try:
            outcome = solve(problem, self.options)
        except NumericFailure:
            return None
        self.record("seed", outcome.status.value, outcome.margin)
        return None if outcome.values is None else outcome.values["gain"]

    def lyap_margin_step(self, gain, mu_stage) -> tuple[np.ndarray | None, float]:
        """Max-margin Lyapunov solve at a fixed gain and bound."""
        problem = LmiProblem(
            variables=[self.lyap_var()],
            constraints=[lambda v: certificate_matrix(v["P"], gain, self.aug, mu_stage)],
            iter_cap=self.cap(1),
        )
        try:
            outcome = solve(problem, self.options)
        except NumericFailure:
            return None, -np.inf
        self.record("p_step", outcome.status.value, outcome.margin)
        if outcome.values is None:
            return None, -np.inf
        return outcome.values["P"], outcome.margin

    def gain_margin_step(self, P, mu_stage) -> np.ndarray | None:
        """Max-margin gain solve at a fixed Lyapunov matrix and bound."""
        problem = LmiProblem(
            variables=[self.gain_var()],
            constraints=[lambda v: certificate_matrix(P, v["gain"], self.aug, mu_stage)],
            iter_cap=self.cap(2),
        )
        try:
            outcome = solve(problem, self.options)
        except NumericFailure:
            return None
        self.record("gain_step", outcome.status.value, outcome.margin)
        return None if outcome.values is None else outcome.values["gain"]

    def gain_descent_step(self, P) -> np.ndarray | None:
        """Gain solve minimizing the certified squared-norm bound (carried
        as an extra affine scalar) at a fixed Lyapunov matrix."""
        problem = LmiProblem(
            variables=[self.gain_var(), MatrixVariable("bound", (1, 1))],
            constraints=[
                lambda v: certificate_matrix(P, v["gain"], self.aug, v["bound"][0, 0])
            ],
            objective=lambda v: v["bound"][0, 0],
            iter_cap=self.cap(2),
        )
        try:
            outcome = solve(problem, self.options)
        except NumericFailure:
            return None
        self.record("gain_step", outcome.status.value, outcome.margin)
        if outcome.values is None or outcome.status is SolveStatus.INFEASIBLE:
            return None
        return outcome.values["gain"]


def initial_guess(plant: GeneralizedPlant, cfg: SynthesisConfig,
                  _ws: _Workspace | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Initial (P, gain) iterate from the jointly affine relaxation.

    Advisory PBH warnings are emitted for undetectable/unstabilizable
    plants; a certified-infeasible relaxation raises.
    """
    ws = _ws or _Workspace(plant, cfg)
    _advisory_pbh(plant)
    return ws.relaxed_seed()


def _advisory_pbh(plant: GeneralizedPlant, tol: float = 1e-8):
    eigs = np.linalg.eigvals(plant.A)
    nx = plant.A.shape[0]
    for lam in eigs:
        if abs(lam) < 1.0 - 1e-9:
            continue
        M_det = np.vstack([lam * np.eye(nx) - plant.A, plant.C2])
        if np.linalg.matrix_rank(M_det, tol=tol) < nx:
            warnings.warn(f"(A, C2) looks undetectable at eigenvalue {lam:.4g}")
        M_stab = np.hstack([lam * np.eye(nx) - plant.A, plant.B2])
        if np.linalg.matrix_rank(M_stab, tol=tol) < nx:
            warnings.warn(f"(A, B2) looks unstabilizable at eigenvalue {lam:.4g}")


def _descend(ws: _Workspace, P0: np.ndarray, gain0: np.ndarray,
             outer_budget: int) -> tuple[float, np.ndarray, np.ndarray] | None:
    """Stabilize if needed, then walk the certified bound down.

    Returns (squared bound, P, gain) for the best validated iterate, or
    None when no stabilizing gain was reached within budget.
    """
    cfg = ws.cfg
    P, gain = P0, gain0
    gamma = ws.grid_norm(gain)

    spent = 0
    if gamma is None:
        # feasibility phase: margin alternation at mu until the loop closes
        for _ in range(min(outer_budget, 15)):
            spent += 1
            ws._outer += 1
            P_new, _ = ws.lyap_margin_step(gain, cfg.mu)
            if P_new is not None:
                P = P_new
            gain_new = ws.gain_margin_step(P, cfg.mu)
            if gain_new is not None:
                gain = gain_new
            gamma = ws.grid_norm(gain)
            if gamma is not None:
                break
        if gamma is None:
            return None

    lam = gamma ** 2
    best = (lam, P, gain)
    if cfg.polish == "none":
        return best

    stall = 0
    while spent < outer_budget:
        spent += 1
        ws._outer += 1
        # interior Lyapunov step at a stage slightly above the current bound
        P_stage = None
        head = cfg.descent_headroom
        for _ in range(3):
            P_try, margin = ws.lyap_margin_step(gain, lam * (1.0 + head))
            if P_try is not None and margin > 0:
                P_stage = P_try
                break
            head *= 2.5
        improved = False
        if P_stage is not None:
            gain_try = ws.gain_descent_step(P_stage)
            if gain_try is not None:
                gamma_try = ws.grid_norm(gain_try)
                if gamma_try is not None and gamma_try ** 2 < best[0]:
                    gap = best[0] - gamma_try ** 2
                    gain, lam = gain_try, gamma_try ** 2
                    best = (lam, P_stage, gain)
                    improved = gap >= cfg.descent_rel_tol * max(best[0], 1e-12)
        stall = 0 if improved else stall + 1
        if stall >= cfg.descent_patience and lam < cfg.mu:
            break
        if stall >= cfg.descent_patience + 2:
            break
    return best


def alternate(plant: GeneralizedPlant, cfg: SynthesisConfig,
              init: tuple[np.ndarray, np.ndarray],
              _ws: _Workspace | None = None) -> Certificate:
    """Alternate Lyapunov and gain solves from the given iterate until the
    bounded-real certificate holds at ``cfg.mu`` (and, in descent mode,
    until the certified bound stalls)."""
    ws = _ws or _Workspace(plant, cfg)
    P, gain = init
    P = np.asarray(P, dtype=float)
    gain = np.asarray(gain, dtype=float)

    entry = ws.min_eig(P, gain)
    ws.record("check", "entry", entry)
    if entry > 0 and cfg.polish == "none":
        gamma = ws.grid_norm(gain)
        return _finalize(ws, P, gain, gamma, n_outer=0)

    result = _descend(ws, P, gain, cfg.max_outer)
    if result is None:
        raise NoConvergence(
            "alternation could not reach a stabilizing gain",
            gain=gain, lyapunov=P, min_eig=ws.min_eig(P, gain), trace=ws.trace)
    lam, P, gain = result
    if lam >= cfg.mu:
        raise NoConvergence(
            f"best certified squared bound {lam:.6g} does not meet mu={cfg.mu}",
            gain=gain, lyapunov=P, min_eig=ws.min_eig(P, gain), trace=ws.trace)

    # final certificate at the requested bound
    P_fin, _ = ws.lyap_margin_step(gain, cfg.mu)
    if P_fin is not None:
        P = P_fin
    gamma = ws.grid_norm(gain)
    return _finalize(ws, P, gain, gamma, n_outer=ws._outer)


def _finalize(ws: _Workspace, P, gain, gamma, n_outer: int) -> Certificate:
    cfg = ws.cfg
    min_eig = ws.min_eig(P, gain)
    if min_eig <= 0:
        raise NoConvergence(
            f"final certificate not positive definite (min eig {min_eig:.3e})",
            gain=gain, lyapunov=P, min_eig=min_eig, trace=ws.trace)
    cl = close_static_gain(ws.aug, gain)
    norm = hinf_norm_grid(cl)
    if not norm ** 2 < cfg.mu:
        raise NumericFailure(
            f"certificate inconsistent: grid norm {norm:.6g} exceeds sqrt(mu)")
    semantics = cfg.cap_mode
    ws.record("check", "certified", min_eig)
    return Certificate(P=P, gain=gain, mu=cfg.mu, min_eig=min_eig,
                       closed_loop_norm=norm, n_outer=n_outer,
                       trace=ws.trace, semantics=semantics)


def synthesize(plant: GeneralizedPlant, cfg: SynthesisConfig) -> tuple[FirController, Certificate]:
    """Full pipeline: initial guess, alternation (all seeds), verification.

    Returns the controller with exactly enforced pattern zeros plus its
    certificate.  Seeds that fail to produce a certificate are skipped as
    long as one succeeds.
    """
    ws = _Workspace(plant, cfg)
    seeds: list[tuple[np.ndarray, np.ndarray]] = []
    failures: list[Exception] = []
    try:
        seeds.append(initial_guess(plant, cfg, _ws=ws))
    except NumericFailure as exc:
        failures.append(exc)
    if cfg.extra_seeds:
        gain_eye = ws.identity_metric_seed()
        if gain_eye is not None and (not seeds or not np.allclose(seeds[0][1], gain_eye)):
            seeds.append((np.eye(ws.n), gain_eye))

    best: Certificate | None = None
    for P0, gain0 in seeds:
        sub = _Workspace(plant, cfg)
        sub.trace = ws.trace  # shared trace across seeds
        sub._outer = ws._outer
        try:
            cert = alternate(plant, cfg, (P0, gain0), _ws=sub)
        except (NoConvergence, NumericFailure) as exc:
            failures.append(exc)
            ws._outer = sub._outer
            continue
        ws._outer = sub._outer
        if best is None or cert.closed_loop_norm < best.closed_loop_norm:
            best = cert
    if best is None:
        first = failures[0] if failures else NoConvergence("no seed converged")
        raise first

    ctrl = unpack_gain(best.gain, cfg.n_taps, plant.dims["ny"], ts=plant.ts)
    _verify_result(plant, cfg, ctrl, best)
    return ctrl, best


def _verify_result(plant, cfg, ctrl: FirController, cert: Certificate):
    """Independent re-checks of every certificate invariant."""
    pattern = cfg.pattern or SparsityPattern.full(plant.dims["nu"], plant.dims["ny"])
    for tap in ctrl.taps:
        if np.any(tap[pattern.S == 0] != 0.0):
            raise NumericFailure("pattern compliance violated (nonzero pinned entry)")
    aug = build_augmented(plant, cfg.n_taps)
    if certificate_min_eig(cert.P, cert.gain, aug, cfg.mu) <= 0:
        raise NumericFailure("certificate re-verification failed")
    cl = close_static_gain(aug, cert.gain)
    if spectral_radius(cl.A) >= 1.0:
        raise NumericFailure("closed loop is not Schur stable")
    if not cert.closed_loop_norm ** 2 < cfg.mu:
        raise NumericFailure("closed-loop norm does not meet the bound")


def suggest_mu(plant: GeneralizedPlant, n_taps: int = 1,
               options: SolverOptions | None = None) -> float:
    """Heuristic squared-norm bound: 1.5x the squared grid norm achieved by
    the best unstructured static gain the relaxation finds."""
    d = plant.dims
    probe_mu = 100.0 * (1.0 + float(np.linalg.norm(plant.D11, 2)) ** 2)
    cfg = SynthesisConfig(mu=probe_mu, n_taps=n_taps, polish="none",
                          extra_seeds=True, solver=options)
    ws = _Workspace(plant, cfg)
    candidates = []
    try:
        _, gain = ws.relaxed_seed()
        candidates.append(gain)
    except (InfeasibleRelaxation, NumericFailure):
        pass
    gain_eye = ws.identity_metric_seed()
    if gain_eye is not None:
        candidates.append(gain_eye)
    norms = [ws.grid_norm(g) for g in candidates]
    norms = [g for g in norms if g is not None]
    if not norms:
        raise NoConvergence("no stabilizing static gain found to size mu from")
    return 1.5 * min(norms) ** 2
