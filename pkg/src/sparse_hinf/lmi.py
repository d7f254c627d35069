"""Backend-neutral semidefinite feasibility/optimization layer.

A problem is a set of named matrix variables plus affine symmetric-matrix
constraint maps, each required to dominate a small multiple of the identity.
Feasibility problems are solved in a margin-maximizing form (maximize t
subject to every constraint >= (eps + t) I, t <= 1), which yields a robust
feasible/infeasible determination and a usable interior point; problems with
an objective are solved to convergence directly.  An explicit iteration cap
reproduces the partial-iterate behaviour of first-order backends instead.

The one place an external conic solver is bound is :func:`solve`; the
backend is selected by ``SolverOptions`` or the ``SPARSE_HINF_BACKEND``
environment variable (``clarabel``, ``scs`` or ``cvxopt``).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Sequence

import cvxpy as cp
import numpy as np

from .errors import NumericFailure

# strict LMIs "> 0" are implemented as ">= eps_pd(scale) * I"
EPS_PD_COEFF = 1e-7
T_MAX = 1.0


def eps_pd(scale: float) -> float:
    """Strictness shift for a constraint whose constant term has the given
    largest absolute entry."""
    return EPS_PD_COEFF * (1.0 + abs(scale))


def block_matrix(rows: Sequence[Sequence]):
    """np.block / cvxpy.bmat dispatch so one assembly serves both numeric
    evaluation and problem construction."""
    symbolic = any(isinstance(x, cp.expressions.expression.Expression)
                   for row in rows for x in row)
    return cp.bmat(rows) if symbolic else np.block([list(r) for r in rows])


@dataclass(frozen=True)
class MatrixVariable:
    """A named matrix decision variable, optionally symmetric, with an
    optional set of entries pinned to exactly zero."""

    name: str
    shape: tuple[int, int]
    symmetric: bool = False
    zero_entries: tuple[tuple[int, int], ...] = ()

    def free_mask(self) -> np.ndarray:
        mask = np.ones(self.shape)
        for (i, j) in self.zero_entries:
            mask[i, j] = 0.0
        return mask


@dataclass
class LmiProblem:
    """Affine symmetric-matrix constraints over named matrix variables.

    Each constraint is a callable mapping ``{name: value}`` to a symmetric
    matrix; it must be affine in the variables and accept either numpy
    arrays or cvxpy expressions (assemble blocks with :func:`block_matrix`).
    The optional objective is an affine scalar callable (minimized);
    ``l1_weights`` adds an entrywise weighted l1 term on one variable,
    implemented with epigraph auxiliaries.
    """

    variables: list[MatrixVariable]
    constraints: list[Callable[[Mapping[str, object]], object]]
    objective: Callable[[Mapping[str, object]], object] | None = None
    l1_weights: tuple[str, np.ndarray] | None = None
    iter_cap: int | None = None

    def constant_terms(self) -> list[np.ndarray]:
        zeros = {v.name: np.zeros(v.shape) for v in self.variables}
        return [np.asarray(c(zeros), dtype=float) for c in self.constraints]


class SolveStatus(Enum):
    FEASIBLE = "feasible"
    CAP_REACHED = "cap_reached"
    INFEASIBLE = "infeasible"
    NUMERIC_FAILURE = "numeric_failure"


@dataclass
class SolveOutcome:
    status: SolveStatus
    values: dict[str, np.ndarray] | None
    margin: float
    objective_value: float | None = None
    semantics: str = "staged"
    backend: str = ""


@dataclass
class SolverOptions:
    """Conic backend selection and accuracy knobs."""

    backend: str = field(default_factory=lambda: os.environ.get("SPARSE_HINF_BACKEND", "clarabel"))
    scs_eps: float = 1e-7
    scs_max_iters: int = 30000
    fallback: bool = True  # fall back to SCS when the primary backend fails

    def cvxpy_solver(self) -> str:
        name = self.backend.lower()
        table = {"clarabel": cp.CLARABEL, "scs": cp.SCS, "cvxopt": cp.CVXOPT}
        if name not in table:
            raise ValueError(f"unknown backend {self.backend!r}; pick one of {sorted(table)}")
        return table[name]


def _build(problem: LmiProblem):
    """cvxpy variables with zero entries structurally masked out."""
    cvars: dict[str, cp.Variable] = {}
    vals: dict[str, object] = {}
    for v in problem.variables:
        var = cp.Variable(v.shape, name=v.name, symmetric=v.symmetric)
        cvars[v.name] = var
        if v.zero_entries:
            vals[v.name] = cp.multiply(v.free_mask(), var)
        else:
            vals[v.name] = var
    return cvars, vals


def _extract(problem: LmiProblem, cvars) -> dict[str, np.ndarray] | None:
    out = {}
    for v in problem.variables:
        raw = cvars[v.name].value
        if raw is None:
            return None
        val = np.multiply(v.free_mask(), raw) if v.zero_entries else np.asarray(raw)
        if v.symmetric:
            val = 0.5 * (val + val.T)
        out[v.name] = val
    return out


def reassemble_margin(problem: LmiProblem, values: Mapping[str, np.ndarray]) -> float:
    """Minimum eigenvalue over all constraints at the given point, measured
    past the strictness shift (>= 0 means every shifted constraint holds)."""
    margins = []
    for c, const in zip(problem.constraints, problem.constant_terms()):
        eps = eps_pd(np.abs(const).max() if const.size else 0.0)
        M = np.asarray(c(values), dtype=float)
        margins.append(float(np.linalg.eigvalsh(0.5 * (M + M.T)).min()) - eps)
    return min(margins) if margins else np.inf


def _run(prob: cp.Problem, options: SolverOptions, iter_cap: int | None):
    solver = options.cvxpy_solver()
    kwargs = {}
    if iter_cap is not None:
        # partial-iterate semantics: first-order backend with a hard cap
        solver = cp.SCS
        kwargs = {"max_iters": int(iter_cap), "eps": options.scs_eps}
    try:
        prob.solve(solver=solver, **kwargs)
        if prob.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE, cp.INFEASIBLE,
                           cp.INFEASIBLE_INACCURATE, cp.USER_LIMIT):
            return prob.status, str(solver)
    except cp.error.SolverError:
        pass
    if iter_cap is None and options.fallback and solver != cp.SCS:
        try:
            prob.solve(solver=cp.SCS, eps=options.scs_eps, max_iters=options.scs_max_iters)
            return prob.status, "SCS"
        except cp.error.SolverError as exc:
            raise NumericFailure(f"all conic backends failed: {exc}") from exc
    raise NumericFailure(f"conic backend failed with status {prob.status!r}")


def solve(problem: LmiProblem, options: SolverOptions | None = None) -> SolveOutcome:
    """Solve the LMI problem.

    Pure feasibility problems (no objective) are solved as margin
    maximization; a certified nonpositive optimal margin means infeasible.
    With ``iter_cap`` set, the solve runs under a hard iteration cap and the
    last iterate is returned as ``CAP_REACHED`` (values still satisfy the
    zero pins exactly).
    """
    options = options or SolverOptions()
    cvars, vals = _build(problem)
    shifts = [eps_pd(np.abs(c).max() if c.size else 0.0) for c in problem.constant_terms()]

    feasibility = problem.objective is None and problem.l1_weights is None
    semantics = "iter_cap" if problem.iter_cap is not None else (
        "staged" if feasibility else "objective")

    if feasibility:
        t = cp.Variable()
        cons = []
        for c, eps in zip(problem.constraints, shifts):
            M = c(vals)
            cons.append(M >> (eps + t) * np.eye(M.shape[0]))
        cons.append(t <= T_MAX)
        prob = cp.Problem(cp.Maximize(t), cons)
    else:
        cons = []
        for c, eps in zip(problem.constraints, shifts):
            M = c(vals)
            cons.append(M >> eps * np.eye(M.shape[0]))
        obj = 0
        if problem.objective is not None:
            obj = obj + problem.objective(vals)
        if problem.l1_weights is not None:
            name, W = problem.l1_weights
            W = np.asarray(W, dtype=float)
            if np.any(W < 0):
                raise ValueError("l1 weights must be nonnegative")
            T = cp.Variable(W.shape)
            cons += [T >= vals[name], T >= -vals[name]]
            obj = obj + cp.sum(cp.multiply(W, T))
        prob = cp.Problem(cp.Minimize(obj), cons)

    status, backend = _run(prob, options, problem.iter_cap)

    if status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        return SolveOutcome(SolveStatus.INFEASIBLE, None, -np.inf,
                            semantics=semantics, backend=backend)

    values = _extract(problem, cvars)
    if values is None:
        raise NumericFailure("solver returned no iterate")
    margin = reassemble_margin(problem, values)
    objective_value = None
    if not feasibility:
        objective_value = float(prob.value) if prob.value is not None else None

    if problem.iter_cap is not None:
        return SolveOutcome(SolveStatus.CAP_REACHED, values, margin,
                            objective_value, semantics, backend)
    if feasibility:
        t_opt = float(t.value) if t.value is not None else -np.inf
        if margin >= 0.0:
            return SolveOutcome(SolveStatus.FEASIBLE, values, margin,
                                None, semantics, backend)
        if t_opt <= 0.0 and status == cp.OPTIMAL:
            # converged margin maximization with nonpositive optimum
            return SolveOutcome(SolveStatus.INFEASIBLE, values, margin,
                                None, semantics, backend)
        return SolveOutcome(SolveStatus.CAP_REACHED, values, margin,
                            None, semantics, backend)
    status_out = SolveStatus.FEASIBLE if margin >= 0.0 else SolveStatus.CAP_REACHED
    return SolveOutcome(status_out, values, margin, objective_value, semantics, backend)


def solve_min_weighted_l1(problem: LmiProblem, weights: np.ndarray,
                          target: str, options: SolverOptions | None = None) -> SolveOutcome:
    """Minimize sum W(i,j) |target(i,j)| subject to the problem's psd and
    zero constraints (epigraph reformulation)."""
    if target not in {v.name for v in problem.variables}:
        raise ValueError(f"unknown target variable {target!r}")
    prob = LmiProblem(
        variables=problem.variables,
        constraints=problem.constraints,
        objective=problem.objective,
        l1_weights=(target, np.asarray(weights, dtype=float)),
        iter_cap=problem.iter_cap,
    )
    return solve(prob, options)
