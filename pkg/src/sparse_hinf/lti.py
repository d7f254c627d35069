"""State-space containers, ZOH discretization, interconnection and stability tests.

Conventions: a system is continuous when ``ts is None`` and discrete with
sample period ``ts`` (seconds) otherwise.  All matrices are dense numpy
arrays; zero-width blocks (0-state controllers) are supported throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import DimensionError, DomainError, NumericFailure

STABILITY_MARGIN = 1e-9


@dataclass(frozen=True)
class StateSpace:
    """LTI system (A, B, C, D); continuous if ``ts`` is None, else discrete."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    ts: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "A", np.atleast_2d(np.asarray(self.A, dtype=float)))
        object.__setattr__(self, "B", np.atleast_2d(np.asarray(self.B, dtype=float)))
        object.__setattr__(self, "C", np.atleast_2d(np.asarray(self.C, dtype=float)))
        object.__setattr__(self, "D", np.atleast_2d(np.asarray(self.D, dtype=float)))
        nx = self.A.shape[0]
        p, m = self.D.shape
        if self.A.shape != (nx, nx):
            raise DimensionError(f"A must be square, got {self.A.shape}")
        if self.B.shape != (nx, m):
            raise DimensionError(f"B must be {nx}x{m}, got {self.B.shape}")
        if self.C.shape != (p, nx):
            raise DimensionError(f"C must be {p}x{nx}, got {self.C.shape}")
        for name in ("A", "B", "C", "D"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise NumericFailure(f"{name} contains non-finite entries")
        if self.ts is not None and not self.ts > 0:
            raise DomainError(f"sample period must be positive, got {self.ts}")

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.D.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.D.shape[0]

    @property
    def is_discrete(self) -> bool:
        return self.ts is not None

    def freq_response(self, points) -> np.ndarray:
        """Response C (zeta I - A)^-1 B + D at complex points zeta.

        For a discrete system pass points on the unit circle; for a
        continuous one pass points on the imaginary axis.
        """
        points = np.atleast_1d(points)
        n = self.n_states
        out = np.empty((len(points), self.n_outputs, self.n_inputs), dtype=complex)
        I = np.eye(n)
        for k, z in enumerate(points):
            if n:
                out[k] = self.C @ np.linalg.solve(z * I - self.A, self.B) + self.D
            else:
                out[k] = self.D.astype(complex)
        return out


@dataclass(frozen=True)
class GeneralizedPlant:
    """Nine-matrix open-loop plant separating disturbance (w), control (u),
    regulated (z) and measured (y) channels."""

    A: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    C1: np.ndarray
    C2: np.ndarray
    D11: np.ndarray
    D12: np.ndarray
    D21: np.ndarray
    D22: np.ndarray = None
    ts: float | None = None

    def __post_init__(self):
        for name in ("A", "B1", "B2", "C1", "C2", "D11", "D12", "D21"):
            object.__setattr__(self, name, np.atleast_2d(np.asarray(getattr(self, name), dtype=float)))
        nx = self.A.shape[0]
        nw = self.B1.shape[1]
        nu = self.B2.shape[1]
        nz = self.C1.shape[0]
        ny = self.C2.shape[0]
        if self.D22 is None:
            object.__setattr__(self, "D22", np.zeros((ny, nu)))
        else:
            object.__setattr__(self, "D22", np.atleast_2d(np.asarray(self.D22, dtype=float)))
        expected = {
            "A": (nx, nx), "B1": (nx, nw), "B2": (nx, nu),
            "C1": (nz, nx), "C2": (ny, nx),
            "D11": (nz, nw), "D12": (nz, nu), "D21": (ny, nw), "D22": (ny, nu),
        }
        for name, shape in expected.items():
            got = getattr(self, name).shape
            if got != shape:
                raise DimensionError(f"{name} must be {shape}, got {got}")
            if not np.all(np.isfinite(getattr(self, name))):
                raise NumericFailure(f"{name} contains non-finite entries")
        if self.ts is not None and not self.ts > 0:
            raise DomainError(f"sample period must be positive, got {self.ts}")

    @property
    def dims(self) -> dict:
        return {
            "nx": self.A.shape[0], "nw": self.B1.shape[1], "nu": self.B2.shape[1],
            "nz": self.C1.shape[0], "ny": self.C2.shape[0],
        }

    @property
    def is_discrete(self) -> bool:
        return self.ts is not None

    def open_loop(self) -> StateSpace:
        """The w -> z channel with u = 0."""
        return StateSpace(self.A, self.B1, self.C1, self.D11, ts=self.ts)


def zoh_discretize(plant: GeneralizedPlant, ts: float) -> GeneralizedPlant:
    """Exact zero-order-hold discretization of a continuous plant.

    Uses the block matrix exponential of [[A, B], [0, 0]] * ts (computed with
    the scaling-and-squaring Pade method); output equations are unchanged.
    """
    if plant.is_discrete:
        raise DomainError("plant is already discrete")
    if not ts > 0:
        raise DomainError(f"sample period must be positive, got {ts}")
    nx = plant.A.shape[0]
    B = np.hstack([plant.B1, plant.B2])
    m = B.shape[1]
    M = np.zeros((nx + m, nx + m))
    M[:nx, :nx] = plant.A
    M[:nx, nx:] = B
    E = expm(M * ts)
    if not np.all(np.isfinite(E)):
        raise NumericFailure("matrix exponential overflowed during discretization")
    Ad = E[:nx, :nx]
    Bd = E[:nx, nx:]
    nw = plant.B1.shape[1]
    return GeneralizedPlant(
        Ad, Bd[:, :nw], Bd[:, nw:], plant.C1, plant.C2,
        plant.D11, plant.D12, plant.D21, plant.D22, ts=ts,
    )


def close_loop(plant: GeneralizedPlant, K: StateSpace) -> StateSpace:
    """Closed loop w -> z under output feedback u = K y (lower LFT, D22 = 0).

    States are stacked [plant; controller].
    """
    if plant.is_discrete != K.is_discrete:
        raise DomainError("plant and controller domains differ")
    if plant.is_discrete and K.ts is not None and not np.isclose(plant.ts, K.ts):
        raise DomainError(f"sample periods differ: {plant.ts} vs {K.ts}")
    d = plant.dims
    if K.n_inputs != d["ny"] or K.n_outputs != d["nu"]:
        raise DimensionError(
            f"controller must map {d['ny']} measurements to {d['nu']} inputs, "
            f"got {K.n_inputs} -> {K.n_outputs}")
    if np.any(plant.D22 != 0):
        raise DomainError("close_loop requires D22 = 0")
    A, B1, B2 = plant.A, plant.B1, plant.B2
    C1, C2 = plant.C1, plant.C2
    D11, D12, D21 = plant.D11, plant.D12, plant.D21
    Ak, Bk, Ck, Dk = K.A, K.B, K.C, K.D
    ACL = np.block([[A + B2 @ Dk @ C2, B2 @ Ck], [Bk @ C2, Ak]])
    BCL = np.block([[B1 + B2 @ Dk @ D21], [Bk @ D21]])
    CCL = np.block([[C1 + D12 @ Dk @ C2, D12 @ Ck]])
    DCL = D11 + D12 @ Dk @ D21
    return StateSpace(ACL, BCL, CCL, DCL, ts=plant.ts)


def close_loop_static(plant: GeneralizedPlant, K0: np.ndarray) -> StateSpace:
    """Closed loop under the static feedback u = K0 y."""
    d = plant.dims
    K0 = np.atleast_2d(np.asarray(K0, dtype=float))
    K = StateSpace(np.zeros((0, 0)), np.zeros((0, d["ny"])),
                   np.zeros((d["nu"], 0)), K0, ts=plant.ts)
    return close_loop(plant, K)


def is_stable(sys: StateSpace, tol_margin: float = STABILITY_MARGIN) -> bool:
    """Schur stability (discrete) or Hurwitz stability (continuous)."""
    if sys.n_states == 0:
        return True
    eig = np.linalg.eigvals(sys.A)
    if sys.is_discrete:
        return bool(np.all(np.abs(eig) < 1.0 - tol_margin))
    return bool(np.all(eig.real < -tol_margin))


def spectral_radius(A: np.ndarray) -> float:
    A = np.atleast_2d(A)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def impulse_response(sys: StateSpace, N: int) -> list[np.ndarray]:
    """First N Markov parameters: h_0 = D, h_k = C A^(k-1) B for k >= 1."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if not sys.is_discrete:
        raise DomainError("impulse_response is defined for discrete systems")
    out = [sys.D.copy()]
    if N == 1:
        return out
    X = sys.B.copy()
    for _ in range(1, N):
        out.append(sys.C @ X)
        X = sys.A @ X
    return out
