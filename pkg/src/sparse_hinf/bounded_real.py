"""Static-output-feedback reduction and the bounded-real certificate matrices.

Restricting the controller to an FIR filter turns H-infinity design into a
static output feedback problem on an augmented plant: the fixed delay chain
of the FIR realization is absorbed into the plant, and the packed gain (all
taps side by side) becomes the only decision block.  ``certificate_matrix``
assembles the bounded-real condition for that static loop; its relaxed
variant removes the Lyapunov factor from the bilinear terms, making the
condition jointly affine in (P, gain).
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, DomainError
from .fir import fir_shift_blocks
from .lmi import block_matrix
from .lti import GeneralizedPlant, StateSpace

__all__ = [
    "build_augmented",
    "close_static_gain",
    "certificate_matrix",
    "certificate_matrix_relaxed",
]


def build_augmented(plant: GeneralizedPlant, n_taps: int) -> GeneralizedPlant:
    """Augment a discrete plant with the FIR delay chain.

    The result is again a generalized plant (with D22 = 0) whose measured
    output stacks the delayed measurements above the raw ones, so a static
    gain on it realizes an ``n_taps``-tap FIR controller on the original
    plant.  One tap returns the plant unchanged.
    """
    if not plant.is_discrete:
        raise DomainError("augmentation requires a discrete plant")
    if np.any(plant.D22 != 0):
        raise DomainError("synthesis entry points require D22 = 0")
    if n_taps < 1:
        raise ValueError("n_taps must be >= 1")
    if n_taps == 1:
        return plant
    d = plant.dims
    nx, ny, nw, nu = d["nx"], d["ny"], d["nw"], d["nu"]
    Aq, Bq = fir_shift_blocks(n_taps, ny)
    na = Aq.shape[0]
    A_o = np.block([[plant.A, np.zeros((nx, na))], [Bq @ plant.C2, Aq]])
    B_o = np.vstack([plant.B1, Bq @ plant.D21])
    C_o = np.hstack([plant.C1, np.zeros((d["nz"], na))])
    B_u = np.vstack([plant.B2, np.zeros((na, nu))])
    C_y = np.block([[np.zeros((na, nx)), np.eye(na)], [plant.C2, np.zeros((ny, na))]])
    D_yw = np.vstack([np.zeros((na, nw)), plant.D21])
    return GeneralizedPlant(
        A_o, B_o, B_u, C_o, C_y,
        plant.D11, plant.D12, D_yw, np.zeros((na + ny, nu)), ts=plant.ts,
    )


def n_aug_states(plant: GeneralizedPlant, n_taps: int) -> int:
    return (n_taps - 1) * plant.dims["ny"]


def _closed_blocks(aug: GeneralizedPlant, gain):
    """Closed-loop (A, B, C, D) under the static feedback u = gain * y.

    Works for numeric gains and cvxpy expressions alike.
    """
    ACL = aug.A + aug.B2 @ gain @ aug.C2
    BCL = aug.B1 + aug.B2 @ gain @ aug.D21
    CCL = aug.C1 + aug.D12 @ gain @ aug.C2
    DCL = aug.D11 + aug.D12 @ gain @ aug.D21
    return ACL, BCL, CCL, DCL


def close_static_gain(aug: GeneralizedPlant, gain: np.ndarray) -> StateSpace:
    """Closed loop w -> z of the augmented plant under u = gain * y."""
    gain = np.atleast_2d(np.asarray(gain, dtype=float))
    d = aug.dims
    if gain.shape != (d["nu"], d["ny"]):
        raise DimensionError(f"gain must be {(d['nu'], d['ny'])}, got {gain.shape}")
    ACL, BCL, CCL, DCL = _closed_blocks(aug, gain)
    return StateSpace(ACL, BCL, CCL, DCL, ts=aug.ts)


def certificate_matrix(P, gain, aug: GeneralizedPlant, mu):
    """Bounded-real certificate block matrix for the static closed loop.

    Positive definiteness certifies Schur stability and a squared
    H-infinity norm below ``mu``.  Affine in P for a fixed gain, affine in
    the gain for a fixed P, and affine in ``mu`` throughout; symmetric by
    construction (the lower blocks are written as explicit transposes).
    """
    n = aug.A.shape[0]
    nw = aug.B1.shape[1]
    nz = aug.C1.shape[0]
    ACL, BCL, CCL, DCL = _closed_blocks(aug, gain)
    b12 = ACL @ P
    b24 = P @ CCL.T
    Zw = np.zeros((n, nw))
    Zz = np.zeros((n, nz))
    return block_matrix([
        [P, b12, BCL, Zz],
        [b12.T, P, Zw, b24],
        [BCL.T, Zw.T, np.eye(nw), DCL.T],
        [Zz.T, b24.T, DCL, mu * np.eye(nz)],
    ])


def certificate_matrix_relaxed(P, gain, aug: GeneralizedPlant, mu):
    """Jointly affine relaxation of :func:`certificate_matrix`.

    The Lyapunov factor is removed from the terms where it multiplies the
    gain, so the matrix is affine in (P, gain) together; it coincides with
    the exact certificate at P = I.
    """
    n = aug.A.shape[0]
    nw = aug.B1.shape[1]
    nz = aug.C1.shape[0]
    ACL, BCL, CCL, DCL = _closed_blocks(aug, gain)
    b12 = aug.A @ P + aug.B2 @ gain @ aug.C2
    b24 = P @ aug.C1.T + (aug.D12 @ gain @ aug.C2).T
    Zw = np.zeros((n, nw))
    Zz = np.zeros((n, nz))
    return block_matrix([
        [P, b12, BCL, Zz],
        [b12.T, P, Zw, b24],
        [BCL.T, Zw.T, np.eye(nw), DCL.T],
        [Zz.T, b24.T, DCL, mu * np.eye(nz)],
    ])


def certificate_min_eig(P: np.ndarray, gain: np.ndarray, aug: GeneralizedPlant,
                        mu: float) -> float:
    """Smallest eigenvalue of the exact certificate at a numeric point."""
    M = np.asarray(certificate_matrix(P, gain, aug, mu), dtype=float)
    return float(np.linalg.eigvalsh(0.5 * (M + M.T)).min())
