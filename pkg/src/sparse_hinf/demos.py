"""Bundled benchmark problems (ex1, ex2, ex3).

Three classic plants from the sparse/distributed control literature, each
with the published reference controllers and closed-loop norms used by the
demo command to cross-check this implementation: an unstable 4-state plant
under a diagonal controller constraint, a 5-state triangular network with a
two-entry pattern, and an 8-mass spring chain under velocity-only feedback.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fir import FirController, SparsityPattern
from .lti import GeneralizedPlant


@dataclass(frozen=True)
class ReferenceController:
    """A published controller with its reported closed-loop norms."""

    name: str
    controller: FirController
    norm_discrete: float | None = None
    norm_continuous: float | None = None
    ct_equivalent: tuple | None = None  # matrix of (num, den) pairs or None
    ct_equivalent_norm: float | None = None


@dataclass(frozen=True)
class DemoBundle:
    name: str
    plant_ct: GeneralizedPlant
    ts: float
    pattern: SparsityPattern
    mu: float
    n_taps: int
    k: tuple[int, int, int]
    references: tuple[ReferenceController, ...]
    printed_discrete: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()
    discovery: dict | None = None


def ex1() -> DemoBundle:
    """Unstable 4-state plant, diagonal 2x2 controller pattern."""
    A = np.array([[-2.0, 1, 1, 1], [3, 0, 0, 2], [-1, 0, -2, -3], [-2, -1, 2, -1]])
    B1 = np.array([[1.0, 0, 0], [0, 0, 0], [1, 0, 0], [0, 0, 0]])
    B2 = np.array([[0.0, 0], [1, 0], [0, 0], [0, 1]])
    C1 = np.array([[1.0, 0, -1, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    C2 = np.array([[1.0, 0, 0, 0], [0, 0, 1, 0]])
    D11 = np.zeros((3, 3))
    D12 = np.array([[0.0, 0], [1, 0], [0, 1]])
    D21 = np.array([[0.0, 1, 0], [0, 0, 1]])
    plant = GeneralizedPlant(A, B1, B2, C1, C2, D11, D12, D21)
    ts = 0.1

    printed = {
        "A": np.array([
            [0.8189, 0.08627, 0.09004, 0.08133],
            [0.2524, 1.003, 0.03134, 0.2004],
            [-0.05449, 0.01017, 0.7901, -0.258],
            [-0.1918, -0.1034, 0.1602, 0.8604]]),
        "B1": np.array([
            [0.09531, 0, 0], [0.01447, 0, 0], [0.08618, 0, 0], [-0.001083, 0, 0]]),
        "B2": np.array([
            [0.004532, 0.004367], [0.1001, 0.01005],
            [0.0003383, -0.01361], [-0.005126, 0.09363]]),
    }

    static = ReferenceController(
        name="static",
        controller=FirController((np.diag([-1.2775, -0.5685]),), ts=ts),
        norm_continuous=1.85,
    )
    first_order = ReferenceController(
        name="first-order",
        controller=FirController(
            (np.diag([-0.6543, -0.1993]), np.diag([-0.5344, -0.2237])), ts=ts),
        norm_discrete=1.9043,
        ct_equivalent=(
            (((-8.469,), (1.0, 7.382)), None),
            (None, ((-4.167,), (1.0, 10.24))),
        ),
        ct_equivalent_norm=1.9517,
    )
    second_order = ReferenceController(
        name="second-order",
        controller=FirController(
            (np.diag([-0.6377, -0.228]), np.diag([-0.2514, -0.1406]),
             np.diag([-0.3369, -0.2332])), ts=ts),
        norm_discrete=1.9795,
        ct_equivalent=(
            (((-189.7,), (1.0, 40.21, 157.8)), None),
            (None, ((-6.11e4,), (1.0, 565.7, 1.254e5))),
        ),
        ct_equivalent_norm=1.9711,
    )
    return DemoBundle(
        name="ex1", plant_ct=plant, ts=ts,
        pattern=SparsityPattern.diagonal(2, 2),
        mu=24.0, n_taps=1, k=(10, 5, 2),
        references=(static, first_order, second_order),
        printed_discrete=printed,
        notes=("benchmark static design reported in earlier literature: 1.995",),
    )


def ex2() -> DemoBundle:
    """5-state triangular network; controller restricted to entries (2,2)
    and (5,5)."""
    A = np.diag([-1.0, 1, -1, -1, 1])
    B1 = np.diag([0.2, 0.2, 0.2, 0.2, 0.1])
    B2 = np.diag([2.0, 2, 2, 2, 1])
    C1 = np.array([
        [0.05, 0, 0, 0, 0],
        [0.05, 0.05, 0, 0, 0],
        [0.05, 0.05, 0.05, 0, 0],
        [0.05, 0.05, 0.05, 0.05, 0],
        [0.05, 0.05, 0.05, 0.05, 0.1]])
    C2 = np.array([
        [0.5, 0, 0, 0, 0],
        [0.5, 0.5, 0, 0, 0],
        [0.5, 0.5, 0.5, 0, 0],
        [0.5, 0.5, 0.5, 0.5, 0],
        [0.5, 0.5, 0.5, 0.5, 1.0]])
    Z = np.zeros((5, 5))
    plant = GeneralizedPlant(A, B1, B2, C1, C2, Z, Z, Z, Z)
    ts = 0.05
    S = np.zeros((5, 5))
    S[1, 1] = 1.0
    S[4, 4] = 1.0

    printed = {
        "A": np.diag([0.9512, 1.051, 0.9512, 0.9512, 1.051]),
        "B1": np.diag([0.009754, 0.01025, 0.009754, 0.009754, 0.005127]),
        "B2_is_10_B1": True,
    }

    q0 = np.zeros((5, 5)); q0[1, 1] = -9.265; q0[4, 4] = -12.68
    q1 = np.zeros((5, 5)); q1[1, 1] = -5.227; q1[4, 4] = -15.84
    ct_ref = [[None] * 5 for _ in range(5)]
    ct_ref[1][1] = ((-120.0,), (1.0, 8.501))
    ct_ref[4][4] = ((-616.7,), (1.0, 22.48))
    first_order = ReferenceController(
        name="first-order",
        controller=FirController((q0, q1), ts=ts),
        norm_discrete=0.0163,
        ct_equivalent=tuple(tuple(r) for r in ct_ref),
        ct_equivalent_norm=0.0163,
    )
    k0 = np.zeros((5, 5)); k0[1, 1] = -9.1093; k0[4, 4] = -12.372
    static = ReferenceController(
        name="static",
        controller=FirController((k0,), ts=ts),
        norm_discrete=0.0165,
        norm_continuous=0.0165,
    )
    return DemoBundle(
        name="ex2", plant_ct=plant, ts=ts,
        pattern=SparsityPattern(S),
        mu=0.1, n_taps=2, k=(2, 5, 2),
        references=(first_order, static),
        printed_discrete=printed,
        notes=("all four D-blocks are zero for this model",),
    )


def ex3(n_masses: int = 8) -> DemoBundle:
    """Spring-mass chain: positions and velocities measured, forces on every
    mass, velocity-only diagonal feedback target."""
    N = n_masses
    T = -2.0 * np.eye(N) + np.diag(np.ones(N - 1), 1) + np.diag(np.ones(N - 1), -1)
    # T is negative definite, so the spring block enters with +T: the chain
    # is a marginally stable oscillator (the printed sign convention would
    # make it an unstable saddle no velocity feedback could rescue)
    A = np.block([[np.zeros((N, N)), np.eye(N)], [T, np.zeros((N, N))]])
    B1 = np.vstack([np.zeros((N, N)), np.eye(N)])
    B2 = B1.copy()
    C1 = np.eye(2 * N)          # Q^(1/2) with Q = I
    C2 = np.eye(2 * N)
    D11 = np.zeros((2 * N, N))
    D21 = np.zeros((2 * N, N))
    D12 = np.vstack([np.sqrt(10.0) * np.eye(N), np.zeros((N, N))])  # R = 10 I
    D22 = np.zeros((2 * N, N))  # printed alongside D12; forced to zero here
    plant = GeneralizedPlant(A, B1, B2, C1, C2, D11, D12, D21, D22)
    ts = 0.5
    S = np.hstack([np.zeros((N, N)), np.eye(N)])

    kv = np.diag([-0.7491, -0.706, -0.7255, -0.7316,
                  -0.7316, -0.7255, -0.706, -0.7529])
    gain = np.hstack([np.zeros((N, N)), kv])
    velocity = ReferenceController(
        name="velocity-diagonal",
        controller=FirController((gain,), ts=ts),
        norm_discrete=8.2909,
    )
    return DemoBundle(
        name="ex3", plant_ct=plant, ts=ts,
        pattern=SparsityPattern(S),
        mu=83.0, n_taps=1, k=(10, 5, 2),
        references=(velocity,),
        notes=(
            "spring block sign flipped to the stable oscillator convention",
            "feedthrough from control to measurement forced to zero",
        ),
        discovery={"mu": 80.0, "n_taps": 2, "max_iter": 40},
    )


BUNDLES = {"ex1": ex1, "ex2": ex2, "ex3": ex3}
