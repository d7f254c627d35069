"""FIR controllers: tap containers, canonical realization, packed static
gain, and the sparsity-pattern machinery.

An FIR controller with taps Q_0 ... Q_{n-1} (each n_u x n_y) realizes the
transfer function sum_i Q_i z^{-i}.  Its canonical realization stacks
(n-1) delay blocks of width n_y; the packed gain [Q_{n-1}, ..., Q_1, Q_0]
is the single static matrix carrying all design freedom, which is what the
synthesis programs optimize over.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .lti import StateSpace

PATTERN_REL_THRESHOLD = 1e-4


@dataclass(frozen=True)
class FirController:
    """Taps Q_0 ... Q_{n_taps-1}, each n_u x n_y, at sample period ts."""

    taps: tuple[np.ndarray, ...]
    ts: float

    def __post_init__(self):
        taps = tuple(np.atleast_2d(np.asarray(t, dtype=float)) for t in self.taps)
        if not taps:
            raise DimensionError("an FIR controller needs at least one tap")
        shape = taps[0].shape
        for t in taps:
            if t.shape != shape:
                raise DimensionError(f"taps must share dimensions, got {t.shape} vs {shape}")
        object.__setattr__(self, "taps", taps)

    @property
    def n_taps(self) -> int:
        return len(self.taps)

    @property
    def n_inputs(self) -> int:
        """Controller inputs = plant measurements."""
        return self.taps[0].shape[1]

    @property
    def n_outputs(self) -> int:
        return self.taps[0].shape[0]


@dataclass(frozen=True)
class SparsityPattern:
    """Binary n_u x n_y matrix; a zero forces that controller entry to
    vanish identically (all taps zero there)."""

    S: np.ndarray

    def __post_init__(self):
        S = np.atleast_2d(np.asarray(self.S))
        if not np.all(np.isin(S, (0, 1))):
            raise ValueError("pattern entries must be 0 or 1")
        object.__setattr__(self, "S", S.astype(float))

    @classmethod
    def full(cls, n_u: int, n_y: int) -> "SparsityPattern":
        return cls(np.ones((n_u, n_y)))

    @classmethod
    def diagonal(cls, n_u: int, n_y: int) -> "SparsityPattern":
        return cls(np.eye(n_u, n_y))

    @property
    def n_zeros(self) -> int:
        return int(self.S.size - self.S.sum())


def fir_realize(K: FirController) -> StateSpace:
    """Canonical state-space realization of an FIR controller.

    One tap gives a pure static gain (0 states).  Otherwise the state matrix
    is the block upshift with identity blocks of width n_y, the input matrix
    loads the last delay block, and the output matrix lists the delayed taps
    in the order [Q_{n-1}, ..., Q_1].
    """
    Aq, Bq = fir_shift_blocks(K.n_taps, K.n_inputs)
    if K.n_taps >= 2:
        Cq = np.hstack([K.taps[i] for i in range(K.n_taps - 1, 0, -1)])
    else:
        Cq = np.zeros((K.n_outputs, 0))
    return StateSpace(Aq, Bq, Cq, K.taps[0], ts=K.ts)


def fir_shift_blocks(n_taps: int, n_y: int) -> tuple[np.ndarray, np.ndarray]:
    """The fixed (state, input) matrices of the canonical FIR realization;
    they depend only on the tap count and measurement width."""
    na = (n_taps - 1) * n_y
    Aq = np.zeros((na, na))
    for i in range(n_taps - 2):
        Aq[i * n_y:(i + 1) * n_y, (i + 1) * n_y:(i + 2) * n_y] = np.eye(n_y)
    Bq = np.zeros((na, n_y))
    if n_taps >= 2:
        Bq[-n_y:, :] = np.eye(n_y)
    return Aq, Bq


def pack_gain(K: FirController) -> np.ndarray:
    """Packed static gain [Q_{n-1}, ..., Q_1, Q_0] of shape n_u x (n_taps n_y)."""
    return np.hstack([K.taps[i] for i in range(K.n_taps - 1, -1, -1)])


def unpack_gain(gain: np.ndarray, n_taps: int, n_y: int, ts: float) -> FirController:
    """Slice a packed gain back into taps (inverse of :func:`pack_gain`)."""
    gain = np.atleast_2d(np.asarray(gain, dtype=float))
    if gain.shape[1] != n_taps * n_y:
        raise DimensionError(
            f"packed gain must have {n_taps * n_y} columns, got {gain.shape[1]}")
    taps = [gain[:, (n_taps - 1 - i) * n_y:(n_taps - i) * n_y] for i in range(n_taps)]
    return FirController(tuple(taps), ts=ts)


def pattern_constraints(S: SparsityPattern, n_taps: int) -> list[tuple[int, int]]:
    """Zero-entry (row, col) indices into the packed gain for a pattern.

    Every structural zero of S pins the matching entry of every tap, so the
    list has n_taps * (#zeros of S) elements.
    """
    n_u, n_y = S.S.shape
    out = []
    for j in range(n_u):
        for k in range(n_y):
            if S.S[j, k] == 0:
                for i in range(n_taps):
                    out.append((j, (n_taps - 1 - i) * n_y + k))
    return out


def pattern_of(K: FirController, rel_threshold: float = PATTERN_REL_THRESHOLD) -> SparsityPattern:
    """Extract the sparsity pattern of a controller.

    An entry reads zero when its magnitude across all taps stays below
    ``rel_threshold`` times the largest tap magnitude overall.
    """
    if not 0 < rel_threshold < 1:
        raise ValueError("rel_threshold must lie in (0, 1)")
    stacked = np.stack([np.abs(t) for t in K.taps])
    per_entry = stacked.max(axis=0)
    scale = per_entry.max()
    if scale == 0.0:
        return SparsityPattern(np.zeros_like(per_entry))
    return SparsityPattern((per_entry >= rel_threshold * scale).astype(float))
