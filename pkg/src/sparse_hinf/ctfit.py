"""Fixed-order continuous-time fits of discrete controller entries.

Fits a rational transfer function in s to the sampled frequency response by
linearized least squares with Sanathanan-Koerner reweighting.  The candidate
model carries the half-sample hold delay explicitly, which is what makes
pole recovery of hold-discretized systems accurate; its fit band shrinks
with the pole count, since all-pole models can only track the non-rolling
FIR responses over a limited range.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, UnstableSystemError
from .fir import FirController
from .lti import StateSpace, is_stable

SK_PASSES = 3
N_FREQ = 200


@dataclass(frozen=True)
class RationalTf:
    """Rational transfer function in s: num/den with descending powers and a
    monic denominator."""

    num: tuple[float, ...]
    den: tuple[float, ...]

    def __post_init__(self):
        num = tuple(float(c) for c in np.atleast_1d(self.num))
        den = tuple(float(c) for c in np.atleast_1d(self.den))
        if not den or den[0] == 0:
            raise ValueError("denominator must be nonempty with nonzero lead")
        if den[0] != 1.0:
            num = tuple(c / den[0] for c in num)
            den = tuple(c / den[0] for c in den)
        if len(num) > len(den):
            raise ValueError("fit must be proper (num order <= den order)")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def n_zeros(self) -> int:
        return len(self.num) - 1

    @property
    def n_poles(self) -> int:
        return len(self.den) - 1

    def response(self, w) -> np.ndarray:
        s = 1j * np.atleast_1d(np.asarray(w, dtype=float))
        return np.polyval(self.num, s) / np.polyval(self.den, s)

    def poles(self) -> np.ndarray:
        return np.roots(self.den) if self.n_poles else np.array([])


def _default_grid(ts: float, n_poles: int, n_freq: int) -> np.ndarray:
    """Log-spaced fit frequencies; the top shrinks with the pole count."""
    top = min(0.95, 0.9 / (1 + n_poles)) * np.pi / ts
    return np.logspace(np.log10(np.pi / (100.0 * ts)), np.log10(top), n_freq)


def _target_response(h, ts: float, w: np.ndarray) -> np.ndarray:
    """Sampled-system response at continuous frequencies w (rad/s)."""
    if isinstance(h, StateSpace):
        if not h.is_discrete:
            raise ValueError("expected a discrete system")
        if h.n_outputs != 1 or h.n_inputs != 1:
            raise DimensionError("entry fits are SISO")
        if not is_stable(h):
            raise UnstableSystemError("cannot fit an unstable response")
        return h.freq_response(np.exp(1j * w * ts))[:, 0, 0]
    taps = [float(np.asarray(t).reshape(())) for t in h]
    z = np.exp(-1j * w * ts)
    return sum(q * z ** i for i, q in enumerate(taps))


def fit_ct_entry(h, ts: float, n_zeros: int, n_poles: int,
                 n_freq: int = N_FREQ, sk_passes: int = SK_PASSES,
                 freqs: np.ndarray | None = None) -> RationalTf:
    """Fit one SISO continuous-time transfer function to a discrete response.

    ``h`` is either a stable discrete SISO StateSpace or a list of scalar
    FIR taps.  The linearized (Levy) fit is refined by ``sk_passes``
    reweighting passes; an unstable result is reflected into the left
    half-plane (preserving the DC value) with a warning.
    """
    if n_poles < n_zeros:
        raise ValueError("need n_poles >= n_zeros for a proper fit")
    if not ts > 0:
        raise ValueError("sample period must be positive")
    w = np.asarray(freqs, dtype=float) if freqs is not None else _default_grid(ts, n_poles, n_freq)
    G = _target_response(h, ts, w)
    if n_poles == 0 and n_zeros == 0:
        # static fit: weighted real projection
        g = float(np.real(np.mean(G)))
        return RationalTf((g,), (1.0,))

    s = 1j * w
    hold = np.exp(-1j * w * ts / 2.0)  # half-sample hold delay on the model side
    nb = n_zeros + 1
    wgt = np.ones_like(w)
    num = den = None
    for _ in range(1 + sk_passes):
        cols = [hold * s ** (n_zeros - i) for i in range(nb)]
        cols += [-G * s ** (n_poles - i) for i in range(1, n_poles + 1)]
        Amat = np.array(cols).T * wgt[:, None]
        rhs = (G * s ** n_poles) * wgt
        Astack = np.vstack([Amat.real, Amat.imag])
        rstack = np.concatenate([rhs.real, rhs.imag])
        x, _, rank, _ = np.linalg.lstsq(Astack, rstack, rcond=None)
        if rank < nb + n_poles:
            raise np.linalg.LinAlgError(
                "rank-deficient fit equations; try fewer numerator/denominator parameters")
        num = x[:nb]
        den = np.concatenate([[1.0], x[nb:]])
        wgt = 1.0 / np.maximum(np.abs(np.polyval(den, s)), 1e-12)

    roots = np.roots(den)
    if np.any(roots.real > 0):
        dc_old = np.polyval(den, 0.0)
        roots = np.where(roots.real > 0, -roots.real + 1j * roots.imag, roots)
        den = np.real(np.poly(roots))
        num = num * (np.polyval(den, 0.0) / dc_old)
        warnings.warn("fit produced right-half-plane poles; reflected to stabilize")
    return RationalTf(tuple(num), tuple(den))


def fit_ct_controller(K: FirController, structure, n_freq: int = N_FREQ):
    """Per-entry continuous fits of an FIR controller.

    ``structure`` is one (n_zeros, n_poles) pair applied to every nonzero
    entry, or a dict keyed by (row, col).  Zero entries stay None (exactly
    zero), preserving the sparsity pattern.
    """
    nu, ny = K.n_outputs, K.n_inputs
    out = [[None] * ny for _ in range(nu)]
    for j in range(nu):
        for k in range(ny):
            taps = [t[j, k] for t in K.taps]
            if all(v == 0.0 for v in taps):
                continue
            nz_np = structure[(j, k)] if isinstance(structure, dict) else structure
            out[j][k] = fit_ct_entry(taps, K.ts, nz_np[0], nz_np[1], n_freq=n_freq)
    return out


def rational_to_ss(tf: RationalTf) -> StateSpace:
    """Controllable-canonical continuous realization of a SISO fit."""
    p = tf.n_poles
    den = np.asarray(tf.den)
    num_pad = np.zeros(p + 1)
    num_pad[p + 1 - len(tf.num):] = tf.num
    b0 = num_pad[0]
    if p == 0:
        return StateSpace(np.zeros((0, 0)), np.zeros((0, 1)),
                          np.zeros((1, 0)), [[b0]], ts=None)
    a = den[1:]
    A = np.zeros((p, p))
    A[0, :] = -a
    if p > 1:
        A[1:, :-1] = np.eye(p - 1)
    B = np.zeros((p, 1))
    B[0, 0] = 1.0
    C = (num_pad[1:] - b0 * a).reshape(1, -1)
    return StateSpace(A, B, C, [[b0]], ts=None)


def rational_matrix_to_ss(entries) -> StateSpace:
    """Assemble a matrix of per-entry fits (None = zero) into one
    continuous MIMO state-space controller."""
    nu = len(entries)
    ny = len(entries[0])
    blocks = []
    D = np.zeros((nu, ny))
    for j in range(nu):
        for k in range(ny):
            tf = entries[j][k]
            if tf is None:
                continue
            ss = rational_to_ss(tf)
            blocks.append((j, k, ss))
            D[j, k] += ss.D[0, 0]
    n_total = sum(b[2].n_states for b in blocks)
    A = np.zeros((n_total, n_total))
    B = np.zeros((n_total, ny))
    C = np.zeros((nu, n_total))
    at = 0
    for (j, k, ss) in blocks:
        n = ss.n_states
        A[at:at + n, at:at + n] = ss.A
        B[at:at + n, k] = ss.B[:, 0]
        C[j, at:at + n] = ss.C[0, :]
        at += n
    return StateSpace(A, B, C, D, ts=None)
