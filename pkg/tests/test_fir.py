import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import sparse_hinf as sh
from sparse_hinf import (FirController, SparsityPattern, fir_realize,
                         pack_gain, pattern_constraints, pattern_of,
                         unpack_gain)
from sparse_hinf.errors import DimensionError


def worked_example():
    # 1-output, 3-input FIR with taps of all-ones, all-twos, all-threes
    return FirController((np.full((1, 3), 1.0), np.full((1, 3), 2.0),
                          np.full((1, 3), 3.0)), ts=1.0)


class TestRealize:
    def test_worked_example_blocks(self):
        K = fir_realize(worked_example())
        assert np.array_equal(K.A, np.block([
            [np.zeros((3, 3)), np.eye(3)], [np.zeros((3, 3)), np.zeros((3, 3))]]))
        assert np.array_equal(K.B, np.vstack([np.zeros((3, 3)), np.eye(3)]))
        assert np.array_equal(K.C, np.hstack([np.full((1, 3), 3.0), np.full((1, 3), 2.0)]))
        assert np.array_equal(K.D, np.full((1, 3), 1.0))

    def test_single_tap_is_static(self):
        K0 = np.diag([-1.2775, -0.5685])
        K = fir_realize(FirController((K0,), ts=0.1))
        assert K.n_states == 0
        assert np.array_equal(K.D, K0)

    def test_realization_is_nilpotent(self):
        K = fir_realize(worked_example())
        assert np.allclose(np.linalg.matrix_power(K.A, 2), 0.0)

    @given(n_taps=st.integers(1, 5), seed=st.integers(0, 2**31))
    @settings(max_examples=20, deadline=None)
    def test_transfer_function_matches_taps(self, n_taps, seed):
        rng = np.random.default_rng(seed)
        taps = tuple(rng.standard_normal((2, 2)) for _ in range(n_taps))
        K = fir_realize(FirController(taps, ts=1.0))
        angles = rng.uniform(0, 2 * np.pi, size=64)
        zs = np.exp(1j * angles)
        resp = K.freq_response(zs)
        expected = np.array([sum(taps[i] * z ** (-i) for i in range(n_taps))
                             for z in zs])
        assert np.allclose(resp, expected, atol=1e-10)


class TestPackUnpack:
    def test_worked_example_layout(self):
        packed = pack_gain(worked_example())
        assert np.array_equal(packed, np.array([[3.0] * 3 + [2.0] * 3 + [1.0] * 3]))

    def test_single_tap(self):
        K0 = np.diag([-1.2775, -0.5685])
        assert np.array_equal(pack_gain(FirController((K0,), ts=0.1)), K0)

    @given(n_taps=st.integers(1, 6), seed=st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_roundtrip(self, n_taps, seed):
        rng = np.random.default_rng(seed)
        taps = tuple(rng.standard_normal((3, 2)) for _ in range(n_taps))
        K = FirController(taps, ts=0.5)
        K2 = unpack_gain(pack_gain(K), n_taps, 2, ts=0.5)
        for a, b in zip(K.taps, K2.taps):
            assert np.array_equal(a, b)

    def test_bad_column_count(self):
        with pytest.raises(DimensionError):
            unpack_gain(np.zeros((2, 5)), 2, 2, ts=1.0)


class TestPatternConstraints:
    def test_full_pattern_is_unconstrained(self):
        assert pattern_constraints(SparsityPattern.full(3, 4), 2) == []

    def test_diagonal_two_taps(self):
        cons = pattern_constraints(SparsityPattern(np.eye(2)), 2)
        # two off-diagonal zeros, pinned in both tap blocks
        assert len(cons) == 4
        assert set(cons) == {(0, 1), (0, 3), (1, 0), (1, 2)}

    def test_velocity_only_pattern_count(self, bundle3):
        cons = pattern_constraints(bundle3.pattern, 1)
        assert len(cons) == 8 * 16 - 8

    def test_soundness_on_transfer_function(self):
        # zeroing exactly the pinned entries makes every masked transfer
        # entry vanish on the unit circle
        rng = np.random.default_rng(3)
        S = SparsityPattern(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]))
        n_taps = 3
        gain = rng.standard_normal((3, 2 * n_taps))
        for (i, j) in pattern_constraints(S, n_taps):
            gain[i, j] = 0.0
        K = fir_realize(unpack_gain(gain, n_taps, 2, ts=1.0))
        zs = np.exp(1j * np.linspace(0, np.pi, 64))
        resp = K.freq_response(zs)
        for j in range(3):
            for k in range(2):
                if S.S[j, k] == 0:
                    assert np.allclose(resp[:, j, k], 0.0, atol=1e-14)
                else:
                    assert np.abs(resp[:, j, k]).max() > 1e-3


class TestPatternOf:
    def test_exact_zero_structure(self):
        taps = (np.diag([1.0, 2.0]), np.diag([0.5, -0.25]))
        S = pattern_of(FirController(taps, ts=1.0))
        assert np.array_equal(S.S, np.eye(2))

    def test_threshold_semantics(self):
        taps = (np.array([[1.0, 1e-9], [0.7, 2.0]]),)
        S = pattern_of(FirController(taps, ts=1.0), rel_threshold=1e-4)
        assert np.array_equal(S.S, np.array([[1.0, 0.0], [1.0, 1.0]]))

    def test_all_zero_controller(self):
        S = pattern_of(FirController((np.zeros((2, 2)),), ts=1.0))
        assert np.array_equal(S.S, np.zeros((2, 2)))

    @given(thr=st.floats(min_value=1e-6, max_value=0.5), seed=st.integers(0, 2**31))
    @settings(max_examples=25, deadline=None)
    def test_entries_below_threshold_read_zero(self, thr, seed):
        rng = np.random.default_rng(seed)
        taps = tuple(rng.standard_normal((2, 3)) for _ in range(2))
        S = pattern_of(FirController(taps, ts=1.0), rel_threshold=thr)
        stacked = np.stack([np.abs(t) for t in taps]).max(axis=0)
        expected = (stacked >= thr * stacked.max()).astype(float)
        assert np.array_equal(S.S, expected)
