import numpy as np
import pytest

import sparse_hinf as sh
from sparse_hinf import (GeneralizedPlant, build_augmented,
                         certificate_matrix, certificate_matrix_relaxed,
                         close_static_gain)
from sparse_hinf.errors import DomainError

from conftest import random_plant


class TestBuildAugmented:
    def test_single_tap_is_identity(self, plant1_d):
        aug = build_augmented(plant1_d, 1)
        assert aug is plant1_d

    def test_delay_chain_blocks(self, plant1_d):
        # with three taps the two delay blocks stack below the plant states;
        # the lower-left coupling repeats the measurement rows
        aug = build_augmented(plant1_d, 3)
        assert aug.A.shape == (8, 8)
        lower_left = aug.A[4:, :4]
        expected = np.vstack([np.zeros((2, 4)), plant1_d.C2])
        assert np.array_equal(lower_left, expected)
        assert np.array_equal(aug.B1[4:, :], np.vstack([np.zeros((2, 3)), plant1_d.D21]))
        # measured output: delayed states first, then raw measurements
        assert np.array_equal(aug.C2[:4, 4:], np.eye(4))
        assert np.array_equal(aug.C2[4:, :4], plant1_d.C2)
        assert np.array_equal(aug.D21[4:, :], plant1_d.D21)
        assert np.all(aug.D21[:4, :] == 0)

    def test_spectrum_is_plant_plus_zeros(self):
        rng = np.random.default_rng(5)
        plant = random_plant(rng)
        aug = build_augmented(plant, 3)
        eig_aug = np.sort_complex(np.linalg.eigvals(aug.A))
        eig_expected = np.sort_complex(np.concatenate(
            [np.linalg.eigvals(plant.A), np.zeros(4)]))
        assert np.allclose(eig_aug, eig_expected, atol=1e-8)

    def test_requires_discrete_and_clean_feedthrough(self, bundle1):
        with pytest.raises(DomainError):
            build_augmented(bundle1.plant_ct, 2)
        bad = GeneralizedPlant(
            np.eye(2) * 0.5, np.eye(2), np.eye(2), np.eye(2), np.eye(2),
            np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 2)),
            np.ones((2, 2)), ts=1.0)
        with pytest.raises(DomainError):
            build_augmented(bad, 2)


class TestCloseStaticGain:
    def test_zero_gain_gives_open_augmented(self, plant1_d):
        aug = build_augmented(plant1_d, 2)
        cl = close_static_gain(aug, np.zeros((2, 4)))
        assert np.array_equal(cl.A, aug.A)
        assert np.array_equal(cl.B, aug.B1)
        assert np.array_equal(cl.C, aug.C1)
        assert np.array_equal(cl.D, aug.D11)

    def test_reference_static_gain(self, bundle1, plant1_d):
        K0 = bundle1.references[0].controller.taps[0]
        cl = close_static_gain(plant1_d, K0)
        assert np.allclose(cl.A, plant1_d.A + plant1_d.B2 @ K0 @ plant1_d.C2)

    def test_transfer_equals_fir_loop(self):
        rng = np.random.default_rng(11)
        for _ in range(4):
            plant = random_plant(rng)
            n_taps = int(rng.integers(1, 4))
            taps = tuple(rng.standard_normal((2, 2)) for _ in range(n_taps))
            ctrl = sh.FirController(taps, ts=1.0)
            direct = sh.close_loop(plant, sh.fir_realize(ctrl))
            via_aug = close_static_gain(build_augmented(plant, n_taps),
                                        sh.pack_gain(ctrl))
            zs = np.exp(1j * np.linspace(0, np.pi, 64))
            assert np.allclose(direct.freq_response(zs),
                               via_aug.freq_response(zs), atol=1e-9)


class TestCertificateMatrix:
    def test_hand_assembled_scalar_case(self):
        plant = GeneralizedPlant([[0.5]], [[1.0]], [[1.0]], [[1.0]], [[1.0]],
                                 [[0.0]], [[0.0]], [[0.0]], ts=1.0)
        M = certificate_matrix(np.eye(1), np.zeros((1, 1)), plant, 4.0)
        expected = np.array([
            [1.0, 0.5, 1.0, 0.0],
            [0.5, 1.0, 0.0, 1.0],
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 4.0]])
        assert np.array_equal(M, expected)

    def test_exact_symmetry(self):
        rng = np.random.default_rng(13)
        plant = random_plant(rng)
        aug = build_augmented(plant, 2)
        P = rng.standard_normal((aug.A.shape[0],) * 2)
        P = P + P.T
        G = rng.standard_normal((2, 4))
        M = certificate_matrix(P, G, aug, 3.0)
        assert np.array_equal(M, M.T)
        M0 = certificate_matrix_relaxed(P, G, aug, 3.0)
        assert np.array_equal(M0, M0.T)

    def test_relaxed_joint_affinity(self):
        # criterion: jointly affine in (P, gain) to 1e-12
        rng = np.random.default_rng(17)
        plant = random_plant(rng)
        aug = build_augmented(plant, 2)
        n = aug.A.shape[0]
        mu = 2.5
        for alpha in (0.3, 0.7):
            P1, P2 = (rng.standard_normal((n, n)) for _ in range(2))
            P1, P2 = P1 + P1.T, P2 + P2.T
            G1, G2 = (rng.standard_normal((2, 4)) for _ in range(2))
            left = certificate_matrix_relaxed(
                alpha * P1 + (1 - alpha) * P2, alpha * G1 + (1 - alpha) * G2, aug, mu)
            right = (alpha * certificate_matrix_relaxed(P1, G1, aug, mu)
                     + (1 - alpha) * certificate_matrix_relaxed(P2, G2, aug, mu))
            assert np.allclose(left, right, atol=1e-12)

    def test_relaxed_equals_exact_at_identity(self):
        rng = np.random.default_rng(19)
        plant = random_plant(rng)
        aug = build_augmented(plant, 2)
        n = aug.A.shape[0]
        G = rng.standard_normal((2, 4))
        M = certificate_matrix(np.eye(n), G, aug, 1.7)
        M0 = certificate_matrix_relaxed(np.eye(n), G, aug, 1.7)
        assert np.allclose(M, M0, atol=1e-12)

    def test_relaxed_zero_gain_block(self):
        rng = np.random.default_rng(23)
        plant = random_plant(rng)
        aug = build_augmented(plant, 2)
        n = aug.A.shape[0]
        P = rng.standard_normal((n, n))
        P = P + P.T
        M0 = certificate_matrix_relaxed(P, np.zeros((2, 4)), aug, 1.0)
        assert np.allclose(M0[:n, n:2 * n], aug.A @ P, atol=1e-12)

    def test_positive_certificate_implies_stability_and_norm(self, plant1_d, bundle1):
        # soundness on an accepted certificate
        cfg = sh.SynthesisConfig(mu=24.0, n_taps=1,
                                 pattern=sh.SparsityPattern.diagonal(2, 2),
                                 polish="none")
        ctrl, cert = sh.synthesize(plant1_d, cfg)
        assert cert.min_eig > 0
        cl = close_static_gain(plant1_d, cert.gain)
        assert sh.spectral_radius(cl.A) < 1.0
        assert sh.hinf_norm_grid(cl) < np.sqrt(24.0)
