import numpy as np
import pytest

import sparse_hinf as sh
from sparse_hinf import (GeneralizedPlant, SparsityPattern, SynthesisConfig,
                         alternate, initial_guess, synthesize)
from sparse_hinf.errors import InfeasibleRelaxation, NoConvergence


def tiny_stable_plant(ts=1.0):
    """Stable SISO plant whose open loop already has a small norm."""
    return GeneralizedPlant([[0.4]], [[1.0]], [[1.0]], [[1.0]], [[1.0]],
                            [[0.0]], [[0.5]], [[0.5]], ts=ts)


class TestInitialGuess:
    def test_unconstrained_relaxation_feasible(self, plant1_d):
        cfg = SynthesisConfig(mu=240.0, n_taps=1)
        P, gain = initial_guess(plant1_d, cfg)
        assert P.shape == (4, 4)
        assert gain.shape == (2, 2)
        assert np.allclose(P, P.T)

    def test_pattern_zeros_respected(self, plant2_d, bundle2):
        cfg = SynthesisConfig(mu=0.1, n_taps=2, pattern=bundle2.pattern)
        P, gain = initial_guess(plant2_d, cfg)
        mask = np.hstack([bundle2.pattern.S, bundle2.pattern.S])
        assert np.all(gain[mask == 0] == 0.0)

    def test_zero_pattern_on_unstable_plant_is_infeasible(self, plant1_d):
        cfg = SynthesisConfig(mu=100.0, n_taps=1,
                              pattern=SparsityPattern(np.zeros((2, 2))))
        with pytest.raises(InfeasibleRelaxation):
            initial_guess(plant1_d, cfg)

    def test_regularized_variant_solves(self, plant1_d):
        cfg = SynthesisConfig(mu=240.0, n_taps=1, regularize_init=True)
        P, gain = initial_guess(plant1_d, cfg)
        assert np.all(np.isfinite(gain))


class TestAlternate:
    def test_certified_init_returns_immediately(self, plant1_d):
        cfg = SynthesisConfig(mu=24.0, n_taps=1,
                              pattern=SparsityPattern.diagonal(2, 2),
                              polish="none")
        _, cert = synthesize(plant1_d, cfg)
        cfg2 = SynthesisConfig(mu=24.0, n_taps=1,
                               pattern=SparsityPattern.diagonal(2, 2),
                               polish="none")
        again = alternate(plant1_d, cfg2, (cert.P, cert.gain))
        assert again.n_outer == 0
        assert again.min_eig > 0

    def test_certificate_invariants(self, plant1_d):
        cfg = SynthesisConfig(mu=24.0, n_taps=1,
                              pattern=SparsityPattern.diagonal(2, 2))
        ctrl, cert = synthesize(plant1_d, cfg)
        aug = sh.build_augmented(plant1_d, 1)
        # re-verified independently of the solver
        assert sh.certificate_min_eig(cert.P, cert.gain, aug, cfg.mu) > 0
        cl = sh.close_static_gain(aug, cert.gain)
        assert sh.spectral_radius(cl.A) < 1.0
        assert sh.hinf_norm_grid(cl) ** 2 < cfg.mu
        assert cert.closed_loop_norm ** 2 < cfg.mu

    def test_trace_is_recorded(self, plant1_d):
        cfg = SynthesisConfig(mu=24.0, n_taps=1,
                              pattern=SparsityPattern.diagonal(2, 2))
        _, cert = synthesize(plant1_d, cfg)
        stages = {row[1] for row in cert.trace}
        assert "p0" in stages
        assert "p_step" in stages
        assert all(len(row) == 4 for row in cert.trace)


class TestSynthesize:
    def test_open_loop_feasible_trivial_case(self):
        plant = tiny_stable_plant()
        cfg = SynthesisConfig(mu=1e4, n_taps=1)
        ctrl, cert = synthesize(plant, cfg)
        assert cert.min_eig > 0
        assert cert.closed_loop_norm ** 2 < 1e4

    def test_pattern_compliance_is_exact(self, plant2_d, bundle2):
        cfg = SynthesisConfig(mu=0.1, n_taps=2, pattern=bundle2.pattern,
                              k=bundle2.k)
        ctrl, cert = synthesize(plant2_d, cfg)
        for tap in ctrl.taps:
            assert np.all(tap[bundle2.pattern.S == 0] == 0.0)

    def test_controller_ts_matches_plant(self, plant1_d):
        cfg = SynthesisConfig(mu=24.0, n_taps=2,
                              pattern=SparsityPattern.diagonal(2, 2))
        ctrl, _ = synthesize(plant1_d, cfg)
        assert ctrl.ts == plant1_d.ts
        assert ctrl.n_taps == 2

    def test_rejects_continuous_plant(self, bundle1):
        cfg = SynthesisConfig(mu=24.0)
        with pytest.raises(ValueError):
            synthesize(bundle1.plant_ct, cfg)

    def test_mu_too_small_raises(self):
        plant = tiny_stable_plant()
        # open loop gain is ~2 at DC; mu far below the achievable bound
        cfg = SynthesisConfig(mu=1e-9, n_taps=1, max_outer=12)
        with pytest.raises((NoConvergence, InfeasibleRelaxation)):
            synthesize(plant, cfg)


class TestSuggestMu:
    def test_suggestion_is_synthesizable(self, plant1_d):
        mu = sh.suggest_mu(plant1_d)
        assert mu > 0
        cfg = SynthesisConfig(mu=mu, n_taps=1, polish="none")
        _, cert = synthesize(plant1_d, cfg)
        assert cert.closed_loop_norm ** 2 < mu
