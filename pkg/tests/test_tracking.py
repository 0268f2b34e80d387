from dataclasses import replace

import numpy as np
import pytest
from scipy.linalg import toeplitz

from arfade import (
    ARCoeffEstimate,
    ARParams,
    NonStationaryError,
    PilotSequence,
    TrackingError,
    ar_predict,
    generate_channel,
    kalman_init,
    kalman_step,
    received_signal,
    theoretical_acov,
    track_channel,
    track_channel_reestimated,
)
from arfade.experiments import noise_variance_for_snr


def _riccati_fixed_point(params, noise_variance, iters=20_000, tol=1e-13):
    """Independent oracle: iterate the textbook covariance recursion
    (predict + non-Joseph update) to its fixed point."""
    p = params.order
    f = np.zeros((p, p))
    f[0, :] = params.coeffs
    if p > 1:
        f[1:, :-1] = np.eye(p - 1)
    q = np.zeros((p, p))
    q[0, 0] = params.innovation_variance
    cov = toeplitz(theoretical_acov(params, p - 1)) * params.innovation_variance
    for _ in range(iters):
        pred = f @ cov @ f.T + q
        gain = pred[:, 0] / (pred[0, 0] + noise_variance)
        new = pred - np.outer(gain, pred[0, :])
        if np.abs(new - cov).max() < tol:
            return new
        cov = new
    return cov


class TestInit:
    def test_ar1_prior(self):
        state = kalman_init(ARParams([0.5]), 1.0, 1.0, n_rx=3)
        np.testing.assert_allclose(state.cov.real, [[4.0 / 3.0]], rtol=1e-12)

    def test_zero_mean(self, jakes):
        state = kalman_init(jakes, 1.0, 2.0, n_rx=5)
        np.testing.assert_array_equal(state.mean, np.zeros((2, 5)))

    def test_jakes_prior_matches_acov(self, jakes):
        state = kalman_init(jakes, 3.0, 1.0, n_rx=1)
        want = 3.0 * toeplitz(theoretical_acov(jakes, 1))
        np.testing.assert_allclose(state.cov.real, want, rtol=1e-12)
        np.testing.assert_allclose(state.cov.imag, 0.0, atol=1e-15)

    def test_estimate_input_uses_real_parts(self):
        est = ARCoeffEstimate(
            coeffs=np.array([0.5 + 0.3j]), variant="unbiased",
            condition_number=1.0, source_dims=(1, 8),
        )
        state = kalman_init(est, 1.0, 1.0, n_rx=1)
        np.testing.assert_array_equal(state.model.transition, [[0.5]])

    def test_rejects_non_stationary(self):
        with pytest.raises(NonStationaryError):
            kalman_init(np.array([1.05]), 1.0, 1.0, n_rx=1)

    def test_rejects_bad_args(self, jakes):
        with pytest.raises(ValueError):
            kalman_init(jakes, 1.0, 1.0, n_rx=0)
        with pytest.raises(ValueError):
            kalman_init(jakes, 1.0, -1.0, n_rx=1)


class TestStep:
    def _warm_state(self, jakes, noise_variance):
        state = kalman_init(jakes, 1.0, 1.0, n_rx=4)
        rng = np.random.default_rng(0)
        for _ in range(3):
            obs = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            state, _ = kalman_step(state, obs)
        return replace(state, noise_variance=noise_variance)

    def test_noiseless_limit_tracks_observation(self, jakes):
        state = self._warm_state(jakes, 1e-12)
        obs = np.array([1.0 + 1.0j, -2.0, 0.5j, 3.0 - 1.0j])
        _, filtered = kalman_step(state, obs)
        assert np.abs(filtered - obs).max() < 1e-6

    def test_blind_limit_keeps_prediction(self, jakes):
        state = self._warm_state(jakes, 1e12)
        predicted = (state.model.transition @ state.mean)[0, :]
        _, filtered = kalman_step(state, np.ones(4, dtype=complex))
        assert np.abs(filtered - predicted).max() < 1e-6 * max(1.0, np.abs(predicted).max())

    def test_covariance_stays_psd(self, jakes):
        sw2 = noise_variance_for_snr(jakes, 0.0)
        state = kalman_init(jakes, 1.0, sw2, n_rx=2)
        rng = np.random.default_rng(1)
        for _ in range(200):
            obs = 10 * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
            state, _ = kalman_step(state, obs)
        assert state.psd_margin >= -1e-10

    def test_covariance_converges_to_riccati_fixed_point(self, jakes):
        sw2 = noise_variance_for_snr(jakes, 0.0)
        state = kalman_init(jakes, 1.0, sw2, n_rx=1)
        diffs = []
        prev = state.cov.copy()
        for _ in range(64):
            state, _ = kalman_step(state, np.zeros(1, dtype=complex))
            diffs.append(np.abs(state.cov - prev).max())
            prev = state.cov.copy()
        oracle = _riccati_fixed_point(jakes, sw2)
        np.testing.assert_allclose(state.cov.real, oracle, rtol=1e-6)
        # the step-to-step change dies out (monotone within envelope)
        assert diffs[-1] < 1e-9 * np.abs(oracle).max()
        assert diffs[-1] < diffs[0]
        envelope = [max(diffs[i:]) for i in range(len(diffs))]
        assert all(a >= b for a, b in zip(envelope, envelope[1:]))

    def test_rejects_bad_observation(self, jakes):
        state = kalman_init(jakes, 1.0, 1.0, n_rx=2)
        with pytest.raises(ValueError):
            kalman_step(state, np.array([1.0 + 0j]))
        with pytest.raises(ValueError):
            kalman_step(state, np.array([np.nan + 0j, 0j]))


class TestTrackChannel:
    def test_deterministic(self, jakes):
        sw2 = noise_variance_for_snr(jakes, 0.0)
        ch = generate_channel(jakes, 8, 32, seed=5)
        pilots = PilotSequence.qpsk(32, seed=6)
        y = received_signal(ch, pilots, sw2, seed=7)
        a = track_channel(y, pilots, jakes, 1.0, sw2, truth=ch)
        b = track_channel(y, pilots, jakes, 1.0, sw2, truth=ch)
        np.testing.assert_array_equal(a.estimates, b.estimates)
        np.testing.assert_array_equal(a.per_instant_nmse, b.per_instant_nmse)

    def test_genie_beats_raw_observation(self, jakes):
        # at 0 dB the raw-observation NMSE is ~1; the filter must do better
        # from t >= p on, in median across trials
        sw2 = noise_variance_for_snr(jakes, 0.0)
        curves = []
        for seed in range(20):
            ch = generate_channel(jakes, 32, 32, seed=seed)
            pilots = PilotSequence.qpsk(32, seed=100 + seed)
            y = received_signal(ch, pilots, sw2, seed=200 + seed)
            result = track_channel(y, pilots, jakes, 1.0, sw2, truth=ch)
            curves.append(result.per_instant_nmse)
        med = np.median(curves, axis=0)
        assert np.all(med[2:] < 1.0)
        assert med[-1] < 0.6

    def test_no_truth_no_nmse(self, jakes):
        sw2 = 1.0
        ch = generate_channel(jakes, 2, 8, seed=1)
        pilots = PilotSequence.identity(8)
        y = received_signal(ch, pilots, sw2, seed=2)
        result = track_channel(y, pilots, jakes, 1.0, sw2)
        assert result.per_instant_nmse is None
        assert result.estimates.shape == (2, 8)
        assert result.coeff_source == "genie"


class TestTrackReestimated:
    def test_runs_and_labels(self, jakes):
        sw2 = noise_variance_for_snr(jakes, 5.0)
        ch = generate_channel(jakes, 32, 48, seed=9)
        pilots = PilotSequence.qpsk(48, seed=10)
        y = received_signal(ch, pilots, sw2, seed=11)
        result = track_channel_reestimated(y, pilots, 2, "unbiased", 1.0, sw2, truth=ch)
        assert result.coeff_source == "proposed-unbiased"
        assert result.estimates.shape == (32, 48)
        assert np.all(np.isfinite(result.per_instant_nmse))
        timeb = track_channel_reestimated(
            y, pilots, 2, "unbiased", 1.0, sw2, truth=ch, time_based=True
        )
        assert timeb.coeff_source == "time-based"

    def test_deterministic(self, jakes):
        sw2 = noise_variance_for_snr(jakes, 0.0)
        ch = generate_channel(jakes, 16, 32, seed=12)
        pilots = PilotSequence.qpsk(32, seed=13)
        y = received_signal(ch, pilots, sw2, seed=14)
        a = track_channel_reestimated(y, pilots, 2, "biased", 1.0, sw2, truth=ch)
        b = track_channel_reestimated(y, pilots, 2, "biased", 1.0, sw2, truth=ch)
        np.testing.assert_array_equal(a.estimates, b.estimates)

    def test_fails_when_no_estimate_possible(self):
        # all-zero received signal: every window gives lag0 = -sw2 < 0
        pilots = PilotSequence.identity(12)
        with pytest.raises(TrackingError):
            track_channel_reestimated(
                np.zeros((3, 12), dtype=complex), pilots, 2, "unbiased", 1.0, 1.0
            )


class TestARPredict:
    def test_geometric_decay(self):
        got = ar_predict(np.array([[1.0 + 0j]]), [0.5], steps=3)
        np.testing.assert_allclose(got, [[0.5, 0.25, 0.125]], rtol=1e-15)

    def test_zero_coefficients(self):
        got = ar_predict(np.ones((2, 3), dtype=complex), [0.0, 0.0], steps=4)
        np.testing.assert_array_equal(got, np.zeros((2, 4)))

    def test_accepts_estimate_and_params(self, jakes):
        hist = np.array([[0.3 + 0.1j, -0.2 + 0j]])
        a = ar_predict(hist, jakes, steps=2)
        est = ARCoeffEstimate(
            coeffs=jakes.coeffs.astype(complex), variant="unbiased",
            condition_number=1.0, source_dims=(1, 4),
        )
        b = ar_predict(hist, est, steps=2)
        np.testing.assert_array_equal(a, b)

    def test_envelope_bound_from_companion_powers(self, jakes):
        # |h(m)| <= ||F^m|| * ||history|| with F the companion matrix
        rng = np.random.default_rng(3)
        hist = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        preds = ar_predict(hist, jakes, steps=30)
        f = np.zeros((2, 2))
        f[0] = jakes.coeffs
        f[1, 0] = 1.0
        for n in range(4):
            norm_hist = np.linalg.norm(hist[n])
            fm = np.eye(2)
            for m in range(30):
                fm = f @ fm
                bound = np.linalg.norm(fm, 2) * norm_hist
                assert abs(preds[n, m]) <= bound + 1e-12

    def test_insufficient_history(self, jakes):
        with pytest.raises(ValueError):
            ar_predict(np.ones((1, 1), dtype=complex), jakes, steps=1)
        with pytest.raises(ValueError):
            ar_predict(np.ones((1, 2), dtype=complex), jakes, steps=0)

    def test_uses_most_recent_columns(self):
        # history deeper than p: only the trailing p columns matter
        hist = np.array([[9.0 + 0j, 1.0 + 0j]])
        got = ar_predict(hist, [0.5], steps=2)
        np.testing.assert_allclose(got, [[0.5, 0.25]], rtol=1e-15)
