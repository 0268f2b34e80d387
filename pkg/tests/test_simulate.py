import numpy as np
import pytest

from arfade import (
    ARParams,
    ChannelRealization,
    NonStationaryError,
    PilotSequence,
    channel_to_csv,
    derotate,
    generate_channel,
    observe,
    received_signal,
    theoretical_acov,
)


class TestGenerateChannel:
    def test_deterministic(self, jakes):
        a = generate_channel(jakes, 8, 32, seed=123)
        b = generate_channel(jakes, 8, 32, seed=123)
        np.testing.assert_array_equal(a.matrix, b.matrix)
        c = generate_channel(jakes, 8, 32, seed=124)
        assert not np.array_equal(a.matrix, c.matrix)

    def test_row_prefix_stable_under_n_rx(self, jakes):
        small = generate_channel(jakes, 4, 32, seed=5)
        big = generate_channel(jakes, 8, 32, seed=5)
        np.testing.assert_array_equal(small.matrix, big.matrix[:4])

    def test_white_noise_channel(self):
        ch = generate_channel(ARParams([], 1.0), 256, 128, seed=9)
        power = np.mean(np.abs(ch.matrix) ** 2)
        assert abs(power - 1.0) < 0.03

    def test_lag1_autocorrelation_matches_model(self, jakes):
        # pooled lag-1 autocorrelation (per-lag means, so no 1 - 1/T shrinkage)
        # over many seeds approaches r(1)/r(0)
        target = 1.8 / 1.9
        ratios = []
        for seed in range(1000):
            h = generate_channel(jakes, 64, 64, seed=seed).matrix
            num = np.mean(h[:, 1:] * np.conj(h[:, :-1])).real
            den = np.mean(np.abs(h) ** 2)
            ratios.append(num / den)
        ratios = np.asarray(ratios)
        se = ratios.std(ddof=1) / np.sqrt(len(ratios))
        assert abs(ratios.mean() - target) < max(3 * se, 1e-3)

    def test_long_run_sample_acov(self, jakes):
        params = ARParams(jakes.coeffs, innovation_variance=2.0)
        h = generate_channel(params, 1, 100_000, seed=77).matrix[0]
        want = params.innovation_variance * theoretical_acov(params, 2)
        horizon = len(h)
        for k in range(3):
            got = np.sum(h[k:] * np.conj(h[: horizon - k])).real / (horizon - k)
            assert abs(got - want[k]) < 0.02 * want[0]

    def test_row_independence(self):
        # substream independence is model-independent; test on iid entries
        # where the null spread of the cross-correlation is ~ 1/sqrt(T)
        h = generate_channel(ARParams([]), 6, 4096, seed=21).matrix
        power = np.sqrt(np.sum(np.abs(h) ** 2, axis=1))
        for i in range(6):
            for j in range(i + 1, 6):
                corr = np.abs(np.sum(h[i] * np.conj(h[j]))) / (power[i] * power[j])
                assert corr < 0.05

    def test_short_horizon_uses_stationary_marginal(self, jakes):
        # horizon < order: only the stationary joint draw, no recursion
        ch = generate_channel(jakes, 3, 1, seed=4)
        assert ch.matrix.shape == (3, 1)

    def test_burn_in_path(self, jakes):
        ch = generate_channel(jakes, 2, 64, seed=6, init="burnin")
        assert ch.matrix.shape == (2, 64)
        assert np.all(np.isfinite(ch.matrix.real))
        # long burn-in run should also look stationary
        h = generate_channel(jakes, 1, 50_000, seed=8, init="burnin").matrix[0]
        want = theoretical_acov(jakes, 0)[0]
        assert abs(np.mean(np.abs(h) ** 2) - want) < 0.05 * want

    def test_burn_in_zero_starts_cold(self, jakes):
        # with no burn-in the first sample is a bare innovation
        samples = [
            generate_channel(jakes, 1, 2, seed=s, init="burnin", burn_in=0).matrix[0, 0]
            for s in range(600)
        ]
        assert abs(np.mean(np.abs(samples) ** 2) - jakes.innovation_variance) < 0.15

    def test_unchecked_nonstationary_needs_explicit_burn_in(self):
        walk = ARParams.unchecked([1.0])
        with pytest.raises(NonStationaryError):
            generate_channel(walk, 1, 8, seed=0)
        with pytest.raises(NonStationaryError):
            generate_channel(walk, 1, 8, seed=0, init="burnin")  # no finite default
        ch = generate_channel(walk, 1, 8, seed=0, init="burnin", burn_in=4)
        assert np.all(np.isfinite(ch.matrix.real))

    @pytest.mark.parametrize("n_rx,horizon", [(0, 4), (4, 0)])
    def test_rejects_empty_dims(self, jakes, n_rx, horizon):
        with pytest.raises(ValueError):
            generate_channel(jakes, n_rx, horizon, seed=0)


class TestObserve:
    def test_noiseless_is_exact(self, jakes):
        ch = generate_channel(jakes, 4, 16, seed=1)
        obs = observe(ch, 0.0, seed=99)
        np.testing.assert_array_equal(obs.matrix, ch.matrix)

    def test_noise_variance(self, jakes):
        zeros = ChannelRealization(np.zeros((64, 64), dtype=complex), jakes, seed=0)
        obs = observe(zeros, 1.0, seed=3)
        assert abs(np.mean(np.abs(obs.matrix) ** 2) - 1.0) < 0.05

    def test_deterministic(self, jakes):
        ch = generate_channel(jakes, 4, 16, seed=1)
        a = observe(ch, 2.0, seed=5)
        b = observe(ch, 2.0, seed=5)
        np.testing.assert_array_equal(a.matrix, b.matrix)

    def test_rejects_negative_variance(self, jakes):
        ch = generate_channel(jakes, 2, 4, seed=1)
        with pytest.raises(ValueError):
            observe(ch, -0.1, seed=0)


class TestPilots:
    def test_unit_modulus_enforced(self):
        with pytest.raises(ValueError):
            PilotSequence(np.array([1.0, 2.0]))

    def test_identity_pilots_match_observe(self, jakes):
        ch = generate_channel(jakes, 4, 16, seed=1)
        pilots = PilotSequence.identity(16)
        y = received_signal(ch, pilots, 1.5, seed=7)
        obs = observe(ch, 1.5, seed=7)
        np.testing.assert_array_equal(y, obs.matrix)

    def test_constant_phase_rotation(self, jakes):
        ch = generate_channel(jakes, 3, 8, seed=2)
        pilots = PilotSequence.constant_phase(8, np.pi / 4)
        y = received_signal(ch, pilots, 0.0, seed=0)
        np.testing.assert_allclose(y, ch.matrix * np.exp(1j * np.pi / 4), rtol=1e-15)

    def test_qpsk_round_trip(self, jakes):
        ch = generate_channel(jakes, 3, 32, seed=2)
        pilots = PilotSequence.qpsk(32, seed=11)
        y = received_signal(ch, pilots, 0.0, seed=0)
        back = derotate(y, pilots)
        np.testing.assert_allclose(back.matrix, ch.matrix, rtol=1e-12)

    def test_length_mismatch(self, jakes):
        ch = generate_channel(jakes, 2, 8, seed=1)
        with pytest.raises(ValueError):
            received_signal(ch, PilotSequence.identity(7), 0.0, seed=0)

    def test_derotated_noise_same_law(self, jakes):
        # derotated pilot noise stays CN(0, sw2): same mean power, lag products ~ 0
        ch = ChannelRealization(np.zeros((32, 256), dtype=complex), jakes, seed=0)
        pilots = PilotSequence.qpsk(256, seed=1)
        y = received_signal(ch, pilots, 1.0, seed=2)
        dero = derotate(y, pilots, 1.0).matrix
        plain = observe(ch, 1.0, seed=2).matrix
        assert abs(np.mean(np.abs(dero) ** 2) - np.mean(np.abs(plain) ** 2)) < 1e-12
        lag1 = np.mean(dero[:, 1:] * np.conj(dero[:, :-1]))
        assert abs(lag1) < 0.02


def test_channel_to_csv_round_trip(tmp_path, jakes):
    ch = generate_channel(jakes, 3, 5, seed=13)
    path = tmp_path / "channel.csv"
    channel_to_csv(ch, path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_allclose(data[:, 0::2] + 1j * data[:, 1::2], ch.matrix, rtol=1e-15)
    header = path.read_text().splitlines()[0]
    assert header.startswith("re0,im0,re1,im1")
