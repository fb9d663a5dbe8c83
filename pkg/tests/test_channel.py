import math

import numpy as np
import pytest

from secmac import (
    ChannelGains,
    NoiseModel,
    ParameterError,
    effective_power,
    normalize_gains,
    sample_gains,
    transmit,
)


class TestNormalizeGains:
    def test_ratio_of_ratios(self):
        g = normalize_gains(ChannelGains(h=(3, 2), h_e=(1.5, 4)))
        assert g.g == (4.0, 1.0)
        assert g.scale == 0.5

    def test_identity_when_h_equals_he(self):
        g = normalize_gains(ChannelGains(h=(0.7, 1.3, 2.0), h_e=(0.7, 1.3, 2.0)))
        assert g.g == (1.0, 1.0, 1.0)
        assert g.scale == 1.0

    def test_last_ratio_already_one(self):
        s2 = math.sqrt(2)
        g = normalize_gains(ChannelGains(h=(s2, 1), h_e=(1, 1)))
        assert g.g == (s2, 1.0)
        assert g.scale == 1.0

    def test_zero_eavesdropper_gain_names_index(self):
        with pytest.raises(ParameterError, match=r"h_e\[1\]"):
            ChannelGains(h=(1, 1), h_e=(1, 0))

    def test_zero_last_main_gain(self):
        with pytest.raises(ParameterError, match=r"h\[1\]"):
            normalize_gains(ChannelGains(h=(1, 0), h_e=(1, 1)))

    def test_reconstruction(self):
        # multiplying back by scale and h_e recovers h
        for seed in range(20):
            gains = sample_gains(seed, 3)
            g = normalize_gains(gains)
            rebuilt = [gk * g.scale * he for gk, he in zip(g.g, gains.h_e)]
            assert np.allclose(rebuilt, gains.h, rtol=1e-12, atol=0)


class TestSampleGains:
    def test_deterministic(self):
        a = sample_gains(7, 2, 0.5, 2.0)
        b = sample_gains(7, 2, 0.5, 2.0)
        assert a == b

    def test_seeds_differ(self):
        assert sample_gains(7, 2) != sample_gains(8, 2)

    def test_range(self):
        g = sample_gains(3, 4, 0.5, 2.0)
        for v in g.h + g.h_e:
            assert 0.5 <= v <= 2.0

    def test_k_must_be_at_least_two(self):
        with pytest.raises(ParameterError):
            sample_gains(7, 1, 0.5, 2.0)

    @pytest.mark.parametrize("low,high", [(0.0, 1.0), (-1.0, 1.0), (2.0, 1.0), (1.0, 1.0)])
    def test_bad_range(self, low, high):
        with pytest.raises(ParameterError):
            sample_gains(7, 2, low, high)


class TestEffectivePower:
    def test_examples(self):
        assert effective_power(ChannelGains(h=(1, 1), h_e=(1.5, 4)), 10) == 22.5
        assert effective_power(ChannelGains(h=(1, 1), h_e=(1, 1)), 100) == 100
        assert effective_power(ChannelGains(h=(1, 1), h_e=(0.1, 10)), 1) == pytest.approx(0.01)

    def test_nonpositive_power(self):
        gains = ChannelGains(h=(1, 1), h_e=(1, 1))
        for bad in (0.0, -1.0):
            with pytest.raises(ParameterError):
                effective_power(gains, bad)

    def test_monotone(self):
        gains = ChannelGains(h=(1, 1), h_e=(0.8, 1.7))
        powers = [effective_power(gains, p) for p in (1, 2, 5, 10)]
        assert powers == sorted(powers)
        # raising any |h_e[k]| cannot decrease the result
        bumped = ChannelGains(h=(1, 1), h_e=(0.9, 1.7))
        assert effective_power(bumped, 10) >= effective_power(gains, 10)


class TestPowerParams:
    def test_from_gains(self):
        from secmac import PowerParams

        pp = PowerParams.from_gains(ChannelGains(h=(1, 1), h_e=(1.5, 4)), 10, 0.1)
        assert pp.P_tilde == 22.5
        assert pp.P == 10 and pp.epsilon == 0.1

    def test_epsilon_range(self):
        from secmac import PowerParams

        for eps in (0.0, 1.0, -0.2):
            with pytest.raises(ParameterError):
                PowerParams(P=1.0, P_tilde=1.0, epsilon=eps)


class TestTransmit:
    def test_zero_input_zero_noise(self):
        gains = ChannelGains(h=(1, 2), h_e=(1, 1))
        y, z = transmit(np.zeros((2, 5)), gains, NoiseModel(0.0), seed=1)
        assert np.all(y == 0) and np.all(z == 0)

    def test_linear_combination(self):
        gains = ChannelGains(h=(2, 1), h_e=(1, 1))
        y, _ = transmit(np.array([[3.0], [1.0]]), gains, NoiseModel(0.0), seed=1)
        assert y[0] == 7.0

    def test_deterministic(self):
        gains = ChannelGains(h=(1, 1), h_e=(1, 2))
        x = np.ones((2, 100))
        y1, z1 = transmit(x, gains, NoiseModel(1.0), seed=42)
        y2, z2 = transmit(x, gains, NoiseModel(1.0), seed=42)
        assert np.array_equal(y1, y2) and np.array_equal(z1, z2)

    def test_noise_streams_independent(self):
        gains = ChannelGains(h=(1,), h_e=(1,))
        y, z = transmit(np.zeros((1, 1000)), gains, NoiseModel(1.0), seed=0)
        # identical streams would make y == z elementwise
        assert not np.array_equal(y, z)
        assert abs(np.corrcoef(y, z)[0, 1]) < 0.1

    def test_ragged_input_rejected(self):
        gains = ChannelGains(h=(1, 1), h_e=(1, 1))
        with pytest.raises(ParameterError):
            transmit(np.array([[1.0, 2.0]]), gains, NoiseModel(0.0), seed=0)

    def test_noiseless_linearity(self):
        gains = ChannelGains(h=(1.3, -0.4, 2.2), h_e=(1, 1, 1))
        rng = np.random.default_rng(5)
        x = rng.normal(size=(3, 50))
        y1, _ = transmit(2.5 * x, gains, NoiseModel(0.0), seed=0)
        y2, _ = transmit(x, gains, NoiseModel(0.0), seed=0)
        assert np.allclose(y1, 2.5 * y2, rtol=1e-12, atol=1e-12)
