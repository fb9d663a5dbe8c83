import math

import numpy as np
import pytest

from secmac import (
    AmbiguityError,
    ChannelGains,
    NoiseModel,
    NormalizedGains,
    ParameterError,
    RateInfeasibleError,
    build_codebook,
    decode_messages,
    encode,
    hard_decode,
    load_codebook,
    normalize_gains,
    received_constellation,
    save_codebook,
    scale_to_channel,
    select_params,
    transmit,
)
from secmac.rng import stream

S2 = math.sqrt(2)
S3 = math.sqrt(3)


class TestBuildCodebook:
    def test_shape_and_range(self):
        cb = build_codebook(n=1, Q=1, B=3, L=2, seed=1)
        assert cb.table.shape == (3, 2, 1)
        assert np.all(np.abs(cb.table) <= 1)

    def test_deterministic(self):
        a = build_codebook(n=4, Q=2, B=4, L=3, seed=9)
        b = build_codebook(n=4, Q=2, B=4, L=3, seed=9)
        assert np.array_equal(a.table, b.table)

    def test_oversampling_cap(self):
        # cap is 16 * 3^2 = 144 sequences
        build_codebook(n=2, Q=1, B=144, L=1, seed=0)
        with pytest.raises(RateInfeasibleError, match="144"):
            build_codebook(n=2, Q=1, B=145, L=1, seed=0)
        with pytest.raises(RateInfeasibleError):
            build_codebook(n=2, Q=1, B=9, L=17, seed=0)

    def test_bad_args(self):
        with pytest.raises(ParameterError):
            build_codebook(n=0, Q=1, B=1, L=1, seed=0)
        with pytest.raises(ParameterError):
            build_codebook(n=1, Q=0, B=1, L=1, seed=0)


class TestEncode:
    def test_l1_ignores_seed(self):
        cb = build_codebook(n=3, Q=1, B=4, L=1, seed=2)
        for w in range(4):
            assert np.array_equal(encode(cb, w, seed=0), encode(cb, w, seed=99))
            assert np.array_equal(encode(cb, w, seed=0), cb.table[w, 0])

    def test_deterministic_per_seed(self):
        cb = build_codebook(n=3, Q=1, B=2, L=4, seed=2)
        assert np.array_equal(encode(cb, 1, seed=5), encode(cb, 1, seed=5))

    def test_member_of_bin(self):
        cb = build_codebook(n=3, Q=2, B=4, L=4, seed=3)
        for seed in range(20):
            x = encode(cb, 2, seed=seed)
            assert any(np.array_equal(x, cb.table[2, l]) for l in range(4))

    def test_uniform_over_bin(self):
        cb = build_codebook(n=6, Q=2, B=2, L=4, seed=4)
        counts = np.zeros(4)
        for seed in range(10_000):
            x = encode(cb, 0, seed=seed)
            for l in range(4):
                if np.array_equal(x, cb.table[0, l]):
                    counts[l] += 1
                    break
        freqs = counts / 10_000
        assert np.all(np.abs(freqs - 0.25) < 0.02)

    def test_message_range(self):
        cb = build_codebook(n=2, Q=1, B=3, L=2, seed=0)
        with pytest.raises(ParameterError):
            encode(cb, 3, seed=0)
        with pytest.raises(ParameterError):
            encode(cb, -1, seed=0)


class TestScaleToChannel:
    def test_arithmetic(self):
        out = scale_to_channel(np.array([1, -1]), A=2.0, h_e_k=0.5)
        assert out.tolist() == [4.0, -4.0]

    def test_zero_vector(self):
        assert np.all(scale_to_channel(np.zeros(5), 3.0, 1.5) == 0)

    def test_zero_gain(self):
        with pytest.raises(ParameterError):
            scale_to_channel(np.ones(2), 1.0, 0.0)

    def test_power_contract(self):
        # (Q, A) from the power split keep per-symbol power within P
        P = 1e6 / 0.8**2  # so that P_tilde = h_e^2 P = 1e6
        Q, A = select_params(0.8**2 * P, 2, 0.1)
        assert Q == 19
        rng = np.random.default_rng(0)
        x_tilde = rng.integers(-Q, Q + 1, size=100_000)
        x = scale_to_channel(x_tilde, A, 0.8)
        assert np.mean(x**2) <= P * (1 + 1e-9)
        # even the all +/-Q worst case satisfies the constraint
        assert (A * Q / 0.8) ** 2 <= P * (1 + 1e-12)


class TestHardDecode:
    def setup_method(self):
        self.g = NormalizedGains(g=(S2, 1.0))

    def test_noiseless_exact_recovery(self):
        rc = received_constellation(self.g, 2, 10.0)
        dec = hard_decode(rc.points, rc)
        for i in range(rc.points.size):
            v = dec[i]
            assert 10.0 * (v[0] * S2 + v[1]) == pytest.approx(rc.points[i], rel=1e-12)

    def test_tie_goes_to_smaller_point(self):
        rc = received_constellation(self.g, 1, 1.0)
        mid = 0.5 * (rc.points[3] + rc.points[4])
        dec = hard_decode(np.array([mid]), rc)
        low = hard_decode(np.array([rc.points[3]]), rc)
        assert np.array_equal(dec[0], low[0])

    def test_offset_within_gap(self):
        rc = received_constellation(self.g, 1, 100.0)
        y = np.array([100.0 * (S2 - 1) + 0.3])
        assert hard_decode(y, rc)[0].tolist() == [1, -1]

    def test_gamma_violation_rejected(self):
        rc = received_constellation(NormalizedGains(g=(0.5, 1.0)), 2, 1.0)
        with pytest.raises(AmbiguityError):
            hard_decode(np.zeros(1), rc)


class TestDecodeMessages:
    def test_roundtrip_noiseless(self):
        cbs = [build_codebook(n=4, Q=1, B=4, L=2, seed=10, user_k=k) for k in range(2)]
        msgs = [3, 1]
        seqs = [encode(cbs[k], msgs[k], seed=7) for k in range(2)]
        assert decode_messages(seqs, cbs) == msgs

    def test_absent_sequence_flags_failure(self):
        cb = build_codebook(n=2, Q=1, B=2, L=2, seed=0)
        missing = None
        for a in range(-1, 2):
            for b in range(-1, 2):
                cand = np.array([a, b])
                if cb.bin_of(cand) is None:
                    missing = cand
                    break
            if missing is not None:
                break
        assert missing is not None  # 4 sequences over 9 possibilities
        assert decode_messages([missing], [cb]) == [None]

    def test_duplicate_takes_first_bin(self):
        # n=1, Q=1, B=2, L=2: four draws over three symbols force a duplicate
        cb = None
        for seed in range(50):
            cand = build_codebook(n=1, Q=1, B=2, L=2, seed=seed)
            if cand.duplicate_stats().cross_bin_duplicates > 0:
                cb = cand
                break
        assert cb is not None
        flat = cb.table.reshape(4, 1)
        dup_val = None
        for i in range(4):
            for j in range(i + 1, 4):
                if flat[i, 0] == flat[j, 0] and i // 2 != j // 2:
                    dup_val = flat[i, 0]
        assert dup_val is not None
        first_bin = next(
            b for b in range(2) for l in range(2) if cb.table[b, l, 0] == dup_val
        )
        assert cb.bin_of(np.array([dup_val])) == first_bin

    def test_length_mismatch(self):
        cb = build_codebook(n=3, Q=1, B=2, L=1, seed=0)
        with pytest.raises(ParameterError):
            decode_messages([np.zeros(2, dtype=int)], [cb])


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        cb = build_codebook(n=5, Q=3, B=4, L=3, seed=21, user_k=1)
        path = tmp_path / "user1.cbk"
        save_codebook(cb, str(path))
        loaded = load_codebook(str(path))
        assert np.array_equal(loaded.table, cb.table)
        assert (loaded.n, loaded.Q, loaded.B, loaded.L) == (5, 3, 4, 3)
        assert loaded.seed == 21 and loaded.user_k == 1

    def test_header_required(self, tmp_path):
        path = tmp_path / "bad.cbk"
        path.write_text("not a codebook\n")
        with pytest.raises(ParameterError):
            load_codebook(str(path))

    def test_sequence_count_checked(self, tmp_path):
        cb = build_codebook(n=2, Q=1, B=2, L=2, seed=0)
        path = tmp_path / "trunc.cbk"
        save_codebook(cb, str(path))
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(ParameterError):
            load_codebook(str(path))


class TestEndToEndNoiseless:
    @pytest.mark.parametrize(
        "gains,n,Q",
        [((S2, 1.0), 8, 3), ((S2, S3, 1.0), 7, 2)],
    )
    def test_identity(self, gains, n, Q):
        K = len(gains)
        g = NormalizedGains(g=gains)
        ch = ChannelGains(h=gains, h_e=(1.0,) * K)
        A = 100.0
        rc = received_constellation(g, Q, A)
        for seed in range(25):
            cbs = [build_codebook(n, Q, B=4, L=2, seed=seed, user_k=k) for k in range(K)]
            msgs = [int(stream(seed, "msg", k).integers(0, 4)) for k in range(K)]
            x = np.stack(
                [
                    scale_to_channel(encode(cbs[k], msgs[k], seed=seed), A, 1.0)
                    for k in range(K)
                ]
            )
            y, _ = transmit(x, ch, NoiseModel(0.0), seed=seed)
            dec = hard_decode(y, rc)
            got = decode_messages([dec[:, k] for k in range(K)], cbs)
            assert got == msgs
