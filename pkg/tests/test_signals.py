import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonrc.signals import (
    BitSignal,
    HeaderPattern,
    desired_signal,
    gen_bits,
    modulate,
)


class TestGenBits:
    def test_empty(self):
        assert len(gen_bits(0, seed=7)) == 0

    def test_negative_count_rejected(self):
        with pytest.raises(ValueError):
            gen_bits(-1, seed=0)

    def test_same_seed_same_sequence(self):
        a = gen_bits(10010, seed=123)
        b = gen_bits(10010, seed=123)
        assert np.array_equal(a.bits, b.bits)

    def test_different_seeds_differ(self):
        a = gen_bits(1000, seed=1)
        b = gen_bits(1000, seed=2)
        assert not np.array_equal(a.bits, b.bits)

    def test_balanced_ones_fraction(self):
        # Binomial bound: for n = 1e6 the fraction of ones leaves
        # [0.49, 0.51] with probability far below 1e-8.
        bits = gen_bits(10**6, seed=99)
        frac = bits.bits.mean()
        assert 0.49 <= frac <= 0.51


class TestModulate:
    def test_single_one_no_smoothing(self):
        sig = modulate(BitSignal([1], 10e9), 24, p_node=0.025, smoothing=None)
        assert len(sig) == 24
        assert np.allclose(sig.samples, np.sqrt(0.025))
        assert np.isclose(np.sqrt(0.025), 0.15811, atol=1e-5)

    def test_zero_bits_zero_signal(self):
        sig = modulate(BitSignal([0, 0], 5e9), 24, p_node=0.025)
        assert np.all(sig.samples == 0)

    def test_output_length(self):
        for n, spb in [(1, 1), (7, 3), (100, 24)]:
            bits = gen_bits(n, seed=n, bitrate=1e9)
            assert len(modulate(bits, spb, 0.01)) == n * spb

    def test_non_binary_rejected(self):
        with pytest.raises(ValueError):
            BitSignal([0, 2, 1], 1e9)

    def test_step_response_within_one_bit(self):
        # First-order response with the pole at the bit frequency rises to
        # 1 - exp(-2*pi) of the final value after one bit period.
        spb = 24
        sig = modulate(BitSignal([1] * 4, 10e9), spb, p_node=0.025, smoothing="auto")
        level = np.sqrt(0.025)
        end_of_first_bit = sig.samples[spb - 1].real
        assert end_of_first_bit >= 0.95 * level
        assert np.isclose(end_of_first_bit, (1 - np.exp(-2 * np.pi)) * level, rtol=1e-9)

    def test_linear_in_sqrt_power(self):
        bits = gen_bits(64, seed=5, bitrate=10e9)
        lo = modulate(bits, 24, p_node=0.02)
        hi = modulate(bits, 24, p_node=0.04)
        assert np.allclose(hi.samples, np.sqrt(2.0) * lo.samples, rtol=1e-13)

    def test_sample_period(self):
        sig = modulate(BitSignal([1, 0], 8e9), 16, 0.01)
        assert np.isclose(sig.sample_period, 1.0 / (8e9 * 16))


class TestDesiredSignal:
    def test_explicit_pattern(self):
        bits = BitSignal([1, 0, 1, 0, 1], 1e9)
        d = desired_signal(bits, HeaderPattern.from_string("101"), p_total=0.1)
        assert d.ideal.tolist() == [0, 0, 1, 0, 1]

    def test_all_zero_stream(self):
        bits = BitSignal([0] * 32, 1e9)
        d = desired_signal(bits, HeaderPattern.from_string("101"), p_total=0.1)
        assert not d.ideal.any()

    def test_scaled_targets(self):
        bits = BitSignal([1, 0, 1], 1e9)
        d = desired_signal(bits, HeaderPattern.from_string("101"), p_total=0.1)
        assert np.allclose(d.scaled, [0.0, 0.0, 0.1])
        assert set(np.unique(d.scaled)) <= {0.0, 0.1}

    def test_stream_shorter_than_header_rejected(self):
        with pytest.raises(ValueError):
            desired_signal(BitSignal([1, 0], 1e9), HeaderPattern.from_string("101"), 0.1)

    def test_all_zero_header_matches_zero_runs(self):
        bits = BitSignal([0, 0, 0, 1, 0, 0, 0], 1e9)
        d = desired_signal(bits, HeaderPattern.from_string("000"), 0.1)
        assert d.ideal.tolist() == [0, 0, 1, 0, 0, 0, 1]

    @given(
        bits=st.lists(st.integers(0, 1), min_size=3, max_size=500),
        header=st.lists(st.integers(0, 1), min_size=1, max_size=4),
        seed=st.integers(0, 2**16),
    )
    @settings(max_examples=200, deadline=None)
    def test_matches_naive_substring_scan(self, bits, header, seed):
        if len(bits) < len(header):
            return
        sig = BitSignal(np.asarray(bits), 1e9)
        pat = HeaderPattern(np.asarray(header))
        d = desired_signal(sig, pat, p_total=0.1)
        m = len(header)
        naive = sum(
            1 for n in range(m - 1, len(bits)) if bits[n - m + 1 : n + 1] == header
        )
        assert int(d.ideal.sum()) == naive

    def test_substring_scan_oracle_long_stream(self):
        bits = gen_bits(10_000, seed=2718)
        raw = bits.bits.tolist()
        for header in ("101", "000", "1101"):
            pat = HeaderPattern.from_string(header)
            d = desired_signal(bits, pat, p_total=0.1)
            m = len(pat)
            window = [int(c) for c in header]
            naive = sum(1 for n in range(m - 1, len(raw)) if raw[n - m + 1 : n + 1] == window)
            assert int(d.ideal.sum()) == naive
