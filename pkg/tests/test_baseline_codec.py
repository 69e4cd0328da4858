"""Block-DCT baseline codec with repetition protection."""

import numpy as np
import pytest

from rydberg_ofdm import (
    CodecError,
    baseline_bits_per_image,
    baseline_decode,
    baseline_encode,
    psnr,
)

PORTRAIT_ROUND_TRIP_PSNR = 40.760474220375976


def flip_bits(bits, rate, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    flips = rng.random(bits.size) < rate
    return bits ^ flips.astype(np.uint8)


class TestBitBudget:
    def test_bits_per_image_formula(self):
        assert baseline_bits_per_image(256, 256) == 256 * 256 * 27
        assert baseline_bits_per_image(64, 64) == 64 * 64 * 27

    def test_encode_length_matches_budget(self, portrait):
        bits = baseline_encode(portrait)
        assert bits.size == baseline_bits_per_image(256, 256)
        assert bits.dtype == np.uint8
        assert set(np.unique(bits)) <= {0, 1}


class TestRoundTrip:
    def test_noiseless_psnr_meets_floor(self, portrait):
        bits = baseline_encode(portrait)
        decoded = baseline_decode(bits, 256, 256)
        value = psnr(portrait, decoded)
        assert value >= 30.0
        assert value == pytest.approx(PORTRAIT_ROUND_TRIP_PSNR, abs=1e-9)

    def test_deterministic(self, portrait):
        a = baseline_encode(portrait)
        b = baseline_encode(portrait)
        assert np.array_equal(a, b)

    def test_flat_image_is_near_lossless(self):
        flat = np.full((64, 64), 120, dtype=np.uint8)
        decoded = baseline_decode(baseline_encode(flat), 64, 64)
        assert np.abs(decoded.astype(int) - 120).max() <= 1

    def test_single_flip_per_triplet_corrected(self, portrait):
        """The rate-1/3 repetition code absorbs one flip per coefficient bit."""
        bits = baseline_encode(portrait)
        clean = baseline_decode(bits, 256, 256)
        corrupted = bits.copy()
        corrupted[::3] ^= 1
        decoded = baseline_decode(corrupted, 256, 256)
        assert np.array_equal(decoded, clean)

    def test_low_ber_stays_within_half_db(self, portrait):
        bits = baseline_encode(portrait)
        clean = psnr(portrait, baseline_decode(bits, 256, 256))
        for seed in range(20):
            noisy = flip_bits(bits, 1e-4, seed)
            value = psnr(portrait, baseline_decode(noisy, 256, 256))
            assert abs(value - clean) <= 0.5

    def test_all_bits_flipped_still_returns_an_image(self, portrait):
        bits = baseline_encode(portrait)
        decoded = baseline_decode(bits ^ 1, 256, 256)
        assert decoded.shape == (256, 256)
        assert decoded.dtype == np.uint8


class TestValidation:
    def test_truncated_stream_rejected(self, portrait):
        bits = baseline_encode(portrait)
        with pytest.raises(CodecError):
            baseline_decode(bits[:-1], 256, 256)

    def test_oversized_stream_rejected(self, portrait):
        bits = baseline_encode(portrait)
        padded = np.concatenate([bits, np.zeros(3, dtype=np.uint8)])
        with pytest.raises(CodecError):
            baseline_decode(padded, 256, 256)

    def test_non_multiple_of_block_rejected(self):
        with pytest.raises(CodecError):
            baseline_encode(np.zeros((60, 64), dtype=np.uint8))
        with pytest.raises(CodecError):
            baseline_decode(np.zeros(100, dtype=np.uint8), 60, 64)

    def test_zero_dims_rejected(self):
        with pytest.raises(CodecError):
            baseline_bits_per_image(0, 64)
