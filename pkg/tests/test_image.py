import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ace.errors import PgmParseError
from ace.image import QuantizedImage, load_pgm, requantize, save_pgm, wedge_correct

from _util import random_image_array


class TestQuantizedImage:
    def test_range_checked(self):
        with pytest.raises(ValueError):
            QuantizedImage([[4]], 2)

    def test_bits_checked(self):
        with pytest.raises(ValueError):
            QuantizedImage([[0]], 9)

    def test_immutable(self):
        img = QuantizedImage([[1, 2]], 8)
        with pytest.raises((ValueError, AttributeError)):
            img.data[0, 0] = 3


class TestLoadPgm:
    def test_minimal(self):
        img = load_pgm(b"P5 2 1 255\n" + bytes([0, 255]))
        assert (img.width, img.height, img.bits) == (2, 1, 8)
        assert img.data.tolist() == [[0, 255]]

    def test_comment_skipped(self):
        plain = load_pgm(b"P5 2 1 255\n" + bytes([0, 255]))
        commented = load_pgm(b"P5\n# x\n2 1\n255\n" + bytes([0, 255]))
        assert commented == plain

    def test_truncated_payload(self):
        with pytest.raises(PgmParseError, match="truncated payload"):
            load_pgm(b"P5 2 2 255\n" + bytes([1, 2, 3]))

    def test_bad_magic_names_offset(self):
        with pytest.raises(PgmParseError, match="byte 0"):
            load_pgm(b"P6 2 1 255\n" + bytes([0, 255]))

    def test_bad_maxval_names_offset(self):
        with pytest.raises(PgmParseError, match=r"maxval 65535 at byte \d+"):
            load_pgm(b"P5 2 1 65535\n" + bytes([0, 0, 0, 0]))

    def test_missing_field(self):
        with pytest.raises(PgmParseError, match="expected"):
            load_pgm(b"P5 2\n")


class TestSavePgm:
    def test_eight_bit_payload_verbatim(self):
        img = QuantizedImage([[0, 255]], 8)
        assert save_pgm(img)[-2:] == bytes([0, 255])

    def test_six_bit_shifted_to_full_range(self):
        img = QuantizedImage([[63]], 6)
        assert save_pgm(img)[-1] == 252

    def test_zero_stays_zero(self):
        img = QuantizedImage([[0]], 6)
        assert save_pgm(img)[-1] == 0

    def test_single_whitespace_after_maxval(self):
        data = save_pgm(QuantizedImage([[7]], 8))
        assert data.startswith(b"P5\n1 1\n255\n")
        assert len(data) == len(b"P5\n1 1\n255\n") + 1

    @settings(max_examples=30, deadline=None)
    @given(
        st.integers(1, 12),
        st.integers(1, 12),
        st.integers(0, 2**32 - 1),
    )
    def test_roundtrip(self, h, w, seed):
        arr = random_image_array(h, w, seed=seed)
        img = QuantizedImage(arr, 8)
        assert load_pgm(save_pgm(img)) == img


class TestRequantize:
    def test_top_code(self):
        assert requantize(QuantizedImage([[255]], 8), 6).data[0, 0] == 63

    def test_low_bits_dropped(self):
        assert requantize(QuantizedImage([[3]], 8), 6).data[0, 0] == 0

    def test_identity(self):
        img = QuantizedImage([[5, 9]], 8)
        assert requantize(img, 8) == img

    def test_target_out_of_range(self):
        with pytest.raises(ValueError):
            requantize(QuantizedImage([[0]], 4), 5)
        with pytest.raises(ValueError):
            requantize(QuantizedImage([[0]], 4), 0)

    def test_monotone(self):
        rng = np.random.default_rng(3)
        lo = rng.integers(0, 256, (9, 7), dtype=np.uint8)
        hi = np.minimum(255, lo + rng.integers(0, 40, lo.shape)).astype(np.uint8)
        a = requantize(QuantizedImage(lo, 8), 5).data
        b = requantize(QuantizedImage(hi, 8), 5).data
        assert np.all(a <= b)


def _plane_fit(values):
    """Normal-equations plane fit, the independent reference for the wedge."""
    h, w = values.shape
    cols, rows = np.meshgrid(np.arange(w), np.arange(h))
    design = np.stack([cols.ravel(), rows.ravel(), np.ones(h * w)], axis=1)
    coeff, *_ = np.linalg.lstsq(design, values.ravel().astype(float), rcond=None)
    return coeff  # (a, b, c)


class TestWedgeCorrect:
    def test_constant_unchanged(self):
        img = QuantizedImage(np.full((5, 5), 77, dtype=np.uint8), 8)
        assert wedge_correct(img) == img

    def test_pure_ramp_flattens(self):
        ramp = np.tile(np.arange(8, dtype=np.uint8), (8, 1))
        out = wedge_correct(QuantizedImage(ramp, 8))
        # column mean is 3.5; rounding half-up lands every pixel on 4
        assert np.all(out.data == 4)
        a, b, _ = _plane_fit(ramp)
        assert a == pytest.approx(1.0, abs=1e-12)
        assert b == pytest.approx(0.0, abs=1e-12)

    def test_ramp_with_impulse(self):
        vals = np.tile(np.arange(16, dtype=np.float64), (16, 1))
        vals[8, 8] += 60
        img = QuantizedImage(vals.astype(np.uint8), 8)
        a, b, _ = _plane_fit(vals)
        expected = vals - a * np.arange(16)[None, :] - b * np.arange(16)[:, None]
        expected += vals.mean() - expected.mean()
        expected = np.clip(np.floor(expected + 0.5), 0, 255)
        out = wedge_correct(img)
        assert np.max(np.abs(out.data.astype(float) - expected)) <= 1
        background = np.delete(out.data.ravel(), 8 * 16 + 8)
        assert out.data[8, 8] >= background.max() + 50

    def test_residual_gradient_bounded(self):
        # mid-range values keep the correction clamp-free, the regime the
        # rounding bound describes
        for seed in range(8):
            rng = np.random.default_rng(seed)
            arr = rng.integers(60, 196, (13, 21), dtype=np.uint8)
            out = wedge_correct(QuantizedImage(arr, 8))
            a, b, _ = _plane_fit(out.data.astype(float))
            bound = 0.5 / max(out.width, out.height)
            assert abs(a) <= bound
            assert abs(b) <= bound

    def test_mean_preserved(self):
        for seed in range(8):
            arr = random_image_array(10, 17, seed=100 + seed)
            out = wedge_correct(QuantizedImage(arr, 8))
            assert abs(out.data.mean() - arr.mean()) <= 1.0

    def test_needs_two_by_two(self):
        with pytest.raises(ValueError):
            wedge_correct(QuantizedImage([[1, 2, 3]], 8))
