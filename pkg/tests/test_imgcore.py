import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from irisbio.errors import (
    BadKernel,
    EmptyReference,
    IoFailure,
    MalformedHeader,
    TruncatedData,
    UnsupportedMaxval,
)
from irisbio.imgcore import (
    Histogram,
    compute_histogram,
    decode_pgm,
    encode_pgm,
    equalization_lut,
    gaussian_blur,
    gaussian_kernel1d,
    histogram_matching_lut,
    load_pgm,
    match_histogram,
    reference_histogram,
    round_half_away,
    save_pgm,
    threshold_binary,
    to_uint8,
)

images = arrays(np.uint8, st.tuples(st.integers(1, 24), st.integers(1, 24)))


# ------------------------------------------------------------------------ PGM


def test_decode_layout():
    img = decode_pgm(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64]))
    assert img.tolist() == [[0, 255], [128, 64]]


def test_decode_skips_comments():
    img = decode_pgm(b"P5\n# made by hand\n2 1 # trailing\n255\n" + bytes([3, 4]))
    assert img.tolist() == [[3, 4]]


def test_truncated():
    with pytest.raises(TruncatedData):
        decode_pgm(b"P5\n3 1\n255\n" + bytes([1, 2]))


@pytest.mark.parametrize(
    "data",
    [b"P2\n1 1\n255\n\x00", b"P5\n0 1\n255\n", b"P5\nx 1\n255\n\x00", b"P5\n1 1\n0\n\x00", b"P5\n1"],
)
def test_malformed(data):
    with pytest.raises(MalformedHeader):
        decode_pgm(data)


def test_wide_maxval():
    with pytest.raises(UnsupportedMaxval):
        decode_pgm(b"P5\n1 1\n65535\n\x00\x00")


def test_save_layout(tmp_path):
    path = tmp_path / "one.pgm"
    save_pgm(np.array([[7]], dtype=np.uint8), path)
    assert path.read_bytes() == b"P5\n1 1\n255\n\x07"


def test_round_trip_50_random(tmp_path, rng):
    for i in range(50):
        h, w = rng.integers(1, 64, size=2)
        img = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
        path = tmp_path / f"r{i}.pgm"
        save_pgm(img, path)
        back = load_pgm(path)
        assert np.array_equal(back, img)
        save_pgm(back, tmp_path / "again.pgm")
        assert (tmp_path / "again.pgm").read_bytes() == path.read_bytes()


@given(images)
def test_encode_decode_identity(img):
    assert np.array_equal(decode_pgm(encode_pgm(img)), img)


def test_unwritable(tmp_path):
    with pytest.raises(IoFailure):
        save_pgm(np.zeros((2, 2), np.uint8), tmp_path / "missing" / "x.pgm")


def test_missing_file(tmp_path):
    with pytest.raises(IoFailure):
        load_pgm(tmp_path / "nope.pgm")


# ----------------------------------------------------------------- histograms


def test_histogram_constant():
    h = compute_histogram(np.full((10, 10), 42, np.uint8))
    assert h.counts[42] == 100 and h.total == 100


def test_histogram_direct():
    h = compute_histogram(np.array([[0, 0], [255, 128]], np.uint8))
    assert (h.counts[0], h.counts[128], h.counts[255], h.total) == (2, 1, 1, 4)


@given(images)
def test_histogram_sums_to_pixels(img):
    h = compute_histogram(img)
    assert h.total == img.size
    assert np.array_equal(h.counts, np.array([np.count_nonzero(img == g) for g in range(256)]))


def test_reference_is_bimodal():
    ref = reference_histogram()
    c = ref.counts
    assert abs(ref.total - 1_000_000) <= 256
    assert int(np.argmax(c[:100])) == 30
    assert int(np.argmax(c[100:])) + 100 == 170
    assert c[:100].sum() / ref.total == pytest.approx(0.15, abs=0.01)


def test_self_match_fixed_point(rng):
    img = rng.integers(0, 256, (40, 40), dtype=np.uint8)
    out = match_histogram(img, compute_histogram(img))
    assert np.array_equal(compute_histogram(out).counts, compute_histogram(img).counts)


def _brute_lut(src, ref):
    cs = np.cumsum(src.counts) / src.total
    cr = np.cumsum(ref.counts) / ref.total
    return np.array([next(g2 for g2 in range(256) if cr[g2] >= cs[g] - 1e-12) for g in range(256)])


def test_two_spike_reference():
    # 16 equally populated levels matched to half mass at 30, half at 200
    img = np.repeat(np.arange(16, dtype=np.uint8) * 16, 4).reshape(8, 8)
    counts = np.zeros(256, np.int64)
    counts[30] = counts[200] = 50
    ref = Histogram(counts)
    out = match_histogram(img, ref)
    assert set(np.unique(out)) == {30, 200}
    lut = histogram_matching_lut(compute_histogram(img), ref)
    assert np.array_equal(lut, _brute_lut(compute_histogram(img), ref))
    assert (out == 30).sum() == 32


def test_constant_source_maps_to_first_full_level():
    ref = reference_histogram()
    out = match_histogram(np.full((5, 5), 90, np.uint8), ref)
    cum = ref.cumulative()
    assert np.all(out == int(np.argmax(cum >= ref.total)))


@settings(max_examples=40)
@given(images, st.integers(0, 2**32 - 1))
def test_matching_lut_oracle_and_monotone(img, seed):
    ref = Histogram(np.random.default_rng(seed).integers(0, 50, 256))
    if ref.total == 0:
        return
    lut = histogram_matching_lut(compute_histogram(img), ref)
    assert np.all(np.diff(lut.astype(int)) >= 0)
    assert np.array_equal(lut, _brute_lut(compute_histogram(img), ref))


def test_empty_reference():
    with pytest.raises(EmptyReference):
        match_histogram(np.zeros((3, 3), np.uint8), Histogram(np.zeros(256, np.int64)))


def test_equalization_two_levels():
    strip = np.array([64, 192] * 8, np.uint8).reshape(4, 4)
    lut = equalization_lut(compute_histogram(strip))
    assert (lut[64], lut[192]) == (0, 255)


# ------------------------------------------------------------------ smoothing


def test_rounding_ties_away_from_zero():
    assert round_half_away(np.array([0.5, 1.5, 2.5, -0.5, -2.5])).tolist() == [1, 2, 3, -1, -3]
    assert to_uint8(np.array([-3.0, 254.5, 300.0])).tolist() == [0, 255, 255]


@pytest.mark.parametrize("size", [2, 4, 1])
def test_bad_kernel_size(size):
    with pytest.raises(BadKernel):
        gaussian_kernel1d(1.0, size)


def test_bad_sigma():
    with pytest.raises(BadKernel):
        gaussian_kernel1d(0.0, 5)


def test_blur_constant():
    assert np.all(gaussian_blur(np.full((9, 11), 200, np.uint8)) == 200)


def test_blur_impulse_matches_2d_convolution():
    img = np.zeros((9, 9), np.uint8)
    img[4, 4] = 255
    out = gaussian_blur(img, sigma=1.0, kernel_size=5)
    k = gaussian_kernel1d(1.0, 5)
    k2 = np.outer(k, k)
    # direct 2D convolution of the impulse, no separability assumed
    ref = np.zeros((9, 9))
    for dy in range(-2, 3):
        for dx in range(-2, 3):
            ref[4 + dy, 4 + dx] = 255 * k2[dy + 2, dx + 2]
    assert out[4, 4] == int(np.floor(255 * k2[2, 2] + 0.5))
    assert np.array_equal(out, to_uint8(ref))


@given(images)
def test_blur_flip_symmetric_and_in_range(img):
    if min(img.shape) < 1:
        return
    out = gaussian_blur(img)
    assert np.array_equal(gaussian_blur(img[:, ::-1]), out[:, ::-1])
    assert out.dtype == np.uint8


# ------------------------------------------------------------------ threshold


def test_threshold_extremes():
    img = np.full((4, 4), 9, np.uint8)
    img[1, 2] = 0
    assert threshold_binary(img, 255).all()
    assert np.argwhere(threshold_binary(img, 0)).tolist() == [[1, 2]]


@given(images, st.integers(0, 255))
def test_threshold_popcount_is_cdf(img, t):
    assert int(threshold_binary(img, t).sum()) == int(compute_histogram(img).cumulative()[t])


def test_threshold_range():
    with pytest.raises(ValueError):
        threshold_binary(np.zeros((2, 2), np.uint8), 256)


def test_load_directory_is_io_failure(tmp_path):
    os.makedirs(tmp_path / "d")
    with pytest.raises(IoFailure):
        load_pgm(tmp_path / "d")
