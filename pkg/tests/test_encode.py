import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irisbio.encode import (
    CODE_BITS,
    IrisCode,
    SubbandSet,
    block_valid,
    encode_iris,
    haar_dwt2,
    haar_idwt2,
    pack_code,
    sign_bits,
    unpack_code,
)
from irisbio.errors import BadLength, IndivisibleDims
from irisbio.normalize import NormalizedIris

S2 = np.sqrt(2.0)


def haar_matrix(n):
    """One analysis level as an n x n orthonormal matrix: low rows first, then high rows."""
    h = np.zeros((n, n))
    for i in range(n // 2):
        h[i, 2 * i] = h[i, 2 * i + 1] = 1 / S2
        h[n // 2 + i, 2 * i] = 1 / S2
        h[n // 2 + i, 2 * i + 1] = -1 / S2
    return h


def matrix_dwt(m, levels):
    """Brute-force oracle: H_r . M . H_c^T per level, then cut out the quadrants."""
    a = np.asarray(m, dtype=np.float64)
    details = []
    for _ in range(levels):
        r, c = a.shape
        y = haar_matrix(r) @ a @ haar_matrix(c).T
        ll, lh = y[: r // 2, : c // 2], y[: r // 2, c // 2 :]
        hl, hh = y[r // 2 :, : c // 2], y[r // 2 :, c // 2 :]
        details.append((lh, hl, hh))
        a = ll
    return a, details


def _strip(values, mask=None):
    values = np.asarray(values)
    return NormalizedIris(values, np.ones(values.shape, bool) if mask is None else mask)


def test_matches_matrix_oracle(rng):
    for _ in range(5):
        m = rng.uniform(0, 255, (64, 512))
        got = haar_dwt2(m, 3)
        approx, details = matrix_dwt(m, 3)
        assert np.max(np.abs(got.approx - approx)) <= 1e-9
        for (a, b, c), (x, y, z) in zip(got.details, details):
            assert max(np.abs(a - x).max(), np.abs(b - y).max(), np.abs(c - z).max()) <= 1e-9


def test_constant_block():
    s = haar_dwt2(np.full((8, 8), 5.0), 3)
    assert s.approx.shape == (1, 1) and s.approx[0, 0] == pytest.approx(40.0)
    assert all(not d.any() for level in s.details for d in level)
    assert np.allclose(haar_idwt2(s), 5.0)


@settings(max_examples=25)
@given(st.integers(1, 3), st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_round_trip_and_parseval(levels, hr, wr, seed):
    m = np.random.default_rng(seed).normal(0, 50, (hr * 2**levels, wr * 2**levels))
    s = haar_dwt2(m, levels)
    assert np.max(np.abs(haar_idwt2(s) - m)) <= 1e-9
    assert s.energy() == pytest.approx(float((m**2).sum()), rel=1e-6)
    assert s.coefficient_count() == m.size
    for k, level in enumerate(s.details, 1):
        assert all(d.shape == (m.shape[0] >> k, m.shape[1] >> k) for d in level)


def test_block_mean_reconstruction(rng):
    m = rng.uniform(0, 255, (16, 32))
    s = haar_dwt2(m, 3)
    zeroed = SubbandSet(s.approx, [tuple(np.zeros_like(d) for d in lvl) for lvl in s.details])
    smooth = haar_idwt2(zeroed)
    means = m.reshape(2, 8, 4, 8).mean(axis=(1, 3))
    assert np.allclose(smooth, np.kron(means, np.ones((8, 8))), atol=1e-9)


@pytest.mark.parametrize("shape", [(12, 16), (16, 20), (7, 8)])
def test_indivisible(shape):
    with pytest.raises(IndivisibleDims):
        haar_dwt2(np.zeros(shape), 3)


def test_sign_rule_zero_is_one():
    assert sign_bits(np.array([-1e-300, 0.0, -0.0, 2.0])).tolist() == [False, True, True, True]


def test_constant_strip_code():
    code = encode_iris(_strip(np.full((64, 512), 137.0)))
    assert len(code) == CODE_BITS
    assert code.bits.all() and code.mask.all()


def test_masked_strip_code():
    code = encode_iris(_strip(np.full((64, 512), 10.0), np.zeros((64, 512), bool)))
    assert not code.mask.any() and len(code) == CODE_BITS


def test_horizontal_ramp_toy():
    # columns vary, rows do not: HL and HH vanish exactly, LH is hand-computed
    ramp = np.tile((np.arange(8) * 3.0) ** 2, (8, 1))
    s = haar_dwt2(ramp, 1)
    lh, hl, hh = s.details[0]
    a, b = ramp[0, 0::2], ramp[0, 1::2]
    assert not hl.any() and not hh.any()
    assert np.allclose(lh, np.tile(a - b, (4, 1)))
    code = encode_iris(_strip(np.tile((np.arange(512) * 0.5) ** 2 % 97, (64, 1))))
    seg = CODE_BITS // 4
    assert code.bits[2 * seg :].all()  # HL, HH are exactly zero -> all ones


def test_lh_segment_is_second_and_row_major():
    row = np.arange(512, dtype=np.float64)
    strip = np.tile(np.where((row // 8) % 2 == 0, row, -row) + 5000, (64, 1))
    code = encode_iris(_strip(strip))
    s = haar_dwt2(strip, 3)
    seg = CODE_BITS // 4
    assert np.array_equal(code.bits[seg : 2 * seg], (s.details[2][0] >= 0).ravel())


def test_block_valid_and_mask_tiling():
    mask = np.ones((64, 512), bool)
    mask[3, 20] = False  # kills block (0, 2)
    code = encode_iris(_strip(np.zeros((64, 512)), mask))
    per = block_valid(mask, 8).ravel()
    assert not per[2] and per.sum() == per.size - 1
    assert np.array_equal(code.mask, np.tile(per, 4))


def test_affine_gain_invariance_power_of_two(rng):
    for _ in range(20):
        strip = rng.integers(0, 256, (64, 512)).astype(np.float64)
        a = 2.0 ** int(rng.integers(-3, 4))
        b = float(rng.integers(-200, 200))
        assert encode_iris(_strip(strip)) == encode_iris(_strip(a * strip + b))


def test_affine_gain_invariance_general(rng):
    for _ in range(20):
        strip = rng.uniform(0, 255, (64, 512))
        a, b = rng.uniform(0.1, 10.0), rng.uniform(-500, 500)
        assert encode_iris(_strip(strip)) == encode_iris(_strip(a * strip + b))


def test_pack_all_ones():
    code = IrisCode(np.ones(CODE_BITS, bool), np.ones(CODE_BITS, bool))
    data = pack_code(code)
    assert data[:256] == b"\xff" * 256 and len(data) == 512


def test_pack_msb_first():
    bits = np.zeros(CODE_BITS, bool)
    bits[0] = True
    assert pack_code(IrisCode(bits, bits))[0] == 0x80


@settings(max_examples=30)
@given(st.binary(min_size=512, max_size=512))
def test_pack_round_trip(data):
    assert pack_code(unpack_code(data)) == data


def test_unpack_bad_length():
    with pytest.raises(BadLength):
        unpack_code(bytes(255))


def test_code_length_mismatch():
    with pytest.raises(BadLength):
        IrisCode(np.ones(8, bool), np.ones(16, bool))
