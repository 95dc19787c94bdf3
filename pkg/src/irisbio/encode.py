"""Haar wavelet decomposition and sign-based iris codes.

The 2-D transform is the orthonormal Haar filter pair applied along rows and
then along columns, once per level. Per level it is evaluated in closed form
on each 2x2 block ``[[a, b], [c, d]]``::

    LL = (a + b + c + d) / 2      LH = (a - b + c - d) / 2
    HL = (a + b - c - d) / 2      HH = (a - b - c + d) / 2

``LH`` is low-pass vertically and high-pass horizontally (it responds to
variation along the columns), ``HL`` the converse. Integer inputs therefore
produce dyadic rationals, which float64 represents exactly for the depths
used here.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadLength, IndivisibleDims

CODE_BITS = 2048
LEVELS = 3
SEGMENTS = ("LL", "LH", "HL", "HH")


@dataclass
class SubbandSet:
    """Details per level (index 0 = finest) plus the coarsest approximation."""

    approx: np.ndarray
    details: list = field(default_factory=list)  # [(LH, HL, HH), ...]

    @property
    def levels(self) -> int:
        return len(self.details)

    def coefficient_count(self) -> int:
        return self.approx.size + sum(d.size for level in self.details for d in level)

    def energy(self) -> float:
        return float((self.approx**2).sum() + sum((d**2).sum() for level in self.details for d in level))


def haar_dwt2(m, levels: int = LEVELS) -> SubbandSet:
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    step = 2**levels
    if a.shape[0] % step or a.shape[1] % step or a.size == 0:
        raise IndivisibleDims(f"{a.shape} is not divisible by 2**{levels}")
    details = []
    for _ in range(levels):
        tl, tr = a[0::2, 0::2], a[0::2, 1::2]
        bl, br = a[1::2, 0::2], a[1::2, 1::2]
        details.append(
            (
                (tl - tr + bl - br) / 2.0,
                (tl + tr - bl - br) / 2.0,
                (tl - tr - bl + br) / 2.0,
            )
        )
        a = (tl + tr + bl + br) / 2.0
    return SubbandSet(a, details)


def haar_idwt2(s: SubbandSet) -> np.ndarray:
    a = np.asarray(s.approx, dtype=np.float64)
    for lh, hl, hh in reversed(s.details):
        if not (a.shape == lh.shape == hl.shape == hh.shape):
            raise IndivisibleDims("subband shapes do not line up")
        out = np.empty((2 * a.shape[0], 2 * a.shape[1]))
        out[0::2, 0::2] = (a + lh + hl + hh) / 2.0
        out[0::2, 1::2] = (a - lh + hl - hh) / 2.0
        out[1::2, 0::2] = (a + lh - hl - hh) / 2.0
        out[1::2, 1::2] = (a - lh - hl + hh) / 2.0
        a = out
    return a


@dataclass(frozen=True)
class IrisCode:
    bits: np.ndarray  # bool
    mask: np.ndarray  # bool, True = usable
    rows: int = 64
    cols: int = 512
    shift: int = 0

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool).ravel()
        mask = np.asarray(self.mask, dtype=bool).ravel()
        if bits.shape != mask.shape:
            raise BadLength(f"bits ({bits.size}) and mask ({mask.size}) differ in length")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "mask", mask)

    def __len__(self):
        return self.bits.size

    def __eq__(self, other):
        if not isinstance(other, IrisCode):
            return NotImplemented
        return (
            np.array_equal(self.bits, other.bits)
            and np.array_equal(self.mask, other.mask)
            and (self.rows, self.cols, self.shift) == (other.rows, other.cols, other.shift)
        )

    __hash__ = None


def sign_bits(coeffs) -> np.ndarray:
    """1 for coefficients >= 0 (zero included), 0 for negative ones."""
    return np.asarray(coeffs) >= 0


def block_valid(mask, block: int) -> np.ndarray:
    m = np.asarray(mask, dtype=bool)
    r, c = m.shape
    return m.reshape(r // block, block, c // block, block).all(axis=(1, 3))


def encode_iris(n, shift: int = 0) -> IrisCode:
    """Sign code of the level-3 subbands: mean-removed LL, then LH, HL, HH.

    Each segment is row-major; the mask bit of a coefficient is set when all
    strip pixels of its 8x8 support are valid.
    """
    strip = np.asarray(n.strip, dtype=np.float64)
    rows, cols = strip.shape
    bands = haar_dwt2(strip, LEVELS)
    lh, hl, hh = bands.details[-1]
    ll = bands.approx - bands.approx.mean()
    bits = np.concatenate([sign_bits(x).ravel() for x in (ll, lh, hl, hh)])
    valid = block_valid(n.mask, 2**LEVELS).ravel()
    return IrisCode(bits, np.tile(valid, 4), rows, cols, shift)


def pack_code(code: IrisCode) -> bytes:
    """Code bits then mask bits, each packed MSB-first."""
    if code.bits.size % 8:
        raise BadLength("code length must be a multiple of 8")
    return np.packbits(code.bits).tobytes() + np.packbits(code.mask).tobytes()


def unpack_code(data: bytes, nbits: int = CODE_BITS, rows: int = 64, cols: int = 512) -> IrisCode:
    if len(data) != 2 * (nbits // 8):
        raise BadLength(f"expected {2 * (nbits // 8)} bytes, got {len(data)}")
    raw = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8)).astype(bool)
    return IrisCode(raw[:nbits], raw[nbits:], rows, cols)
