"""Grayscale raster helpers: PGM I/O, histograms, smoothing and thresholding.

Images are plain ``numpy`` arrays throughout the package:

* a *gray image* is a 2-D ``uint8`` array indexed ``[row, col]``;
* a *binary image* is a 2-D ``bool`` array of the same layout.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import (
    BadKernel,
    EmptyReference,
    IoFailure,
    MalformedHeader,
    TruncatedData,
    UnsupportedMaxval,
)

_WHITESPACE = b" \t\n\r\v\f"


def as_gray(image) -> np.ndarray:
    """Validate ``image`` as a 2-D 8-bit raster and return it as ``uint8``."""
    arr = np.asarray(image)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D image, got shape {arr.shape}")
    if arr.dtype == np.uint8:
        return arr
    if np.issubdtype(arr.dtype, np.integer) or np.issubdtype(arr.dtype, np.floating):
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("intensities must lie in [0, 255]")
        if np.issubdtype(arr.dtype, np.floating) and not np.all(arr == np.floor(arr)):
            raise ValueError("intensities must be integers")
        return arr.astype(np.uint8)
    raise TypeError(f"unsupported image dtype {arr.dtype}")


def round_half_away(values: np.ndarray) -> np.ndarray:
    """Round to nearest integer, ties away from zero."""
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def to_uint8(values: np.ndarray) -> np.ndarray:
    """Round (ties away from zero) and clamp a float array into ``uint8``."""
    return np.clip(round_half_away(values), 0, 255).astype(np.uint8)


# --------------------------------------------------------------------------- PGM


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c in _WHITESPACE:
            pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos : pos + 1] not in _WHITESPACE and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise MalformedHeader("unexpected end of header")
    return data[start:pos], pos


def decode_pgm(data: bytes) -> np.ndarray:
    """Parse binary PGM (``P5``) bytes into a gray image."""
    if data[:2] != b"P5":
        raise MalformedHeader(f"bad magic {data[:2]!r}, expected b'P5'")
    pos = 2
    fields = []
    for _ in range(3):
        tok, pos = _read_token(data, pos)
        if not tok.isdigit():
            raise MalformedHeader(f"non-numeric header field {tok!r}")
        fields.append(int(tok))
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise MalformedHeader(f"bad dimensions {width}x{height}")
    if maxval <= 0 or maxval >= 65536:
        raise MalformedHeader(f"bad maxval {maxval}")
    if maxval > 255:
        raise UnsupportedMaxval(f"maxval {maxval} > 255 is not supported")
    if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
        raise MalformedHeader("missing whitespace after maxval")
    pos += 1
    need = width * height
    payload = data[pos : pos + need]
    if len(payload) < need:
        raise TruncatedData(f"expected {need} pixel bytes, found {len(payload)}")
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()
    if pixels.size and pixels.max() > maxval:
        raise MalformedHeader("pixel value exceeds maxval")
    return pixels


def encode_pgm(image) -> bytes:
    img = as_gray(image)
    h, w = img.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(img).tobytes()


def load_pgm(path) -> np.ndarray:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return decode_pgm(data)


def save_pgm(image, path) -> None:
    payload = encode_pgm(image)
    try:
        with open(path, "wb") as fh:
            fh.write(payload)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def save_binary_pgm(bits, path) -> None:
    """Write a boolean map as a 0/255 PGM."""
    save_pgm(np.where(np.asarray(bits, dtype=bool), 255, 0).astype(np.uint8), path)


# ------------------------------------------------------------------ histograms


@dataclass(frozen=True)
class Histogram:
    counts: np.ndarray  # 256 non-negative integers

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (256,):
            raise ValueError("a histogram has exactly 256 bins")
        if np.any(counts < 0):
            raise ValueError("histogram counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.counts)


def compute_histogram(image) -> Histogram:
    img = as_gray(image)
    return Histogram(np.bincount(img.ravel(), minlength=256))


def reference_histogram(total: int = 1_000_000) -> Histogram:
    """Built-in bi-modal reference: a dark pupil mode and a bright iris/sclera mode.

    Two Gaussian bumps (level 30, weight 0.15, sigma 10; level 170, weight
    0.85, sigma 30), each renormalized over the 256 levels, scaled to
    ``total`` and rounded to integer counts.
    """
    levels = np.arange(256, dtype=np.float64)
    mix = np.zeros(256)
    for mean, weight, sigma in ((30.0, 0.15, 10.0), (170.0, 0.85, 30.0)):
        bump = np.exp(-0.5 * ((levels - mean) / sigma) ** 2)
        mix += weight * bump / bump.sum()
    return Histogram(np.floor(mix * total + 0.5).astype(np.int64))


def histogram_matching_lut(source: Histogram, reference: Histogram) -> np.ndarray:
    """Lookup table sending level g to the smallest g' with CDF_ref(g') >= CDF_src(g)."""
    if reference.total == 0:
        raise EmptyReference("reference histogram is empty")
    if source.total == 0:
        return np.arange(256, dtype=np.uint8)
    cum_src = source.cumulative()
    cum_ref = reference.cumulative()
    # exact integer comparison of cum_ref/total_ref >= cum_src/total_src
    dtype = np.int64 if source.total * reference.total < 2**62 else object
    lhs = cum_ref.astype(dtype) * source.total
    need = cum_src.astype(dtype) * reference.total
    lut = np.searchsorted(lhs, need, side="left")
    return np.minimum(lut, 255).astype(np.uint8)


def match_histogram(image, reference: Histogram) -> np.ndarray:
    img = as_gray(image)
    lut = histogram_matching_lut(compute_histogram(img), reference)
    return lut[img]


def equalization_lut(hist: Histogram) -> np.ndarray:
    """Classic equalization map ``round(255 (cdf(g) - cdf_min) / (N - cdf_min))``.

    Degenerate histograms (a single occupied level) map to the identity.
    """
    cum = hist.cumulative()
    total = hist.total
    occupied = np.nonzero(hist.counts)[0]
    if total == 0 or occupied.size <= 1:
        return np.arange(256, dtype=np.uint8)
    cdf_min = int(cum[occupied[0]])
    scaled = 255.0 * (cum - cdf_min) / (total - cdf_min)
    return to_uint8(np.maximum(scaled, 0.0))


# ------------------------------------------------------------------- smoothing


def gaussian_kernel1d(sigma: float, size: int) -> np.ndarray:
    """Sampled Gaussian of odd length ``size`` normalized to unit sum."""
    if size < 3 or size % 2 == 0:
        raise BadKernel(f"kernel size must be odd and >= 3, got {size}")
    if not sigma > 0:
        raise BadKernel(f"sigma must be positive, got {sigma}")
    half = size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def canny_kernel_size(sigma: float) -> int:
    return 2 * math.ceil(3 * sigma) + 1


def gaussian_smooth(image, sigma: float, kernel_size: int) -> np.ndarray:
    """Separable Gaussian smoothing in float64 with edge-clamp borders."""
    k = gaussian_kernel1d(sigma, kernel_size)
    out = ndimage.correlate1d(np.asarray(image, dtype=np.float64), k, axis=0, mode="nearest")
    return ndimage.correlate1d(out, k, axis=1, mode="nearest")


def gaussian_blur(image, sigma: float = 2.0, kernel_size: int = 5) -> np.ndarray:
    return to_uint8(gaussian_smooth(as_gray(image), sigma, kernel_size))


def threshold_binary(image, t: int) -> np.ndarray:
    """Select dark pixels: True exactly where intensity <= ``t``."""
    if not 0 <= t <= 255:
        raise ValueError(f"threshold must be in [0, 255], got {t}")
    return as_gray(image) <= t


def bilinear_sample(image: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bilinear interpolation at real coordinates ``(x=col, y=row)``.

    Returns ``(values, inside)``; points outside ``[0, w-1] x [0, h-1]`` get
    value 0 and ``inside`` False.
    """
    img = np.asarray(image, dtype=np.float64)
    h, w = img.shape
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    inside = (xs >= 0) & (xs <= w - 1) & (ys >= 0) & (ys <= h - 1)
    xc = np.clip(xs, 0, w - 1)
    yc = np.clip(ys, 0, h - 1)
    x0 = np.minimum(np.floor(xc).astype(np.intp), max(w - 2, 0))
    y0 = np.minimum(np.floor(yc).astype(np.intp), max(h - 2, 0))
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xc - x0
    fy = yc - y0
    top = img[y0, x0] * (1 - fx) + img[y0, x1] * fx
    bottom = img[y1, x0] * (1 - fx) + img[y1, x1] * fx
    values = top * (1 - fy) + bottom * fy
    return np.where(inside, values, 0.0), inside


def ensure_parent(path) -> None:
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
