"""Rubber-sheet unwrapping of the iris annulus, noise masking and contrast enhancement.

Strip geometry: row 0 lies on the pupillary boundary and the last row on the
limbic boundary; column ``j`` is the angle ``2 pi j / angular_res`` measured
counterclockwise on screen from the +x axis (so image ``y`` decreases as the
angle grows from 0 to 90 degrees).
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .edgedetect import canny
from .errors import AllMasked, DegenerateAnnulus
from .imgcore import Histogram, as_gray, bilinear_sample, equalization_lut, to_uint8
from .localize import Boundaries


@dataclass(frozen=True)
class NormalizedIris:
    strip: np.ndarray  # (radial_res, angular_res) intensities in [0, 255]
    mask: np.ndarray  # same shape, True = usable iris pixel

    def __post_init__(self):
        strip = np.asarray(self.strip)
        mask = np.asarray(self.mask, dtype=bool)
        if strip.ndim != 2 or strip.shape != mask.shape:
            raise ValueError(f"strip {strip.shape} and mask {mask.shape} must be equal 2-D shapes")
        object.__setattr__(self, "strip", strip)
        object.__setattr__(self, "mask", mask)

    @property
    def radial_res(self) -> int:
        return self.strip.shape[0]

    @property
    def angular_res(self) -> int:
        return self.strip.shape[1]

    def rolled(self, columns: int) -> "NormalizedIris":
        """Circular shift along the angular axis (positive = toward higher angles)."""
        return NormalizedIris(np.roll(self.strip, columns, axis=1), np.roll(self.mask, columns, axis=1))

    def with_mask(self, mask) -> "NormalizedIris":
        return dataclasses.replace(self, mask=mask)


def sample_grid(b: Boundaries, radial_res: int, angular_res: int) -> tuple[np.ndarray, np.ndarray]:
    """Image coordinates ``(x, y)`` of every strip cell."""
    rho = np.arange(radial_res, dtype=np.float64)[:, None] / (radial_res - 1)
    theta = 2.0 * np.pi * np.arange(angular_res, dtype=np.float64)[None, :] / angular_res
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    p, l = b.pupil, b.limbic
    px, py = p.cx + p.r * cos_t, p.cy - p.r * sin_t
    lx, ly = l.cx + l.r * cos_t, l.cy - l.r * sin_t
    return (1 - rho) * px + rho * lx, (1 - rho) * py + rho * ly


def rubber_sheet(image, b: Boundaries, radial_res: int = 64, angular_res: int = 512) -> NormalizedIris:
    if not b.limbic.r > b.pupil.r:
        raise DegenerateAnnulus("limbic radius must exceed pupil radius")
    if radial_res < 2 or angular_res < 1:
        raise ValueError("strip needs at least 2 rows and 1 column")
    xs, ys = sample_grid(b, radial_res, angular_res)
    values, inside = bilinear_sample(as_gray(image), xs, ys)
    return NormalizedIris(to_uint8(values), inside)


def build_noise_mask(
    n: NormalizedIris,
    dark_t: int = 50,
    bright_t: int = 245,
    edge_high_ratio: float = 0.35,
    edge_low_ratio: float | None = None,
    edge_sigma: float = 1.0,
) -> NormalizedIris:
    """Clear mask bits on eyelashes (dark), specular highlights (bright) and clutter edges.

    Clutter edges come from a Canny pass with a high threshold of
    ``edge_high_ratio`` times the maximum gradient (low threshold half of
    that by default). Only edge chains touching a dark or bright pixel are
    treated as clutter, so plain iris texture is never masked; they are
    dilated by one pixel. Never re-validates a pixel.
    """
    if not dark_t < bright_t:
        raise ValueError("dark_t must be below bright_t")
    strip = np.asarray(n.strip, dtype=np.float64)
    seeds = (strip < dark_t) | (strip > bright_t)
    bad = seeds.copy()
    if edge_low_ratio is None:
        edge_low_ratio = edge_high_ratio / 2.0
    if seeds.any() and min(strip.shape) >= 3:
        edges = canny(strip, edge_low_ratio, edge_high_ratio, edge_sigma)
        bad |= ndimage.binary_dilation(clutter_edges(edges, seeds), structure=_EIGHT)
    return n.with_mask(n.mask & ~bad)


_EIGHT = np.ones((3, 3), dtype=bool)


def clutter_edges(edges, seeds) -> np.ndarray:
    """Edge chains (8-connected) passing within one pixel of a seed pixel."""
    labels, count = ndimage.label(edges, structure=_EIGHT)
    if count == 0:
        return np.zeros(edges.shape, dtype=bool)
    near = ndimage.binary_dilation(seeds, structure=_EIGHT)
    hit = np.zeros(count + 1, dtype=bool)
    hit[labels[near & edges]] = True
    hit[0] = False
    return hit[labels]


def enhance_strip(n: NormalizedIris) -> NormalizedIris:
    """Histogram-equalize the valid pixels; invalid pixels and the mask are untouched."""
    if not n.mask.any():
        raise AllMasked("no valid pixels to equalize")
    levels = to_uint8(np.asarray(n.strip, dtype=np.float64))
    hist = Histogram(np.bincount(levels[n.mask], minlength=256))
    lut = equalization_lut(hist)
    out = np.where(n.mask, lut[levels], n.strip)
    return NormalizedIris(out.astype(np.asarray(n.strip).dtype, copy=False), n.mask.copy())
