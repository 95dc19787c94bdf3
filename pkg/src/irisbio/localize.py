"""Pupillary and limbic boundary localization.

The pupil is found with a circular Hough transform over Canny edges of the
thresholded dark region. The limbic boundary is searched on circles
concentric with the pupil, picking the radius where the mean ring intensity
jumps most. ``idop_localize`` is the integro-differential alternative.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import kernels
from .config import PipelineConfig
from .edgedetect import GradientField, canny_with_gradients
from .errors import (
    DegenerateMaximum,
    EmptyRadiusRange,
    EmptySearchSpace,
    NoEdges,
    PupilNotFound,
    SearchRangeOutOfImage,
)
from .imgcore import (
    Histogram,
    as_gray,
    canny_kernel_size,
    gaussian_blur,
    gaussian_kernel1d,
    match_histogram,
    reference_histogram,
    threshold_binary,
)


class PupilQualityWarning(UserWarning):
    """The detected pupil boundary is weaker than the strongest nearby gradient."""


@dataclass(frozen=True)
class CircleParams:
    cx: float
    cy: float
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"circle radius must be positive, got {self.r}")

    def as_tuple(self):
        return (self.cx, self.cy, self.r)

    def shifted(self, dx: float, dy: float) -> "CircleParams":
        return CircleParams(self.cx + dx, self.cy + dy, self.r)


@dataclass(frozen=True)
class Boundaries:
    pupil: CircleParams
    limbic: CircleParams

    def __post_init__(self):
        if not self.limbic.r > self.pupil.r:
            raise ValueError("limbic radius must exceed pupil radius")


@dataclass
class HoughAccumulator:
    """Votes indexed ``[r - r_min, cy, cx]`` on a 1-pixel grid."""

    votes: np.ndarray
    r_min: int

    def support(self) -> np.ndarray:
        """Votes summed over the 3x3x3 neighbourhood of every bin (zero padded)."""
        return kernels.box_sum3(self.votes)

    def peak(self) -> tuple[CircleParams, int]:
        support = self.support()
        # argmax returns the first maximum in (r, cy, cx) order: smallest r,
        # then smallest cy, then smallest cx
        flat = int(np.argmax(support))
        k, cy, cx = np.unravel_index(flat, support.shape)
        return CircleParams(float(cx), float(cy), float(self.r_min + k)), int(support.flat[flat])


def hough_accumulate(edges, gradients: GradientField, r_min: int, r_max: int) -> HoughAccumulator:
    if not 0 < r_min < r_max:
        raise EmptyRadiusRange(f"need 0 < r_min < r_max, got [{r_min}, {r_max}]")
    edges = np.asarray(edges, dtype=bool)
    ys, xs = np.nonzero(edges & (gradients.magnitude > 0))
    if ys.size == 0:
        raise NoEdges("edge map is empty")
    mag = gradients.magnitude[ys, xs]
    ux = gradients.gx[ys, xs] / mag
    uy = gradients.gy[ys, xs] / mag
    h, w = edges.shape
    votes = kernels.hough_vote(
        ys.astype(np.float64), xs.astype(np.float64), ux, uy, int(r_min), int(r_max), h, w
    )
    return HoughAccumulator(votes, int(r_min))


def hough_circle(edges, gradients: GradientField, r_min: int, r_max: int) -> tuple[CircleParams, int]:
    """Peak circle of gradient-directed Hough voting and its vote count."""
    return hough_accumulate(edges, gradients, r_min, r_max).peak()


# ------------------------------------------------------------------- pupil


@dataclass
class PupilStages:
    matched: np.ndarray
    blurred: np.ndarray
    dark: np.ndarray
    edges: np.ndarray
    circle: CircleParams
    score: int
    quality: float


def _theta_table(n: int, lateral_only: bool = False):
    theta = 2.0 * np.pi * np.arange(n) / n
    if lateral_only:
        deg = np.degrees(theta)
        keep = (deg <= 45) | (deg >= 315) | ((deg >= 135) & (deg <= 225))
        theta = theta[keep]
    return np.cos(theta), np.sin(theta)


def boundary_quality(image, circle: CircleParams, window: int = 6, samples: int = 180) -> float:
    """Radial step at the detected radius relative to the largest step nearby.

    1.0 means the detected boundary is the strongest circular transition
    within ``window`` pixels of it.
    """
    cos_t, sin_t = _theta_table(samples)
    # radii[window] and radii[window + 1] straddle the detected radius
    radii = circle.r - 0.5 + np.arange(-window, window + 2, dtype=np.float64)
    keep = radii > 0
    if keep.sum() < 3 or not keep[window]:
        return 0.0
    means = kernels.circle_means(
        np.asarray(image, dtype=np.float64), [circle.cx], [circle.cy], radii[keep], cos_t, sin_t
    )[0]
    steps = np.abs(np.diff(means))
    at = window - int((~keep).sum())
    best = steps.max()
    return float(steps[at] / best) if best > 0 else 0.0


def disk_structure(radius: int) -> np.ndarray:
    yy, xx = np.mgrid[-radius : radius + 1, -radius : radius + 1]
    return xx * xx + yy * yy <= radius * radius


def open_mask(mask, radius: int) -> np.ndarray:
    """Binary opening with a disk; strips dark streaks thinner than the disk."""
    mask = np.asarray(mask, dtype=bool)
    if radius <= 0:
        return mask
    return ndimage.binary_opening(mask, structure=disk_structure(radius))


def pupil_stages(image, cfg: PipelineConfig | None = None, reference: Histogram | None = None) -> PupilStages:
    """Run histogram matching, blur, threshold, Canny and Hough for the pupil."""
    cfg = cfg or PipelineConfig()
    img = as_gray(image)
    if img.shape[0] < 64 or img.shape[1] < 64:
        raise PupilNotFound(f"image {img.shape} is smaller than 64x64")
    matched = match_histogram(img, reference or reference_histogram())
    blurred = gaussian_blur(matched, cfg.blur_sigma, cfg.blur_kernel)
    dark = open_mask(threshold_binary(blurred, cfg.pupil_threshold), cfg.pupil_open_radius)
    mask_img = np.where(dark, 255, 0).astype(np.uint8)
    edges, grad = canny_with_gradients(mask_img, cfg.canny_low, cfg.canny_high, cfg.canny_sigma)
    try:
        circle, score = hough_circle(edges, grad, cfg.pupil_r_min, cfg.pupil_r_max)
    except NoEdges as exc:
        raise PupilNotFound("no dark region survived thresholding") from exc
    quality = boundary_quality(blurred, circle)
    if quality < cfg.quality_gate:
        warnings.warn(
            f"pupil boundary contrast {quality:.3f} below {cfg.quality_gate}",
            PupilQualityWarning,
            stacklevel=2,
        )
    return PupilStages(matched, blurred, dark, edges, circle, score, quality)


def localize_pupil(image, cfg: PipelineConfig | None = None, reference: Histogram | None = None) -> CircleParams:
    return pupil_stages(image, cfg, reference).circle


# ------------------------------------------------------------------ limbic


def limbic_profile(image, pupil: CircleParams, cfg: PipelineConfig | None = None):
    """Radii and mean ring intensities ``S(r)`` scanned outward from the pupil."""
    cfg = cfg or PipelineConfig()
    img = np.asarray(image, dtype=np.float64)
    h, w = img.shape
    margin = min(pupil.cx, pupil.cy, (w - 1) - pupil.cx, (h - 1) - pupil.cy)
    start = pupil.r + cfg.limbic_gap
    limit = min(margin, pupil.r + cfg.limbic_extent)
    if limit < start + cfg.limbic_step:
        raise SearchRangeOutOfImage(
            f"no room for a limbic search: start {start:.1f}, limit {limit:.1f}"
        )
    n = int(math.floor((limit - start) / cfg.limbic_step)) + 1
    radii = start + cfg.limbic_step * np.arange(n, dtype=np.float64)
    cos_t, sin_t = _theta_table(cfg.limbic_samples, cfg.limbic_lateral_only)
    means = kernels.circle_means(img, [pupil.cx], [pupil.cy], radii, cos_t, sin_t)[0]
    return radii, means


def localize_limbic(image, pupil: CircleParams, cfg: PipelineConfig | None = None) -> CircleParams:
    """Concentric circle where the ring mean increases most from one step to the next.

    The returned radius is the midpoint of the winning pair ``(r, r + step)``.
    """
    cfg = cfg or PipelineConfig()
    radii, means = limbic_profile(image, pupil, cfg)
    diffs = np.diff(means)
    k = int(np.argmax(diffs))
    return CircleParams(pupil.cx, pupil.cy, float(radii[k] + cfg.limbic_step / 2.0))


# ------------------------------------------------------------------- idop


@dataclass(frozen=True)
class IdopSearch:
    """Inclusive centre window and integer radius range."""

    x_min: int
    x_max: int
    y_min: int
    y_max: int
    r_min: int
    r_max: int


def _idop_scores(img, xs, ys, r_min, r_max, sigma_r, cos_t, sin_t):
    radii = np.arange(r_min, r_max + 2, dtype=np.float64)
    means = kernels.circle_means(img, xs, ys, radii, cos_t, sin_t)
    deriv = np.diff(means, axis=1)
    size = max(3, canny_kernel_size(sigma_r))
    smooth = ndimage.correlate1d(deriv, gaussian_kernel1d(sigma_r, size), axis=1, mode="nearest")
    return np.abs(smooth)


def idop_localize(image, search: IdopSearch, sigma_r: float = 1.5, samples: int = 360, coarse_step: int = 4) -> CircleParams:
    """Integro-differential circle search, coarse grid then 1-px refinement.

    Maximizes the absolute Gaussian-smoothed radial derivative of the
    circular mean intensity. Returns the radius midway between the two
    sampled circles that straddle the maximal step.
    """
    if search.r_min < 1 or search.r_max < search.r_min:
        raise EmptySearchSpace("radius range is empty")
    if search.x_max < search.x_min or search.y_max < search.y_min:
        raise EmptySearchSpace("centre window is empty")
    img = np.asarray(image, dtype=np.float64)
    h, w = img.shape
    if search.x_min < 0 or search.y_min < 0 or search.x_max > w - 1 or search.y_max > h - 1:
        raise EmptySearchSpace("centre window lies outside the image")
    cos_t, sin_t = _theta_table(samples)

    def best_in(xs_axis, ys_axis):
        gx, gy = np.meshgrid(xs_axis, ys_axis)
        xs = gx.ravel().astype(np.float64)
        ys = gy.ravel().astype(np.float64)
        scores = _idop_scores(img, xs, ys, search.r_min, search.r_max, sigma_r, cos_t, sin_t)
        flat = int(np.argmax(scores))
        c, k = np.unravel_index(flat, scores.shape)
        return int(xs[c]), int(ys[c]), search.r_min + int(k), float(scores[c, k])

    coarse_x = np.arange(search.x_min, search.x_max + 1, coarse_step)
    coarse_y = np.arange(search.y_min, search.y_max + 1, coarse_step)
    cx, cy, _, peak = best_in(coarse_x, coarse_y)
    fine_x = np.arange(max(search.x_min, cx - 4), min(search.x_max, cx + 4) + 1)
    fine_y = np.arange(max(search.y_min, cy - 4), min(search.y_max, cy + 4) + 1)
    cx, cy, r, peak = best_in(fine_x, fine_y)
    if peak <= 1e-9:
        raise DegenerateMaximum("radial derivative is zero everywhere")
    return CircleParams(float(cx), float(cy), r + 0.5)


def idop_pupil_search(image, cfg: PipelineConfig | None = None, reference: Histogram | None = None) -> IdopSearch:
    """Centre window around the centroid of the thresholded dark region."""
    cfg = cfg or PipelineConfig()
    img = as_gray(image)
    matched = match_histogram(img, reference or reference_histogram())
    dark = open_mask(
        threshold_binary(gaussian_blur(matched, cfg.blur_sigma, cfg.blur_kernel), cfg.pupil_threshold),
        cfg.pupil_open_radius,
    )
    if not dark.any():
        raise PupilNotFound("no dark region survived thresholding")
    labels, n = ndimage.label(dark)
    sizes = np.bincount(labels.ravel())[1:]
    ys, xs = np.nonzero(labels == 1 + int(np.argmax(sizes)))
    h, w = img.shape
    cx, cy = int(round(xs.mean())), int(round(ys.mean()))
    win = cfg.idop_window
    return IdopSearch(
        max(0, cx - win), min(w - 1, cx + win), max(0, cy - win), min(h - 1, cy + win),
        cfg.pupil_r_min, cfg.pupil_r_max,
    )


def localize_pupil_idop(image, cfg: PipelineConfig | None = None, reference: Histogram | None = None) -> CircleParams:
    cfg = cfg or PipelineConfig()
    search = idop_pupil_search(image, cfg, reference)
    try:
        return idop_localize(image, search, cfg.idop_sigma_r, cfg.idop_samples, cfg.idop_coarse_step)
    except DegenerateMaximum as exc:
        raise PupilNotFound(str(exc)) from exc


def localize(image, cfg: PipelineConfig | None = None, reference: Histogram | None = None) -> Boundaries:
    cfg = cfg or PipelineConfig()
    if cfg.method == "idop":
        pupil = localize_pupil_idop(image, cfg, reference)
    else:
        pupil = localize_pupil(image, cfg, reference)
    return Boundaries(pupil, localize_limbic(image, pupil, cfg))
