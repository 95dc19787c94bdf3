"""End-to-end processing of one eye image into boundaries, strip and iris code."""
from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np

from .config import PipelineConfig
from .encode import IrisCode, encode_iris
from .imgcore import Histogram, as_gray, load_pgm
from .localize import (
    Boundaries,
    PupilQualityWarning,
    PupilStages,
    boundary_quality,
    localize_limbic,
    localize_pupil_idop,
    pupil_stages,
)
from .normalize import NormalizedIris, build_noise_mask, enhance_strip, rubber_sheet


@dataclass
class PipelineResult:
    boundaries: Boundaries
    raw_strip: NormalizedIris  # masked, before enhancement
    strip: NormalizedIris  # enhanced, what gets encoded
    code: IrisCode
    quality: float
    stages: PupilStages | None = None
    elapsed: float = 0.0


def process_image(
    image,
    cfg: PipelineConfig | None = None,
    reference: Histogram | None = None,
    keep_stages: bool = False,
) -> PipelineResult:
    cfg = cfg or PipelineConfig()
    img = as_gray(image)
    stages = None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PupilQualityWarning)
        if cfg.method == "idop":
            pupil = localize_pupil_idop(img, cfg, reference)
            quality = boundary_quality(img, pupil)
        else:
            stages = pupil_stages(img, cfg, reference)
            pupil, quality = stages.circle, stages.quality
    if quality < cfg.quality_gate:
        warnings.warn(f"pupil boundary contrast {quality:.3f} below {cfg.quality_gate}", PupilQualityWarning, stacklevel=2)
    bounds = Boundaries(pupil, localize_limbic(img, pupil, cfg))
    sheet = rubber_sheet(img, bounds, cfg.radial_res, cfg.angular_res)
    masked = build_noise_mask(sheet, cfg.mask_dark, cfg.mask_bright, cfg.mask_edge_high)
    enhanced = enhance_strip(masked)
    return PipelineResult(
        boundaries=bounds,
        raw_strip=masked,
        strip=enhanced,
        code=encode_iris(enhanced),
        quality=quality,
        stages=stages if keep_stages else None,
    )


def process_file(path, cfg: PipelineConfig | None = None, reference: Histogram | None = None, keep_stages: bool = False) -> PipelineResult:
    """Load a PGM and run the pipeline; ``elapsed`` covers load through encoding."""
    start = time.perf_counter()
    img = load_pgm(path)
    result = process_image(img, cfg, reference, keep_stages)
    result.elapsed = time.perf_counter() - start
    return result


def overlay_boundaries(image, bounds: Boundaries, samples: int = 720) -> np.ndarray:
    """Copy of ``image`` with both circles drawn in white (pupil) and black (limbus)."""
    out = as_gray(image).copy()
    h, w = out.shape
    theta = 2 * np.pi * np.arange(samples) / samples
    for circle, value in ((bounds.pupil, 255), (bounds.limbic, 0)):
        xs = np.rint(circle.cx + circle.r * np.cos(theta)).astype(int)
        ys = np.rint(circle.cy - circle.r * np.sin(theta)).astype(int)
        ok = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
        out[ys[ok], xs[ok]] = value
    return out
