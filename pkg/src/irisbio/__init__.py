"""Iris recognition: segmentation, rubber-sheet normalization, Haar iris codes and matching.

Typical use::

    from irisbio import load_pgm, process_image, match_with_shifts

    gallery = process_image(load_pgm("a.pgm"))
    probe = process_image(load_pgm("b.pgm"))
    result = match_with_shifts(probe.strip, gallery.code)
"""
from .config import DEFAULT_SHIFTS, PipelineConfig
from .encode import IrisCode, encode_iris, haar_dwt2, haar_idwt2, pack_code, unpack_code
from .errors import IrisError
from .imgcore import Histogram, compute_histogram, load_pgm, reference_histogram, save_pgm
from .kernels import BACKEND
from .localize import Boundaries, CircleParams, localize, localize_limbic, localize_pupil
from .matching import (
    MatchResult,
    ScoreDistribution,
    TemplateRecord,
    enroll,
    evaluate,
    hamming_distance,
    identify,
    match_with_shifts,
    score_distribution,
    verify,
)
from .normalize import NormalizedIris, build_noise_mask, enhance_strip, rubber_sheet
from .pipeline import PipelineResult, process_file, process_image
from .synth import EyeSpec, GroundTruth, perturb, render_eye

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DEFAULT_SHIFTS",
    "Boundaries",
    "CircleParams",
    "EyeSpec",
    "GroundTruth",
    "Histogram",
    "IrisCode",
    "IrisError",
    "MatchResult",
    "NormalizedIris",
    "PipelineConfig",
    "PipelineResult",
    "ScoreDistribution",
    "TemplateRecord",
    "build_noise_mask",
    "compute_histogram",
    "encode_iris",
    "enhance_strip",
    "enroll",
    "evaluate",
    "haar_dwt2",
    "haar_idwt2",
    "hamming_distance",
    "identify",
    "load_pgm",
    "localize",
    "localize_limbic",
    "localize_pupil",
    "match_with_shifts",
    "pack_code",
    "perturb",
    "process_file",
    "process_image",
    "reference_histogram",
    "render_eye",
    "rubber_sheet",
    "save_pgm",
    "score_distribution",
    "unpack_code",
    "verify",
]
