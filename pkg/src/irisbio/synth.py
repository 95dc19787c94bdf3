"""Deterministic synthetic eye images with known boundaries.

Every random quantity is drawn from a counter-based Philox generator keyed by
``(identity_seed, stream, noise_seed)``, so rendering is a pure function of
the :class:`EyeSpec`.

The iris texture is a sum of separable harmonics in polar coordinates
``(theta, rho)``, with ``rho`` running 0..1 from the pupil to the limbus and
``theta`` measured counterclockwise on screen from the +x axis. Rotating the
eye adds ``rotation`` to every texture angle, which after unwrapping is a
pure column shift.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import SpecInvalid
from .imgcore import to_uint8
from .localize import CircleParams

N_HARMONICS = 8

_STREAM_TEXTURE = 0
_STREAM_NOISE = 1
_STREAM_LASHES = 2

PERTURBATIONS = ("dilation", "rotation", "noise", "clutter")


@dataclass(frozen=True)
class EyeSpec:
    width: int = 320
    height: int = 280
    pupil: CircleParams = CircleParams(160.0, 140.0, 45.0)
    limbic_r: float = 110.0
    identity_seed: int = 0
    sclera_level: int = 200
    iris_level: int = 120
    pupil_level: int = 30
    rotation: float = 0.0
    noise_sigma: float = 0.0
    noise_seed: int = 0
    eyelash_count: int = 0
    specular: tuple | None = None  # (cx, cy, r, intensity)

    def validate(self) -> "EyeSpec":
        def need(cond, msg):
            if not cond:
                raise SpecInvalid(msg)

        need(self.width >= 16 and self.height >= 16, "image must be at least 16x16")
        need(self.pupil.r > 0, "pupil radius must be positive")
        need(self.pupil.r < self.limbic_r, "pupil radius must be smaller than limbic radius")
        need(self.limbic_r < min(self.width, self.height) / 2, "limbic radius must be below min(dims)/2")
        cx, cy = self.pupil.cx, self.pupil.cy
        need(
            self.limbic_r <= min(cx, cy, self.width - 1 - cx, self.height - 1 - cy),
            "limbic circle must lie inside the image",
        )
        for name in ("sclera_level", "iris_level", "pupil_level"):
            need(0 <= getattr(self, name) <= 255, f"{name} must be in [0, 255]")
        need(0 <= self.identity_seed < 2**64, "identity_seed must be a 64-bit unsigned integer")
        need(0 <= self.noise_seed < 2**48, "noise_seed must be in [0, 2**48)")
        need(self.noise_sigma >= 0, "noise_sigma must be >= 0")
        need(self.eyelash_count >= 0, "eyelash_count must be >= 0")
        need(math.isfinite(self.rotation), "rotation must be finite")
        if self.specular is not None:
            need(len(self.specular) == 4, "specular is (cx, cy, r, intensity)")
            need(self.specular[2] > 0, "specular radius must be positive")
            need(0 <= self.specular[3] <= 255, "specular intensity must be in [0, 255]")
        return self

    @property
    def limbic(self) -> CircleParams:
        return CircleParams(self.pupil.cx, self.pupil.cy, self.limbic_r)


@dataclass(frozen=True)
class GroundTruth:
    pupil: CircleParams
    limbic: CircleParams
    identity_seed: int
    rotation: float
    clutter: np.ndarray  # bool, eyelash/specular pixels


def _generator(identity_seed: int, stream: int, noise_seed: int = 0) -> np.random.Generator:
    key = (int(identity_seed) << 64) | (stream << 48) | int(noise_seed)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class Texture:
    amplitude: np.ndarray
    ang_freq: np.ndarray
    ang_phase: np.ndarray
    rad_freq: np.ndarray
    rad_phase: np.ndarray

    def __call__(self, theta, rho):
        theta = np.asarray(theta, dtype=np.float64)[..., None]
        rho = np.asarray(rho, dtype=np.float64)[..., None]
        terms = (
            self.amplitude
            * np.sin(self.ang_freq * theta + self.ang_phase)
            * np.sin(self.rad_freq * rho * np.pi + self.rad_phase)
        )
        return terms.sum(axis=-1)


def iris_texture(identity_seed: int) -> Texture:
    """Harmonic texture parameters for one synthetic identity."""
    rng = _generator(identity_seed, _STREAM_TEXTURE)
    n = N_HARMONICS
    return Texture(
        amplitude=rng.uniform(6.0, 14.0, n),
        ang_freq=rng.integers(2, 21, n).astype(np.float64),
        ang_phase=rng.uniform(0.0, 2 * np.pi, n),
        rad_freq=rng.uniform(0.5, 3.5, n),
        rad_phase=rng.uniform(0.0, 2 * np.pi, n),
    )


def _coverage(radius, dist):
    """Anti-aliased disk coverage from the signed distance to the rim."""
    return np.clip(radius - dist + 0.5, 0.0, 1.0)


def _polyline_distance(px, py, pts):
    best = np.full(px.shape, np.inf)
    for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
        dx, dy = x1 - x0, y1 - y0
        length2 = dx * dx + dy * dy
        t = np.clip(((px - x0) * dx + (py - y0) * dy) / length2, 0.0, 1.0)
        best = np.minimum(best, np.hypot(px - (x0 + t * dx), py - (y0 + t * dy)))
    return best


def _eyelash_alpha(spec: EyeSpec, xx, yy):
    alpha = np.zeros(xx.shape)
    if spec.eyelash_count == 0:
        return alpha
    rng = _generator(spec.identity_seed, _STREAM_LASHES, spec.noise_seed)
    cx, cy, rl = spec.pupil.cx, spec.pupil.cy, spec.limbic_r
    t = np.linspace(0.0, 1.0, 17)
    for _ in range(spec.eyelash_count):
        u = rng.uniform(-0.8, 0.8)
        root_x = cx + u * rl
        root_y = cy - rl * math.sqrt(1.0 - u * u) - rng.uniform(2.0, 12.0)
        length = rng.uniform(30.0, 70.0)
        bend = rng.uniform(-12.0, 12.0)
        half_width = rng.uniform(1.0, 1.8)
        pts = list(zip(root_x + bend * t**2, root_y + length * t))
        x_lo = int(max(0, math.floor(min(p[0] for p in pts) - 4)))
        x_hi = int(min(spec.width, math.ceil(max(p[0] for p in pts) + 5)))
        y_lo = int(max(0, math.floor(min(p[1] for p in pts) - 4)))
        y_hi = int(min(spec.height, math.ceil(max(p[1] for p in pts) + 5)))
        if x_lo >= x_hi or y_lo >= y_hi:
            continue
        sub = (slice(y_lo, y_hi), slice(x_lo, x_hi))
        d = _polyline_distance(xx[sub], yy[sub], pts)
        alpha[sub] = np.maximum(alpha[sub], _coverage(half_width, d))
    return alpha


EYELASH_LEVEL = 35.0


def render_eye(spec: EyeSpec) -> tuple[np.ndarray, GroundTruth]:
    spec.validate()
    h, w = spec.height, spec.width
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    cx, cy, rp, rl = spec.pupil.cx, spec.pupil.cy, spec.pupil.r, spec.limbic_r
    dx = xx - cx
    dy = cy - yy  # screen "up" is positive
    dist = np.hypot(dx, dy)
    theta = np.arctan2(dy, dx)
    rho = np.clip((dist - rp) / (rl - rp), 0.0, 1.0)

    iris = spec.iris_level + iris_texture(spec.identity_seed)(theta - spec.rotation, rho)
    pupil_cov = _coverage(rp, dist)
    limbic_cov = _coverage(rl, dist)
    img = spec.sclera_level * (1 - limbic_cov) + limbic_cov * (
        pupil_cov * spec.pupil_level + (1 - pupil_cov) * iris
    )

    clutter = np.zeros((h, w), dtype=bool)
    lash = _eyelash_alpha(spec, xx, yy)
    img = img * (1 - lash) + EYELASH_LEVEL * lash
    clutter |= lash >= 0.5
    if spec.specular is not None:
        sx, sy, sr, level = spec.specular
        cov = _coverage(sr, np.hypot(xx - sx, yy - sy))
        img = img * (1 - cov) + level * cov
        clutter |= cov >= 0.5

    if spec.noise_sigma > 0:
        rng = _generator(spec.identity_seed, _STREAM_NOISE, spec.noise_seed)
        img = img + rng.normal(0.0, spec.noise_sigma, size=img.shape)

    truth = GroundTruth(spec.pupil, spec.limbic, spec.identity_seed, spec.rotation, clutter)
    return to_uint8(img), truth


def perturb(spec: EyeSpec, kind: str, magnitude: float) -> EyeSpec:
    """Copy of ``spec`` with one capture condition changed; identity is preserved.

    * ``dilation``: pupil radius += magnitude (pixels)
    * ``rotation``: rotation += magnitude (radians)
    * ``noise``: noise_sigma = magnitude and a fresh noise realization
    * ``clutter``: eyelash_count = magnitude
    """
    if kind == "dilation":
        p = spec.pupil
        new = dataclasses.replace(spec, pupil=_circle_or_invalid(p.cx, p.cy, p.r + magnitude))
    elif kind == "rotation":
        new = dataclasses.replace(spec, rotation=spec.rotation + float(magnitude))
    elif kind == "noise":
        new = dataclasses.replace(spec, noise_sigma=float(magnitude), noise_seed=spec.noise_seed + 1)
    elif kind == "clutter":
        new = dataclasses.replace(spec, eyelash_count=int(magnitude))
    else:
        raise SpecInvalid(f"unknown perturbation {kind!r}; expected one of {PERTURBATIONS}")
    return new.validate()


def _circle_or_invalid(cx, cy, r):
    try:
        return CircleParams(cx, cy, r)
    except ValueError as exc:
        raise SpecInvalid(str(exc)) from exc


def format_truth(truth: GroundTruth) -> str:
    p, l = truth.pupil, truth.limbic
    return (
        f"pupil {p.cx:.4f} {p.cy:.4f} {p.r:.4f}\n"
        f"limbic {l.cx:.4f} {l.cy:.4f} {l.r:.4f}\n"
        f"seed {truth.identity_seed}\n"
        f"rotation {truth.rotation!r}\n"
    )


def parse_truth(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] in ("pupil", "limbic"):
            out[parts[0]] = CircleParams(*(float(v) for v in parts[1:4]))
        elif parts[0] == "seed":
            out["seed"] = int(parts[1])
        elif parts[0] == "rotation":
            out["rotation"] = float(parts[1])
    return out
