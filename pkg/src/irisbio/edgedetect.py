"""Sobel gradients and the Canny edge operator."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import kernels
from .errors import BadThresholds, TooSmall
from .imgcore import canny_kernel_size, gaussian_smooth

_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = _SOBEL_X.T


@dataclass(frozen=True)
class GradientField:
    gx: np.ndarray
    gy: np.ndarray
    magnitude: np.ndarray

    @property
    def shape(self):
        return self.gx.shape


def sobel_gradients(image) -> GradientField:
    """3x3 Sobel derivatives (x along columns, y along rows), edge-clamped."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 3 or img.shape[1] < 3:
        raise TooSmall(f"Sobel needs at least a 3x3 image, got {img.shape}")
    gx = ndimage.correlate(img, _SOBEL_X, mode="nearest")
    gy = ndimage.correlate(img, _SOBEL_Y, mode="nearest")
    return GradientField(gx, gy, np.hypot(gx, gy))


def canny_with_gradients(
    image,
    low_ratio: float = 0.05,
    high_ratio: float = 0.15,
    sigma: float = 1.4,
) -> tuple[np.ndarray, GradientField]:
    """Canny edge map plus the gradient field it was computed from.

    Thresholds are fractions of the maximum gradient magnitude of the
    smoothed image, so they follow global contrast.
    """
    if not 0 < low_ratio < high_ratio <= 1:
        raise BadThresholds(
            f"need 0 < low_ratio < high_ratio <= 1, got {low_ratio}, {high_ratio}"
        )
    smoothed = gaussian_smooth(image, sigma, canny_kernel_size(sigma))
    grad = sobel_gradients(smoothed)
    peak = grad.magnitude.max()
    # smoothing a flat image leaves float residue around 1e-13, not an edge
    if peak <= 1e-9 * max(1.0, float(np.abs(smoothed).max())):
        return np.zeros(grad.shape, dtype=bool), grad
    thin = kernels.nonmax_suppress(grad.magnitude, grad.gx, grad.gy)
    strong = thin & (grad.magnitude >= high_ratio * peak)
    weak = thin & (grad.magnitude >= low_ratio * peak)
    return kernels.hysteresis(strong, weak), grad


def canny(image, low_ratio: float = 0.05, high_ratio: float = 0.15, sigma: float = 1.4) -> np.ndarray:
    return canny_with_gradients(image, low_ratio, high_ratio, sigma)[0]
