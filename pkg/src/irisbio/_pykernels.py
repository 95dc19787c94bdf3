"""Pure numpy implementations of the hot kernels.

These are the reference versions; ``_ckernels.pyx`` must produce identical
results (bit-exact for the integer/boolean kernels, within float round-off
for ``circle_means``).
"""
import numpy as np
from scipy import ndimage

TAN_22_5 = np.sqrt(2.0) - 1.0
TAN_67_5 = np.sqrt(2.0) + 1.0

# offset (drow, dcol) toward the "positive" neighbor of each direction bin
_BIN_OFFSETS = ((0, 1), (1, 1), (1, 0), (1, -1))


def direction_bins(gx, gy):
    """Quantize gradient direction (mod 180 deg) to bins 0..3 = 0, 45, 90, 135 deg.

    Boundaries at 22.5 deg steps; exact ties go to the lower angle.
    """
    gx = np.asarray(gx, dtype=np.float64)
    gy = np.asarray(gy, dtype=np.float64)
    ax = np.abs(gx)
    ay = np.abs(gy)
    first = gx * gy >= 0
    bins = np.where(
        first,
        np.where(ay <= TAN_22_5 * ax, 0, np.where(ay <= TAN_67_5 * ax, 1, 2)),
        np.where(ay >= TAN_67_5 * ax, 2, np.where(ay >= TAN_22_5 * ax, 3, 0)),
    )
    return bins.astype(np.int8)


def _shifted(mag, drow, dcol):
    """mag[r + drow, c + dcol] with zeros outside the image."""
    h, w = mag.shape
    out = np.zeros_like(mag)
    rs = slice(max(0, -drow), h - max(0, drow))
    cs = slice(max(0, -dcol), w - max(0, dcol))
    rd = slice(max(0, drow), h - max(0, -drow))
    cd = slice(max(0, dcol), w - max(0, -dcol))
    out[rs, cs] = mag[rd, cd]
    return out


def nonmax_suppress(mag, gx, gy):
    mag = np.ascontiguousarray(mag, dtype=np.float64)
    bins = direction_bins(gx, gy)
    keep = np.zeros(mag.shape, dtype=bool)
    for b, (dr, dc) in enumerate(_BIN_OFFSETS):
        sel = bins == b
        ahead = _shifted(mag, dr, dc)
        behind = _shifted(mag, -dr, -dc)
        keep |= sel & (mag > behind) & (mag >= ahead)
    return keep & (mag > 0)


def hysteresis(strong, weak):
    """Weak pixels 8-connected (through weak pixels) to a strong pixel."""
    weak = np.asarray(weak, dtype=bool) | np.asarray(strong, dtype=bool)
    labels, n = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if n == 0:
        return np.zeros(weak.shape, dtype=bool)
    has_strong = np.zeros(n + 1, dtype=bool)
    has_strong[labels[np.asarray(strong, dtype=bool)]] = True
    has_strong[0] = False
    return has_strong[labels]


def hough_vote(ys, xs, ux, uy, r_min, r_max, height, width):
    """Gradient-directed circle voting.

    Each edge pixel casts, for every integer radius r in [r_min, r_max], one
    vote at each of the two centres (x, y) -/+ r (ux, uy), rounded half up.
    Returns an int32 array of shape (r_max - r_min + 1, height, width).
    """
    n_r = r_max - r_min + 1
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    ux = np.asarray(ux, dtype=np.float64)
    uy = np.asarray(uy, dtype=np.float64)
    flats = []
    for k in range(n_r):
        r = float(r_min + k)
        for sign in (-1.0, 1.0):
            cx = np.floor(xs + sign * r * ux + 0.5).astype(np.int64)
            cy = np.floor(ys + sign * r * uy + 0.5).astype(np.int64)
            ok = (cx >= 0) & (cx < width) & (cy >= 0) & (cy < height)
            flats.append((k * height + cy[ok]) * width + cx[ok])
    votes = np.bincount(np.concatenate(flats), minlength=n_r * height * width)
    return votes.reshape(n_r, height, width).astype(np.int32)


def box_sum3(votes):
    """Sum over the 3x3x3 neighbourhood of each cell of a 3-D int array, zero padded."""
    v = np.ascontiguousarray(votes, dtype=np.int32)
    for axis in range(3):
        out = v.copy()
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        out[tuple(lo)] += v[tuple(hi)]
        out[tuple(hi)] += v[tuple(lo)]
        v = out
    return v


def circle_means(image, cxs, cys, radii, cos_t, sin_t):
    """Mean bilinear intensity on circles, edge-clamped.

    Points are ``(cx + r cos t, cy - r sin t)``. Returns an array of shape
    (len(cxs), len(radii)).
    """
    img = np.asarray(image, dtype=np.float64)
    h, w = img.shape
    cxs = np.asarray(cxs, dtype=np.float64)[:, None, None]
    cys = np.asarray(cys, dtype=np.float64)[:, None, None]
    radii = np.asarray(radii, dtype=np.float64)[None, :, None]
    x = np.clip(cxs + radii * np.asarray(cos_t)[None, None, :], 0, w - 1)
    y = np.clip(cys - radii * np.asarray(sin_t)[None, None, :], 0, h - 1)
    x0 = np.minimum(np.floor(x).astype(np.intp), max(w - 2, 0))
    y0 = np.minimum(np.floor(y).astype(np.intp), max(h - 2, 0))
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = x - x0
    fy = y - y0
    vals = (img[y0, x0] * (1 - fx) + img[y0, x1] * fx) * (1 - fy) + (
        img[y1, x0] * (1 - fx) + img[y1, x1] * fx
    ) * fy
    return vals.mean(axis=-1)
