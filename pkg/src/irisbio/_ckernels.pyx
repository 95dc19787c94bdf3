# cython: language_level=3
"""Compiled versions of the kernels in ``_pykernels``. Same signatures."""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, sqrt, fabs

cnp.import_array()

cdef double TAN_22_5 = sqrt(2.0) - 1.0
cdef double TAN_67_5 = sqrt(2.0) + 1.0


cdef inline int _bin(double gx, double gy) nogil:
    cdef double ax = fabs(gx)
    cdef double ay = fabs(gy)
    if gx * gy >= 0:
        if ay <= TAN_22_5 * ax:
            return 0
        if ay <= TAN_67_5 * ax:
            return 1
        return 2
    if ay >= TAN_67_5 * ax:
        return 2
    if ay >= TAN_22_5 * ax:
        return 3
    return 0


def direction_bins(gx, gy):
    cdef double[:, ::1] gxv = np.ascontiguousarray(gx, dtype=np.float64)
    cdef double[:, ::1] gyv = np.ascontiguousarray(gy, dtype=np.float64)
    cdef Py_ssize_t h = gxv.shape[0], w = gxv.shape[1], i, j
    out = np.empty((h, w), dtype=np.int8)
    cdef cnp.int8_t[:, ::1] ov = out
    for i in range(h):
        for j in range(w):
            ov[i, j] = _bin(gxv[i, j], gyv[i, j])
    return out


def nonmax_suppress(mag, gx, gy):
    cdef double[:, ::1] m = np.ascontiguousarray(mag, dtype=np.float64)
    cdef double[:, ::1] gxv = np.ascontiguousarray(gx, dtype=np.float64)
    cdef double[:, ::1] gyv = np.ascontiguousarray(gy, dtype=np.float64)
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1], i, j
    cdef int b, dr, dc
    cdef double v, ahead, behind
    cdef int dr_tab[4]
    cdef int dc_tab[4]
    dr_tab[:] = [0, 1, 1, 1]
    dc_tab[:] = [1, 1, 0, -1]
    out = np.zeros((h, w), dtype=np.bool_)
    cdef cnp.npy_bool[:, ::1] ov = out
    with nogil:
        for i in range(h):
            for j in range(w):
                v = m[i, j]
                if v <= 0:
                    continue
                b = _bin(gxv[i, j], gyv[i, j])
                dr = dr_tab[b]
                dc = dc_tab[b]
                if 0 <= i + dr < h and 0 <= j + dc < w:
                    ahead = m[i + dr, j + dc]
                else:
                    ahead = 0.0
                if 0 <= i - dr < h and 0 <= j - dc < w:
                    behind = m[i - dr, j - dc]
                else:
                    behind = 0.0
                if v > behind and v >= ahead:
                    ov[i, j] = 1
    return out


def hysteresis(strong, weak):
    cdef cnp.npy_bool[:, ::1] s = np.ascontiguousarray(strong, dtype=np.bool_)
    cdef cnp.npy_bool[:, ::1] wk = np.ascontiguousarray(
        np.asarray(weak, dtype=np.bool_) | np.asarray(strong, dtype=np.bool_))
    cdef Py_ssize_t h = s.shape[0], w = s.shape[1], i, j, top, r, c, rr, cc
    out = np.zeros((h, w), dtype=np.bool_)
    cdef cnp.npy_bool[:, ::1] ov = out
    stack = np.empty(max(h * w, 1), dtype=np.intp)
    cdef Py_ssize_t[::1] st = stack
    cdef int di, dj
    top = 0
    for i in range(h):
        for j in range(w):
            if s[i, j] and not ov[i, j]:
                ov[i, j] = 1
                st[top] = i * w + j
                top += 1
                while top > 0:
                    top -= 1
                    r = st[top] // w
                    c = st[top] % w
                    for di in range(-1, 2):
                        rr = r + di
                        if rr < 0 or rr >= h:
                            continue
                        for dj in range(-1, 2):
                            cc = c + dj
                            if cc < 0 or cc >= w:
                                continue
                            if wk[rr, cc] and not ov[rr, cc]:
                                ov[rr, cc] = 1
                                st[top] = rr * w + cc
                                top += 1
    return out


def hough_vote(ys, xs, ux, uy, int r_min, int r_max, int height, int width):
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(ys, dtype=np.float64)
    cdef double[::1] uxv = np.ascontiguousarray(ux, dtype=np.float64)
    cdef double[::1] uyv = np.ascontiguousarray(uy, dtype=np.float64)
    cdef int n_r = r_max - r_min + 1
    votes = np.zeros((n_r, height, width), dtype=np.int32)
    cdef cnp.int32_t[:, :, ::1] vv = votes
    cdef Py_ssize_t n = xv.shape[0], p
    cdef int k, s, cx, cy
    cdef double r, sign
    with nogil:
        for k in range(n_r):
            r = <double>(r_min + k)
            for s in range(2):
                sign = -1.0 if s == 0 else 1.0
                for p in range(n):
                    cx = <int>floor(xv[p] + sign * r * uxv[p] + 0.5)
                    cy = <int>floor(yv[p] + sign * r * uyv[p] + 0.5)
                    if 0 <= cx < width and 0 <= cy < height:
                        vv[k, cy, cx] += 1
    return votes


def box_sum3(votes):
    cdef cnp.int32_t[:, :, ::1] v = np.ascontiguousarray(votes, dtype=np.int32)
    cdef Py_ssize_t n0 = v.shape[0], n1 = v.shape[1], n2 = v.shape[2], a, b, c
    tmp1 = np.empty((n0, n1, n2), dtype=np.int32)
    tmp2 = np.empty((n0, n1, n2), dtype=np.int32)
    cdef cnp.int32_t[:, :, ::1] t1 = tmp1
    cdef cnp.int32_t[:, :, ::1] t2 = tmp2
    cdef cnp.int32_t acc
    with nogil:
        # along axis 2
        for a in range(n0):
            for b in range(n1):
                for c in range(n2):
                    acc = v[a, b, c]
                    if c > 0:
                        acc = acc + v[a, b, c - 1]
                    if c + 1 < n2:
                        acc = acc + v[a, b, c + 1]
                    t1[a, b, c] = acc
        # along axis 1
        for a in range(n0):
            for b in range(n1):
                for c in range(n2):
                    acc = t1[a, b, c]
                    if b > 0:
                        acc = acc + t1[a, b - 1, c]
                    if b + 1 < n1:
                        acc = acc + t1[a, b + 1, c]
                    t2[a, b, c] = acc
        # along axis 0, back into t1
        for a in range(n0):
            for b in range(n1):
                for c in range(n2):
                    acc = t2[a, b, c]
                    if a > 0:
                        acc = acc + t2[a - 1, b, c]
                    if a + 1 < n0:
                        acc = acc + t2[a + 1, b, c]
                    t1[a, b, c] = acc
    return tmp1


def circle_means(image, cxs, cys, radii, cos_t, sin_t):
    cdef double[:, ::1] img = np.ascontiguousarray(image, dtype=np.float64)
    cdef double[::1] cxv = np.ascontiguousarray(cxs, dtype=np.float64)
    cdef double[::1] cyv = np.ascontiguousarray(cys, dtype=np.float64)
    cdef double[::1] rv = np.ascontiguousarray(radii, dtype=np.float64)
    cdef double[::1] ct = np.ascontiguousarray(cos_t, dtype=np.float64)
    cdef double[::1] stv = np.ascontiguousarray(sin_t, dtype=np.float64)
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t nc = cxv.shape[0], nr = rv.shape[0], nt = ct.shape[0]
    cdef Py_ssize_t a, b, t, x0, y0, x1, y1
    cdef Py_ssize_t xmax = w - 2 if w >= 2 else 0
    cdef Py_ssize_t ymax = h - 2 if h >= 2 else 0
    cdef double x, y, fx, fy, acc
    out = np.empty((nc, nr), dtype=np.float64)
    cdef double[:, ::1] ov = out
    with nogil:
        for a in range(nc):
            for b in range(nr):
                acc = 0.0
                for t in range(nt):
                    x = cxv[a] + rv[b] * ct[t]
                    y = cyv[a] - rv[b] * stv[t]
                    if x < 0:
                        x = 0
                    elif x > w - 1:
                        x = w - 1
                    if y < 0:
                        y = 0
                    elif y > h - 1:
                        y = h - 1
                    x0 = <Py_ssize_t>floor(x)
                    y0 = <Py_ssize_t>floor(y)
                    if x0 > xmax:
                        x0 = xmax
                    if y0 > ymax:
                        y0 = ymax
                    x1 = x0 + 1 if x0 + 1 < w else w - 1
                    y1 = y0 + 1 if y0 + 1 < h else h - 1
                    fx = x - x0
                    fy = y - y0
                    acc += (img[y0, x0] * (1 - fx) + img[y0, x1] * fx) * (1 - fy) + \
                           (img[y1, x0] * (1 - fx) + img[y1, x1] * fx) * fy
                ov[a, b] = acc / nt
    return out
