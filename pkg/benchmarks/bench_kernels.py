"""Compare the compiled and numpy kernel backends on a synthetic eye.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-N time per kernel for each importable backend, the
speed-up, and the end-to-end pipeline time with each backend swapped in.
"""
import argparse
import timeit
import warnings

import numpy as np

from irisbio import kernels
from irisbio.edgedetect import canny_kernel_size, gaussian_smooth, sobel_gradients
from irisbio.localize import PupilQualityWarning, pupil_stages
from irisbio.pipeline import process_image
from irisbio.synth import EyeSpec, render_eye

KERNELS = ("direction_bins", "nonmax_suppress", "hysteresis", "hough_vote", "box_sum3", "circle_means")


def workloads(img):
    """Argument tuples for each kernel, taken from a real pupil search."""
    st = pupil_stages(img)
    mask = st.dark.astype(np.float64) * 255
    grad = sobel_gradients(gaussian_smooth(mask, 1.0, canny_kernel_size(1.0)))
    thin = kernels.nonmax_suppress(grad.magnitude, grad.gx, grad.gy)
    peak = grad.magnitude.max()
    ys, xs = np.nonzero(st.edges & (grad.magnitude > 0))
    mag = grad.magnitude[ys, xs]
    h, w = img.shape
    vote_args = (ys.astype(float), xs.astype(float), grad.gx[ys, xs] / mag, grad.gy[ys, xs] / mag, 20, 100, h, w)
    votes = kernels.hough_vote(*vote_args)
    theta = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    cx, cy = np.meshgrid(np.arange(150.0, 171.0), np.arange(130.0, 151.0))
    return {
        "direction_bins": (grad.gx, grad.gy),
        "nonmax_suppress": (grad.magnitude, grad.gx, grad.gy),
        "hysteresis": (thin & (grad.magnitude >= 0.2 * peak), thin & (grad.magnitude >= 0.1 * peak)),
        "hough_vote": vote_args,
        "box_sum3": (votes,),
        "circle_means": (img.astype(np.float64), cx.ravel(), cy.ravel(), np.arange(20.0, 80.0), np.cos(theta), np.sin(theta)),
    }


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def pipeline_time(impl, img, repeat):
    saved = {name: getattr(kernels, name) for name in KERNELS}
    try:
        for name in KERNELS:
            setattr(kernels, name, getattr(impl, name))
        return best_of(lambda: process_image(img), repeat)
    finally:
        for name, fn in saved.items():
            setattr(kernels, name, fn)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()
    warnings.simplefilter("ignore", PupilQualityWarning)

    img, _ = render_eye(EyeSpec(identity_seed=args.seed, noise_sigma=8, noise_seed=args.seed))
    impls = kernels.backends()
    work = workloads(img)
    names = sorted(impls)
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':<18}" + "".join(f"{n:>12}" for n in names) + ("     speed-up" if len(names) == 2 else ""))
    rows = [(k, [best_of(lambda f=getattr(impls[n], k), a=work[k]: f(*a), args.repeat) for n in names]) for k in KERNELS]
    rows.append(("full pipeline", [pipeline_time(impls[n], img, args.repeat) for n in names]))
    for label, times in rows:
        line = f"{label:<18}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            # names are sorted, so times are (cython, python)
            line += f"{times[1] / times[0]:>12.1f}x"
        print(line)


if __name__ == "__main__":
    main()
