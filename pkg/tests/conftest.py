import numpy as np
import pytest

from irisbio import kernels
from irisbio.localize import Boundaries, CircleParams
from irisbio.normalize import rubber_sheet
from irisbio.synth import EyeSpec, render_eye

BACKENDS = kernels.backends()

# verdict lines from the acceptance suite, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    """Each importable kernel implementation in turn."""
    return BACKENDS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def truth_strip(spec: EyeSpec):
    """Strip unwrapped with the renderer's own circles."""
    img, truth = render_eye(spec)
    return rubber_sheet(img, Boundaries(truth.pupil, truth.limbic))


def disk_image(h, w, cx, cy, r, inside=30, outside=200):
    """Anti-aliased filled disk."""
    yy, xx = np.mgrid[0:h, 0:w]
    cov = np.clip(r - np.hypot(xx - cx, yy - cy) + 0.5, 0.0, 1.0)
    return np.rint(outside + (inside - outside) * cov).astype(np.uint8)


def ring_edges(h, w, cx, cy, r):
    """One-pixel ring of edge pixels (rounded distance == r)."""
    yy, xx = np.mgrid[0:h, 0:w]
    return np.rint(np.hypot(xx - cx, yy - cy)) == r


__all__ = ["truth_strip", "disk_image", "ring_edges", "CircleParams", "Boundaries"]
