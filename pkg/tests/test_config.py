import pytest

from irisbio.config import DEFAULT_SHIFTS, PipelineConfig
from irisbio.errors import ConfigError


def test_defaults():
    cfg = PipelineConfig()
    assert (cfg.blur_sigma, cfg.blur_kernel, cfg.pupil_threshold) == (2.0, 5, 70)
    assert (cfg.canny_low, cfg.canny_high, cfg.canny_sigma) == (0.05, 0.15, 1.4)
    assert (cfg.pupil_r_min, cfg.pupil_r_max) == (20, 90)
    assert (cfg.limbic_gap, cfg.limbic_step, cfg.limbic_extent, cfg.limbic_samples) == (10, 2, 130, 360)
    assert (cfg.radial_res, cfg.angular_res) == (64, 512)
    assert (cfg.mask_dark, cfg.mask_bright, cfg.mask_edge_high) == (50, 245, 0.35)
    assert cfg.shifts == DEFAULT_SHIFTS == tuple(range(-16, 17, 4))
    assert (cfg.match_threshold, cfg.min_overlap) == (0.35, 512)


def test_text_round_trip():
    cfg = PipelineConfig(method="idop", shifts=(-8, 0, 8), limbic_lateral_only=True, mask_dark=40)
    assert PipelineConfig.from_text(cfg.to_text()) == cfg


def test_partial_override_and_comments(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("# tuned\npupil_threshold = 60  # darker\n\nmatch_threshold=0.3\n")
    cfg = PipelineConfig.from_file(path)
    assert cfg.pupil_threshold == 60 and cfg.match_threshold == 0.3 and cfg.blur_kernel == 5


@pytest.mark.parametrize(
    "text",
    [
        "bogus = 1",
        "pupil_threshold 60",
        "pupil_threshold = dark",
        "blur_kernel = 4",
        "canny_low = 0.5",
        "shifts = 2,4",
        "method = hough",
        "pupil_open_radius = 30",
        "limbic_lateral_only = maybe",
    ],
)
def test_rejected(text):
    with pytest.raises(ConfigError):
        PipelineConfig.from_text(text)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        PipelineConfig.from_file(tmp_path / "none.cfg")
