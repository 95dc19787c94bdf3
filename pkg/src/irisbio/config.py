"""Pipeline parameters and the ``key = value`` config file format."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields

from .errors import ConfigError

DEFAULT_SHIFTS = (-16, -12, -8, -4, 0, 4, 8, 12, 16)


@dataclass(frozen=True)
class PipelineConfig:
    # pre-processing
    blur_sigma: float = 2.0
    blur_kernel: int = 5
    pupil_threshold: int = 70
    pupil_open_radius: int = 8
    # canny on the thresholded pupil mask
    canny_low: float = 0.05
    canny_high: float = 0.15
    canny_sigma: float = 1.4
    # localization
    method: str = "cht"
    pupil_r_min: int = 20
    pupil_r_max: int = 90
    quality_gate: float = 0.8
    limbic_gap: int = 10
    limbic_step: int = 2
    limbic_extent: int = 130
    limbic_samples: int = 360
    limbic_lateral_only: bool = False
    idop_sigma_r: float = 1.5
    idop_window: int = 16
    idop_coarse_step: int = 4
    idop_samples: int = 360
    # normalization
    radial_res: int = 64
    angular_res: int = 512
    mask_dark: int = 50
    mask_bright: int = 245
    mask_edge_high: float = 0.35
    # matching
    shifts: tuple = field(default=DEFAULT_SHIFTS)
    match_threshold: float = 0.35
    min_overlap: int = 512

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.blur_sigma > 0, "blur_sigma must be > 0")
        need(self.blur_kernel >= 3 and self.blur_kernel % 2 == 1, "blur_kernel must be odd and >= 3")
        need(0 <= self.pupil_threshold <= 255, "pupil_threshold must be in [0, 255]")
        need(self.pupil_open_radius >= 0, "pupil_open_radius must be >= 0")
        need(0 < self.canny_low < self.canny_high <= 1, "need 0 < canny_low < canny_high <= 1")
        need(self.canny_sigma > 0, "canny_sigma must be > 0")
        need(self.method in ("cht", "idop"), "method must be 'cht' or 'idop'")
        need(0 < self.pupil_r_min < self.pupil_r_max, "need 0 < pupil_r_min < pupil_r_max")
        need(self.pupil_open_radius < self.pupil_r_min, "pupil_open_radius must be below pupil_r_min")
        need(0 < self.quality_gate <= 1, "quality_gate must be in (0, 1]")
        need(self.limbic_gap >= 0, "limbic_gap must be >= 0")
        need(self.limbic_step >= 1, "limbic_step must be >= 1")
        need(self.limbic_extent > self.limbic_gap, "limbic_extent must exceed limbic_gap")
        need(self.limbic_samples >= 8, "limbic_samples must be >= 8")
        need(self.idop_sigma_r > 0, "idop_sigma_r must be > 0")
        need(self.idop_window >= 0, "idop_window must be >= 0")
        need(self.idop_coarse_step >= 1, "idop_coarse_step must be >= 1")
        need(self.idop_samples >= 8, "idop_samples must be >= 8")
        need(self.radial_res >= 8 and self.radial_res % 8 == 0, "radial_res must be a positive multiple of 8")
        need(self.angular_res >= 8 and self.angular_res % 8 == 0, "angular_res must be a positive multiple of 8")
        need(0 <= self.mask_dark < self.mask_bright <= 255, "need 0 <= mask_dark < mask_bright <= 255")
        need(0 < self.mask_edge_high <= 1, "mask_edge_high must be in (0, 1]")
        need(len(self.shifts) > 0, "shifts must not be empty")
        need(all(s % 4 == 0 for s in self.shifts), "shifts must be multiples of 4")
        need(0 <= self.match_threshold <= 1, "match_threshold must be in [0, 1]")
        need(self.min_overlap >= 1, "min_overlap must be >= 1")

    def replace(self, **changes) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            elif isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, base: "PipelineConfig | None" = None) -> "PipelineConfig":
        base = base or cls()
        types = {f.name: type(getattr(base, f.name)) for f in fields(cls)}
        changes = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in types:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            try:
                changes[key] = _parse_value(types[key], value)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
        return dataclasses.replace(base, **changes)

    @classmethod
    def from_file(cls, path, base: "PipelineConfig | None" = None) -> "PipelineConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_text(text, base)


def _parse_value(kind, value: str):
    if kind is bool:
        low = value.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(value)
    if kind is int:
        return int(value)
    if kind is float:
        return float(value)
    if kind is tuple:
        return tuple(int(v) for v in value.split(",") if v.strip())
    return value
