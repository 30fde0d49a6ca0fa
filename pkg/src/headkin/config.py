"""Pipeline configuration and its plain-text (INI) representation.

A config document has a ``[pipeline]`` section and a ``[cora]`` section; the
synthetic generator adds ``[scenario]``. Recording sidecars reuse the same
format with ``[recording]`` and one ``[mount <sensor_id>]`` section per sensor.
Keys missing from a document keep their defaults.
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .errors import InvalidInputError
from .filtering import FilterMode
from .timeseries import ImpactWindow
from .wavelet import ScaleGrid


@dataclass(frozen=True)
class CoraParams:
    """Parameters of the simplified curve rating.

    Corridor half-widths are fractions of the peak reference magnitude; phase
    limits are fractions of the rated interval.
    """

    inner_corridor: float = 0.05
    outer_corridor: float = 0.5
    corridor_exponent: float = 2.0
    delta_min: float = 0.01
    delta_max: float = 0.12
    shape_exponent: float = 1.0
    size_exponent: float = 1.0
    phase_exponent: float = 1.0
    corridor_weight: float = 0.5
    correlation_weight: float = 0.5
    interval_ms: float = 100.0

    def __post_init__(self):
        if not 0 <= self.inner_corridor < self.outer_corridor:
            raise InvalidInputError("require 0 <= inner_corridor < outer_corridor")
        if not 0 <= self.delta_min < self.delta_max:
            raise InvalidInputError("require 0 <= delta_min < delta_max")
        if self.corridor_weight < 0 or self.correlation_weight < 0:
            raise InvalidInputError("CORA weights must be non-negative")
        if abs(self.corridor_weight + self.correlation_weight - 1.0) > 1e-12:
            raise InvalidInputError("CORA weights must sum to 1")


@dataclass(frozen=True)
class PipelineConfig:
    alpha: float = 1.92
    octaves: int = 10
    voices: int = 40
    threshold: float = 0.1
    cap_hz: float = 180.0
    trigger_g: float = 3.0
    pre_ms: float = 50.0
    post_ms: float = 150.0
    beta_end_ms: float = 100.0
    filter_order: int = 4
    filter_mode: FilterMode = FilterMode.ZERO_PHASE
    saturation_factor: float = 0.9
    # axes whose beta = 0 peak is below this fraction of the strongest axis are
    # treated as carrying no motion and skipped by the cutoff selection
    axis_floor: float = 0.1
    cora: CoraParams = field(default_factory=CoraParams)

    def __post_init__(self):
        object.__setattr__(self, "filter_mode", FilterMode(self.filter_mode))
        if self.filter_order not in (2, 4):
            raise InvalidInputError("filter_order must be 2 or 4")
        if not 0 < self.threshold < 1:
            raise InvalidInputError("threshold must lie in (0, 1)")
        if self.cap_hz <= 0 or self.trigger_g <= 0:
            raise InvalidInputError("cap_hz and trigger_g must be positive")
        if not 0 < self.saturation_factor <= 1:
            raise InvalidInputError("saturation_factor must lie in (0, 1]")
        if not 0 <= self.axis_floor < 1:
            raise InvalidInputError("axis_floor must lie in [0, 1)")
        self.window  # validates the window

    @property
    def window(self) -> ImpactWindow:
        return ImpactWindow(self.pre_ms / 1000, self.post_ms / 1000, self.beta_end_ms / 1000)

    @property
    def scale_grid(self) -> ScaleGrid:
        return ScaleGrid(self.alpha, self.octaves, self.voices)


def _coerce(value: str, like):
    if isinstance(like, bool):
        return value.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(like, FilterMode):
        return FilterMode(value.strip())
    if isinstance(like, int):
        return int(value)
    if isinstance(like, float):
        return float(value)
    return value.strip()


def _fmt(value) -> str:
    if isinstance(value, FilterMode):
        return value.value
    return repr(value) if isinstance(value, float) else str(value)


def _section_update(obj, section: configparser.SectionProxy | None):
    if section is None:
        return obj
    known = {f.name: getattr(obj, f.name) for f in fields(obj) if f.name != "cora"}
    changes = {}
    for key, raw in section.items():
        key = key.replace("-", "_")
        if key not in known:
            raise InvalidInputError(f"unknown config key {key!r} in [{section.name}]")
        try:
            changes[key] = _coerce(raw, known[key])
        except ValueError as exc:
            raise InvalidInputError(f"bad value for {key!r}: {raw!r}") from exc
    return replace(obj, **changes)


def parse_config(text: str, base: PipelineConfig | None = None) -> PipelineConfig:
    parser = configparser.ConfigParser()
    parser.read_string(text)
    cfg = base or PipelineConfig()
    cora = _section_update(cfg.cora, parser["cora"] if parser.has_section("cora") else None)
    cfg = _section_update(cfg, parser["pipeline"] if parser.has_section("pipeline") else None)
    return replace(cfg, cora=cora)


def load_config(path: str | Path) -> PipelineConfig:
    return parse_config(Path(path).read_text())


def config_to_text(cfg: PipelineConfig) -> str:
    lines = ["[pipeline]"]
    for key, value in asdict(cfg).items():
        if key != "cora":
            lines.append(f"{key} = {_fmt(getattr(cfg, key))}")
    lines += ["", "[cora]"]
    lines += [f"{k} = {_fmt(v)}" for k, v in asdict(cfg.cora).items()]
    return "\n".join(lines) + "\n"


def write_config(cfg: PipelineConfig, path: str | Path) -> None:
    Path(path).write_text(config_to_text(cfg))
