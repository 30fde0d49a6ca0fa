"""Reading and writing recordings, kinematics, reports, scenarios and scalograms.

Recording CSV
    Header ``sensor_id,channel,t,x,y,z``; ``channel`` is one of ``gyro``,
    ``accel_lo``, ``accel_hi``. Rows of one stream must have strictly increasing,
    uniformly spaced ``t`` (seconds). Angular velocity is in rad/s, acceleration
    in m/s^2, both in the sensor frame.

Recording sidecar (``<stem>.ini`` next to the CSV)
    ``[recording]`` with optional ``location``, ``impact_id`` and
    ``trigger_time``; one ``[mount <sensor_id>]`` per sensor with
    ``rotation`` (nine comma-separated values, row-major, sensor -> head) and
    ``position_angle`` (degrees).

Kinematics CSV
    Header ``t,x,y,z``; one head-frame vector per row.

All floats are written with ``repr`` so text files reload bit-exactly.
"""

from __future__ import annotations

import configparser
import csv
import json
import math
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from .errors import RecordingParseError, SchemaError
from .fusion import ImpactLocation, ImpactRecord, SensorMount, SensorStreams
from .report import SCHEMA_VERSION, ComparisonReport
from .synth import SyntheticScenario
from .timeseries import ScalarSeries, Vec3Series
from .wavelet import WaveletSpectrum, scalogram

RECORDING_HEADER = ("sensor_id", "channel", "t", "x", "y", "z")
KINEMATICS_HEADER = ("t", "x", "y", "z")
CHANNELS = ("gyro", "accel_lo", "accel_hi")
# tolerated deviation of a single time step from the stream's mean step
STEP_TOLERANCE = 1e-6


def sidecar_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".ini")


def _series_from_rows(times: list[float], values: list[tuple[float, float, float]], what: str) -> Vec3Series:
    t = np.asarray(times)
    if t.size == 1:
        raise SchemaError(f"{what}: a stream needs at least two samples")
    steps = np.diff(t)
    if np.any(steps <= 0):
        raise SchemaError(f"{what}: timestamps are not strictly increasing")
    dt = (t[-1] - t[0]) / (t.size - 1)
    if np.max(np.abs(steps - dt)) > STEP_TOLERANCE * dt + 1e-12:
        raise SchemaError(f"{what}: timestamps are not uniformly spaced")
    return Vec3Series(float(t[0]), dt, np.asarray(values))


def _float(text: str, path, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise RecordingParseError(path, line, f"{column} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise RecordingParseError(path, line, f"{column} is not finite: {text!r}")
    return value


def _read_rows(path: Path, header: tuple[str, ...]):
    """Yield ``(line_number, row)`` for every non-blank data row."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or tuple(c.strip() for c in first) != header:
            raise RecordingParseError(path, 1, f"expected header {','.join(header)}")
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise RecordingParseError(path, reader.line_num, f"expected {len(header)} columns, got {len(row)}")
            yield reader.line_num, row


def _read_mounts(path: Path) -> tuple[configparser.ConfigParser, dict[str, SensorMount]]:
    side = sidecar_path(path)
    if not side.exists():
        raise SchemaError(f"{path}: missing sidecar {side}")
    parser = configparser.ConfigParser()
    parser.read(side)
    mounts = {}
    for name in parser.sections():
        if not name.startswith("mount "):
            continue
        sid = name[len("mount "):].strip()
        sec = parser[name]
        try:
            rot = [float(v) for v in sec["rotation"].split(",")]
            angle = float(sec.get("position_angle", "0"))
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"{side}: bad [{name}] section: {exc}") from None
        if len(rot) != 9:
            raise SchemaError(f"{side}: [{name}] rotation needs 9 values, got {len(rot)}")
        mounts[sid] = SensorMount(sid, np.reshape(rot, (3, 3)), angle)
    return parser, mounts


def load_recording(path: str | Path) -> ImpactRecord:
    """Parse a recording CSV and its sidecar into an :class:`ImpactRecord`.

    Sensors appear in the order of their first row. Raises
    :class:`RecordingParseError` for malformed rows and :class:`SchemaError` for
    structural problems (timestamps, missing mounts or gyro streams).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such recording: {path}")
    parser, mounts = _read_mounts(path)

    streams: dict[tuple[str, str], tuple[list, list]] = {}
    order: list[str] = []
    for line, row in _read_rows(path, RECORDING_HEADER):
        sid, channel = row[0].strip(), row[1].strip()
        if not sid:
            raise RecordingParseError(path, line, "empty sensor_id")
        if channel not in CHANNELS:
            raise RecordingParseError(path, line, f"unknown channel {channel!r}")
        t = _float(row[2], path, line, "t")
        vec = tuple(_float(row[3 + k], path, line, "xyz"[k]) for k in range(3))
        if sid not in order:
            order.append(sid)
        times, values = streams.setdefault((sid, channel), ([], []))
        times.append(t)
        values.append(vec)
    if not order:
        raise SchemaError(f"{path}: no data rows")

    sensors = {}
    for sid in order:
        if sid not in mounts:
            raise SchemaError(f"{path}: sensor {sid!r} has no [mount {sid}] section")
        if (sid, "gyro") not in streams:
            raise SchemaError(f"{path}: sensor {sid!r} has no gyro stream")
        parts = {
            ch: _series_from_rows(*streams[(sid, ch)], f"{path} {sid}/{ch}")
            for ch in CHANNELS
            if (sid, ch) in streams
        }
        sensors[sid] = SensorStreams(**parts)
    extra = sorted(set(mounts) - set(order))
    if extra:
        raise SchemaError(f"{path}: mounts without data: {extra}")

    rec = parser["recording"] if parser.has_section("recording") else {}
    trigger = rec.get("trigger_time")
    try:
        location = ImpactLocation(rec.get("location", "unknown"))
    except ValueError:
        raise SchemaError(f"{path}: unknown location {rec.get('location')!r}") from None
    return ImpactRecord(
        sensors,
        tuple(mounts[sid] for sid in order),
        float(trigger) if trigger else None,
        location,
        rec.get("impact_id", path.stem),
    )


def write_recording(record: ImpactRecord, path: str | Path) -> None:
    """Write ``record`` as a recording CSV plus its sidecar."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORDING_HEADER)
        for mount in record.mounts:
            s = record.sensors[mount.sensor_id]
            for channel in CHANNELS:
                series = getattr(s, channel)
                if series is None:
                    continue
                for t, v in zip(series.times, series.samples):
                    w.writerow([mount.sensor_id, channel, repr(float(t)), *(repr(float(c)) for c in v)])

    parser = configparser.ConfigParser()
    parser["recording"] = {"location": record.location.value, "impact_id": record.impact_id}
    if record.trigger_time is not None:
        parser["recording"]["trigger_time"] = repr(float(record.trigger_time))
    for m in record.mounts:
        parser[f"mount {m.sensor_id}"] = {
            "rotation": ", ".join(repr(float(v)) for v in m.rotation.ravel()),
            "position_angle": repr(m.position_angle),
        }
    with open(sidecar_path(path), "w") as fh:
        parser.write(fh)


def write_kinematics(series: Vec3Series, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(KINEMATICS_HEADER)
        for t, v in zip(series.times, series.samples):
            w.writerow([repr(float(t)), *(repr(float(c)) for c in v)])


def load_kinematics(path: str | Path) -> Vec3Series:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such kinematics file: {path}")
    times, values = [], []
    for line, row in _read_rows(path, KINEMATICS_HEADER):
        times.append(_float(row[0], path, line, "t"))
        values.append(tuple(_float(row[1 + k], path, line, "xyz"[k]) for k in range(3)))
    if not times:
        raise SchemaError(f"{path}: no data rows")
    return _series_from_rows(times, values, str(path))


def load_signal(path: str | Path, column: str | None = None):
    """Read one column of a ``t,...`` CSV as a :class:`ScalarSeries`.

    ``column`` defaults to the first column after ``t``.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such signal file: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [c.strip() for c in next(reader, [])]
        if len(header) < 2 or header[0] != "t":
            raise RecordingParseError(path, 1, "expected a header starting with t and at least one value column")
        name = column or header[1]
        if name not in header[1:]:
            raise SchemaError(f"{path}: no column {name!r}")
        k = header.index(name)
        times, values = [], []
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise RecordingParseError(path, reader.line_num, f"expected {len(header)} columns, got {len(row)}")
            times.append(_float(row[0], path, reader.line_num, "t"))
            values.append(_float(row[k], path, reader.line_num, name))
    if not times:
        raise SchemaError(f"{path}: no data rows")
    vec = _series_from_rows(times, [(v, 0.0, 0.0) for v in values], str(path))
    return ScalarSeries(vec.start_time, vec.dt, vec.samples[:, 0])


def write_report(report: ComparisonReport | dict, path: str | Path) -> None:
    """Write a report as JSON. Key order is fixed; floats round-trip exactly."""
    doc = report.as_dict() if isinstance(report, ComparisonReport) else report
    text = json.dumps(doc, indent=2, allow_nan=False)
    Path(path).write_text(text + "\n")


def load_report(path: str | Path) -> dict:
    doc = json.loads(Path(path).read_text())
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"{path}: not a version {SCHEMA_VERSION} report")
    return doc


def write_json(doc: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, allow_nan=False) + "\n")


def _parse_tuple(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace("(", "").replace(")", "").split(",") if v.strip())


def parse_scenario(text: str, base: SyntheticScenario | None = None) -> SyntheticScenario:
    """Build a scenario from the ``[scenario]`` section of a config document."""
    parser = configparser.ConfigParser()
    parser.read_string(text)
    scenario = base or SyntheticScenario()
    if not parser.has_section("scenario"):
        return scenario
    known = {f.name: getattr(scenario, f.name) for f in fields(scenario)}
    changes = {}
    for key, raw in parser["scenario"].items():
        key = key.replace("-", "_")
        if key not in known:
            raise SchemaError(f"unknown scenario key {key!r}")
        like = known[key]
        try:
            if isinstance(like, tuple):
                changes[key] = _parse_tuple(raw)
            elif isinstance(like, ImpactLocation):
                changes[key] = ImpactLocation(raw.strip())
            elif isinstance(like, int):
                changes[key] = int(raw)
            else:
                changes[key] = float(raw)
        except ValueError as exc:
            raise SchemaError(f"bad value for scenario key {key!r}: {raw!r}") from exc
    return replace(scenario, **changes)


def scenario_to_text(scenario: SyntheticScenario) -> str:
    lines = ["[scenario]"]
    for f in fields(scenario):
        v = getattr(scenario, f.name)
        if isinstance(v, tuple):
            v = ", ".join(repr(x) for x in v)
        elif isinstance(v, ImpactLocation):
            v = v.value
        elif isinstance(v, float):
            v = repr(v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


def write_scalogram_csv(spectrum: WaveletSpectrum, path: str | Path, include_aliased: bool = False) -> None:
    """Magnitudes as a table: one row per frequency (descending), one column per
    shift in milliseconds."""
    mag, freqs = scalogram(spectrum)
    keep = np.ones(freqs.size, bool) if include_aliased else ~spectrum.above_nyquist
    order = np.argsort(-freqs[keep])
    freqs, mag = freqs[keep][order], mag[:, keep][:, order]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["freq_hz", *(repr(float(b * 1000)) for b in spectrum.betas)])
        for i, f in enumerate(freqs):
            w.writerow([repr(float(f)), *(repr(float(v)) for v in mag[:, i])])


def write_scalogram_svg(spectrum: WaveletSpectrum, path: str | Path, title: str | None = None) -> None:
    """Heat map of ``|w|`` against shift (ms) and log-scaled frequency."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    mag, freqs = scalogram(spectrum)
    keep = ~spectrum.above_nyquist
    order = np.argsort(freqs[keep])
    freqs, mag = freqs[keep][order], mag[:, keep][:, order]
    fig, ax = plt.subplots(figsize=(7, 4))
    mesh = ax.pcolormesh(spectrum.betas * 1000, freqs, mag.T, shading="nearest", cmap="viridis", rasterized=True)
    ax.set_yscale("log")
    ax.set_xlabel("shift (ms)")
    ax.set_ylabel("frequency (Hz)")
    if title:
        ax.set_title(title)
    fig.colorbar(mesh, ax=ax, label="|w|")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def write_paired_peaks(report: ComparisonReport, path: str | Path) -> None:
    """One row per impact with headband and reference PRV/PRA, for regression plots."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["impact_id", "location", "prv_reference", "prv_headband", "pra_reference", "pra_headband"])
        for c in report.impacts:
            w.writerow([c.impact_id, c.location, *(repr(float(v)) for v in
                        (c.prv_reference, c.prv_headband, c.pra_reference, c.pra_headband))])
