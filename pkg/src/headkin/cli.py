"""Command-line interface.

Subcommands::

    headkin synth       --out DIR [--config FILE] [--seed N] [--id NAME]
    headkin reconstruct REC.csv [REC.csv ...] --out DIR [--config FILE] [--jobs N] [--mode MODE]
    headkin evaluate    --headband K.csv ... --reference R.csv ... --out REPORT.json [--run run.json]
    headkin scalogram   SIGNAL.csv --out DIR [--column NAME] [--config FILE]
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import io
from .config import PipelineConfig, parse_config
from .errors import HeadkinError
from .filtering import FilterDecision, FilterMode, five_point_derivative
from .metrics import cora_score, peak_metrics
from .pipeline import reconstruct
from .report import ComparisonReport, ImpactComparison
from .synth import synthesize_impact
from .timeseries import Vec3Series, align, resultant
from .wavelet import cwt


def _config(args) -> PipelineConfig:
    cfg = PipelineConfig()
    if getattr(args, "config", None):
        cfg = parse_config(Path(args.config).read_text())
    if getattr(args, "mode", None):
        cfg = replace(cfg, filter_mode=FilterMode(args.mode))
    return cfg


def cmd_synth(args) -> int:
    text = Path(args.config).read_text() if args.config else ""
    scenario = io.parse_scenario(text)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    record, truth = synthesize_impact(scenario)
    record = replace(record, impact_id=args.id)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_recording(record, out / f"{args.id}.csv")
    io.write_kinematics(truth.angular_velocity.shifted(-truth.trigger_time), out / f"{args.id}_ref.csv")
    io.write_json(
        {
            "impact_id": args.id,
            "trigger_time": truth.trigger_time,
            "prv": truth.prv,
            "pra": truth.pra,
            "seed": scenario.seed,
            "location": scenario.location.value,
        },
        out / f"{args.id}_truth.json",
    )
    print(f"wrote {out / (args.id + '.csv')}")
    return 0


def _reconstruct_one(path: str, cfg: PipelineConfig, out: str) -> dict:
    record = io.load_recording(path)
    kin = reconstruct(record, cfg)
    kin_name = f"{record.impact_id}_kin.csv"
    io.write_kinematics(kin.angular_velocity, Path(out) / kin_name)
    io.write_kinematics(kin.angular_acceleration, Path(out) / f"{record.impact_id}_acc.csv")
    return {
        "impact_id": record.impact_id,
        "recording": str(path),
        "kinematics": kin_name,
        "location": record.location.value,
        "trigger_time": kin.trigger_time,
        "decision": kin.decision.as_dict(),
        "axis_decisions": [d.as_dict() if d else None for d in kin.axis_decisions],
        "prv": kin.prv,
        "pra": kin.pra,
        "pla": kin.pla,
    }


def cmd_reconstruct(args) -> int:
    cfg = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for p in args.recordings:
        if not Path(p).exists():
            raise FileNotFoundError(f"no such recording: {p}")
    if args.jobs > 1 and len(args.recordings) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_reconstruct_one, p, cfg, str(out)) for p in args.recordings]
            impacts = [f.result() for f in futures]
    else:
        impacts = [_reconstruct_one(p, cfg, str(out)) for p in args.recordings]
    io.write_json({"schema_version": io.SCHEMA_VERSION, "impacts": impacts}, out / "run.json")
    for imp in impacts:
        d = imp["decision"]
        print(f"{imp['impact_id']}: f0={d['f_0']:.2f} Hz ({d['branch']}) PRV={imp['prv']:.3f} PRA={imp['pra']:.1f}")
    return 0


def _window_peaks(series: Vec3Series, post: float) -> tuple[float, float]:
    p = peak_metrics(series, five_point_derivative(series), t_range=(0.0, post))
    return p.prv, p.pra


def cmd_evaluate(args) -> int:
    cfg = _config(args)
    if len(args.headband) != len(args.reference):
        raise HeadkinError("--headband and --reference need the same number of files")
    run = {}
    if args.run:
        for imp in json.loads(Path(args.run).read_text()).get("impacts", []):
            run[imp["kinematics"]] = imp
    post = cfg.post_ms / 1000
    report = ComparisonReport()
    for hb_path, ref_path in zip(args.headband, args.reference):
        hb = io.load_kinematics(hb_path)
        ref = io.load_kinematics(ref_path)
        meta = run.get(Path(hb_path).name, {})
        prv_h, pra_h = _window_peaks(hb, post)
        prv_r, pra_r = _window_peaks(ref, post)
        ref_a, hb_a = align([ref, hb], ref.dt)
        cora = cora_score(resultant(ref_a), resultant(hb_a), cfg.cora)
        report.impacts.append(
            ImpactComparison(
                impact_id=meta.get("impact_id", Path(hb_path).stem),
                location=meta.get("location", "unknown"),
                prv_headband=prv_h,
                prv_reference=prv_r,
                pra_headband=pra_h,
                pra_reference=pra_r,
                decision=FilterDecision.from_dict(meta["decision"]) if "decision" in meta else None,
                cora=cora,
            )
        )
    io.write_report(report, args.out)
    io.write_paired_peaks(report, Path(args.out).with_suffix(".peaks.csv"))
    print(f"wrote {args.out} ({len(report.impacts)} impacts)")
    return 0


def cmd_scalogram(args) -> int:
    cfg = _config(args)
    signal = io.load_signal(args.signal, args.column)
    spec = cwt(signal, cfg.scale_grid, method="fft")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.signal).stem
    io.write_scalogram_csv(spec, out / f"{stem}_scalogram.csv")
    io.write_scalogram_svg(spec, out / f"{stem}_scalogram.svg", title=stem)
    print(f"wrote {out / (stem + '_scalogram.csv')}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="headkin", description="Head rotational kinematics from a gyroscope array.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic recording with ground truth")
    p.add_argument("--config", help="INI file with a [scenario] section")
    p.add_argument("--seed", type=int)
    p.add_argument("--id", default="synth", help="impact id and file stem")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("reconstruct", help="recordings -> kinematics and run summary")
    p.add_argument("recordings", nargs="+")
    p.add_argument("--config")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--mode", choices=[m.value for m in FilterMode])
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("evaluate", help="compare headband and reference kinematics")
    p.add_argument("--headband", nargs="+", required=True)
    p.add_argument("--reference", nargs="+", required=True)
    p.add_argument("--run", help="run.json written by reconstruct")
    p.add_argument("--config")
    p.add_argument("--out", required=True, help="report path (JSON)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("scalogram", help="export the scalogram of one signal")
    p.add_argument("signal", help="CSV with a t column and value columns")
    p.add_argument("--column")
    p.add_argument("--config")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_scalogram)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (HeadkinError, OSError, ValueError) as exc:
        print(f"headkin {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
