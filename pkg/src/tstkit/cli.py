"""Command-line interface.

Subcommands: measure, segment, gate-sim, eval depth-sweep, eval scalar-fit,
serve. Errors print an ApiError JSON object on stderr; exit codes are
0 success, 2 usage error, 3 input error, 4 pipeline error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import InputError, TstKitError
from .experiments import run_depth_sweep, run_scalar_fit
from .gate import (
    CaptureDecision,
    DEFAULT_GATE_CONFIG,
    GateConfig,
    parse_stream,
    run_stream,
)
from .measure import CalibrationTable, DEFAULT_TABLE
from .pipeline import run_measurement_pipeline
from .raster import Point, denoise, enhance_contrast, load_raster, save_raster
from .report import write_scalar_fit_report, write_sweep_report
from .segment import (
    OPAQUE,
    SEMI_TRANSPARENT,
    ingest_mask,
    render_overlay,
    save_mask,
    segment_classical,
)
from .store import RecordStore

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_PIPELINE = 4

ENV_STORE_DIR = "TSTKIT_STORE_DIR"
ENV_PORT = "TSTKIT_PORT"


def _point(text: str) -> Point:
    try:
        x, y = text.split(",")
        return Point(int(x), int(y))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected X,Y integers: {text!r}") from exc


def _depth_range(text: str) -> list[float]:
    """lo:hi:step inclusive range, or a comma list of depths."""
    if ":" in text:
        try:
            lo, hi, step = (float(v) for v in text.split(":"))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"expected lo:hi:step: {text!r}") from exc
        if step <= 0 or hi < lo:
            raise argparse.ArgumentTypeError("need lo <= hi and step > 0")
        out = []
        d = lo
        while d <= hi + 1e-9:
            out.append(round(d, 6))
            d += step
        return out
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad depth list: {text!r}") from exc


def _load_table(path: str | None) -> CalibrationTable:
    return CalibrationTable.load(path) if path else DEFAULT_TABLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tstkit",
        description="TST induration capture, measurement, and interpretation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="measure an induration image")
    p.add_argument("image", help="PNG image to measure")
    p.add_argument("--depth", help="DPTH depth frame (recorded alongside)")
    p.add_argument("--mask", help="external mask PNG; skips classical segmentation")
    p.add_argument("--roi-center", type=_point, help="ROI center as X,Y")
    p.add_argument("--roi-radius", type=int, help="ROI radius in pixels")
    p.add_argument("--table", help="calibration table JSON")
    p.add_argument("--no-preprocess", action="store_true",
                   help="skip denoise and contrast enhancement")
    p.add_argument("--output", help="prefix for mask/overlay PNG dumps")

    p = sub.add_parser("segment", help="segment an image and write mask + overlays")
    p.add_argument("image")
    p.add_argument("--mask", help="external mask PNG to ingest instead")
    p.add_argument("--roi-center", type=_point)
    p.add_argument("--roi-radius", type=int)
    p.add_argument("--no-preprocess", action="store_true")
    p.add_argument("--output", required=True, help="output prefix")

    p = sub.add_parser("gate-sim", help="replay a sensor stream through the capture gate")
    p.add_argument(
        "stream",
        help="sensor records, one per line: 'timestamp_ms depth_mm pitch_deg "
        "roll_deg [cx cy radius_px]'",
    )
    p.add_argument("--config", help="gate config JSON")

    p = sub.add_parser("eval", help="run a phantom experiment")
    esub = p.add_subparsers(dest="experiment", required=True)

    ds = esub.add_parser("depth-sweep", help="measure a phantom across capture depths")
    ds.add_argument("--true-mm", type=float, default=10.0)
    ds.add_argument("--depths", type=_depth_range, default=_depth_range("175:400:5"),
                    help="lo:hi:step or comma list (default 175:400:5)")
    ds.add_argument("--trials", type=int, default=10)
    ds.add_argument("--seed", type=int, required=True)
    ds.add_argument("--px-per-mm", type=float,
                    help="scale at calibrated depth (default: table-consistent)")
    ds.add_argument("--table", help="calibration table JSON")
    ds.add_argument("--output", required=True, help="report prefix (.csv/.json/.png)")

    sf = esub.add_parser("scalar-fit", help="fit the mm/px scalar at calibrated depth")
    sf.add_argument("--true-mm", type=float, default=10.0)
    sf.add_argument("--trials", type=int, default=25)
    sf.add_argument("--seed", type=int, required=True)
    sf.add_argument("--px-per-mm", type=float)
    sf.add_argument("--output", required=True, help="report prefix (.csv/.json/.png)")

    p = sub.add_parser("serve", help="run the HTTP JSON service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int,
                   default=int(os.environ.get(ENV_PORT, "8421")))
    p.add_argument("--store",
                   default=os.environ.get(ENV_STORE_DIR, "./tstkit-store"))
    p.add_argument("--config", help="gate config JSON")
    p.add_argument("--table", help="calibration table JSON")

    return parser


def _cmd_measure(args) -> int:
    raster = load_raster(args.image)
    mask = None
    if args.mask:
        mask = ingest_mask(args.mask, raster.width, raster.height)
    result = run_measurement_pipeline(
        raster,
        mask=mask,
        roi_center=args.roi_center,
        roi_radius=args.roi_radius,
        table=_load_table(args.table),
        preprocess=not args.no_preprocess,
    )
    if args.output:
        _write_segment_outputs(raster, result.mask, args.output)
    print(json.dumps(result.measurement.to_dict(display=True)))
    return EXIT_OK


def _write_segment_outputs(raster, mask, prefix: str) -> dict:
    out = Path(prefix)
    out.parent.mkdir(parents=True, exist_ok=True)
    paths = {
        "mask": out.parent / f"{out.name}_mask.png",
        "overlay_semi": out.parent / f"{out.name}_overlay_semi.png",
        "overlay_opaque": out.parent / f"{out.name}_overlay_opaque.png",
    }
    save_mask(mask, paths["mask"])
    save_raster(render_overlay(raster, mask, SEMI_TRANSPARENT), paths["overlay_semi"])
    save_raster(render_overlay(raster, mask, OPAQUE), paths["overlay_opaque"])
    return paths


def _cmd_segment(args) -> int:
    raster = load_raster(args.image)
    if args.mask:
        mask = ingest_mask(args.mask, raster.width, raster.height)
    else:
        processed = raster if args.no_preprocess else enhance_contrast(denoise(raster))
        center = args.roi_center or Point(raster.width // 2, raster.height // 2)
        radius = args.roi_radius or int(min(raster.width, raster.height) * 0.45)
        mask = segment_classical(processed, center, radius)
    paths = _write_segment_outputs(raster, mask, args.output)
    print(json.dumps({
        "pixel_count": mask.pixel_count,
        **{k: str(v) for k, v in paths.items()},
    }))
    return EXIT_OK


def _cmd_gate_sim(args) -> int:
    try:
        text = Path(args.stream).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {args.stream}: {exc}") from exc
    cfg = DEFAULT_GATE_CONFIG
    if args.config:
        try:
            cfg = GateConfig.from_dict(
                json.loads(Path(args.config).read_text(encoding="utf-8"))
            )
        except OSError as exc:
            raise InputError(f"cannot read {args.config}: {exc}") from exc
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad gate config: {exc}") from exc
    samples = parse_stream(text)
    trace = run_stream(cfg, samples)
    captured = False
    for sample, status, decision in trace:
        flags = " ".join(
            f"{k}={'1' if v else '0'}" for k, v in status.to_dict().items()
        )
        print(f"t={sample.timestamp_ms} depth={sample.depth_mm} "
              f"pitch={sample.pitch_deg:g} roll={sample.roll_deg:g} {flags}")
        captured = decision is CaptureDecision.CAPTURE
    print("Capture" if captured else "NoCapture")
    return EXIT_OK


def _cmd_eval(args) -> int:
    if args.experiment == "depth-sweep":
        report = run_depth_sweep(
            args.true_mm,
            args.depths,
            _load_table(args.table),
            seed=args.seed,
            n_trials=args.trials,
            px_per_mm=args.px_per_mm,
        )
        paths = write_sweep_report(report, args.output)
        print(json.dumps({
            "best_depths_mm": list(report.best_depths),
            **{k: str(v) for k, v in paths.items()},
        }))
    else:
        result = run_scalar_fit(
            args.true_mm,
            args.trials,
            seed=args.seed,
            px_per_mm=args.px_per_mm,
        )
        paths = write_scalar_fit_report(result, args.output)
        print(json.dumps({
            "fitted_factor": result.fitted_factor,
            **{k: str(v) for k, v in paths.items()},
        }))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = DEFAULT_GATE_CONFIG
    if args.config:
        cfg = GateConfig.from_dict(
            json.loads(Path(args.config).read_text(encoding="utf-8"))
        )
    app = create_app(
        RecordStore(args.store), gate_config=cfg, table=_load_table(args.table)
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


_COMMANDS = {
    "measure": _cmd_measure,
    "segment": _cmd_segment,
    "gate-sim": _cmd_gate_sim,
    "eval": _cmd_eval,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(json.dumps({"code": exc.code, "message": exc.message}), file=sys.stderr)
        return EXIT_INPUT
    except TstKitError as exc:
        print(json.dumps({"code": exc.code, "message": exc.message}), file=sys.stderr)
        return EXIT_PIPELINE
    except ValueError as exc:
        print(json.dumps({"code": "invalid_value", "message": str(exc)}),
              file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
