"""Command-line driver: noiseless patterns, Monte Carlo runs, overlap sweeps.

Exit codes: 0 on success, 1 on usage or validation errors, 2 when a run fails.
Without ``--out-dir`` the main table or report goes to stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, detector, hilbert, montecarlo, optics

SWEEP_HEADER = list(analysis.REPORT_FIELDS)
VERIFY_HEADER = [
    "c",
    "alpha_sq",
    "beta_sq",
    "unitarity_residual",
    "image_residual",
    "trials_per_path",
    "conclusive_fraction",
    "wrong_verdicts",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row[h]) for h in header])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    g = optics.DEFAULT_GEOMETRY
    common = _Parser(add_help=False)
    common.add_argument("--overlap", type=float, default=0.5, help="detector overlap <d1|d2>")
    common.add_argument("--slit-separation", type=float, default=g.slit_separation)
    common.add_argument("--wavelength", type=float, default=g.wavelength)
    common.add_argument("--screen-distance", type=float, default=g.screen_distance)
    common.add_argument("--envelope-width", type=float, default=g.envelope_width)
    common.add_argument("--samples", type=int, default=1_000_000)
    common.add_argument("--bins", type=int, default=montecarlo.DEFAULT_BINS)
    common.add_argument("--window", type=float, default=None, help="half-width x_max in meters (default 5 w)")
    common.add_argument("--points", type=int, default=optics.DEFAULT_N_POINTS)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--streams", type=int, default=1)
    common.add_argument("--out-dir", type=Path, default=None)
    common.add_argument("--format", choices=("csv", "json"), default=None)

    parser = _Parser(prog="twoslit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("pattern", parents=[common], help="noiseless screen density")
    sub.add_parser("run", parents=[common], help="Monte Carlo experiment, histograms and report")
    sub.add_parser("duality", parents=[common], help="duality report (analytic when --samples 0)")
    for name, help_text in (
        ("sweep", "duality table over an overlap grid"),
        ("uqsd-verify", "unitarity and zero-error discrimination checks"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--from", dest="c_from", type=float, default=0.0)
        p.add_argument("--to", dest="c_to", type=float, default=1.0)
        p.add_argument("--steps", type=int, default=11)
    return parser


def _validate(args) -> optics.SlitGeometry:
    """Collect every bad flag value into one error message."""
    errors = []

    def check_overlap(name, c):
        if not (math.isfinite(c) and 0.0 <= c <= 1.0):
            errors.append(f"{name} must lie in [0, 1], got {c!r}")

    check_overlap("--overlap", args.overlap)
    lengths = {
        "--slit-separation": args.slit_separation,
        "--wavelength": args.wavelength,
        "--screen-distance": args.screen_distance,
        "--envelope-width": args.envelope_width,
    }
    for name, value in lengths.items():
        if not (math.isfinite(value) and value > 0):
            errors.append(f"{name} must be positive, got {value!r}")
    geom = None
    if not errors:
        try:
            geom = optics.SlitGeometry(
                args.slit_separation, args.wavelength, args.screen_distance, args.envelope_width
            )
        except ValueError as exc:
            errors.append(str(exc))
    if args.samples < 0:
        errors.append(f"--samples must be >= 0, got {args.samples}")
    if args.bins < montecarlo.MIN_BINS:
        errors.append(f"--bins must be >= {montecarlo.MIN_BINS}, got {args.bins}")
    if args.points < 2:
        errors.append(f"--points must be >= 2, got {args.points}")
    if not (0 <= args.seed < 2**64):
        errors.append(f"--seed must be a 64-bit unsigned integer, got {args.seed}")
    if args.streams < 1:
        errors.append(f"--streams must be >= 1, got {args.streams}")
    if args.window is not None and geom is not None:
        if args.window < geom.default_window * (1 - 1e-12):
            errors.append(f"--window must be >= 5 envelope widths ({geom.default_window!r} m)")
    if hasattr(args, "steps"):
        check_overlap("--from", args.c_from)
        check_overlap("--to", args.c_to)
        if args.steps < 1:
            errors.append(f"--steps must be >= 1, got {args.steps}")
    if errors:
        raise UsageError("invalid arguments:\n  " + "\n  ".join(errors))
    return geom


def _grid(args) -> list[float]:
    return [float(c) for c in np.linspace(args.c_from, args.c_to, args.steps)]


def _row_seed(seed: int, row: int) -> int:
    """Independent 64-bit seed for row ``row`` of a sweep."""
    return int(np.random.SeedSequence([seed, row]).generate_state(1, np.uint64)[0])


def _run_config(args, geom, c, seed) -> montecarlo.RunConfig:
    return montecarlo.RunConfig(
        c=c,
        geometry=geom,
        n_samples=args.samples,
        seed=seed,
        n_bins=args.bins,
        x_max=args.window,
        n_streams=args.streams,
    )


def _emit(outputs: dict[str, str], out_dir: Path | None, stdout_key: str, stdout) -> None:
    if out_dir is None:
        stdout.write(outputs[stdout_key])
        return
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in outputs.items():
        (out_dir / name).write_text(text)


def cmd_pattern(args, geom, stdout):
    state = detector.correlated_state(detector.make_detector_pair(args.overlap))
    curve = optics.density_curve(state, geom, args.window, args.points)
    if curve.normalization_warning:
        print(f"warning: density integrates to {curve.integral!r} on this window", file=sys.stderr)
    if args.format == "json":
        text = _json({"x_m": curve.grid.tolist(), "density_per_m": curve.values.tolist()})
        name = "pattern.json"
    else:
        text, name = curve.to_csv(), "pattern.csv"
    _emit({name: text}, args.out_dir, name, stdout)


def _run_summary(result: montecarlo.ExperimentResult) -> dict:
    return {
        "n_samples": result.config.n_samples,
        "seed": result.config.seed,
        "n_a1": result.n_a1,
        "n_a2": result.n_a2,
        "n_rejected": result.n_rejected,
        "wrong_verdicts": result.wrong_verdicts,
    }


def cmd_run(args, geom, stdout):
    result = montecarlo.run_experiment(_run_config(args, geom, args.overlap, args.seed))
    outputs = {
        "report.json": result.report.to_json(),
        "histograms.csv": montecarlo.histograms_to_csv(result.histograms),
        "summary.json": _json(_run_summary(result)),
    }
    _emit(outputs, args.out_dir, "report.json", stdout)


def cmd_sweep(args, geom, stdout):
    rows = []
    for i, c in enumerate(_grid(args)):
        if args.samples > 0:
            result = montecarlo.run_experiment(_run_config(args, geom, c, _row_seed(args.seed, i)))
            report = result.report
        else:
            report = analysis.duality_report(c)
        rows.append(report.as_dict())
    if args.format == "json":
        text, name = _json(rows), "sweep.json"
    else:
        text, name = _csv(SWEEP_HEADER, rows), "sweep.csv"
    _emit({name: text}, args.out_dir, name, stdout)


def cmd_uqsd_verify(args, geom, stdout):
    rows = []
    for i, c in enumerate(_grid(args)):
        u = detector.build_uqsd(c)
        rng = montecarlo.stream_rng(_row_seed(args.seed, i), 0)
        paths = np.repeat(np.array([1, 2], dtype=np.int8), args.samples)
        verdicts = detector.discriminate_batch(paths, u, rng)
        conclusive = verdicts != detector.PathVerdict.INCONCLUSIVE
        rows.append(
            {
                "c": c,
                "alpha_sq": u.alpha**2,
                "beta_sq": u.beta**2,
                "unitarity_residual": hilbert.unitarity_residual(u.matrix),
                "image_residual": u.image_residual(),
                "trials_per_path": args.samples,
                "conclusive_fraction": float(conclusive.mean()) if paths.size else None,
                "wrong_verdicts": int(np.count_nonzero(conclusive & (verdicts != paths))),
            }
        )
    if args.format == "csv":
        text, name = _csv(VERIFY_HEADER, rows), "uqsd_verify.csv"
    else:
        text, name = _json(rows), "uqsd_verify.json"
    _emit({name: text}, args.out_dir, name, stdout)


def cmd_duality(args, geom, stdout):
    if args.samples > 0:
        report = montecarlo.run_experiment(_run_config(args, geom, args.overlap, args.seed)).report
    else:
        report = analysis.duality_report(args.overlap)
    _emit({"report.json": report.to_json()}, args.out_dir, "report.json", stdout)


COMMANDS = {
    "pattern": cmd_pattern,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "uqsd-verify": cmd_uqsd_verify,
    "duality": cmd_duality,
}


def run_cli(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        geom = _validate(args)
    except UsageError as exc:
        print(exc, file=stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args, geom, stdout)
    except Exception as exc:  # noqa: BLE001
        print(f"twoslit {args.command}: {type(exc).__name__}: {exc}", file=stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
