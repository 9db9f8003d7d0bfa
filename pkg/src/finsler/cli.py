"""
Command-line front end.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on a
configuration error (diagnostic on standard error).
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

import finsler.suites  # noqa: F401
from finsler._internal.registry import CheckRegistry
from finsler._internal.utils import parse_vector, serialize_data
from finsler.anisotropy import norm_from_spec
from finsler.config import VERSION, NormSpec, RunConfig, load_json
from finsler.dual_geometry import (
    DualGauge,
    wulff_volume,
    wulff_volume_monte_carlo,
)
from finsler.run_context import RunContext
from finsler.types import (
    ConfigError,
    FinslerException,
    VerificationReport,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

CURVE_FIELDS = ["radius", "sup_remainder", "weighted_gradient"]
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# subcommands that run one suite with the shared run flags
SUITE_ALIASES = {
    "verify-solution": "residual",
    "quantization": "quantization",
    "pohozaev": "pohozaev",
    "asymptotics": "asymptotics",
    "isoperimetric": "isoperimetric",
}


def _add_norm_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--norm", help="norm spec JSON file")
    parser.add_argument("--dim", type=int, help="ambient dimension N")


def _add_run_flags(parser: argparse.ArgumentParser, suite: bool = True):
    parser.add_argument("--config", help="RunConfig JSON file")
    _add_norm_flags(parser)
    parser.add_argument("--lambda", dest="lam", type=float, help="λ > 0")
    parser.add_argument("--center", help="x0 as comma-separated values")
    if suite:
        parser.add_argument(
            "--suite", help="suite names, comma-separated, or 'all'"
        )
    parser.add_argument("--rtol", type=float, help="quadrature tolerance")
    parser.add_argument("--mc-samples", type=int, help="Monte Carlo samples")
    parser.add_argument("--seed", type=int, help="run seed")
    parser.add_argument(
        "--y",
        action="append",
        help="Pohozaev dilation center, comma-separated; repeatable",
    )
    parser.add_argument("--out", help="report JSON path")
    parser.add_argument("--csv", help="asymptotics curve CSV path")
    parser.add_argument(
        "--deterministic",
        action="store_true",
        default=None,
        help="omit timings and log from the report",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finsler",
        description="Anisotropic norm geometry and Liouville identities.",
    )
    parser.add_argument("--version", action="version", version=VERSION)
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="debug logging"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    _add_run_flags(commands.add_parser("verify", help="run suites"))
    suite = commands.add_parser("suite", help="run one suite by name")
    suite.add_argument("name", help="suite name, or 'all'")
    _add_run_flags(suite, suite=False)
    for command, name in SUITE_ALIASES.items():
        _add_run_flags(
            commands.add_parser(command, help=f"run the {name} suite"),
            suite=False,
        )

    dual = commands.add_parser("dual-norm", help="evaluate H0 and Ĥ0")
    _add_norm_flags(dual)
    dual.add_argument(
        "--point",
        action="append",
        required=True,
        help="comma-separated point; repeatable",
    )

    volume = commands.add_parser("wulff-volume", help="|B_1^{Ĥ0}|")
    _add_norm_flags(volume)
    volume.add_argument("--mc-samples", type=int, default=2**20)
    volume.add_argument("--seed", type=int, default=0)

    report = commands.add_parser("report", help="aggregate prior reports")
    report.add_argument("reports", nargs="+", help="report JSON files")
    report.add_argument("--out", help="aggregated report path")

    serve = commands.add_parser("serve", help="serve the HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _overrides(args: argparse.Namespace, suites: Optional[List[str]]):
    dimension = args.dim
    if dimension is None and args.norm:
        # a norm file of fixed dimension sets N unless --dim is given
        dimension = NormSpec.parse_obj(load_json(args.norm)).dimension
    solution: Dict[str, Any] = {"N": dimension, "lambda": args.lam}
    if args.center:
        solution["center"] = parse_vector(args.center)
    quadrature = {
        "relative_tolerance": args.rtol,
        "mc_samples": args.mc_samples,
        "seed": args.seed,
    }
    return {
        "norm_path": args.norm,
        "solution": solution,
        "suites": suites,
        "quadrature": quadrature,
        "pohozaev_points": (
            [parse_vector(y) for y in args.y] if args.y else None
        ),
        "out": args.out,
        "csv": args.csv,
        "deterministic": args.deterministic,
    }


def _selected_suites(args: argparse.Namespace) -> Optional[List[str]]:
    if args.command == "suite":
        return [args.name]
    if args.command in SUITE_ALIASES:
        return [SUITE_ALIASES[args.command]]
    if args.suite:
        return [s.strip() for s in args.suite.split(",") if s.strip()]
    return None


def render_summary(report: VerificationReport) -> str:
    """Fixed-width table of check results."""
    rows = [f"{'check':<28} {'status':<6} {'rel_err':>12} {'tol':>12}"]
    for check in sorted(report.checks, key=lambda c: c.name):
        rows.append(
            f"{check.name:<28} {'PASS' if check.passed else 'FAIL':<6} "
            f"{_worst(check.rel_err):>12} {_worst(check.tolerance):>12}"
        )
    rows.append(
        f"{len(report.checks)} checks, "
        f"{sum(not c.passed for c in report.checks)} failed"
    )
    return "\n".join(rows)


def _worst(value) -> str:
    values = value if isinstance(value, list) else [value]
    try:
        return f"{max(float(v) for v in values):.3e}"
    except (TypeError, ValueError):
        return str(value)


def write_report(report: VerificationReport, path: str, deterministic: bool):
    data = serialize_data(report.to_dict(deterministic))
    text = json.dumps(data, sort_keys=True, indent=2)
    Path(path).write_text(text + "\n")


def write_curve(report: VerificationReport, path: str) -> bool:
    """Write the asymptotics curve as CSV; False when no curve exists."""
    for check in report.checks:
        curve = check.details.get("curve")
        if curve:
            with open(path, "w", newline="") as handle:
                writer = csv.DictWriter(handle, fieldnames=CURVE_FIELDS)
                writer.writeheader()
                writer.writerows(curve)
            return True
    logging.warning(f"No asymptotics curve in the report; {path} not written")
    return False


def run(config: RunConfig) -> int:
    """
    Execute the configured suites, write outputs and print the summary.

    Returns:
        int: 0 if every check passed, 1 otherwise.

    Raises:
        ConfigError: on unknown suites.
        FinslerException: if the norm or solution cannot be built.
    """
    checks = CheckRegistry().select(config.suites)
    ctx = RunContext.from_config(config)
    report = ctx.run(checks)
    if config.out:
        write_report(report, config.out, config.deterministic)
    if config.csv:
        write_curve(report, config.csv)
    print(render_summary(report))
    return EXIT_OK if report.passed else EXIT_FAILED


def _norm(args: argparse.Namespace):
    if not args.norm:
        raise ConfigError("--norm is required", output={})
    spec = NormSpec.parse_obj(load_json(args.norm))
    return norm_from_spec(spec, args.dim)


def dual_norm(args: argparse.Namespace) -> int:
    gauge = DualGauge(_norm(args))
    points = np.array([parse_vector(p) for p in args.point])
    data = {
        "points": points,
        "H0": gauge.value(points),
        "H0_reversed": gauge.reversed_value(points),
        "mode": gauge.mode,
    }
    print(json.dumps(serialize_data(data), sort_keys=True, indent=2))
    return EXIT_OK


def wulff_volume_command(args: argparse.Namespace) -> int:
    gauge = DualGauge(_norm(args))
    data = {
        "polar": wulff_volume(gauge),
        "monte_carlo": wulff_volume_monte_carlo(
            gauge, args.mc_samples, args.seed
        ),
    }
    print(json.dumps(serialize_data(data), sort_keys=True, indent=2))
    return EXIT_OK


def aggregate(args: argparse.Namespace) -> int:
    """Merge reports; later files win for repeated check names."""
    merged: Dict[str, Any] = {}
    base: Optional[VerificationReport] = None
    for path in args.reports:
        report = VerificationReport.from_dict(load_json(path))
        base = base or report
        for check in report.checks:
            merged[check.name] = check
    combined = VerificationReport(
        version=base.version,
        norm=base.norm,
        solution=base.solution,
        config={"sources": list(args.reports)},
        checks=list(merged.values()),
    )
    if args.out:
        write_report(combined, args.out, deterministic=True)
    print(render_summary(combined))
    return EXIT_OK if combined.passed else EXIT_FAILED


def serve(args: argparse.Namespace) -> int:
    import uvicorn

    from finsler.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format=LOG_FORMAT,
    )
    try:
        if args.command == "dual-norm":
            return dual_norm(args)
        if args.command == "wulff-volume":
            return wulff_volume_command(args)
        if args.command == "report":
            return aggregate(args)
        if args.command == "serve":
            return serve(args)
        config = RunConfig.from_sources(
            args.config, _overrides(args, _selected_suites(args))
        )
        return run(config)
    except FinslerException as e:
        print(
            f"error: {e} {json.dumps(serialize_data(e.output))}",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    except (KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
