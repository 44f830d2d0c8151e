"""
Moebius Band Certificate Toolkit
Command-line entry point: certificates, the slope region, band files and the
explicit example band
"""

import argparse
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import mpmath

from utils import __version__
from utils.band import EXPLICIT, analyze, dump_band_file, load_band_file, ridge_projection_svg
from utils.certificates import CERTIFICATES, run_all
from utils.design_system import (
    create_key_value_table,
    create_metric_table,
    create_region_chart,
    create_section_header,
    create_status_indicator,
    format_number,
)
from utils.errors import MoebiusError
from utils.example import DEFAULT_ABC, build_sim
from utils.monitor import get_monitor
from utils.reports import Report
from utils.settings import Tolerances, configure_logging, get_settings, working_precision
from utils.slope_domain import (
    LOWER_LINE,
    OMEGA_A,
    STEEP_LINE,
    UPPER_LINE,
    SlopePair,
    omega_contains,
    omega_vertices,
    omegahat_contains,
    sample_omega_boundary,
)

logger = logging.getLogger("moebius")

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

NOT_ECHOED = ("handler", "json", "verbose")


def _checks_block(checks: Dict[str, bool]) -> List[str]:
    return [create_status_indicator(bool(ok), name) for name, ok in checks.items()]


def _bool_word(value: bool) -> str:
    return "true" if value else "false"


# =============================================================================
# VERIFY
# =============================================================================

def cmd_verify(args) -> Report:
    names = list(CERTIFICATES) if args.name == "all" else [args.name]
    monitor = get_monitor()
    monitor.reset_metrics()
    verdicts = run_all(names, parallel=not args.sequential, monitor=monitor)
    metrics = monitor.get_metrics()

    deviations = [d for v in verdicts for d in v.deviations]
    results = {
        "verdicts": [v.to_dict() for v in verdicts],
        "timings": {name: entry["time"] for name, entry in metrics["per_name"].items()},
    }
    report = Report("verify", _inputs(args), results, all(v.passed for v in verdicts), deviations)

    if not args.json:
        print(create_section_header("Certificates"))
        for verdict in verdicts:
            print(create_status_indicator(verdict.passed, f"{verdict.name}: {verdict.title}"))
            if args.verbose or not verdict.passed:
                rows = [{"step": s.description, "method": s.method, "passed": s.passed}
                        for s in verdict.steps]
                print(create_metric_table(rows, digits=args.digits))
        if deviations:
            print()
            print("Deviations:")
            for deviation in deviations:
                print(f"  - {deviation}")
    return report


# =============================================================================
# OMEGA
# =============================================================================

def _line_curve(spec, lo: float, hi: float):
    slope, intercept = spec
    return [(b, float(slope) * b + float(intercept)) for b in (lo, hi)]


def cmd_omega(args) -> Report:
    if args.action == "contains":
        if args.b is None or args.t is None:
            raise ValueError("omega contains needs --b and --t")
        s = SlopePair(args.b, args.t)
        results = {
            "omega": omega_contains(s, args.eps),
            "omegahat": omegahat_contains(s),
        }
        if not args.json:
            print(f"Ω: {_bool_word(results['omega'])}, Ω̂: {_bool_word(results['omegahat'])}")
        return Report("omega", _inputs(args), results, True)

    boundary = sample_omega_boundary(args.grid, args.eps)
    vertices = omega_vertices()
    a = OMEGA_A
    curves = {
        "phi = sqrt3" if args.eps == 0 else f"phi = sqrt3 + {format_number(args.eps, args.digits)}": boundary,
        "t = 2b/3 - 1/sqrt3": _line_curve(LOWER_LINE, 0.0, a),
        "t = 2b/3 - 1/2": _line_curve(UPPER_LINE, 0.0, a),
        "t = 4b/3 - 1/sqrt3": _line_curve(STEEP_LINE, 0.0, a),
        "b = a": [(a, float(LOWER_LINE[0]) * a + float(LOWER_LINE[1])),
                  (a, float(UPPER_LINE[0]) * a + float(UPPER_LINE[1]))],
    }
    points = {
        f"vertex ({format_number(x, 6)}, {format_number(y, 6)})": (x, y) for x, y in vertices.values()
    }
    path = create_region_chart(curves, args.out, title="Slope region", points=points)
    results = {"out": str(path), "points": len(boundary), "vertices": vertices}
    if not args.json:
        print(f"wrote {path} ({len(boundary)} boundary points)")
    return Report("omega", _inputs(args), results, True)


# =============================================================================
# BAND
# =============================================================================

def cmd_band(args) -> Report:
    band = load_band_file(args.file, tol_close=args.tol)
    results = analyze(band)
    if args.plot:
        results["plot"] = str(ridge_projection_svg(band, args.plot))
    report = Report("band", _inputs(args), results, results["passed"])

    if not args.json:
        print(create_section_header(f"Band {Path(args.file).name}"))
        print(create_key_value_table({
            "lambda": results["lambda"],
            "facets": results["facets"],
            "closure residual": results["closure_residual"],
            "isometry residual": results["isometry_residual"],
            "ridge length": results["ridge"]["length"],
        }, args.digits))
        print()
        print("T-patterns:")
        print(create_metric_table(results["patterns"], digits=args.digits))
        if "normalization" in results:
            norm = results["normalization"]
            print()
            print("Normalization:")
            print(create_key_value_table(
                {k: norm[k] for k in ("b", "t", "x", "y", "L1", "R1", "L2", "R2")}, args.digits))
            print()
            print("Trapezoids:")
            print(create_metric_table(
                [{k: e[k] for k in ("trapezoid", "Theta", "p", "value", "inequality_holds")}
                 for e in results["trapezoids"]], digits=args.digits))
        if "pitch_backtrack" in results:
            print(f"max pitch backtrack = {format_number(results['pitch_backtrack'], args.digits)}")
        if "plot" in results:
            print(f"wrote {results['plot']}")
        print()
        print("\n".join(_checks_block(results["checks"])))
    return report


# =============================================================================
# EXAMPLE
# =============================================================================

def cmd_example(args) -> Report:
    band, sim = build_sim((args.a, args.b, args.c), bits=mpmath.mp.prec)
    results = sim.to_dict()
    if args.out:
        results["out"] = str(dump_band_file(band, args.out, EXPLICIT))
    report = Report("example", _inputs(args), results, sim.passed)

    if not args.json:
        print(create_section_header("Explicit band"))
        for name in ("d", "e"):
            print(f"{name} = {mpmath.nstr(mpmath.mpf(sim.params[name]), args.digits)}")
        print(f"lambda - sqrt3 = {format_number(sim.lam_minus_sqrt3, args.digits)}")
        dx, dy = sim.midpoint_offset
        print(f"midpoint offset = ({format_number(dx, args.digits)}, {format_number(dy, args.digits)})")
        print(f"(b, t) = ({format_number(sim.slopes[0], args.digits)}, {format_number(sim.slopes[1], args.digits)})")
        if args.out:
            print(f"wrote {results['out']}")
        print()
        print("\n".join(_checks_block(sim.checks)))
    return report


# =============================================================================
# ARGUMENTS
# =============================================================================

def _inputs(args) -> Dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in NOT_ECHOED}


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    common.add_argument("--digits", type=int, help="significant digits for printed numbers (default 12)")
    common.add_argument("--json", action="store_true", help="print the JSON report instead of text")

    parser = argparse.ArgumentParser(prog="moebius-cert", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", parents=[common], help="run certificates")
    verify.add_argument("name", help=f"one of {', '.join(CERTIFICATES)} or all")
    verify.add_argument("--sequential", action="store_true", help="run certificates one after another")
    verify.set_defaults(handler=cmd_verify)

    omega = commands.add_parser("omega", parents=[common], help="plot the slope region or test membership")
    omega.add_argument("action", choices=["plot", "contains"])
    omega.add_argument("--b", type=_fraction)
    omega.add_argument("--t", type=_fraction)
    omega.add_argument("--eps", type=_fraction, default=Fraction(0))
    omega.add_argument("--grid", type=int, default=128, help="boundary sample count")
    omega.add_argument("--out", default="omega.svg")
    omega.set_defaults(handler=cmd_omega)

    band = commands.add_parser("band", parents=[common], help="check a band file")
    band.add_argument("file")
    band.add_argument("--tol", type=float, default=Tolerances.CLOSE, help="closure tolerance")
    band.add_argument("--plot", help="write the ridge projection SVG here")
    band.set_defaults(handler=cmd_band)

    example = commands.add_parser("example", parents=[common], help="solve and check the explicit band")
    example.add_argument("--a", type=_fraction, default=DEFAULT_ABC[0])
    example.add_argument("--b", type=_fraction, default=DEFAULT_ABC[1])
    example.add_argument("--c", type=_fraction, default=DEFAULT_ABC[2])
    example.add_argument("--out", help="write the band file (explicit format) here")
    example.set_defaults(handler=cmd_example)
    return parser


# =============================================================================
# MAIN
# =============================================================================

def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; 0 = checks pass, 1 = checks fail, 2 = input or usage error"""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code in (0, None) else EXIT_USAGE

    try:
        settings = get_settings()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging("DEBUG" if args.verbose else settings.log_level)
    if args.digits is None:
        args.digits = settings.digits

    start = time.perf_counter()
    try:
        with working_precision(settings.precision_bits):
            report = args.handler(args)
    except (MoebiusError, OSError, ValueError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report.wall_time = time.perf_counter() - start

    if args.json:
        print(report.to_json())
    logger.info("%s finished in %.2fs, passed = %s", args.command, report.wall_time, report.passed)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
