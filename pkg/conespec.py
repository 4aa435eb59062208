"""
Command-line front end for the cone degree toolkit.

Subcommands read a cone graph JSON file and print a JSON report (or CSV for
eigenvalue curves and eigenfunctions) on stdout, or into --output.
Exit codes: 0 success, 1 verification mismatch, 2 input parse, 3 validation,
4 numerical accuracy.
"""

import argparse
import json
import logging
import math
import sys
from typing import List, Optional

from cone_graph import require_valid, structure, validate
from config import OracleConfig, RunConfig, ScanConfig
from conemap_degrees import conemap_count, conemap_curves, lower_bound_conemap, scan_degrees_conemap
from data_manager import DataManager
from errors import ConeSpecError, PreconditionError
from euclid_degrees import eigen_curves, lower_bound_euclid, scan_all_euclid
from kpod_degrees import (
    P_HARMONIC_LIMIT,
    balanced_kpod_exists,
    harmonic_kpod_degrees,
    p_harmonic_degree,
    p_harmonic_kpod_bound,
)
from metric_graph_oracle import cross_validate, degrees_from_result, solve_oracle

logger = logging.getLogger("conespec")

EXIT_OK = 0
EXIT_MISMATCH = 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conespec",
        description="Degrees of balanced homogeneous harmonic maps on 2-dimensional cones",
    )
    parser.add_argument("--verbose", action="store_true", help="log debug output on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_input(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="cone graph JSON file")
        p.add_argument("--degrees", action="store_true", help="angles in the input are in degrees")
        p.add_argument("--allow-wide-angles", action="store_true", help="admit sector angles in [π, 2π)")
        p.add_argument("--output", help="write the report here instead of stdout")
        return p

    with_input("validate", "check a cone graph and report its structure")

    p = with_input("scan", "Euclidean degrees with singular reports")
    p.add_argument("--alpha-max", type=float, default=3.0)
    p.add_argument("--tol", type=float, default=1e-9, help="kernel tolerance")

    p = with_input("verify", "compare the scanner against the metric-graph oracle")
    p.add_argument("--alpha-max", type=float, default=3.0)
    p.add_argument("--m", type=int, default=512, help="segments per edge")
    p.add_argument("--tol", type=float, default=1e-9, help="kernel tolerance")

    p = with_input("curves", "eigenvalue curves as CSV")
    p.add_argument("a", type=float)
    p.add_argument("b", type=float)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--conemap", action="store_true", help="curves of the cone-map matrix")

    p = with_input("conemap", "degrees of maps into the cone over the same graph")
    p.add_argument("--tol", type=float, default=1e-9, help="kernel tolerance")

    p = with_input("kpod", "degrees of maps from a cycle cone into a k-pod")
    p.add_argument("--visits-max", type=int, default=4)
    p.add_argument("--alpha", type=float, help="also report the arc decomposition at this degree")

    p = sub.add_parser("pharmonic", help="p-harmonic degree for a sector angle")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--theta0", type=float, default=2 * math.pi / 3)
    p.add_argument("--degrees", action="store_true", help="theta0 is in degrees")
    p.add_argument("--output")

    p = with_input("oracle", "metric-graph eigenvalues and degrees")
    p.add_argument("--alpha-max", type=float, default=3.0)
    p.add_argument("--m", type=int, default=512, help="segments per edge")
    p.add_argument("--csv", help="write the eigenfunction of --mode as CSV here")
    p.add_argument("--mode", type=int, default=1, help="eigenfunction index (0 is the constant)")
    return parser


def run_config(args: argparse.Namespace) -> RunConfig:
    scan = ScanConfig(kernel_tol=getattr(args, "tol", 1e-9))
    oracle = OracleConfig(m=getattr(args, "m", OracleConfig.m))
    return RunConfig(
        command=args.command,
        input_path=getattr(args, "input", None),
        alpha_max=getattr(args, "alpha_max", 3.0),
        scan=scan,
        oracle=oracle,
        output=args.output,
        allow_wide_angles=getattr(args, "allow_wide_angles", False),
        degrees=args.degrees,
    )


def emit(dm: DataManager, text: str, output: Optional[str]) -> None:
    if output:
        dm.write_text(text, output)
    else:
        sys.stdout.write(text)


def cmd_validate(dm: DataManager, cfg: RunConfig, args) -> int:
    g = dm.load_graph(cfg.input_path, cfg.degrees, cfg.allow_wide_angles)
    report = validate(g)
    data = {"valid": report.ok, "violations": list(report.violations), "summary": dm.summary(g)}
    if report.ok:
        data["structure"] = structure(g).to_dict()
    emit(dm, dm.to_json(data), cfg.output)
    if not report.ok:
        require_valid(g)
    return EXIT_OK


def cmd_scan(dm: DataManager, cfg: RunConfig, args) -> int:
    g = dm.load_graph(cfg.input_path, cfg.degrees, cfg.allow_wide_angles)
    spectrum = scan_all_euclid(g, cfg.alpha_max, cfg.scan)
    data = spectrum.to_dict()
    data["lower_bound"] = lower_bound_euclid(g)
    emit(dm, dm.to_json(data), cfg.output)
    return EXIT_OK


def cmd_verify(dm: DataManager, cfg: RunConfig, args) -> int:
    g = dm.load_graph(cfg.input_path, cfg.degrees, cfg.allow_wide_angles)
    report = cross_validate(g, cfg.alpha_max, cfg.oracle.m, cfg.scan, cfg.oracle)
    emit(dm, dm.to_json(report.to_dict()), cfg.output)
    return EXIT_OK if report.all_matched else EXIT_MISMATCH


def cmd_curves(dm: DataManager, cfg: RunConfig, args) -> int:
    g = dm.load_graph(cfg.input_path, cfg.degrees, cfg.allow_wide_angles)
    require_valid(g, allow_wide=False)
    if args.conemap:
        curve = conemap_curves(g, args.a, args.b, args.samples)
    else:
        curve = eigen_curves(g, args.a, args.b, args.samples)
    emit(dm, dm.frame_to_csv(dm.curves_frame(curve)), cfg.output)
    return EXIT_OK


def cmd_conemap(dm: DataManager, cfg: RunConfig, args) -> int:
    g = dm.load_graph(cfg.input_path, cfg.degrees, cfg.allow_wide_angles)
    spectrum = scan_degrees_conemap(g, cfg.scan)
    data = spectrum.to_dict()
    data["lower_bound"] = lower_bound_conemap(g)
    data["count"] = conemap_count(g, cfg.scan)
    emit(dm, dm.to_json(data), cfg.output)
    return EXIT_OK


def cmd_kpod(dm: DataManager, cfg: RunConfig, args) -> int:
    g = dm.load_graph(cfg.input_path, cfg.degrees, cfg.allow_wide_angles)
    degrees = harmonic_kpod_degrees(g, args.visits_max)
    data = {"total_angle": g.total_angle, "degrees": [d.to_dict() for d in degrees]}
    if args.alpha is not None:
        data["certificate"] = balanced_kpod_exists(g, args.alpha).to_dict()
    emit(dm, dm.to_json(data), cfg.output)
    return EXIT_OK


def cmd_pharmonic(dm: DataManager, cfg: RunConfig, args) -> int:
    theta0 = math.radians(args.theta0) if args.degrees else args.theta0
    data = {
        "p": args.p,
        "theta0": theta0,
        "alpha": p_harmonic_degree(theta0, args.p),
        "bound": p_harmonic_kpod_bound(args.p),
        "limit": P_HARMONIC_LIMIT,
    }
    emit(dm, dm.to_json(data), cfg.output)
    return EXIT_OK


def cmd_oracle(dm: DataManager, cfg: RunConfig, args) -> int:
    g = dm.load_graph(cfg.input_path, cfg.degrees, cfg.allow_wide_angles)
    result = solve_oracle(g, cfg.oracle.m, alpha_max=cfg.alpha_max, cfg=cfg.oracle)
    data = result.to_dict()
    data["oracle_degrees"] = [
        {"alpha": a, "multiplicity": k} for a, k in degrees_from_result(result, cfg.alpha_max)
    ]
    if args.csv:
        if not 0 <= args.mode < result.eigenvalues.size:
            raise PreconditionError(f"mode {args.mode} is not among the {result.eigenvalues.size} computed")
        frame = dm.eigenfunction_frame(result.pencil.mesh, result.eigenvectors[:, args.mode])
        dm.write_text(dm.frame_to_csv(frame), args.csv)
    emit(dm, dm.to_json(data), cfg.output)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "scan": cmd_scan,
    "verify": cmd_verify,
    "curves": cmd_curves,
    "conemap": cmd_conemap,
    "kpod": cmd_kpod,
    "pharmonic": cmd_pharmonic,
    "oracle": cmd_oracle,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    dm = DataManager()
    try:
        cfg = run_config(args)
        return COMMANDS[args.command](dm, cfg, args)
    except ConeSpecError as exc:
        logger.debug("command %s failed", args.command, exc_info=True)
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
