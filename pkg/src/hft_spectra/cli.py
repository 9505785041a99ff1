"""Command-line interface: solve / scan / hft-check / count / units / verify-all.

Artifacts are CSV (header row, comma separated, LF endings) or JSON (one
top-level object: format_version, config_echo, rows, verdicts).  Floats
are always written with 12 significant digits so identical configurations
produce byte-identical output on any platform.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 computation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .hellmann_feynman import hft_check, residual_ladder
from .potentials import DimensionfulInputs, Family, PotentialSpec, reduce_units
from .scans import (
    BetaScan,
    ScanFailure,
    check_monotone_decrease,
    check_negativity,
    count_growth,
    fixed_step_ladder,
    run_beta_scan,
)
from .solver import GridSpec, RadialProblem, SolverError, lowest_eigenpairs, refine_by_extrapolation
from .verify import DEFAULT_N_POINTS, DEFAULT_R_MAX, run_all_checks

FORMAT_VERSION = 1
PARALLELISM_ENV = "HFT_SPECTRA_PARALLELISM"

_FAMILY_TOKENS = {
    "screened": Family.SCREENED,
    "truncated": Family.TRUNCATED,
    "coulomb": Family.PURE_COULOMB,
}


def fmt(x) -> str:
    """Fixed 12-significant-digit rendering used in every artifact."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _emit(text: str, output: str) -> None:
    if output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _csv_artifact(header: list[str], rows: list[list], verdicts: dict, partial: bool) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    for name, passed in verdicts.items():
        lines.append(f"# verdict {name}={'pass' if passed else 'fail'}")
    if partial:
        lines.append("# partial=true")
    return "\n".join(lines) + "\n"


def _json_artifact(config: dict, rows: list[dict], verdicts: dict, partial: bool) -> str:
    payload = {
        "format_version": FORMAT_VERSION,
        "config_echo": config,
        "rows": rows,
        "verdicts": {k: ("pass" if v else "fail") for k, v in verdicts.items()},
    }
    if partial:
        payload["partial"] = True
    return json.dumps(_round_floats(payload), indent=2, sort_keys=True) + "\n"


def _write(args, config: dict, header: list[str], table: list[list], json_rows: list[dict],
           verdicts: dict, partial: bool = False) -> None:
    if args.format == "json":
        _emit(_json_artifact(config, json_rows, verdicts, partial), args.output)
    else:
        _emit(_csv_artifact(header, table, verdicts, partial), args.output)


def _positive(kind):
    def parse(text: str):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
        return value

    return parse


def _nonnegative_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _add_grid_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r-max", type=_positive(float), default=DEFAULT_R_MAX,
                   help="box radius (default %(default)s)")
    p.add_argument("--n-points", type=_positive(int), default=DEFAULT_N_POINTS,
                   help="interior grid points (default %(default)s)")


def _add_output_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_spec_options(p: argparse.ArgumentParser, beta_default: float | None = 0.0) -> None:
    p.add_argument("--family", required=True, choices=sorted(_FAMILY_TOKENS))
    if beta_default is not None:
        p.add_argument("--beta", type=_nonnegative_float, default=beta_default)
    p.add_argument("--p", type=_positive(float), default=2.0,
                   help="truncation exponent (truncated family only)")
    p.add_argument("--l", type=int, default=0, help="angular momentum (default 0)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hft-spectra",
        description="Bound-state spectra of screened/truncated Coulomb potentials "
                    "and verification of their scaling and monotonicity properties.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="lowest levels with Richardson refinement")
    _add_spec_options(p_solve)
    p_solve.add_argument("--k-max", type=int, default=3)
    _add_grid_options(p_solve)
    _add_output_options(p_solve)

    p_scan = sub.add_parser("scan", help="beta sweep with monotonicity/negativity verdicts")
    _add_spec_options(p_scan, beta_default=None)
    p_scan.add_argument("--k-max", type=int, default=3)
    p_scan.add_argument("--beta-from", type=_nonnegative_float, default=0.0)
    p_scan.add_argument("--beta-to", type=_nonnegative_float, default=2.0)
    p_scan.add_argument("--beta-step", type=_positive(float), default=0.1)
    p_scan.add_argument("--parallelism", type=_positive(int), default=None,
                        help=f"worker processes (default: {PARALLELISM_ENV} or cpu count)")
    _add_grid_options(p_scan)
    _add_output_options(p_scan)

    p_hft = sub.add_parser("hft-check", help="derivative vs expectation-value identity")
    _add_spec_options(p_hft)
    p_hft.add_argument("--k", type=int, default=1)
    p_hft.add_argument("--delta-beta", type=_positive(float), default=None)
    _add_grid_options(p_hft)
    _add_output_options(p_hft)

    p_count = sub.add_parser("count", help="negative-level counts over growing boxes")
    _add_spec_options(p_count)
    p_count.add_argument("--r-max-ladder", default="50,100,200,400",
                         help="comma-separated box radii (default %(default)s)")
    p_count.add_argument("--grid-step", type=_positive(float), default=0.05,
                         help="fixed grid step shared by all boxes")
    _add_output_options(p_count)

    p_units = sub.add_parser("units", help="dimensionless reduction of physical inputs")
    p_units.add_argument("--hbar", type=float, required=True)
    p_units.add_argument("--mass", type=float, required=True)
    p_units.add_argument("--strength", type=float, required=True)
    p_units.add_argument("--length-param", type=float, required=True)
    _add_output_options(p_units)

    p_verify = sub.add_parser("verify-all", help="run the full verification battery")
    _add_grid_options(p_verify)
    p_verify.add_argument("--cache-dir", default=None,
                          help="persist beta sweeps here and reuse them on re-runs")
    p_verify.add_argument("--parallelism", type=_positive(int), default=None)
    p_verify.add_argument("--output", default="-", help="output path, '-' for stdout")

    return parser


def _resolve_parallelism(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(PARALLELISM_ENV)
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise ValueError(f"{PARALLELISM_ENV} must be an integer, got {env!r}") from exc
        if value < 1:
            raise ValueError(f"{PARALLELISM_ENV} must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


def _spec_from_args(args, beta: float | None = None) -> PotentialSpec:
    family = _FAMILY_TOKENS[args.family]
    b = args.beta if beta is None else beta
    return PotentialSpec(family=family, beta=b, p=args.p)


def _validate_k(value: int, n_points: int, what: str = "--k-max") -> None:
    if value < 1:
        raise ValueError(f"{what} must be >= 1, got {value}")
    if value > n_points:
        raise ValueError(f"{what} = {value} exceeds the {n_points}-point grid")


def _validate_l(l: int) -> None:
    if l < 0:
        raise ValueError(f"--l must be >= 0, got {l}")


def cmd_solve(args) -> int:
    _validate_l(args.l)
    _validate_k(args.k_max, args.n_points)
    grid = GridSpec(r_max=args.r_max, n_points=args.n_points)
    spec = _spec_from_args(args)
    problem = RadialProblem(spec, args.l, grid)
    result = lowest_eigenpairs(problem, args.k_max)
    ladder = [GridSpec(args.r_max, max(args.n_points // 2, args.k_max)), grid]
    refined, errors = refine_by_extrapolation(problem, args.k_max, ladder)

    config = {
        "command": "solve", "family": args.family, "beta": args.beta, "p": args.p,
        "l": args.l, "k_max": args.k_max, "r_max": args.r_max, "n_points": args.n_points,
    }
    table, rows = [], []
    for i in range(args.k_max):
        e, ex, err = float(result.energies[i]), float(refined[i]), float(errors[i])
        table.append([i + 1, e, ex, err, e < 0.0])
        rows.append({"k": i + 1, "energy": e, "extrapolated": ex,
                     "error_estimate": err, "negative": e < 0.0})
    _write(args, config, ["k", "energy", "extrapolated", "error_estimate", "negative"],
           table, rows, verdicts={})
    return 0


def _beta_grid(start: float, stop: float, step: float) -> list[float]:
    if stop < start:
        raise ValueError(f"empty beta range: from {start} to {stop}")
    betas = []
    i = 0
    while True:
        b = start + i * step
        if b > stop + 1e-9 * step:
            break
        betas.append(round(b, 12))
        i += 1
    return betas


def cmd_scan(args) -> int:
    _validate_l(args.l)
    _validate_k(args.k_max, args.n_points)
    betas = _beta_grid(args.beta_from, args.beta_to, args.beta_step)
    parallelism = _resolve_parallelism(args.parallelism)
    grid = GridSpec(r_max=args.r_max, n_points=args.n_points)
    family = _FAMILY_TOKENS[args.family]

    config = {
        "command": "scan", "family": args.family, "p": args.p, "l": args.l,
        "k_max": args.k_max, "beta_from": args.beta_from, "beta_to": args.beta_to,
        "beta_step": args.beta_step, "r_max": args.r_max, "n_points": args.n_points,
        "parallelism": parallelism,
    }

    partial = False
    status = 0
    try:
        scan = run_beta_scan(family, args.p, args.l, args.k_max, betas, grid,
                             parallelism=parallelism)
    except ScanFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        scan = exc.partial
        partial = True
        status = 3

    verdicts = {}
    if not partial:
        if len(scan.betas) >= 2:
            verdicts["monotone_decrease"] = check_monotone_decrease(scan).passed
        else:
            verdicts["monotone_decrease"] = True
        verdicts["negativity"] = check_negativity(scan).passed

    header = (["beta"] + [f"E_{k}" for k in range(1, args.k_max + 1)]
              + [f"beta2E_{k}" for k in range(1, args.k_max + 1)])
    table = [[b, *e, *s] for b, e, s in zip(scan.betas, scan.energies, scan.scaled_values)]
    rows = [
        {"beta": b, "energies": list(e), "scaled_values": list(s)}
        for b, e, s in zip(scan.betas, scan.energies, scan.scaled_values)
    ]
    _write(args, config, header, table, rows, verdicts, partial=partial)
    if status == 0 and not all(verdicts.values()):
        status = 1
    return status


def cmd_hft_check(args) -> int:
    _validate_l(args.l)
    _validate_k(args.k, args.n_points, "--k")
    if args.beta <= 0.0:
        raise ValueError("--beta must be > 0 for the derivative check")
    grid = GridSpec(r_max=args.r_max, n_points=args.n_points)
    spec = _spec_from_args(args)
    report = hft_check(spec, args.k, args.l, grid, delta_beta=args.delta_beta)

    tolerance = 1e-3 * abs(report.rhs_expect)
    slope = None
    if not report.one_sided and 4.0 * report.delta_beta <= spec.beta / 10.0:
        _, ladder_residuals, slope = residual_ladder(
            spec, args.k, args.l, grid, report.delta_beta
        )
        curvature = max(
            res / d**2
            for res, d in zip(ladder_residuals[:-1],
                              [f * report.delta_beta for f in (4.0, 2.0)])
        )
        tolerance = max(tolerance, 1.5 * curvature * report.delta_beta**2)
    passed = report.residual <= tolerance

    config = {
        "command": "hft-check", "family": args.family, "beta": args.beta, "p": args.p,
        "l": args.l, "k": args.k, "r_max": args.r_max, "n_points": args.n_points,
    }
    row = {
        "beta": report.beta, "k": report.k, "l": report.l,
        "lhs_fd": report.lhs_fd, "rhs_expect": report.rhs_expect,
        "residual": report.residual, "delta_beta": report.delta_beta,
        "one_sided": report.one_sided,
    }
    if slope is not None:
        row["ladder_slope"] = slope
    header = list(row)
    _write(args, config, header, [[row[k] for k in header]], [row],
           {"hft_identity": passed})
    return 0 if passed else 1


def cmd_count(args) -> int:
    _validate_l(args.l)
    try:
        r_maxes = [float(tok) for tok in args.r_max_ladder.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValueError(f"bad --r-max-ladder: {args.r_max_ladder!r}") from exc
    if not r_maxes:
        raise ValueError("--r-max-ladder is empty")
    ladder = fixed_step_ladder(r_maxes, args.grid_step)
    spec = _spec_from_args(args)
    report = count_growth(spec, args.l, ladder)

    config = {
        "command": "count", "family": args.family, "beta": args.beta, "p": args.p,
        "l": args.l, "r_max_ladder": r_maxes, "grid_step": args.grid_step,
    }
    verdicts = {"nondecreasing": report.nondecreasing}
    strict_expected = args.beta <= 1.0 and len(report.rows) >= 2
    verdicts["strict_growth"] = report.strictly_grew or not strict_expected
    table = [[r_max, n, count] for r_max, n, count in report.rows]
    rows = [{"r_max": r_max, "n_points": n, "negative_count": count}
            for r_max, n, count in report.rows]
    _write(args, config, ["r_max", "n_points", "negative_count"], table, rows, verdicts)
    return 0 if all(verdicts.values()) else 1


def cmd_units(args) -> int:
    inputs = DimensionfulInputs(hbar=args.hbar, mass=args.mass,
                                strength=args.strength, length_param=args.length_param)
    reduction = reduce_units(inputs)
    config = {
        "command": "units", "hbar": args.hbar, "mass": args.mass,
        "strength": args.strength, "length_param": args.length_param,
    }
    row = {"beta": reduction.beta, "length_unit": reduction.length_unit,
           "energy_unit": reduction.energy_unit}
    _write(args, config, list(row), [[row[k] for k in row]], [row], verdicts={})
    return 0


def cmd_verify_all(args) -> int:
    if args.n_points < 16:
        raise ValueError(f"--n-points must be >= 16, got {args.n_points}")
    verdicts = run_all_checks(
        r_max=args.r_max,
        n_points=args.n_points,
        cache_dir=args.cache_dir,
        parallelism=_resolve_parallelism(args.parallelism),
    )
    payload = {
        "format_version": FORMAT_VERSION,
        "config_echo": {
            "command": "verify-all", "r_max": args.r_max, "n_points": args.n_points,
        },
        "verdicts": {
            v.name: {"passed": v.passed, "details": v.details} for v in verdicts
        },
    }
    _emit(json.dumps(_round_floats(payload), indent=2, sort_keys=True) + "\n", args.output)
    failed = [v.name for v in verdicts if not v.passed]
    if failed:
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


_DISPATCH = {
    "solve": cmd_solve,
    "scan": cmd_scan,
    "hft-check": cmd_hft_check,
    "count": cmd_count,
    "units": cmd_units,
    "verify-all": cmd_verify_all,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _DISPATCH[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, OverflowError, FloatingPointError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 3


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
