"""End-to-end verification sweep over every spectral claim.

Each check returns a Verdict; `run_all_checks` runs the whole battery at a
configurable resolution and is the engine behind the CLI's verify-all
command.  Checks catch computational failures and report them as failed
verdicts so one bad configuration cannot abort the rest of the battery.

At the reference resolution (r_max = 200, n = 8000) every check passes;
on a deliberately coarse grid the tolerances are designed to fail, which
is itself checked by the test suite (the battery must be falsifiable).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hellmann_feynman import hft_check, residual_ladder, scaling_consistency
from .potentials import Family, PotentialSpec
from .scans import (
    BetaScan,
    check_monotone_decrease,
    check_negativity,
    coulomb_sandwich,
    count_growth,
    fixed_step_ladder,
    run_beta_scan,
)
from .shooting import shooting_energy
from .solver import GridSpec, RadialProblem, refine_by_extrapolation

DEFAULT_R_MAX = 200.0
DEFAULT_N_POINTS = 8000

_FAMILIES = ((Family.SCREENED, 1.0), (Family.TRUNCATED, 2.0))
_SWEEP_BETAS = tuple(round(0.1 * i, 10) for i in range(21))   # 0.0 .. 2.0
_SWEEP_LS = (0, 1)
_SWEEP_K_MAX = 5


@dataclass
class Verdict:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)


def _guarded(name: str):
    """Turn computational failures inside a check into failed verdicts."""

    def wrap(fn):
        def inner(*args, **kwargs) -> Verdict:
            try:
                return fn(*args, **kwargs)
            except Exception as exc:  # noqa: BLE001 - verdicts must not abort the battery
                return Verdict(name=name, passed=False, details={"error": str(exc)})

        return inner

    return wrap


def _ladder(grid: GridSpec, k_min: int = 5) -> list[GridSpec]:
    return [
        GridSpec(r_max=grid.r_max, n_points=max(grid.n_points // 2, k_min)),
        grid,
    ]


@_guarded("hydrogen_baseline")
def check_hydrogen_baseline(grid: GridSpec) -> Verdict:
    """Extrapolated pure-Coulomb levels k = 1..3 vs the exact -1/(2k^2)."""
    spec = PotentialSpec(family=Family.PURE_COULOMB)
    problem = RadialProblem(spec, 0, grid)
    energies, _ = refine_by_extrapolation(problem, 3, _ladder(grid))
    exact = np.array([-0.5 / k**2 for k in (1, 2, 3)])
    errors = np.abs(energies - exact)
    return Verdict(
        name="hydrogen_baseline",
        passed=bool(np.all(errors <= 1e-5)),
        details={
            "levels": [float(x) for x in energies],
            "max_abs_error": float(errors.max()),
            "tolerance": 1e-5,
        },
    )


@_guarded("hft_identity")
def check_hft_identity(grid: GridSpec) -> Verdict:
    """Finite-difference derivative of the rescaled eigenvalue vs the
    expectation-value side, plus the second-order step ladder."""
    worst_rel = 0.0
    min_slope = math.inf
    sign_ok = True
    for family, p in _FAMILIES:
        for beta in (0.1, 0.5, 1.0):
            spec = PotentialSpec(family=family, beta=beta, p=p)
            for k in (1, 2):
                report = hft_check(spec, k, 0, grid, delta_beta=1e-3)
                sign_ok = sign_ok and report.rhs_expect < 0.0
                worst_rel = max(worst_rel, report.residual / abs(report.rhs_expect))
                _, _, slope = residual_ladder(spec, k, 0, grid, delta_beta=1e-3)
                min_slope = min(min_slope, slope)
    return Verdict(
        name="hft_identity",
        passed=bool(worst_rel <= 1e-3 and min_slope >= 1.7 and sign_ok),
        details={
            "worst_relative_residual": worst_rel,
            "min_ladder_slope": min_slope,
            "rhs_always_negative": sign_ok,
        },
    )


def sweep_scans(
    grid: GridSpec,
    cache_dir: str | Path | None = None,
    parallelism: int = 1,
) -> dict:
    """The shared (family x l) beta sweep behind the scan-based checks;
    optionally persisted so repeated verification runs skip the solves."""
    scans = {}
    for family, p in _FAMILIES:
        for l in _SWEEP_LS:
            key = f"scan_{family.value}_l{l}_n{grid.n_points}_r{grid.r_max:g}"
            path = Path(cache_dir) / f"{key}.json" if cache_dir else None
            if path is not None and path.exists():
                scans[(family, l)] = BetaScan.load(path)
                continue
            scan = run_beta_scan(
                family, p, l, _SWEEP_K_MAX, _SWEEP_BETAS, grid, parallelism=parallelism
            )
            if path is not None:
                path.parent.mkdir(parents=True, exist_ok=True)
                scan.save(path)
            scans[(family, l)] = scan
    return scans


@_guarded("monotone_decrease")
def check_monotone(scans: dict) -> Verdict:
    violations = {}
    for (family, l), scan in scans.items():
        check = check_monotone_decrease(scan, margin=1e-10)
        if not check.passed:
            violations[f"{family.value}, l={l}"] = check.first_violation
    return Verdict(
        name="monotone_decrease",
        passed=not violations,
        details={"violations": {k: list(v) for k, v in violations.items()}},
    )


@_guarded("negativity")
def check_negative_levels(scans: dict) -> Verdict:
    violations = {}
    excluded = 0
    for (family, l), scan in scans.items():
        check = check_negativity(scan)
        excluded += check.excluded_levels
        if not check.passed:
            violations[f"{family.value}, l={l}"] = check.first_violation
    return Verdict(
        name="negativity",
        passed=not violations,
        details={
            "violations": {k: list(v) for k, v in violations.items()},
            "box_limited_levels_excluded": excluded,
        },
    )


@_guarded("coulomb_sandwich")
def check_sandwich(scans: dict, grid: GridSpec) -> Verdict:
    failures = []
    for (family, l), scan in scans.items():
        for beta in scan.betas:
            spec = PotentialSpec(family=family, beta=beta, p=scan.p)
            report = coulomb_sandwich(spec, l, _SWEEP_K_MAX, grid)
            for row in report.rows:
                if not row.passed:
                    failures.append(
                        {
                            "family": family.value,
                            "l": l,
                            "beta": beta,
                            "k": row.k,
                            "energy": row.energy,
                            "lower_bound": row.lower_bound,
                        }
                    )
    return Verdict(
        name="coulomb_sandwich",
        passed=not failures,
        details={"failures": failures[:5], "failure_count": len(failures)},
    )


@_guarded("scaling_consistency")
def check_scaling(grid: GridSpec) -> Verdict:
    worst = 0.0
    worst_at_unit = 0.0
    for family, p in _FAMILIES:
        for beta in (0.5, 1.0, 2.0):
            spec = PotentialSpec(family=family, beta=beta, p=p)
            for k in (1, 2):
                mismatch = scaling_consistency(spec, k, 0, grid)
                if beta == 1.0:
                    worst_at_unit = max(worst_at_unit, mismatch)
                else:
                    worst = max(worst, mismatch)
    return Verdict(
        name="scaling_consistency",
        passed=bool(worst <= 1e-4 and worst_at_unit <= 1e-12),
        details={
            "worst_relative_mismatch": worst,
            "worst_mismatch_at_beta_1": worst_at_unit,
        },
    )


@_guarded("count_growth")
def check_counts(grid: GridSpec) -> Verdict:
    step = grid.r_max / grid.n_points
    ladder = fixed_step_ladder((50.0, 100.0, 200.0, 400.0), step)
    failures = []
    counts = {}
    for family, p in _FAMILIES:
        for beta in (0.0, 0.5, 1.0):
            spec = PotentialSpec(family=family, beta=beta, p=p)
            report = count_growth(spec, 0, ladder)
            key = f"{family.value}, beta={beta:g}"
            counts[key] = [c for _, _, c in report.rows]
            if not (report.nondecreasing and report.strictly_grew):
                failures.append(key)
    return Verdict(
        name="count_growth",
        passed=not failures,
        details={"counts": counts, "failures": failures},
    )


@_guarded("oracle_equivalence")
def check_oracle_equivalence(grid: GridSpec) -> Verdict:
    targets = [
        PotentialSpec(family=Family.SCREENED, beta=0.5),
        PotentialSpec(family=Family.TRUNCATED, beta=1.0, p=2.0),
    ]
    rows = []
    worst = 0.0
    for spec in targets:
        problem = RadialProblem(spec, 0, grid)
        main, _ = refine_by_extrapolation(problem, 1, _ladder(grid, k_min=1))
        oracle = shooting_energy(spec, 0, k=1)
        diff = abs(float(main[0]) - oracle)
        worst = max(worst, diff)
        rows.append(
            {
                "family": spec.family.value,
                "beta": spec.beta,
                "main_path": float(main[0]),
                "shooting": oracle,
                "difference": diff,
            }
        )
    return Verdict(
        name="oracle_equivalence",
        passed=bool(worst <= 1e-5),
        details={"targets": rows, "worst_difference": worst, "tolerance": 1e-5},
    )


def run_all_checks(
    r_max: float = DEFAULT_R_MAX,
    n_points: int = DEFAULT_N_POINTS,
    cache_dir: str | Path | None = None,
    parallelism: int = 1,
) -> list[Verdict]:
    grid = GridSpec(r_max=r_max, n_points=n_points)
    verdicts = [
        check_hydrogen_baseline(grid),
        check_hft_identity(grid),
    ]
    try:
        scans = sweep_scans(grid, cache_dir=cache_dir, parallelism=parallelism)
    except Exception as exc:  # noqa: BLE001
        failed = Verdict(name="beta_sweep", passed=False, details={"error": str(exc)})
        verdicts.extend(
            [
                failed,
                Verdict("monotone_decrease", False, {"error": "sweep failed"}),
                Verdict("negativity", False, {"error": "sweep failed"}),
                Verdict("coulomb_sandwich", False, {"error": "sweep failed"}),
            ]
        )
    else:
        verdicts.append(check_monotone(scans))
        verdicts.append(check_negative_levels(scans))
        verdicts.append(check_sandwich(scans, grid))
    verdicts.append(check_scaling(grid))
    verdicts.append(check_counts(grid))
    verdicts.append(check_oracle_equivalence(grid))
    return verdicts
