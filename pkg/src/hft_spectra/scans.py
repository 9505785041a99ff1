"""Parameter scans over beta and the spectral claims checked on them.

A scan solves the same (family, p, l) problem on one fixed grid for every
beta of an increasing grid and tabulates E_k(beta) together with
beta^2 E_k(beta).  On top of the table live the claim checks:

* beta^2 E_k(beta) strictly decreases along the scan;
* every resolvable E_k(beta) is negative;
* the Coulomb sandwich -1/(2(k+l)^2) <= E_{k,l}(beta) < 0;
* the number of negative levels grows with the box size (finite evidence
  for an unbounded bound-state count).

Levels too close to zero to be resolved in a finite Dirichlet box are
flagged box-limited and excluded from the negativity claim; the box only
pushes levels up, so exclusion is conservative.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .potentials import Family, PotentialSpec
from .solver import (
    GridSpec,
    RadialProblem,
    SolverError,
    _lowest_eigenvalues,
    count_eigenvalues_below,
    refine_by_extrapolation,
)

SCAN_FORMAT_VERSION = 1

# multiple of the lowest free-box level below which a level counts as resolved
_BOX_LIMIT_FACTOR = 10.0


def box_limit_threshold(grid: GridSpec) -> float:
    """Levels above -threshold are box-limited: within a few free-particle
    box quanta of zero, where Dirichlet truncation dominates."""
    return _BOX_LIMIT_FACTOR * math.pi**2 / (2.0 * grid.r_max**2)


@dataclass(frozen=True)
class BetaScan:
    family: Family
    p: float
    l: int
    k_max: int
    betas: tuple[float, ...]
    energies: tuple[tuple[float, ...], ...]        # rows x k_max
    scaled_values: tuple[tuple[float, ...], ...]   # beta^2 * E_k, same shape
    grid: GridSpec

    def to_dict(self) -> dict:
        return {
            "format_version": SCAN_FORMAT_VERSION,
            "family": self.family.value,
            "p": self.p,
            "l": self.l,
            "k_max": self.k_max,
            "grid": {"r_max": self.grid.r_max, "n_points": self.grid.n_points},
            "rows": [
                {
                    "beta": b,
                    "energies": list(e),
                    "scaled_values": list(s),
                }
                for b, e, s in zip(self.betas, self.energies, self.scaled_values)
            ],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "BetaScan":
        if payload.get("format_version") != SCAN_FORMAT_VERSION:
            raise ValueError(f"unsupported scan format: {payload.get('format_version')!r}")
        rows = payload["rows"]
        return cls(
            family=Family(payload["family"]),
            p=float(payload["p"]),
            l=int(payload["l"]),
            k_max=int(payload["k_max"]),
            betas=tuple(float(r["beta"]) for r in rows),
            energies=tuple(tuple(map(float, r["energies"])) for r in rows),
            scaled_values=tuple(tuple(map(float, r["scaled_values"])) for r in rows),
            grid=GridSpec(
                r_max=float(payload["grid"]["r_max"]),
                n_points=int(payload["grid"]["n_points"]),
            ),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "BetaScan":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class ScanCheck:
    passed: bool
    # (k, row index, offending values) for the first violation, else None
    first_violation: tuple | None = None
    excluded_levels: int = 0


@dataclass(frozen=True)
class SandwichRow:
    k: int
    n: int                    # principal quantum number k + l
    lower_bound: float
    energy: float             # extrapolated level
    error_estimate: float
    passed: bool


@dataclass(frozen=True)
class SandwichReport:
    spec: PotentialSpec
    l: int
    rows: tuple[SandwichRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


@dataclass(frozen=True)
class CountReport:
    spec: PotentialSpec
    l: int
    rows: tuple[tuple[float, int, int], ...]   # (r_max, n_points, negative_count)

    @property
    def nondecreasing(self) -> bool:
        counts = [c for _, _, c in self.rows]
        return all(b >= a for a, b in zip(counts, counts[1:]))

    @property
    def strictly_grew(self) -> bool:
        return len(self.rows) >= 2 and self.rows[-1][2] > self.rows[0][2]


class ScanFailure(SolverError):
    """A scan aborted mid-sweep; carries the completed prefix."""

    def __init__(self, message: str, partial: "BetaScan", failed_beta: float):
        super().__init__(message)
        self.partial = partial
        self.failed_beta = failed_beta


def _scan_row(args) -> tuple[float, list[float]]:
    family, p, beta, l, k_max, r_max, n_points = args
    spec = PotentialSpec(family=family, beta=beta, p=p)
    problem = RadialProblem(spec, l, GridSpec(r_max=r_max, n_points=n_points))
    return beta, [float(x) for x in _lowest_eigenvalues(problem, k_max)]


def run_beta_scan(
    family: Family,
    p: float,
    l: int,
    k_max: int,
    beta_grid: Sequence[float],
    grid: GridSpec,
    parallelism: int = 1,
) -> BetaScan:
    """Solve one row per beta (all rows on the identical grid) and tabulate
    E_k and beta^2 E_k.  Rows are independent; `parallelism` > 1 fans them
    out over processes without changing the output."""
    betas = [float(b) for b in beta_grid]
    if not betas:
        raise ValueError("beta grid is empty")
    if any(b < 0.0 for b in betas):
        raise ValueError("beta grid values must be >= 0")
    if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise ValueError("beta grid must be strictly increasing")
    if parallelism < 1:
        raise ValueError(f"parallelism must be >= 1, got {parallelism}")

    jobs = [(family, p, b, l, k_max, grid.r_max, grid.n_points) for b in betas]
    rows: list[list[float]] = []

    def assemble(done_betas: list[float]) -> BetaScan:
        energies = tuple(tuple(row) for row in rows)
        # + 0.0 turns the -0.0 of the beta = 0 row into a plain zero
        scaled = tuple(
            tuple(b * b * e + 0.0 for e in row) for b, row in zip(done_betas, energies)
        )
        return BetaScan(
            family=family,
            p=p,
            l=l,
            k_max=k_max,
            betas=tuple(done_betas),
            energies=energies,
            scaled_values=scaled,
            grid=grid,
        )

    try:
        if parallelism == 1 or len(jobs) == 1:
            for job in jobs:
                rows.append(_scan_row(job)[1])
        else:
            with ProcessPoolExecutor(max_workers=parallelism) as pool:
                for _, energies in pool.map(_scan_row, jobs):
                    rows.append(energies)
    except SolverError as exc:
        failed = betas[len(rows)]
        raise ScanFailure(
            f"scan failed at beta = {failed:g}: {exc}",
            partial=assemble(betas[: len(rows)]),
            failed_beta=failed,
        ) from exc

    return assemble(betas)


def check_monotone_decrease(scan: BetaScan, margin: float = 1e-10) -> ScanCheck:
    """beta^2 E_k must drop by more than `margin` between consecutive rows,
    for every k.  Returns the first violation as (k, row j, value_j, value_j+1)."""
    if len(scan.betas) < 2:
        raise ValueError("monotone decrease needs at least 2 scan rows")
    for k in range(scan.k_max):
        for j in range(len(scan.betas) - 1):
            a = scan.scaled_values[j][k]
            b = scan.scaled_values[j + 1][k]
            if not b < a - margin:
                return ScanCheck(passed=False, first_violation=(k + 1, j, a, b))
    return ScanCheck(passed=True)


def check_negativity(scan: BetaScan) -> ScanCheck:
    """Every level must be strictly negative, skipping box-limited levels
    (those within the box-resolution threshold of zero)."""
    threshold = box_limit_threshold(scan.grid)
    excluded = 0
    for j, row in enumerate(scan.energies):
        for k, energy in enumerate(row):
            if energy > -threshold:
                if energy < 0.0:
                    excluded += 1
                    continue
                return ScanCheck(
                    passed=False,
                    first_violation=(k + 1, j, energy),
                    excluded_levels=excluded,
                )
    return ScanCheck(passed=True, excluded_levels=excluded)


def coulomb_sandwich(
    spec: PotentialSpec, l: int, k_max: int, grid: GridSpec
) -> SandwichReport:
    """Check -1/(2(k+l)^2) - tol <= E_{k,l}(beta) < 0 with the lower bound
    from the exact Coulomb level of principal quantum number n = k+l.

    Energies are extrapolated on a two-grid ladder; tol is 1e-6 plus the
    per-level extrapolation error estimate, so the bound stays meaningful
    at beta = 0 where it is tight.
    """
    ladder = [
        GridSpec(r_max=grid.r_max, n_points=max(grid.n_points // 2, k_max)),
        grid,
    ]
    problem = RadialProblem(spec, l, grid)
    energies, errors = refine_by_extrapolation(problem, k_max, ladder)
    rows = []
    for k in range(1, k_max + 1):
        n = k + l
        lower = -0.5 / n**2
        tol = 1e-6 + float(errors[k - 1])
        e = float(energies[k - 1])
        rows.append(
            SandwichRow(
                k=k,
                n=n,
                lower_bound=lower,
                energy=e,
                error_estimate=float(errors[k - 1]),
                passed=(lower - tol <= e < 0.0),
            )
        )
    return SandwichReport(spec=spec, l=l, rows=tuple(rows))


def count_growth(
    spec: PotentialSpec, l: int, box_ladder: Sequence[GridSpec]
) -> CountReport:
    """Negative-eigenvalue count per box of a fixed-step ladder; the count
    must not decrease as the box grows (checked by the caller through the
    report's properties)."""
    if not box_ladder:
        raise ValueError("box ladder is empty")
    r_maxes = [g.r_max for g in box_ladder]
    if any(b <= a for a, b in zip(r_maxes, r_maxes[1:])):
        raise ValueError("box ladder r_max must be strictly increasing")
    h0 = box_ladder[0].h
    for g in box_ladder[1:]:
        if abs(g.h - h0) > 1e-12 * h0:
            raise ValueError(
                f"box ladder must keep the grid step fixed: {g.h!r} != {h0!r}"
            )
    rows = []
    for g in box_ladder:
        problem = RadialProblem(spec, l, g)
        rows.append((g.r_max, g.n_points, count_eigenvalues_below(problem, 0.0)))
    return CountReport(spec=spec, l=l, rows=tuple(rows))


def fixed_step_ladder(r_maxes: Sequence[float], step: float) -> list[GridSpec]:
    """Grids over increasing boxes sharing one step; r_max values must be
    integer multiples of the step."""
    grids = []
    for r_max in r_maxes:
        ratio = r_max / step
        n = int(round(ratio)) - 1
        if abs(ratio - round(ratio)) > 1e-9 or n < 1:
            raise ValueError(f"r_max = {r_max} is not a multiple of step = {step}")
        grids.append(GridSpec(r_max=float(r_max), n_points=n))
    return grids
