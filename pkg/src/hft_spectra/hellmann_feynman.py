"""Scaling transformation and the Hellmann-Feynman identity check.

The coordinate change r -> beta*r turns beta^2 H into a Hamiltonian whose
potential -beta*f(1/r)/r is linear in beta.  Two consequences are verified
numerically, each by comparing two independently computed quantities:

* scaling consistency: beta^2 E_k(beta) from the unscaled solve equals the
  k-th eigenvalue of the rescaled problem;
* the Hellmann-Feynman identity: d/dbeta of the rescaled eigenvalue equals
  -<f(1/r)/r> over the corresponding eigenfunction, which is strictly
  negative -- the reason beta^2 E_k(beta) keeps decreasing and every level
  stays below zero.

The derivative side is always a finite difference of eigenvalues; no
analytic derivative of the solver exists to be confused with it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .potentials import PotentialSpec, scaled_potential_value
from .solver import GridSpec, RadialProblem, _lowest_eigenvalues, expectation_value, lowest_eigenpairs

_SCALED_EIGENVALUE_FLOOR = 1e-14


@dataclass(frozen=True)
class HftReport:
    beta: float
    k: int
    l: int
    lhs_fd: float        # finite-difference slope of the rescaled eigenvalue
    rhs_expect: float    # -<f(1/r)/r>, always < 0
    residual: float
    delta_beta: float
    one_sided: bool = False


def scaled_eigenvalue(spec: PotentialSpec, k: int, l: int, grid: GridSpec) -> float:
    """k-th eigenvalue of the rescaled problem (equals beta^2 E_k(beta) in
    the continuum; at beta = 0 this is the free particle in a box, whose
    spectrum is entirely nonnegative)."""
    problem = RadialProblem(spec, l, grid, use_scaled_form=True)
    return float(_lowest_eigenvalues(problem, k)[k - 1])


def _density_matched(grid: GridSpec, r_max: float) -> GridSpec:
    n = max(int(round(r_max / grid.h)) - 1, 1)
    return GridSpec(r_max=r_max, n_points=n)


def scaling_consistency(spec: PotentialSpec, k: int, l: int, grid: GridSpec) -> float:
    """Relative mismatch |beta^2 E_k - E~_k| / |E~_k| between the unscaled
    and rescaled solves.

    The rescaled problem runs on `grid`; the unscaled one on a box of
    r_max/beta with the same step, the image of the box under the
    coordinate change.  At beta = 1 the two problems are identical and the
    mismatch vanishes to solver determinism.
    """
    if spec.beta <= 0.0:
        raise ValueError("scaling consistency needs beta > 0")
    e_scaled = scaled_eigenvalue(spec, k, l, grid)
    if abs(e_scaled) < _SCALED_EIGENVALUE_FLOOR:
        raise ValueError(
            f"rescaled eigenvalue {e_scaled!r} is too close to zero for a relative mismatch"
        )
    unscaled_grid = _density_matched(grid, grid.r_max / spec.beta)
    problem = RadialProblem(spec, l, unscaled_grid, use_scaled_form=False)
    e_plain = float(_lowest_eigenvalues(problem, k)[k - 1])
    return abs(spec.beta**2 * e_plain - e_scaled) / abs(e_scaled)


def hft_check(
    spec: PotentialSpec,
    k: int,
    l: int,
    grid: GridSpec,
    delta_beta: float | None = None,
) -> HftReport:
    """Compare the finite-difference derivative of the rescaled eigenvalue
    against -<f(1/r)/r> over the rescaled eigenfunction.

    Central difference with step delta_beta (default 1e-3*max(beta, 1)).
    An explicit step larger than beta/10 is rejected; if the *default* step
    exceeds beta/10 (very small beta) a one-sided forward difference is
    used instead and flagged in the report.
    """
    beta = spec.beta
    if beta <= 0.0:
        raise ValueError("hft_check needs beta > 0")
    defaulted = delta_beta is None
    if defaulted:
        delta_beta = 1e-3 * max(beta, 1.0)
    if not (math.isfinite(delta_beta) and delta_beta > 0.0):
        raise ValueError(f"delta_beta must be finite and > 0, got {delta_beta}")
    one_sided = delta_beta > beta / 10.0
    if one_sided and not defaulted:
        raise ValueError(
            f"delta_beta = {delta_beta:g} too large for beta = {beta:g} (limit beta/10)"
        )

    e_plus = scaled_eigenvalue(replace(spec, beta=beta + delta_beta), k, l, grid)
    if one_sided:
        e_here = scaled_eigenvalue(spec, k, l, grid)
        lhs = (e_plus - e_here) / delta_beta
    else:
        e_minus = scaled_eigenvalue(replace(spec, beta=beta - delta_beta), k, l, grid)
        lhs = (e_plus - e_minus) / (2.0 * delta_beta)

    result = lowest_eigenpairs(RadialProblem(spec, l, grid, use_scaled_form=True), k)
    u = result.eigenfunction(k)
    unit_coupling = replace(spec, beta=1.0)
    rhs = -expectation_value(u, grid, lambda r: -scaled_potential_value(unit_coupling, r))
    return HftReport(
        beta=beta,
        k=k,
        l=l,
        lhs_fd=float(lhs),
        rhs_expect=float(rhs),
        residual=abs(float(lhs) - float(rhs)),
        delta_beta=float(delta_beta),
        one_sided=one_sided,
    )


def residual_ladder(
    spec: PotentialSpec,
    k: int,
    l: int,
    grid: GridSpec,
    delta_beta: float,
    factors: tuple[float, ...] = (4.0, 2.0, 1.0),
) -> tuple[np.ndarray, np.ndarray, float]:
    """Residuals of hft_check over steps factor*delta_beta plus the fitted
    log-log slope; a second-order finite difference shows slope ~ 2."""
    deltas = np.array([f * delta_beta for f in factors], dtype=float)
    residuals = np.array(
        [hft_check(spec, k, l, grid, delta_beta=d).residual for d in deltas]
    )
    slope = float(np.polyfit(np.log(deltas), np.log(np.maximum(residuals, 1e-300)), 1)[0])
    return deltas, residuals, slope
