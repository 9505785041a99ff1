"""Finite-difference eigensolver for the radial problem on [0, r_max].

The 3-D problem separates into radial equations for u(r) = r*R(r):

    -1/2 u'' + [V(r) + l(l+1)/(2 r^2)] u = E u,   u(0) = u(r_max) = 0.

A uniform grid with the 3-point stencil yields a symmetric tridiagonal
operator whose lowest eigenvalues are found selectively by Sturm-sequence
bisection with inverse-iteration eigenvectors (LAPACK *stebz/*stein via
scipy); the discretization error is O(h^2) and is removed afterwards by
Richardson extrapolation on a grid ladder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.linalg import LinAlgError

from .potentials import PotentialSpec, potential_value, scaled_potential_value

# eigenvalues closer than this are treated as a solver failure, never as a
# legitimately degenerate pair (the radial operator has simple spectrum)
_COINCIDENCE_TOL = 1e-12


class SolverError(RuntimeError):
    """A solve that started but could not produce trustworthy output."""


class ConvergenceError(SolverError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class GridSpec:
    """Uniform radial grid: step h = r_max/(n_points+1), interior nodes
    r_i = i*h for i = 1..n_points, Dirichlet conditions at 0 and r_max."""

    r_max: float
    n_points: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r_max) and self.r_max > 0.0):
            raise ValueError(f"r_max must be finite and > 0, got {self.r_max}")
        if not isinstance(self.n_points, (int, np.integer)) or self.n_points < 1:
            raise ValueError(f"n_points must be an integer >= 1, got {self.n_points}")

    @property
    def h(self) -> float:
        return self.r_max / (self.n_points + 1)

    def nodes(self) -> np.ndarray:
        return self.h * np.arange(1, self.n_points + 1)


@dataclass(frozen=True)
class RadialProblem:
    spec: PotentialSpec
    l: int
    grid: GridSpec
    use_scaled_form: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.l, (int, np.integer)) or self.l < 0:
            raise ValueError(f"angular momentum l must be an integer >= 0, got {self.l}")

    def effective_potential(self, r: np.ndarray) -> np.ndarray:
        if self.use_scaled_form:
            v = scaled_potential_value(self.spec, r)
        else:
            v = potential_value(self.spec, r)
        if self.l:
            v = v + self.l * (self.l + 1) / (2.0 * r * r)
        return np.asarray(v, dtype=float)


@dataclass(frozen=True)
class EigenResult:
    energies: np.ndarray            # strictly increasing, length = count
    eigenfunctions: np.ndarray      # shape (n_points, count), sum(u^2)*h == 1
    grid: GridSpec
    negative_count: int = field(default=0)

    def eigenfunction(self, k: int) -> np.ndarray:
        """Radial eigenfunction of the k-th level (k = 1 is the lowest)."""
        return self.eigenfunctions[:, k - 1]


def build_tridiagonal(problem: RadialProblem) -> tuple[np.ndarray, np.ndarray]:
    """Assemble (diagonal, off-diagonal) of the discrete radial operator.

    diagonal  d_i = 1/h^2 + V_eff(r_i)
    off-diag  e_i = -1/(2 h^2)
    """
    grid = problem.grid
    h = grid.h
    r = grid.nodes()
    w = problem.effective_potential(r)
    if not np.all(np.isfinite(w)):
        bad = int(np.flatnonzero(~np.isfinite(w))[0])
        raise OverflowError(
            f"effective potential is non-finite at node {bad + 1} (r = {r[bad]:.6g})"
        )
    d = 1.0 / h**2 + w
    e = np.full(grid.n_points - 1, -0.5 / h**2)
    return d, e


def _check_spacing(energies: np.ndarray) -> None:
    if len(energies) > 1:
        gaps = np.diff(energies)
        tight = np.flatnonzero(gaps < _COINCIDENCE_TOL)
        if len(tight):
            k = int(tight[0])
            raise ConvergenceError(
                f"eigenvalues {k + 1} and {k + 2} coincide within {_COINCIDENCE_TOL:g} "
                f"({energies[k]!r}, {energies[k + 1]!r}); treating as solver failure",
                index=k,
            )


def _lowest_eigenvalues(problem: RadialProblem, count: int) -> np.ndarray:
    """Eigenvalues only; the fast path for scans and finite differences."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if count > problem.grid.n_points:
        raise ValueError(
            f"count = {count} exceeds the {problem.grid.n_points}-point grid"
        )
    d, e = build_tridiagonal(problem)
    try:
        w = eigh_tridiagonal(
            d, e, eigvals_only=True, select="i", select_range=(0, count - 1)
        )
    except LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue bisection failed: {exc}") from exc
    _check_spacing(w)
    return w


def lowest_eigenpairs(problem: RadialProblem, count: int) -> EigenResult:
    """The `count` lowest eigenvalues with eigenfunctions normalized so that
    sum(u_i^2)*h = 1; deterministic for identical inputs."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if count > problem.grid.n_points:
        raise ValueError(
            f"count = {count} exceeds the {problem.grid.n_points}-point grid"
        )
    d, e = build_tridiagonal(problem)
    try:
        w, v = eigh_tridiagonal(d, e, select="i", select_range=(0, count - 1))
    except LinAlgError as exc:
        raise ConvergenceError(f"eigenpair computation failed: {exc}") from exc
    _check_spacing(w)
    h = problem.grid.h
    v = v / math.sqrt(h)
    # deterministic sign: largest-magnitude component is positive
    for j in range(v.shape[1]):
        col = v[:, j]
        if col[int(np.argmax(np.abs(col)))] < 0.0:
            v[:, j] = -col
    return EigenResult(
        energies=w,
        eigenfunctions=v,
        grid=problem.grid,
        negative_count=int(np.sum(w < 0.0)),
    )


def refine_by_extrapolation(
    problem: RadialProblem, count: int, grid_ladder: Sequence[GridSpec]
) -> tuple[np.ndarray, np.ndarray]:
    """Richardson-extrapolate E_k(h) = E_k* + c*h^2 on the two finest grids
    of the ladder; returns (E*, error estimates |E* - E(finest)|)."""
    if len(grid_ladder) < 2:
        raise ValueError("grid ladder needs at least 2 grids")
    r_max = grid_ladder[0].r_max
    if any(g.r_max != r_max for g in grid_ladder):
        raise ValueError("inconsistent ladder: r_max must be identical across grids")
    hs = [g.h for g in grid_ladder]
    if any(hb >= ha for ha, hb in zip(hs, hs[1:])):
        raise ValueError("inconsistent ladder: h must be strictly decreasing")
    coarse, fine = grid_ladder[-2], grid_ladder[-1]
    e_coarse = _lowest_eigenvalues(
        RadialProblem(problem.spec, problem.l, coarse, problem.use_scaled_form), count
    )
    e_fine = _lowest_eigenvalues(
        RadialProblem(problem.spec, problem.l, fine, problem.use_scaled_form), count
    )
    ha2, hb2 = coarse.h**2, fine.h**2
    extrapolated = (ha2 * e_fine - hb2 * e_coarse) / (ha2 - hb2)
    return extrapolated, np.abs(extrapolated - e_fine)


def expectation_value(u: np.ndarray, grid: GridSpec, g: Callable[[np.ndarray], np.ndarray]) -> float:
    """Quadrature expectation sum_i u_i^2 g(r_i) h over a normalized radial
    eigenfunction; returns 1 (to rounding) for g == 1."""
    r = grid.nodes()
    gv = np.asarray(g(r), dtype=float)
    if gv.shape != r.shape:
        gv = np.broadcast_to(gv, r.shape)
    if not np.all(np.isfinite(gv)):
        raise ValueError("g(r) is non-finite at a grid node")
    return float(np.sum(u * u * gv) * grid.h)


def count_eigenvalues_below(problem: RadialProblem, threshold: float = 0.0) -> int:
    """Number of eigenvalues strictly below `threshold`, by the Sturm
    sequence count of the tridiagonal operator (exact, no diagonalization)."""
    d, e = build_tridiagonal(problem)
    dl = (d - threshold).tolist()
    e2 = (e * e).tolist()
    count = 0
    q = dl[0]
    if q < 0.0:
        count += 1
    tiny = 1e-300
    for i in range(1, len(dl)):
        if q == 0.0:
            q = tiny
        q = dl[i] - e2[i - 1] / q
        if q < 0.0:
            count += 1
    return count


def count_sign_changes(u: np.ndarray) -> int:
    """Interior sign changes of a grid function (Sturm oscillation check)."""
    s = np.sign(u)
    s = s[s != 0.0]
    return int(np.sum(s[:-1] * s[1:] < 0.0))
