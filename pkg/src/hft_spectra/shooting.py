"""Independent bound-state oracle: Numerov shooting with turning-point matching.

This solver shares nothing with the tridiagonal path: it integrates the
radial equation outward from the origin and inward from the far boundary
with the fourth-order Numerov recurrence, matches the two branches at the
outermost classical turning point, and locates the eigenvalue by node
counting plus a derivative-mismatch correction.  It exists so the main
solver can be checked against an algorithm with different discretization
and different failure modes.
"""

from __future__ import annotations

import numpy as np

from .potentials import PotentialSpec, potential_value
from .solver import SolverError


def _effective_potential(spec: PotentialSpec, l: int, r: np.ndarray) -> np.ndarray:
    v = np.asarray(potential_value(spec, r), dtype=float)
    if l:
        v = v + l * (l + 1) / (2.0 * r * r)
    return v


def _coulomb_tail_charge(spec: PotentialSpec) -> float:
    # -lim r*V(r) as r -> 0+, which fixes the next order of u ~ r^(l+1)
    # near the origin; zero for both screened and truncated families.
    r_probe = 1e-8
    return -r_probe * float(potential_value(spec, r_probe))


def shooting_energy(
    spec: PotentialSpec,
    l: int,
    k: int = 1,
    r_max: float = 100.0,
    step: float = 0.005,
    max_iter: int = 300,
    tol: float = 1e-13,
) -> float:
    """Energy of the k-th bound level (k = 1 is the lowest) for the radial
    problem at angular momentum l, on the half line truncated at r_max.

    Raises SolverError when no such bound level exists in (min V_eff, 0).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = int(round(r_max / step))
    r = step * np.arange(1, n + 1)
    w = _effective_potential(spec, l, r)
    z = _coulomb_tail_charge(spec)
    nodes_target = k - 1

    e_lo = float(w.min())
    e_hi = 0.0
    if e_lo >= e_hi:
        raise SolverError("effective potential has no negative region; no bound state")
    energy = 0.5 * (e_lo + e_hi)
    h2_12 = step * step / 12.0

    for _ in range(max_iter):
        g = 2.0 * (energy - w)
        f = (1.0 + h2_12 * g).tolist()

        # outermost classical turning point: g changes from + to - there
        negative = g < 0.0
        crossings = np.flatnonzero(~negative[:-1] & negative[1:])
        if len(crossings) == 0 or crossings[-1] < 2:
            # no (usable) classically allowed region: energy is too low
            e_lo = energy
            energy = 0.5 * (e_lo + e_hi)
            continue
        if crossings[-1] > n - 10:
            # turning point at the box edge: the level does not fit yet
            e_hi = energy
            energy = 0.5 * (e_lo + e_hi)
            continue
        m = int(crossings[-1])

        u = [0.0] * n
        u[0] = r[0] ** (l + 1) * (1.0 - z * r[0] / (l + 1))
        u[1] = r[1] ** (l + 1) * (1.0 - z * r[1] / (l + 1))
        ncross = 0
        for i in range(1, m + 1):
            u[i + 1] = ((12.0 - 10.0 * f[i]) * u[i] - f[i - 1] * u[i - 1]) / f[i + 1]
            if u[i + 1] * u[i] < 0.0:
                ncross += 1
        if ncross != nodes_target:
            if ncross > nodes_target:
                e_hi = energy
            else:
                e_lo = energy
            energy = 0.5 * (e_lo + e_hi)
            continue

        outward_value = u[m]
        u[n - 1] = 0.0
        u[n - 2] = 1e-12
        for i in range(n - 2, m, -1):
            u[i - 1] = ((12.0 - 10.0 * f[i]) * u[i] - f[i + 1] * u[i + 1]) / f[i - 1]
            if abs(u[i - 1]) > 1e100:
                scale = 1.0 / u[i - 1]
                for j in range(i - 1, n):
                    u[j] *= scale

        scale = outward_value / u[m]
        for j in range(m, n):
            u[j] *= scale

        ua = np.asarray(u)
        ua = ua / np.sqrt(np.sum(ua * ua) * step)
        u_m = float(ua[m])

        # derivative mismatch at the matching point, folded into an energy
        # update: a kink of strength du' acts like -(1/2) du' u(m) delta(r-r_m)
        u_smooth = (ua[m - 1] * f[m - 1] + ua[m + 1] * f[m + 1] + 10.0 * f[m] * u_m) / 12.0
        df = f[m] * (u_m / u_smooth - 1.0)
        delta_e = df / h2_12 * u_smooth * u_smooth * step / 2.0

        if delta_e > 0.0:
            e_lo = energy
        elif delta_e < 0.0:
            e_hi = energy
        candidate = energy + delta_e
        if not (e_lo < candidate < e_hi):
            candidate = 0.5 * (e_lo + e_hi)
        if abs(delta_e) < tol or (e_hi - e_lo) < tol:
            return candidate
        energy = candidate

    raise SolverError(
        f"shooting did not converge after {max_iter} iterations "
        f"(bracket [{e_lo!r}, {e_hi!r}])"
    )
