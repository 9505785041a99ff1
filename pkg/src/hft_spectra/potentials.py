"""Central potentials of the form V(r) = -g(r)/r with a screening factor g.

Three families are supported:

* ``screened``   -- V(r) = -exp(-beta/r)/r, attraction suppressed near the
  origin by an essentially singular factor.
* ``truncated``  -- V(r) = -1/(r^p + beta^p)^(1/p), attraction capped at
  depth 1/beta at the origin.
* ``coulomb``    -- the pure -1/r baseline, the beta = 0 member of both
  families kept as an explicit tag so tests have an unambiguous reference.

Both parametrized families can be written as -f(beta/r)/r where f is the
dimensionless screening factor (f(z) = e^-z and f(z) = (1+z^p)^(-1/p)
respectively); f(0) = 1, 0 < f <= 1, and f is nonincreasing.

All functions accept scalars or numpy arrays for the radial argument and
are pure; there is no shared state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

# exp(-z) underflows to zero well before this; treated as the exact limit
_EXP_ARG_MAX = 745.0


class Family(str, Enum):
    SCREENED = "screened"
    TRUNCATED = "truncated"
    PURE_COULOMB = "coulomb"


@dataclass(frozen=True)
class PotentialSpec:
    """One member of the potential family: a family tag, beta >= 0 and,
    for the truncated family, the truncation exponent p > 0."""

    family: Family
    beta: float = 0.0
    p: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.family, Family):
            raise ValueError(f"unknown potential family: {self.family!r}")
        if not (math.isfinite(self.beta) and self.beta >= 0.0):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if self.family is Family.TRUNCATED and not (
            math.isfinite(self.p) and self.p > 0.0
        ):
            raise ValueError(f"truncation exponent p must be finite and > 0, got {self.p}")


@dataclass(frozen=True)
class DimensionfulInputs:
    """Physical parameters of either dimensionful Hamiltonian, before
    reduction to the single dimensionless parameter beta."""

    hbar: float
    mass: float
    strength: float       # energy*length coupling in front of the attraction
    length_param: float   # screening/truncation length

    def __post_init__(self) -> None:
        for name in ("hbar", "mass", "strength", "length_param"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {value}")


@dataclass(frozen=True)
class UnitReduction:
    beta: float
    length_unit: float
    energy_unit: float


def _as_nonneg_array(z, what: str) -> np.ndarray:
    arr = np.asarray(z, dtype=float)
    if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} must be finite and >= 0")
    return arr


def _as_positive_array(r, what: str) -> np.ndarray:
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} must be finite and > 0")
    return arr


def _pnorm_2(a: np.ndarray, b: float, p: float) -> np.ndarray:
    """(a^p + b^p)^(1/p), evaluated in log space so that large p or widely
    separated magnitudes never overflow."""
    a = np.asarray(a, dtype=float)
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    with np.errstate(divide="ignore"):
        ratio = np.where(hi > 0.0, lo / np.where(hi > 0.0, hi, 1.0), 0.0)
    return hi * np.exp(np.log1p(ratio**p) / p)


def screening_factor(spec: PotentialSpec, z) -> float | np.ndarray:
    """The dimensionless factor multiplying -1/r, as a function of z = beta/r.

    Equals 1 at z = 0 for every family and is identically 1 for the pure
    Coulomb tag; positive and nonincreasing for z >= 0.
    """
    arr = _as_nonneg_array(z, "z")
    if spec.family is Family.PURE_COULOMB:
        out = np.ones_like(arr)
    elif spec.family is Family.SCREENED:
        out = np.exp(-np.minimum(arr, _EXP_ARG_MAX))
        out = np.where(arr > _EXP_ARG_MAX, 0.0, out)
    else:  # truncated: (1 + z^p)^(-1/p)
        p = spec.p
        small = arr <= 1.0
        zs = np.where(small, arr, 1.0)
        zl = np.where(small, 2.0, arr)
        f_small = np.exp(-np.log1p(zs**p) / p)
        f_large = np.exp(-np.log(zl) - np.log1p(zl**-p) / p)
        out = np.where(small, f_small, f_large)
    return out if np.ndim(z) else float(out)


def potential_value(spec: PotentialSpec, r) -> float | np.ndarray:
    """V(r) = -f(beta/r)/r for r > 0.

    For the screened family the value underflows smoothly to -0.0 as
    r -> 0+ (the essential singularity has a removable limit); for the
    truncated family the r -> 0+ limit is -1/beta.
    """
    rr = _as_positive_array(r, "r")
    with np.errstate(over="ignore"):
        if spec.family is Family.PURE_COULOMB or spec.beta == 0.0:
            out = -1.0 / rr
        elif spec.family is Family.SCREENED:
            z = spec.beta / rr
            out = np.where(z > _EXP_ARG_MAX, -0.0, -np.exp(-np.minimum(z, _EXP_ARG_MAX)) / rr)
        else:
            out = -1.0 / _pnorm_2(rr, spec.beta, spec.p)
    return out if np.ndim(r) else float(out)


def scaled_potential_value(spec: PotentialSpec, r) -> float | np.ndarray:
    """Potential of the rescaled problem, -beta*f(1/r)/r: the coordinate
    change r -> beta*r turns beta^2 times the original Hamiltonian into
    a kinetic term plus this potential, which is linear in beta.
    """
    rr = _as_positive_array(r, "r")
    beta = spec.beta
    if beta == 0.0:
        out = np.zeros_like(rr)
    elif spec.family is Family.PURE_COULOMB:
        out = -beta / rr
    elif spec.family is Family.SCREENED:
        with np.errstate(over="ignore"):
            z = 1.0 / rr
        out = np.where(z > _EXP_ARG_MAX, -0.0, -beta * np.exp(-np.minimum(z, _EXP_ARG_MAX)) / rr)
    else:
        # f(1/r)/r simplifies to (1 + r^p)^(-1/p)
        out = -beta / _pnorm_2(rr, 1.0, spec.p)
    return out if np.ndim(r) else float(out)


def reduce_units(inputs: DimensionfulInputs) -> UnitReduction:
    """Collapse (hbar, mass, strength, length_param) to the dimensionless
    beta plus the length and energy units that restore physical values.

    length_unit L = hbar^2/(mass*strength); energy_unit = mass*strength^2/hbar^2;
    beta = length_param/L.  energy_unit*L^2*mass/hbar^2 == 1 to rounding.
    """
    L = inputs.hbar**2 / (inputs.mass * inputs.strength)
    eps = inputs.mass * inputs.strength**2 / inputs.hbar**2
    return UnitReduction(beta=inputs.length_param / L, length_unit=L, energy_unit=eps)
