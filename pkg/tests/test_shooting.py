"""Numerov shooting oracle against exact and independently pinned levels."""

import pytest

from hft_spectra import Family, PotentialSpec, SolverError, shooting_energy

SCREENED_B05_K1 = -0.222362961924
TRUNCATED_P2_B1_K1 = -0.274891348761


def test_hydrogen_ground_state():
    energy = shooting_energy(PotentialSpec(Family.PURE_COULOMB), 0, k=1, r_max=60.0)
    assert energy == pytest.approx(-0.5, abs=2e-6)


def test_hydrogen_first_excited():
    energy = shooting_energy(PotentialSpec(Family.PURE_COULOMB), 0, k=2, r_max=60.0)
    assert energy == pytest.approx(-0.125, abs=1e-6)


def test_hydrogen_p_wave():
    energy = shooting_energy(PotentialSpec(Family.PURE_COULOMB), 1, k=1, r_max=60.0)
    assert energy == pytest.approx(-0.125, abs=1e-8)


def test_screened_matches_dense_oracle():
    spec = PotentialSpec(Family.SCREENED, beta=0.5)
    assert shooting_energy(spec, 0) == pytest.approx(SCREENED_B05_K1, abs=1e-7)


def test_truncated_matches_dense_oracle():
    spec = PotentialSpec(Family.TRUNCATED, beta=1.0, p=2.0)
    assert shooting_energy(spec, 0) == pytest.approx(TRUNCATED_P2_B1_K1, abs=1e-7)


def test_no_bound_state_reported():
    # centrifugal wall dwarfs the screened attraction everywhere in the box
    spec = PotentialSpec(Family.SCREENED, beta=50.0)
    with pytest.raises(SolverError):
        shooting_energy(spec, l=50, k=1, r_max=100.0, step=0.01)


def test_bad_level_index_rejected():
    with pytest.raises(ValueError):
        shooting_energy(PotentialSpec(Family.PURE_COULOMB), 0, k=0)
