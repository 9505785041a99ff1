"""Discrete radial operator, selective eigensolver, and extrapolation.

Expected values marked as oracle-pinned were produced by the independent
dense-grid path in tests/oracles.py (shift-invert Lanczos on a 32000-point
assembly, Richardson-extrapolated): see its regenerate().
"""

import math

import numpy as np
import pytest

from hft_spectra import (
    ConvergenceError,
    Family,
    GridSpec,
    PotentialSpec,
    RadialProblem,
    build_tridiagonal,
    count_eigenvalues_below,
    count_sign_changes,
    expectation_value,
    lowest_eigenpairs,
    refine_by_extrapolation,
)

# frozen oracle values (continuum limits unless stated otherwise)
SCREENED_B05_K1 = -0.222362961924
SCREENED_B05_K1_N8000 = -0.222366490422   # discrete value at the reference grid
TRUNCATED_P2_B1_K1 = -0.274891348761

COULOMB = PotentialSpec(Family.PURE_COULOMB)
REF_GRID = GridSpec(r_max=200.0, n_points=8000)


def hydrogen_level(n: int) -> float:
    return -0.5 / n**2


class TestBuildTridiagonal:
    def test_single_node_coulomb_by_hand(self):
        # h = 0.5, r_1 = 0.5: d_1 = 1/h^2 - 1/r_1 = 4 - 2
        problem = RadialProblem(COULOMB, 0, GridSpec(r_max=1.0, n_points=1))
        d, e = build_tridiagonal(problem)
        assert d.shape == (1,) and e.shape == (0,)
        assert d[0] == pytest.approx(2.0, abs=1e-14)

    def test_off_diagonal_is_potential_independent(self):
        grid = GridSpec(r_max=30.0, n_points=59)
        stencil = -0.5 / grid.h**2
        for spec in (COULOMB, PotentialSpec(Family.SCREENED, beta=1.0)):
            _, e = build_tridiagonal(RadialProblem(spec, 0, grid))
            assert np.all(e == stencil)

    def test_screened_l1_first_entry_by_hand(self):
        # h = 1 so r_1 = 1: d_1 = 1/h^2 + l(l+1)/(2 r_1^2) - e^{-1}/1
        grid = GridSpec(r_max=18.0, n_points=17)
        assert grid.h == pytest.approx(1.0, abs=0)
        spec = PotentialSpec(Family.SCREENED, beta=1.0)
        d, _ = build_tridiagonal(RadialProblem(spec, 1, grid))
        assert d[0] == pytest.approx(1.0 + 1.0 - math.exp(-1.0), abs=1e-14)

    def test_non_finite_effective_potential_raises(self):
        # r_1 is subnormal, so -1/r overflows
        problem = RadialProblem(COULOMB, 0, GridSpec(r_max=1e-320, n_points=16))
        with pytest.raises(OverflowError):
            build_tridiagonal(problem)


class TestLowestEigenpairs:
    def test_hydrogen_levels_before_extrapolation(self):
        result = lowest_eigenpairs(RadialProblem(COULOMB, 0, REF_GRID), 3)
        for k in (1, 2, 3):
            assert result.energies[k - 1] == pytest.approx(hydrogen_level(k), abs=2e-3)
        assert result.negative_count == 3

    def test_screened_ground_state_matches_oracle(self):
        spec = PotentialSpec(Family.SCREENED, beta=0.5)
        result = lowest_eigenpairs(RadialProblem(spec, 0, REF_GRID), 1)
        assert result.energies[0] == pytest.approx(SCREENED_B05_K1_N8000, abs=1e-9)
        assert result.energies[0] == pytest.approx(SCREENED_B05_K1, abs=1e-5)

    def test_count_zero_rejected(self):
        with pytest.raises(ValueError):
            lowest_eigenpairs(RadialProblem(COULOMB, 0, REF_GRID), 0)

    def test_count_beyond_grid_rejected(self):
        problem = RadialProblem(COULOMB, 0, GridSpec(r_max=10.0, n_points=20))
        with pytest.raises(ValueError):
            lowest_eigenpairs(problem, 21)

    def test_normalization(self):
        grid = GridSpec(r_max=100.0, n_points=2000)
        result = lowest_eigenpairs(RadialProblem(COULOMB, 0, grid), 4)
        for k in range(1, 5):
            u = result.eigenfunction(k)
            assert abs(np.sum(u * u) * grid.h - 1.0) <= 1e-10

    def test_strictly_increasing_no_near_duplicates(self):
        grid = GridSpec(r_max=150.0, n_points=3000)
        for spec in (COULOMB, PotentialSpec(Family.TRUNCATED, beta=1.0, p=2.0)):
            result = lowest_eigenpairs(RadialProblem(spec, 0, grid), 6)
            assert np.all(np.diff(result.energies) > 1e-10)

    def test_node_counts_follow_level_index(self):
        grid = GridSpec(r_max=150.0, n_points=3000)
        for l in (0, 1):
            result = lowest_eigenpairs(
                RadialProblem(PotentialSpec(Family.SCREENED, beta=0.5), l, grid), 4
            )
            for k in range(1, 5):
                assert count_sign_changes(result.eigenfunction(k)) == k - 1

    def test_deterministic_across_calls(self):
        spec = PotentialSpec(Family.SCREENED, beta=0.5)
        problem = RadialProblem(spec, 0, GridSpec(r_max=100.0, n_points=1500))
        a = lowest_eigenpairs(problem, 3)
        b = lowest_eigenpairs(problem, 3)
        assert np.array_equal(a.energies, b.energies)
        assert np.array_equal(a.eigenfunctions, b.eigenfunctions)

    def test_numerically_coincident_pair_is_a_failure(self):
        # free particle in a gigantic box: level spacing drops below the
        # coincidence threshold and must be reported, not silently ordered
        spec = PotentialSpec(Family.SCREENED, beta=0.0)
        problem = RadialProblem(spec, 0, GridSpec(r_max=1e7, n_points=16), use_scaled_form=True)
        with pytest.raises(ConvergenceError):
            lowest_eigenpairs(problem, 3)

    def test_scaled_form_at_beta_zero_is_free_box(self):
        grid = GridSpec(r_max=50.0, n_points=500)
        spec = PotentialSpec(Family.TRUNCATED, beta=0.0, p=2.0)
        result = lowest_eigenpairs(RadialProblem(spec, 0, grid, use_scaled_form=True), 3)
        assert np.all(result.energies > 0.0)
        assert result.negative_count == 0

    def test_box_shrinks_spectrum_upward(self):
        # same step, growing box: Dirichlet restriction can only raise levels
        spec = PotentialSpec(Family.SCREENED, beta=0.5)
        ladders = [GridSpec(50.0, 999), GridSpec(100.0, 1999), GridSpec(200.0, 3999)]
        previous = None
        for grid in ladders:
            energies = lowest_eigenpairs(RadialProblem(spec, 0, grid), 4).energies
            if previous is not None:
                # slack covers the eigensolver's eps*||T|| absolute tolerance
                assert np.all(previous >= energies - 1e-10)
            previous = energies

    @pytest.mark.parametrize("family,p", [(Family.SCREENED, 1.0), (Family.TRUNCATED, 2.0)])
    @pytest.mark.parametrize("l", [0, 1, 2])
    def test_coulomb_domination(self, family, p, l):
        # V >= -1/r pointwise, so on the same grid every level dominates
        grid = GridSpec(r_max=150.0, n_points=2000)
        base = lowest_eigenpairs(RadialProblem(COULOMB, l, grid), 5).energies
        for beta in (0.5, 1.0, 2.0):
            spec = PotentialSpec(family, beta=beta, p=p)
            energies = lowest_eigenpairs(RadialProblem(spec, l, grid), 5).energies
            assert np.all(energies >= base - 1e-10)


class TestRefineByExtrapolation:
    def test_hydrogen_ground_state(self):
        problem = RadialProblem(COULOMB, 0, REF_GRID)
        ladder = [GridSpec(200.0, 4000), GridSpec(200.0, 8000)]
        energies, errors = refine_by_extrapolation(problem, 2, ladder)
        assert energies[0] == pytest.approx(hydrogen_level(1), abs=1e-5)
        assert energies[1] == pytest.approx(hydrogen_level(2), abs=1e-5)
        assert np.all(errors >= 0.0)

    def test_truncated_ground_state_matches_oracle(self):
        spec = PotentialSpec(Family.TRUNCATED, beta=1.0, p=2.0)
        problem = RadialProblem(spec, 0, REF_GRID)
        ladder = [GridSpec(200.0, 4000), GridSpec(200.0, 8000)]
        energies, _ = refine_by_extrapolation(problem, 1, ladder)
        assert energies[0] == pytest.approx(TRUNCATED_P2_B1_K1, abs=1e-6)

    def test_mixed_r_max_rejected(self):
        problem = RadialProblem(COULOMB, 0, REF_GRID)
        with pytest.raises(ValueError):
            refine_by_extrapolation(problem, 1, [GridSpec(100.0, 1000), GridSpec(200.0, 2000)])

    def test_nondecreasing_step_rejected(self):
        problem = RadialProblem(COULOMB, 0, REF_GRID)
        with pytest.raises(ValueError):
            refine_by_extrapolation(problem, 1, [GridSpec(200.0, 2000), GridSpec(200.0, 1000)])

    def test_single_grid_rejected(self):
        problem = RadialProblem(COULOMB, 0, REF_GRID)
        with pytest.raises(ValueError):
            refine_by_extrapolation(problem, 1, [REF_GRID])

    def test_second_order_convergence(self):
        # error ratio per exact step halving approaches 4 (smooth potential)
        spec = PotentialSpec(Family.SCREENED, beta=0.5)
        energies = []
        for n in (1999, 3999, 7999):
            problem = RadialProblem(spec, 0, GridSpec(200.0, n))
            energies.append(lowest_eigenpairs(problem, 1).energies[0])
        ratio = abs(energies[0] - energies[1]) / abs(energies[1] - energies[2])
        assert ratio == pytest.approx(4.0, rel=0.15)


@pytest.fixture(scope="module")
def hydrogen_ground():
    result = lowest_eigenpairs(RadialProblem(COULOMB, 0, REF_GRID), 1)
    return result.eigenfunction(1)


class TestExpectationValue:

    def test_unit_function_gives_one(self, hydrogen_ground):
        value = expectation_value(hydrogen_ground, REF_GRID, lambda r: np.ones_like(r))
        assert abs(value - 1.0) <= 1e-10

    def test_hydrogen_inverse_radius(self, hydrogen_ground):
        value = expectation_value(hydrogen_ground, REF_GRID, lambda r: 1.0 / r)
        assert value == pytest.approx(1.0, abs=1e-3)

    def test_hydrogen_mean_radius(self, hydrogen_ground):
        value = expectation_value(hydrogen_ground, REF_GRID, lambda r: r)
        assert value == pytest.approx(1.5, abs=1e-3)

    def test_linear_in_g(self, hydrogen_ground):
        a = expectation_value(hydrogen_ground, REF_GRID, lambda r: r)
        b = expectation_value(hydrogen_ground, REF_GRID, lambda r: 1.0 / r)
        combined = expectation_value(hydrogen_ground, REF_GRID, lambda r: 2.0 * r + 3.0 / r)
        assert combined == pytest.approx(2.0 * a + 3.0 * b, rel=1e-12)

    def test_non_finite_weight_rejected(self, hydrogen_ground):
        with pytest.raises(ValueError):
            expectation_value(hydrogen_ground, REF_GRID, lambda r: np.where(r > 1, np.inf, 1.0))


class TestCountBelow:
    def test_matches_eigenvalue_count(self):
        spec = PotentialSpec(Family.SCREENED, beta=0.5)
        problem = RadialProblem(spec, 0, GridSpec(r_max=100.0, n_points=1500))
        sturm = count_eigenvalues_below(problem, 0.0)
        energies = lowest_eigenpairs(problem, sturm + 2).energies
        assert np.sum(energies < 0.0) == sturm

    def test_threshold_shift(self):
        problem = RadialProblem(COULOMB, 0, GridSpec(r_max=100.0, n_points=1500))
        assert count_eigenvalues_below(problem, -0.4) == 1   # only the ground state
        assert count_eigenvalues_below(problem, -0.3) == 1
        assert count_eigenvalues_below(problem, -0.1) == 2
