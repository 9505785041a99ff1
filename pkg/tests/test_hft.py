"""Scaling transformation and derivative-identity checks.

The oracle-pinned value below comes from tests/oracles.py (independent
dense-grid assembly + shift-invert Lanczos, Richardson extrapolated).
"""

import math

import numpy as np
import pytest

from hft_spectra import (
    Family,
    GridSpec,
    PotentialSpec,
    hft_check,
    residual_ladder,
    scaled_eigenvalue,
    scaling_consistency,
)

SCREENED_B1_K1 = -0.154883139986   # continuum ground state for beta = 1

REF_GRID = GridSpec(r_max=200.0, n_points=8000)
FAST_GRID = GridSpec(r_max=200.0, n_points=2000)


class TestScaledEigenvalue:
    def test_beta_zero_is_free_particle_box(self):
        spec = PotentialSpec(Family.SCREENED, beta=0.0)
        e1 = scaled_eigenvalue(spec, 1, 0, FAST_GRID)
        assert e1 > 0.0
        assert e1 == pytest.approx(math.pi**2 / (2.0 * FAST_GRID.r_max**2), rel=1e-3)

    def test_screened_beta1_matches_oracle(self):
        # at beta = 1 the rescaled eigenvalue equals the plain ground state
        spec = PotentialSpec(Family.SCREENED, beta=1.0)
        e1 = scaled_eigenvalue(spec, 1, 0, REF_GRID)
        assert e1 == pytest.approx(SCREENED_B1_K1, abs=1e-5)


class TestScalingConsistency:
    def test_identity_at_beta_one(self):
        for family, p in ((Family.SCREENED, 1.0), (Family.TRUNCATED, 2.0)):
            spec = PotentialSpec(family, beta=1.0, p=p)
            assert scaling_consistency(spec, 1, 0, REF_GRID) <= 1e-12

    def test_screened_half(self):
        spec = PotentialSpec(Family.SCREENED, beta=0.5)
        assert scaling_consistency(spec, 1, 0, REF_GRID) <= 1e-4

    def test_truncated_p1_beta2_second_level(self):
        spec = PotentialSpec(Family.TRUNCATED, beta=2.0, p=1.0)
        assert scaling_consistency(spec, 2, 0, REF_GRID) <= 1e-4

    def test_truncated_quarter_scaling(self):
        # beta = 0.5: the rescaled eigenvalue must equal E_1/4 across paths
        spec = PotentialSpec(Family.TRUNCATED, beta=0.5, p=2.0)
        assert scaling_consistency(spec, 1, 0, REF_GRID) <= 1e-4

    def test_beta_zero_rejected(self):
        spec = PotentialSpec(Family.SCREENED, beta=0.0)
        with pytest.raises(ValueError):
            scaling_consistency(spec, 1, 0, FAST_GRID)


class TestHftCheck:
    def test_screened_reference_case(self):
        spec = PotentialSpec(Family.SCREENED, beta=1.0)
        report = hft_check(spec, 1, 0, REF_GRID, delta_beta=1e-3)
        assert not report.one_sided
        assert report.rhs_expect < 0.0
        assert report.residual <= 1e-3 * abs(report.rhs_expect)

    def test_truncated_second_level(self):
        spec = PotentialSpec(Family.TRUNCATED, beta=0.5, p=2.0)
        report = hft_check(spec, 2, 0, REF_GRID, delta_beta=1e-3)
        assert report.residual <= 1e-3 * abs(report.rhs_expect)

    @pytest.mark.parametrize("family,p", [(Family.SCREENED, 1.0), (Family.TRUNCATED, 2.0)])
    @pytest.mark.parametrize("beta", [0.1, 0.5, 1.0, 2.0])
    @pytest.mark.parametrize("k", [1, 2])
    def test_expectation_side_always_negative(self, family, p, beta, k):
        spec = PotentialSpec(family, beta=beta, p=p)
        report = hft_check(spec, k, 0, FAST_GRID, delta_beta=1e-3)
        assert report.rhs_expect < 0.0

    def test_residual_shrinks_with_step(self):
        spec = PotentialSpec(Family.SCREENED, beta=0.5)
        deltas, residuals, slope = residual_ladder(spec, 1, 0, FAST_GRID, 1e-3)
        assert np.all(np.diff(residuals) < 0.0)   # 4d > 2d > d
        assert slope >= 1.7

    def test_default_step_goes_one_sided_for_tiny_beta(self):
        spec = PotentialSpec(Family.SCREENED, beta=0.005)
        report = hft_check(spec, 1, 0, FAST_GRID)
        assert report.one_sided
        assert report.delta_beta == pytest.approx(1e-3)

    def test_explicit_oversized_step_rejected(self):
        spec = PotentialSpec(Family.SCREENED, beta=0.005)
        with pytest.raises(ValueError):
            hft_check(spec, 1, 0, FAST_GRID, delta_beta=1e-3)

    def test_beta_zero_rejected(self):
        spec = PotentialSpec(Family.SCREENED, beta=0.0)
        with pytest.raises(ValueError):
            hft_check(spec, 1, 0, FAST_GRID)

    @pytest.mark.parametrize("family,p", [(Family.SCREENED, 1.0), (Family.TRUNCATED, 2.0)])
    def test_rescaled_eigenvalue_concave_in_beta(self, family, p):
        delta = 0.05
        for beta in (0.5, 1.0):
            for k in (1, 2):
                spec = PotentialSpec(family, beta=beta, p=p)
                e0 = scaled_eigenvalue(PotentialSpec(family, beta=beta - delta, p=p), k, 0, FAST_GRID)
                e1 = scaled_eigenvalue(spec, k, 0, FAST_GRID)
                e2 = scaled_eigenvalue(PotentialSpec(family, beta=beta + delta, p=p), k, 0, FAST_GRID)
                assert e2 - 2.0 * e1 + e0 <= 1e-8
