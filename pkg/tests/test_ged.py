"""Tests for the unit-variance generalized error distribution."""

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from taildep.ged import ged_cdf, ged_logpdf, ged_quantile, ged_scale


def test_reduces_to_standard_normal_at_nu_two():
    """GED(2) is N(0,1); compare log densities on a grid."""
    z = np.linspace(-6.0, 6.0, 121)
    expected = -0.5 * z**2 - 0.5 * np.log(2.0 * np.pi)
    assert np.max(np.abs(ged_logpdf(z, 2.0) - expected)) < 1e-12


def test_frozen_peak_and_shoulder_values():
    assert ged_logpdf(0.0, 2.0) == pytest.approx(-0.9189385332046727, abs=1e-9)
    assert ged_logpdf(1.0, 2.0) == pytest.approx(-1.4189385332046727, abs=1e-9)


def test_density_integrates_to_one():
    for nu in (0.8, 1.0, 1.5, 2.0, 5.0):
        mass, _ = quad(lambda z: np.exp(ged_logpdf(z, nu)), -30.0, 30.0)
        assert abs(mass - 1.0) < 1e-6, f"nu={nu}: mass {mass}"


def test_unit_variance_for_every_shape():
    """The scale constant is chosen so the second moment is exactly 1."""
    for nu in (0.8, 1.0, 1.5, 2.0, 5.0):
        m2, _ = quad(lambda z: z**2 * np.exp(ged_logpdf(z, nu)), -30.0, 30.0)
        assert abs(m2 - 1.0) < 1e-6, f"nu={nu}: variance {m2}"


def test_cdf_midpoint_and_symmetry():
    z = np.linspace(0.1, 8.0, 40)
    for nu in (1.0, 1.5, 2.0, 4.0):
        assert ged_cdf(0.0, nu) == pytest.approx(0.5, abs=1e-14)
        assert np.max(np.abs(ged_cdf(-z, nu) + ged_cdf(z, nu) - 1.0)) < 1e-14


def test_cdf_against_normal_quantile():
    assert ged_cdf(1.959964, 2.0) == pytest.approx(0.975, abs=1e-5)


def test_cdf_is_the_integral_of_the_density():
    for nu in (1.2, 2.0, 3.0):
        for z in (-1.7, -0.3, 0.9, 2.4):
            mass, _ = quad(lambda s: np.exp(ged_logpdf(s, nu)), -30.0, z)
            assert abs(ged_cdf(z, nu) - mass) < 1e-8


def test_cdf_strictly_increasing():
    z = np.linspace(-7.0, 7.0, 281)  # wider grids saturate double precision near 1
    for nu in (0.9, 1.5, 2.0):
        assert np.all(np.diff(ged_cdf(z, nu)) > 0.0)


def test_quantile_round_trip():
    p = np.array([0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99])
    for nu in (1.0, 2.0, 4.0):
        assert np.max(np.abs(ged_cdf(ged_quantile(p, nu), nu) - p)) < 1e-8
    z = np.array([-2.5, -0.4, 0.0, 1.1, 3.0])
    for nu in (1.0, 2.0, 4.0):
        assert np.max(np.abs(ged_quantile(ged_cdf(z, nu), nu) - z)) < 1e-8


def test_kurtosis_exceeds_three_for_fat_shapes():
    """Fourth moment matches Gamma(1/nu)Gamma(5/nu)/Gamma(3/nu)^2 and tops 3 when nu < 2."""
    for nu in (1.2, 1.5, 1.9):
        m4, _ = quad(lambda z: z**4 * np.exp(ged_logpdf(z, nu)), -40.0, 40.0)
        formula = gamma_fn(1.0 / nu) * gamma_fn(5.0 / nu) / gamma_fn(3.0 / nu) ** 2
        assert m4 == pytest.approx(formula, rel=1e-6)
        assert m4 > 3.0
    m4, _ = quad(lambda z: z**4 * np.exp(ged_logpdf(z, 2.0)), -40.0, 40.0)
    assert m4 == pytest.approx(3.0, rel=1e-6)


def test_rejects_nonpositive_shape():
    for bad in (0.0, -1.0, np.nan):
        with pytest.raises(ValueError):
            ged_logpdf(0.5, bad)
        with pytest.raises(ValueError):
            ged_cdf(0.5, bad)
        with pytest.raises(ValueError):
            ged_quantile(0.5, bad)


def test_scalar_in_scalar_out():
    assert isinstance(ged_logpdf(0.3, 1.5), float)
    assert isinstance(ged_cdf(0.3, 1.5), float)
    assert isinstance(ged_quantile(0.3, 1.5), float)
    assert isinstance(ged_scale(1.5), float)
    out = ged_logpdf(np.zeros((2, 3)), 1.5)
    assert out.shape == (2, 3)
