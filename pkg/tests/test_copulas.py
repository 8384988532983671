"""Tests for the five copula families: densities, CDFs, tail coefficients."""

import math

import numpy as np
import pytest
from scipy import special, stats

from taildep.copulas import (
    FAMILIES,
    StaticCopulaParams,
    clayton_params,
    copula_cdf,
    copula_logpdf,
    gumbel_params,
    joe_clayton_cdf,
    normal_params,
    sjc_cdf,
    sjc_conditional,
    sjc_params,
    static_loglik,
    student_t_params,
    tail_dependence,
)

INTERIOR = [(0.08, 0.23), (0.35, 0.6), (0.5, 0.5), (0.72, 0.14), (0.9, 0.81)]


def _cases():
    return [
        normal_params(-0.6),
        normal_params(0.45),
        student_t_params(0.5, 4.0),
        student_t_params(-0.3, 12.0),
        gumbel_params(1.4),
        gumbel_params(3.0),
        clayton_params(0.8),
        clayton_params(4.0),
        clayton_params(-0.4),
        sjc_params(0.3, 0.6),
        sjc_params(0.55, 0.2),
    ]


def test_parameter_validation():
    with pytest.raises(ValueError):
        normal_params(1.0)
    with pytest.raises(ValueError):
        student_t_params(0.5, 2.0)  # dof boundary excluded
    with pytest.raises(ValueError):
        student_t_params(0.5, 200.5)  # above the documented cap
    with pytest.raises(ValueError):
        gumbel_params(0.99)
    with pytest.raises(ValueError):
        clayton_params(0.0)  # excluded interior point
    with pytest.raises(ValueError):
        clayton_params(-1.0)
    with pytest.raises(ValueError):
        sjc_params(0.0, 0.5)
    with pytest.raises(ValueError):
        StaticCopulaParams(family="normal", rho=0.5, theta=2.0)  # foreign field
    assert student_t_params(0.5, 200.0).dof == 200.0


def test_normal_copula_frozen_value():
    # rho=0.5 at the median: log c = -0.5*log(1-rho^2)
    val = float(copula_logpdf(normal_params(0.5), 0.5, 0.5))
    assert val == pytest.approx(0.14384103622589045, abs=1e-12)


def test_normal_copula_independence_at_zero_rho():
    u, v = np.meshgrid(np.linspace(0.05, 0.95, 7), np.linspace(0.05, 0.95, 7))
    assert np.max(np.abs(copula_logpdf(normal_params(1e-300), u, v))) < 1e-250


def test_gumbel_frozen_cdf_and_independence_edge():
    assert float(copula_cdf(gumbel_params(2.0), 0.5, 0.5)) == pytest.approx(
        2.0 ** -math.sqrt(2.0), abs=1e-14)
    # theta=1 degenerates to the independence copula
    p = gumbel_params(1.0)
    for u, v in INTERIOR:
        assert float(copula_logpdf(p, u, v)) == pytest.approx(0.0, abs=1e-12)
        assert float(copula_cdf(p, u, v)) == pytest.approx(u * v, abs=1e-14)


def test_clayton_frozen_cdf():
    assert float(copula_cdf(clayton_params(1.0), 0.5, 0.5)) == pytest.approx(
        1.0 / 3.0, abs=1e-14)


def test_cdf_boundary_identities():
    for p in _cases():
        for w in (0.2, 0.5, 0.8):
            assert float(copula_cdf(p, 0.0, w)) == 0.0
            assert float(copula_cdf(p, w, 0.0)) == 0.0
            assert float(copula_cdf(p, 1.0, w)) == pytest.approx(w, abs=1e-12)
            assert float(copula_cdf(p, w, 1.0)) == pytest.approx(w, abs=1e-12)


def test_cdf_within_frechet_bounds_and_two_increasing():
    rng = np.random.default_rng(42)
    for p in _cases():
        if p.family == "student_t":
            rects = rng.uniform(0.05, 0.95, (3, 4))  # the t CDF integrates slowly
        else:
            rects = rng.uniform(0.02, 0.98, (40, 4))
        for r in rects:
            u1, u2 = sorted(r[:2])
            v1, v2 = sorted(r[2:])
            c11 = float(copula_cdf(p, u1, v1))
            c12 = float(copula_cdf(p, u1, v2))
            c21 = float(copula_cdf(p, u2, v1))
            c22 = float(copula_cdf(p, u2, v2))
            for c, u, v in ((c11, u1, v1), (c22, u2, v2)):
                assert max(u + v - 1.0, 0.0) - 1e-9 <= c <= min(u, v) + 1e-9
            assert c22 - c12 - c21 + c11 >= -1e-9


def test_normal_cdf_against_scipy_bivariate_normal():
    for rho in (-0.85, -0.3, 0.0, 0.45, 0.9):
        p = normal_params(rho) if rho != 0.0 else normal_params(1e-14)
        cov = np.array([[1.0, rho], [rho, 1.0]])
        for u, v in INTERIOR:
            x = special.ndtri([u, v])
            ref = stats.multivariate_normal(mean=[0.0, 0.0], cov=cov).cdf(x)
            assert float(copula_cdf(p, u, v)) == pytest.approx(ref, abs=5e-9)


def test_student_t_density_against_direct_ratio():
    """Independent route: bivariate-t pdf over the product of univariate pdfs."""
    for rho, dof in ((0.5, 4.0), (-0.35, 9.0), (0.8, 30.0)):
        p = student_t_params(rho, dof)
        for u, v in INTERIOR:
            x = special.stdtrit(dof, u)
            y = special.stdtrit(dof, v)
            quad_form = (x * x - 2.0 * rho * x * y + y * y) / (dof * (1.0 - rho**2))
            log_joint = (math.lgamma(0.5 * dof + 1.0) - math.lgamma(0.5 * dof)
                         - math.log(dof * math.pi) - 0.5 * math.log(1.0 - rho**2)
                         - (0.5 * dof + 1.0) * math.log1p(quad_form))
            ref = log_joint - stats.t.logpdf(x, dof) - stats.t.logpdf(y, dof)
            assert float(copula_logpdf(p, u, v)) == pytest.approx(ref, abs=1e-10)


def test_student_t_cdf_against_scipy_multivariate_t():
    p = student_t_params(0.5, 5.0)
    shape = np.array([[1.0, 0.5], [0.5, 1.0]])
    for u, v in ((0.3, 0.7), (0.6, 0.6)):
        x = special.stdtrit(5.0, [u, v])
        ref = stats.multivariate_t(loc=[0.0, 0.0], shape=shape, df=5.0).cdf(
            x, random_state=np.random.default_rng(0), maxpts=200_000)
        assert float(copula_cdf(p, u, v)) == pytest.approx(ref, abs=5e-4)


def test_densities_match_cdf_cross_partials():
    """Central second difference of C recovers c on interior points."""
    h = 1e-5
    for p in _cases():
        if p.family == "student_t":
            continue  # covered by the direct-ratio oracle above
        for u, v in INTERIOR:
            num = (float(copula_cdf(p, u + h, v + h)) - float(copula_cdf(p, u + h, v - h))
                   - float(copula_cdf(p, u - h, v + h)) + float(copula_cdf(p, u - h, v - h)))
            num /= 4.0 * h * h
            an = math.exp(float(copula_logpdf(p, u, v)))
            assert num == pytest.approx(an, rel=5e-4, abs=1e-8), (p.family, p.values, u, v)


def test_every_density_integrates_to_one():
    """Gauss-Legendre after mapping through the normal quantile; one setting per family."""
    nodes, weights = np.polynomial.legendre.leggauss(200)
    lim = 8.5
    x = nodes * lim
    w = weights * lim
    u = special.ndtr(x)
    log_phi = -0.5 * x**2 - 0.5 * math.log(2.0 * math.pi)
    for p in (normal_params(0.8), student_t_params(0.5, 4.0), gumbel_params(2.0),
              clayton_params(2.0), sjc_params(0.45, 0.45)):
        uu, vv = np.meshgrid(u, u, indexing="ij")
        lc = copula_logpdf(p, uu.ravel(), vv.ravel()).reshape(200, 200)
        mass = float(w @ np.exp(lc + log_phi[:, None] + log_phi[None, :]) @ w)
        assert mass == pytest.approx(1.0, abs=1e-3), (p.family, mass)


def test_density_finite_at_clipped_corners():
    for p in _cases():
        if p.family == "clayton" and p.delta < 0.0:
            continue  # corners fall outside the negative-delta support
        for u, v in ((0.0, 0.0), (1.0, 1.0), (0.0, 1.0), (1e-12, 1e-12), (1 - 1e-12, 1e-12)):
            assert np.isfinite(float(copula_logpdf(p, u, v))), (p.family, u, v)


def test_sjc_saturated_tails_stay_ordered():
    """Near-comonotone settings: off-diagonal mass vanishes, never explodes."""
    for lam in ((1 - 1e-12, 0.5), (0.5, 1 - 1e-12), (1 - 1e-12, 1 - 1e-12)):
        p = sjc_params(*lam)
        off = float(copula_logpdf(p, 0.005, 0.6))
        assert off < -1e6  # a positive value here would derail any likelihood search
        assert float(copula_cdf(p, 0.005, 0.6)) == pytest.approx(0.005, abs=1e-9)
    p = sjc_params(1 - 1e-12, 1 - 1e-12)
    assert float(copula_logpdf(p, 0.4, 0.4)) > 10.0  # mass piles onto the diagonal


def test_negative_delta_clayton_support():
    p = clayton_params(-0.4)
    # inside the support the density is finite, outside it carries no mass
    assert np.isfinite(float(copula_logpdf(p, 0.6, 0.7)))
    assert float(copula_logpdf(p, 1e-12, 1e-12)) == -np.inf


def test_tail_dependence_closed_forms():
    td = tail_dependence(normal_params(0.7))
    assert td.upper == 0.0 and td.lower == 0.0

    td = tail_dependence(gumbel_params(2.0))
    assert td.upper == pytest.approx(2.0 - 2.0**0.5, abs=1e-14)
    assert td.lower == 0.0

    td = tail_dependence(clayton_params(2.0))
    assert td.lower == pytest.approx(2.0**-0.5, abs=1e-14)
    assert td.upper == 0.0
    td = tail_dependence(clayton_params(-0.3))  # no tail clustering without positive delta
    assert td.upper == 0.0 and td.lower == 0.0

    rho, dof = 0.5, 4.0
    arg = -math.sqrt((dof + 1.0) * (1.0 - rho) / (1.0 + rho))
    expected = 2.0 * special.stdtr(dof + 1.0, arg)
    td = tail_dependence(student_t_params(rho, dof))
    assert td.upper == pytest.approx(expected, abs=1e-14)
    assert td.lower == pytest.approx(expected, abs=1e-14)

    td = tail_dependence(sjc_params(0.4, 0.55))
    assert td.upper == pytest.approx(0.4, abs=1e-14)
    assert td.lower == pytest.approx(0.55, abs=1e-14)


def test_student_t_tail_formula_against_cdf_limit():
    """The closed form is the q->1 limit of the conditional exceedance ratio."""
    p = student_t_params(0.5, 4.0)
    lam = tail_dependence(p).upper
    diffs = []
    for q in (1.0 - 1e-3, 1.0 - 1e-5, 1.0 - 1e-7):
        cond = (1.0 - 2.0 * q + float(copula_cdf(p, q, q))) / (1.0 - q)
        diffs.append(abs(cond - lam))
    assert diffs[0] > diffs[1] > diffs[2]
    assert diffs[2] < 5e-3


def test_sjc_tail_limits_match_declared_coefficients():
    lam_u, lam_l = 0.35, 0.6
    q = 1e-8
    lower = float(sjc_cdf(q, q, lam_u, lam_l)) / q
    upper = (1.0 - 2.0 * (1.0 - q) + float(sjc_cdf(1.0 - q, 1.0 - q, lam_u, lam_l))) / q
    assert lower == pytest.approx(lam_l, abs=1e-4)
    assert upper == pytest.approx(lam_u, abs=1e-4)


def test_sjc_survival_copula_swaps_the_tails():
    for u, v in INTERIOR:
        direct = float(sjc_cdf(u, v, 0.25, 0.65))
        reflected = u + v - 1.0 + float(sjc_cdf(1.0 - u, 1.0 - v, 0.65, 0.25))
        assert direct == pytest.approx(reflected, abs=1e-12)


def test_sjc_reduces_to_joe_clayton_mixture():
    u, v = 0.3, 0.7
    mix = 0.5 * (float(joe_clayton_cdf(u, v, 0.3, 0.5))
                 + float(joe_clayton_cdf(1.0 - u, 1.0 - v, 0.5, 0.3)) + u + v - 1.0)
    assert float(sjc_cdf(u, v, 0.3, 0.5)) == pytest.approx(mix, abs=1e-15)


def test_sjc_conditional_is_a_cdf_in_v():
    v = np.linspace(0.01, 0.99, 99)
    for u in (0.1, 0.5, 0.9):
        c = sjc_conditional(u, v, 0.4, 0.3)
        assert np.all(np.diff(c) > 0.0)
        assert 0.0 < c[0] and c[-1] < 1.0
    # integrates back to the unconditional margin: E_u[dC/du](v) = v
    grid = np.linspace(0.0005, 0.9995, 1000)
    for v0 in (0.25, 0.7):
        avg = float(np.mean(sjc_conditional(grid, v0, 0.4, 0.3)))
        assert avg == pytest.approx(v0, abs=2e-3)


def test_static_loglik_sums_the_log_density():
    rng = np.random.default_rng(11)
    u = rng.uniform(0.01, 0.99, 300)
    v = rng.uniform(0.01, 0.99, 300)
    for p in (normal_params(0.4), gumbel_params(1.8), sjc_params(0.3, 0.4)):
        assert static_loglik(p, u, v) == pytest.approx(
            float(np.sum(copula_logpdf(p, u, v))), rel=1e-12)


def test_values_property_round_trips():
    p = student_t_params(0.42, 7.5)
    assert p.values == {"rho": 0.42, "dof": 7.5}
    assert clayton_params(-0.25).values == {"delta": -0.25}
