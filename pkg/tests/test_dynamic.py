"""Tests for the evolving-parameter recursion: links, forcing, filtering."""

import math

import numpy as np
import pytest
from scipy import special

from taildep.copulas import (
    clayton_params,
    copula_logpdf,
    gumbel_params,
    normal_params,
    sjc_params,
    static_loglik,
    student_t_params,
)
from taildep.dynamic import (
    LINK_ROLES,
    EvolutionParams,
    ParamPath,
    dynamic_loglik,
    family_roles,
    filter_dynamic,
    forcing_term,
    link_inverse,
    link_transform,
)

ROLE_RANGES = {
    "corr": (-1.0, 1.0),
    "dof": (2.0, 200.0),
    "gumbel": (1.0, np.inf),
    "clayton": (0.0, np.inf),
    "sjc": (0.0, 1.0),
}


def _uniform_pair(n, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.005, 0.995, n), rng.uniform(0.005, 0.995, n)


def test_link_frozen_points():
    assert link_transform("corr", 0.0) == 0.0
    assert link_transform("sjc", 0.0) == 0.5
    assert abs(200.0 - link_transform("dof", 40.0)) < 1e-10
    assert link_transform("gumbel", 0.0) == pytest.approx(1.0 + math.log(2.0), abs=1e-14)
    assert link_transform("clayton", 0.0) == pytest.approx(math.log(2.0), rel=1e-12)


def test_link_ranges_and_monotonicity():
    """Each link maps the line increasingly into its target interval."""
    x = np.linspace(-60.0, 60.0, 1000)
    for role in LINK_ROLES:
        y = np.array([link_transform(role, xi) for xi in x])
        lo, hi = ROLE_RANGES[role]
        # extreme inputs may saturate to a representable endpoint, never beyond
        assert np.all(y >= lo) and np.all(y <= hi), role
        assert np.all(np.diff(y) >= 0.0), role
        mid = np.abs(x) < 20.0
        assert np.all(np.diff(y[mid]) > 0.0), role
        assert np.all(y[mid] > lo) and np.all(y[mid] < hi), role


def test_link_inverse_round_trip():
    for role, vals in (("corr", (-0.9, 0.0, 0.7)), ("dof", (2.5, 30.0, 150.0)),
                       ("gumbel", (1.05, 2.0, 8.0)), ("clayton", (0.1, 1.5, 6.0)),
                       ("sjc", (0.05, 0.5, 0.93))):
        for val in vals:
            assert link_transform(role, link_inverse(role, val)) == pytest.approx(val, rel=1e-9)
    with pytest.raises(ValueError):
        link_inverse("corr", 1.0)
    with pytest.raises(ValueError):
        link_inverse("gumbel", 1.0)
    with pytest.raises(ValueError):
        link_inverse("dof", 200.0)


def test_family_roles():
    assert family_roles("normal") == ("corr",)
    assert family_roles("student_t") == ("corr", "dof")
    assert family_roles("gumbel") == ("gumbel",)
    assert family_roles("clayton") == ("clayton",)
    assert family_roles("sjc") == ("sjc", "sjc")
    with pytest.raises(ValueError):
        family_roles("frank")


def test_evolution_params_validation():
    with pytest.raises(ValueError):
        EvolutionParams("gumbel", 0.5, 0.1, 0.8, omega2=0.1, alpha2=0.0, beta2=0.0)
    with pytest.raises(ValueError):
        EvolutionParams("sjc", 0.5, 0.1, 0.8)  # needs both triples
    with pytest.raises(ValueError):
        EvolutionParams("normal", np.nan, 0.0, 0.0)
    evo = EvolutionParams("student_t", 0.1, 0.2, 0.3, omega2=0.4, alpha2=0.5, beta2=0.6)
    assert evo.triples == [(0.1, 0.2, 0.3), (0.4, 0.5, 0.6)]


def test_param_path_validation():
    with pytest.raises(ValueError):
        ParamPath("gumbel", np.ones(5), np.zeros(4), np.zeros(5), 0.0)
    with pytest.raises(ValueError):
        ParamPath("gumbel", np.ones(3), np.full(3, 1.0), np.zeros(3), 0.0)  # lam must stay below 1


def test_forcing_zero_cases():
    u = np.full(30, 0.5)
    assert forcing_term("gumbel", u, u, 15) == 0.0  # |u - v| vanishes
    assert forcing_term("gumbel", u, u, 0) == 0.0  # no lags yet
    w, _ = _uniform_pair(30, 0)
    assert forcing_term("normal", w, w[::-1].copy(), 0) == 0.0


def test_forcing_normal_unit_product():
    p1 = special.ndtr(1.0)
    u = np.full(15, p1)
    assert forcing_term("normal", u, u, 12) == pytest.approx(1.0, abs=1e-12)


def test_forcing_short_window_hand_sum():
    u = np.array([0.2, 0.7, 0.4, 0.9, 0.55])
    v = np.array([0.6, 0.1, 0.85, 0.3, 0.45])
    # two lags available at position 2
    expected = 0.5 * (abs(u[0] - v[0]) + abs(u[1] - v[1]))
    assert forcing_term("clayton", u, v, 2) == pytest.approx(expected, abs=1e-15)


def test_forcing_matches_naive_loops():
    """Ten-lag ramp-up means over transformed products or absolute gaps."""
    u, v = _uniform_pair(40, 4)
    for fam in ("normal", "gumbel", "clayton", "sjc"):
        for t in (0, 1, 5, 10, 25, 39):
            k = min(10, t)
            if k == 0:
                expected = 0.0
            elif fam == "normal":
                expected = sum(special.ndtri(u[t - j]) * special.ndtri(v[t - j])
                               for j in range(1, k + 1)) / k
            else:
                expected = sum(abs(u[t - j] - v[t - j]) for j in range(1, k + 1)) / k
            assert forcing_term(fam, u, v, t) == pytest.approx(expected, abs=1e-12), (fam, t)
    for t in (0, 3, 17):
        k = min(10, t)
        dof = 7.0
        expected = 0.0 if k == 0 else sum(
            special.stdtrit(dof, u[t - j]) * special.stdtrit(dof, v[t - j])
            for j in range(1, k + 1)) / k
        assert forcing_term("student_t", u, v, t, dof=dof) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(ValueError):
        forcing_term("student_t", u, v, 5)  # dof is required
    with pytest.raises(ValueError):
        forcing_term("gumbel", u, v, 40)  # index out of range


def test_filter_gumbel_hand_unrolled():
    """Replay the recursion step by step with scalar public pieces."""
    u = np.array([0.3, 0.8, 0.25, 0.6, 0.45, 0.9, 0.15, 0.7, 0.5, 0.35, 0.65, 0.2, 0.85])
    v = np.array([0.5, 0.6, 0.4, 0.75, 0.3, 0.8, 0.2, 0.55, 0.65, 0.25, 0.7, 0.45, 0.6])
    omega, alpha, beta = 0.3, 0.9, 0.6
    path = filter_dynamic(EvolutionParams("gumbel", omega, alpha, beta), u, v)

    theta = link_transform("gumbel", omega / (1.0 - beta))
    ll = 0.0
    for t in range(13):
        if t > 0:
            raw = omega + beta * theta + alpha * forcing_term("gumbel", u, v, t)
            theta = link_transform("gumbel", raw)
        assert path.params[t] == pytest.approx(theta, abs=1e-10), t
        assert path.lambda_u[t] == pytest.approx(2.0 - 2.0 ** (1.0 / theta), abs=1e-10)
        ll += float(copula_logpdf(gumbel_params(theta), u[t], v[t]))
    assert path.loglik == pytest.approx(ll, abs=1e-8)
    assert np.all(path.lambda_l == 0.0)


def _naive_filter(family, evo, u, v):
    """Straight-line reimplementation from public scalar pieces."""
    roles = family_roles(family)
    states = []
    for (omega, alpha, beta), role in zip(evo.triples, roles):
        init = omega / (1.0 - beta) if abs(beta) < 1.0 else omega
        states.append(link_transform(role, init))
    ll = 0.0
    params_out = []
    for t in range(u.size):
        if t > 0:
            new = []
            for (omega, alpha, beta), role, prev in zip(evo.triples, roles, states):
                if family == "student_t" and role == "dof":
                    f = forcing_term(family, u, v, t, dof=prev)
                else:
                    f = forcing_term(family, u, v, t, dof=states[1]) \
                        if family == "student_t" else forcing_term(family, u, v, t)
                raw = omega + beta * prev + alpha * f
                raw = min(max(raw, -50.0), 50.0)
                new.append(link_transform(role, raw))
            states = new
        params_out.append(tuple(states))
        if family == "normal":
            p = normal_params(states[0])
        elif family == "student_t":
            p = student_t_params(states[0], states[1])
        elif family == "gumbel":
            p = gumbel_params(states[0])
        elif family == "clayton":
            p = clayton_params(max(states[0], 1e-12))
        else:
            p = sjc_params(states[0], states[1])
        ll += float(copula_logpdf(p, u[t], v[t]))
    return np.array(params_out), ll


def test_filter_matches_naive_reimplementation():
    u, v = _uniform_pair(50, 9)
    cases = [
        EvolutionParams("normal", 0.2, 0.6, 0.5),
        EvolutionParams("gumbel", -0.4, 1.1, 0.7),
        EvolutionParams("clayton", 0.3, -0.8, 0.55),
        EvolutionParams("student_t", 0.25, 0.5, 0.4, omega2=1.0, alpha2=0.3, beta2=0.2),
        EvolutionParams("sjc", -0.6, 0.9, 0.5, omega2=0.4, alpha2=-0.7, beta2=0.3),
    ]
    for evo in cases:
        path = filter_dynamic(evo, u, v)
        ref_params, ref_ll = _naive_filter(evo.family, evo, u, v)
        got = path.params if path.params.ndim == 2 else path.params[:, None]
        assert np.max(np.abs(got - ref_params)) < 1e-10, evo.family
        assert path.loglik == pytest.approx(ref_ll, abs=1e-8), evo.family


def test_dof_forcing_uses_previous_step_dof():
    """The t recursion transforms lags at the dof from one step back."""
    u, v = _uniform_pair(18, 21)
    evo = EvolutionParams("student_t", 0.2, 0.4, 0.3, omega2=0.5, alpha2=0.9, beta2=0.4)
    path = filter_dynamic(evo, u, v)
    rho1, dof1 = path.params[1]
    rho0, dof0 = path.params[0]
    f_rho = forcing_term("student_t", u, v, 1, dof=dof0)
    assert rho1 == pytest.approx(
        link_transform("corr", 0.2 + 0.3 * rho0 + 0.4 * f_rho), abs=1e-12)
    assert dof1 == pytest.approx(
        link_transform("dof", 0.5 + 0.4 * dof0 + 0.9 * f_rho), abs=1e-12)


def test_collapse_identity_all_families():
    """alpha = beta = 0 freezes the path at link(omega) and the static loglik."""
    u, v = _uniform_pair(200, 14)
    cases = [
        ("normal", 0.5, None, lambda w: normal_params(link_transform("corr", w))),
        ("gumbel", 0.4, None, lambda w: gumbel_params(link_transform("gumbel", w))),
        ("clayton", 0.7, None, lambda w: clayton_params(link_transform("clayton", w))),
        ("student_t", 0.5, 0.2,
         lambda w: student_t_params(link_transform("corr", w), link_transform("dof", 0.2))),
        ("sjc", -0.3, -0.8,
         lambda w: sjc_params(link_transform("sjc", w), link_transform("sjc", -0.8))),
    ]
    for family, w1, w2, make in cases:
        if w2 is None:
            evo = EvolutionParams(family, w1, 0.0, 0.0)
        else:
            evo = EvolutionParams(family, w1, 0.0, 0.0, omega2=w2, alpha2=0.0, beta2=0.0)
        dyn = dynamic_loglik(evo, u, v)
        stat = static_loglik(make(w1), u, v)
        assert abs(dyn - stat) < 1e-10, family


def test_initialization_rule():
    u, v = _uniform_pair(12, 3)
    p1 = filter_dynamic(EvolutionParams("gumbel", 0.5, 0.8, 0.75), u, v).params[0]
    assert p1 == pytest.approx(link_transform("gumbel", 0.5 / 0.25), abs=1e-12)
    p2 = filter_dynamic(EvolutionParams("gumbel", 0.5, 0.8, 1.3), u, v).params[0]
    assert p2 == pytest.approx(link_transform("gumbel", 0.5), abs=1e-12)


def test_filter_is_deterministic():
    u, v = _uniform_pair(120, 8)
    evo = EvolutionParams("sjc", 0.2, 0.7, 0.5, omega2=-0.3, alpha2=0.4, beta2=0.6)
    a = filter_dynamic(evo, u, v)
    b = filter_dynamic(evo, u, v)
    assert np.array_equal(a.params, b.params)
    assert a.loglik == b.loglik


def test_sjc_recursions_do_not_interact():
    u, v = _uniform_pair(150, 5)
    base = EvolutionParams("sjc", 0.2, 0.7, 0.5, omega2=-0.3, alpha2=0.4, beta2=0.6)
    bumped = EvolutionParams("sjc", 1.1, 0.7, 0.5, omega2=-0.3, alpha2=0.4, beta2=0.6)
    a = filter_dynamic(base, u, v)
    b = filter_dynamic(bumped, u, v)
    assert np.array_equal(a.lambda_l, b.lambda_l)  # upper-tail bump leaves lower path alone
    assert not np.array_equal(a.lambda_u, b.lambda_u)


def test_coefficient_grid_keeps_paths_valid_and_loglik_finite():
    """Sweep omega, alpha, beta over {-2, 0, 2}^3 for every family."""
    u, v = _uniform_pair(500, 77)
    grid = (-2.0, 0.0, 2.0)
    for family in ("normal", "student_t", "gumbel", "clayton", "sjc"):
        lo, hi = {
            "normal": (-1.0, 1.0), "student_t": (-1.0, 1.0),
            "gumbel": (1.0, np.inf), "clayton": (0.0, np.inf), "sjc": (0.0, 1.0),
        }[family]
        for omega in grid:
            for alpha in grid:
                for beta in grid:
                    if family in ("student_t", "sjc"):
                        evo = EvolutionParams(family, omega, alpha, beta,
                                              omega2=omega, alpha2=alpha, beta2=beta)
                    else:
                        evo = EvolutionParams(family, omega, alpha, beta)
                    path = filter_dynamic(evo, u, v)
                    assert np.isfinite(path.loglik), (family, omega, alpha, beta)
                    first = path.params if path.params.ndim == 1 else path.params[:, 0]
                    assert np.all(first > lo) and np.all(first < hi)
