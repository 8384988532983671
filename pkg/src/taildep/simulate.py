"""Seeded Monte Carlo generators for copulas and the marginal model.

All draws flow through numpy's PCG64 Generator seeded explicitly, so every
sample is reproducible from its (parameters, n, seed) triple.  Samplers:

* Normal / Student-t: location-scale construction from correlated normals
  (divided by a chi-square mixing variable for the t).
* Gumbel: Marshall-Olkin with a positive-stable frailty drawn by the
  Chambers-Mallows-Stuck formula.
* Clayton: gamma frailty, defined for delta > 0 only.
* SJC: exact conditional-CDF inversion by bisection.

``sample_dynamic`` advances the evolution recursion with the same compiled
single-step helpers the filter uses, one observation at a time, so
filtering the returned pair reproduces the returned parameter path (and
its log likelihood) bit for bit.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .copulas import UV_EPS, StaticCopulaParams, sjc_conditional
from .dynamic import (
    EvolutionParams,
    ParamPath,
    _clayton_lc,
    _forcing_window,
    _gumbel_lc,
    _init_py,
    _init_scalar,
    _log1mexp_s,
    _normal_lc,
    _sjc_lc,
    _step_py,
    _step_scalar,
    _t_forcing,
    _t_lc,
)
from .egarch import ArmaEgarchSpec, MarginalParams
from .ged import ged_quantile

from numba import njit

__all__ = ["sample_copula", "sample_dynamic", "simulate_egarch", "egarch_from_innovations"]


def _rng(seed: int) -> np.random.Generator:
    if not isinstance(seed, (int, np.integer)):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    return np.random.default_rng(int(seed))


def _clip01(x):
    return np.clip(x, UV_EPS, 1.0 - UV_EPS)


def _stable_frailty(theta: float, ang: np.ndarray, wexp: np.ndarray) -> np.ndarray:
    """Positive alpha-stable draws with Laplace transform exp(-s^(1/theta)).

    Chambers-Mallows-Stuck with alpha = 1/theta, angle uniform on (0, pi)
    and an independent unit exponential:
    S = sin(alpha T) / (sin T)^theta * (sin((1-alpha) T) / W)^(theta-1).
    """
    alpha = 1.0 / theta
    ang = np.maximum(ang, 1e-15)  # an exact 0.0 draw would produce 0/0
    return (np.sin(alpha * ang) / np.sin(ang) ** theta
            * (np.sin((1.0 - alpha) * ang) / wexp) ** (theta - 1.0))


def _sjc_invert(u: np.ndarray, w: np.ndarray, lam_u, lam_l) -> np.ndarray:
    """Solve P(V <= v | U = u) = w for v by bisection (60 halvings)."""
    lo = np.full_like(np.asarray(u, dtype=float), UV_EPS)
    hi = np.full_like(lo, 1.0 - UV_EPS)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = sjc_conditional(u, mid, lam_u, lam_l) < w
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


_LOG2 = math.log(2.0)


@njit(cache=True)
def _jc_du_s(u: float, v: float, a: float, b: float) -> float:
    lubar = math.log1p(-u)
    lvbar = math.log1p(-v)
    lx = _log1mexp_s(a * lubar)
    ly = _log1mexp_s(a * lvbar)
    a1 = -b * lx
    a2 = -b * ly
    m = a1 if a1 > a2 else a2
    if m > 30.0:
        log_t = m + math.log(math.exp(a1 - m) + math.exp(a2 - m) - math.exp(-m))
    else:
        log_t = math.log1p(math.expm1(a1) + math.expm1(a2))
    if log_t == 0.0:  # both tail exponents underflow; 1-K is (1-u)^a + (1-v)^a
        e1 = a * lubar
        e2 = a * lvbar
        me = e1 if e1 > e2 else e2
        l1mk = me + math.log(math.exp(e1 - me) + math.exp(e2 - me))
    else:
        l1mk = _log1mexp_s(-log_t / b)
    return math.exp((1.0 / a - 1.0) * l1mk + (-1.0 / b - 1.0) * log_t
                    + (-b - 1.0) * lx + (a - 1.0) * lubar)


@njit(cache=True)
def _sjc_cond_s(u: float, v: float, lam_u: float, lam_l: float) -> float:
    a = _LOG2 / math.log(2.0 - lam_u)
    b = -_LOG2 / math.log(lam_l)
    ar = _LOG2 / math.log(2.0 - lam_l)
    br = -_LOG2 / math.log(lam_u)
    return 0.5 * (_jc_du_s(u, v, a, b) - _jc_du_s(1.0 - u, 1.0 - v, ar, br) + 1.0)


@njit(cache=True)
def _sjc_invert_s(u: float, w: float, lam_u: float, lam_l: float) -> float:
    """Scalar twin of ``_sjc_invert`` for the one-pair-per-step dynamic loop."""
    lo = UV_EPS
    hi = 1.0 - UV_EPS
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _sjc_cond_s(u, mid, lam_u, lam_l) < w:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sample_copula(params: StaticCopulaParams, n: int, seed: int) -> np.ndarray:
    """Draw n pairs from the static copula; returns an (n, 2) array in (0, 1)."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = _rng(seed)
    fam = params.family
    if fam == "normal":
        z = rng.standard_normal((n, 2))
        x1 = z[:, 0]
        x2 = params.rho * z[:, 0] + math.sqrt(1.0 - params.rho ** 2) * z[:, 1]
        uv = np.column_stack((special.ndtr(x1), special.ndtr(x2)))
    elif fam == "student_t":
        z = rng.standard_normal((n, 2))
        mix = np.sqrt(rng.chisquare(params.dof, n) / params.dof)
        x1 = z[:, 0] / mix
        x2 = (params.rho * z[:, 0] + math.sqrt(1.0 - params.rho ** 2) * z[:, 1]) / mix
        uv = np.column_stack((special.stdtr(params.dof, x1), special.stdtr(params.dof, x2)))
    elif fam == "gumbel":
        if params.theta == 1.0:
            uv = rng.random((n, 2))
        else:
            ang = rng.uniform(0.0, np.pi, n)
            wexp = rng.standard_exponential(n)
            e = rng.standard_exponential((n, 2))
            s = _stable_frailty(params.theta, ang, wexp)
            uv = np.exp(-(e / s[:, None]) ** (1.0 / params.theta))
    elif fam == "clayton":
        if params.delta <= 0.0:
            raise ValueError("Clayton sampling requires delta > 0 (gamma frailty)")
        g = rng.gamma(1.0 / params.delta, 1.0, n)
        e = rng.standard_exponential((n, 2))
        uv = (1.0 + e / g[:, None]) ** (-1.0 / params.delta)
    else:
        u1 = _clip01(rng.random(n))
        w = rng.random(n)
        v = _sjc_invert(u1, w, params.lam_u, params.lam_l)
        uv = np.column_stack((u1, v))
    return _clip01(uv)


# ---------------------------------------------------------------------------
# dynamic sampling


def sample_dynamic(evo: EvolutionParams, n: int, seed: int) -> tuple[np.ndarray, ParamPath]:
    """Draw n pairs while the dependence parameter evolves on its own output.

    Returns the (n, 2) PIT pairs and the realized parameter path scored at
    the generating parameters; ``filter_dynamic`` on the returned pairs
    reproduces both exactly.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = _rng(seed)
    fam = evo.family
    o1, a1, b1 = evo.omega, evo.alpha, evo.beta
    if fam == "normal":
        z = rng.standard_normal((n, 2))
        u = np.empty(n)
        v = np.empty(n)
        d = np.empty(n)
        path = np.empty(n)
        rho = _init_scalar(0, o1, b1)
        ll = 0.0
        for t in range(n):
            if t > 0:
                rho = _step_scalar(0, rho, o1, a1, b1, _forcing_window(d, t))
            path[t] = rho
            x2 = rho * z[t, 0] + math.sqrt(1.0 - rho * rho) * z[t, 1]
            ut = float(_clip01(special.ndtr(z[t, 0])))
            vt = float(_clip01(special.ndtr(x2)))
            u[t] = ut
            v[t] = vt
            xf = float(special.ndtri(ut))
            yf = float(special.ndtri(vt))
            d[t] = xf * yf
            ll += _normal_lc(xf, yf, rho)
        zero = np.zeros(n)
        return np.column_stack((u, v)), ParamPath(fam, path, zero, zero, float(ll))

    if fam == "student_t":
        (o1, a1, b1), (o2, a2, b2) = evo.triples
        z = rng.standard_normal((n, 2))
        u = np.empty(n)
        v = np.empty(n)
        path = np.empty((n, 2))
        rho = _init_py("corr", o1, b1)
        dof = _init_py("dof", o2, b2)
        ll = 0.0
        for t in range(n):
            if t > 0:
                f = _t_forcing(u, v, t, dof)
                rho_new = _step_py("corr", rho, o1, a1, b1, f)
                dof_new = _step_py("dof", dof, o2, a2, b2, f)
                rho, dof = rho_new, dof_new
            path[t, 0] = rho
            path[t, 1] = dof
            mix = math.sqrt(rng.chisquare(dof) / dof)
            x1 = z[t, 0] / mix
            x2 = (rho * z[t, 0] + math.sqrt(1.0 - rho * rho) * z[t, 1]) / mix
            ut = float(_clip01(special.stdtr(dof, x1)))
            vt = float(_clip01(special.stdtr(dof, x2)))
            u[t] = ut
            v[t] = vt
            ll += _t_lc(ut, vt, rho, dof)
        rho_p, dof_p = path[:, 0], path[:, 1]
        lam = 2.0 * special.stdtr(dof_p + 1.0,
                                  -np.sqrt((dof_p + 1.0) * (1.0 - rho_p) / (1.0 + rho_p)))
        return np.column_stack((u, v)), ParamPath(fam, path, lam, lam.copy(), float(ll))

    if fam in ("gumbel", "clayton"):
        role = 2 if fam == "gumbel" else 3
        ang = rng.uniform(0.0, np.pi, n) if fam == "gumbel" else None
        wexp = rng.standard_exponential(n) if fam == "gumbel" else None
        e = rng.standard_exponential((n, 2))
        u = np.empty(n)
        v = np.empty(n)
        d = np.empty(n)
        path = np.empty(n)
        par = _init_scalar(role, o1, b1)
        ll = 0.0
        for t in range(n):
            if t > 0:
                par = _step_scalar(role, par, o1, a1, b1, _forcing_window(d, t))
            path[t] = par
            if fam == "gumbel":
                if par == 1.0:
                    ut, vt = math.exp(-e[t, 0]), math.exp(-e[t, 1])
                else:
                    s = float(_stable_frailty(par, ang[t:t + 1], wexp[t:t + 1])[0])
                    ut = math.exp(-((e[t, 0] / s) ** (1.0 / par)))
                    vt = math.exp(-((e[t, 1] / s) ** (1.0 / par)))
            else:
                g = rng.gamma(1.0 / par)
                ut = (1.0 + e[t, 0] / g) ** (-1.0 / par)
                vt = (1.0 + e[t, 1] / g) ** (-1.0 / par)
            ut = float(_clip01(ut))
            vt = float(_clip01(vt))
            u[t] = ut
            v[t] = vt
            d[t] = abs(ut - vt)
            ll += _gumbel_lc(ut, vt, par) if fam == "gumbel" else _clayton_lc(ut, vt, par)
        zero = np.zeros(n)
        if fam == "gumbel":
            lam_u = 2.0 - 2.0 ** (1.0 / path)
            return np.column_stack((u, v)), ParamPath(fam, path, lam_u, zero, float(ll))
        lam_l = 2.0 ** (-1.0 / path)
        return np.column_stack((u, v)), ParamPath(fam, path, zero, lam_l, float(ll))

    # sjc
    (o1, a1, b1), (o2, a2, b2) = evo.triples
    u1 = rng.random(n)
    w = rng.random(n)
    u = np.empty(n)
    v = np.empty(n)
    d = np.empty(n)
    path_u = np.empty(n)
    path_l = np.empty(n)
    lam_u = _init_scalar(4, o1, b1)
    lam_l = _init_scalar(4, o2, b2)
    ll = 0.0
    for t in range(n):
        if t > 0:
            f = _forcing_window(d, t)
            lam_u = _step_scalar(4, lam_u, o1, a1, b1, f)
            lam_l = _step_scalar(4, lam_l, o2, a2, b2, f)
        path_u[t] = lam_u
        path_l[t] = lam_l
        ut = float(_clip01(u1[t]))
        vt = _sjc_invert_s(ut, float(w[t]), lam_u, lam_l)
        u[t] = ut
        v[t] = vt
        d[t] = abs(ut - vt)
        ll += _sjc_lc(ut, vt, lam_u, lam_l)
    return np.column_stack((u, v)), ParamPath("sjc", np.column_stack((path_u, path_l)),
                                              path_u, path_l, float(ll))


# ---------------------------------------------------------------------------
# marginal model simulation


@njit(cache=True)
def _egarch_path(z, a0, ar, ma, w, kappa, gamma, beta, logh_init, y_pre):
    n = z.shape[0]
    logh = np.empty(n)
    eps = np.empty(n)
    y = np.empty(n)
    for t in range(n):
        val = w
        for i in range(kappa.shape[0]):
            j = t - 1 - i
            if j >= 0:
                val += kappa[i] * (abs(z[j]) + gamma[i] * z[j])
        for k in range(beta.shape[0]):
            j = t - 1 - k
            val += beta[k] * (logh[j] if j >= 0 else logh_init)
        if val > 50.0:
            val = 50.0
        elif val < -50.0:
            val = -50.0
        logh[t] = val
        eps[t] = math.exp(0.5 * val) * z[t]
        mean = a0
        for i in range(ar.shape[0]):
            j = t - 1 - i
            mean += ar[i] * (y[j] if j >= 0 else y_pre)
        for k in range(ma.shape[0]):
            j = t - 1 - k
            if j >= 0:
                mean += ma[k] * eps[j]
        y[t] = mean + eps[t]
    return y


def egarch_from_innovations(spec: ArmaEgarchSpec, params: MarginalParams,
                            z) -> np.ndarray:
    """Push given unit-variance innovations through the model recursion.

    The log variance starts at its unconditional value w / (1 - sum beta);
    pre-sample shocks are zero and pre-sample observations sit at the
    unconditional mean.
    """
    z = np.ascontiguousarray(z, dtype=float)
    if z.ndim != 1 or z.size == 0:
        raise ValueError("innovations must form a nonempty one-dimensional array")
    if params.spec() != spec:
        raise ValueError(f"parameter shapes {params.spec()} do not match the model spec {spec}")
    beta_sum = float(np.sum(params.beta))
    logh_init = params.w / (1.0 - beta_sum) if params.beta.size else params.w
    ar_sum = float(np.sum(params.ar))
    y_pre = params.a0 / (1.0 - ar_sum) if abs(1.0 - ar_sum) > 1e-8 else params.a0
    return _egarch_path(z, params.a0, params.ar, params.ma, params.w, params.kappa,
                        params.gamma, params.beta, logh_init, y_pre)


def simulate_egarch(spec: ArmaEgarchSpec, params: MarginalParams, n: int,
                    seed: int, *, burn: int = 500) -> np.ndarray:
    """Simulate n observations of the marginal model after a burn-in.

    GED innovations come from the quantile transform of uniform draws, so
    the innovation stream is exact for any shape nu.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if burn < 0:
        raise ValueError("burn must be >= 0")
    rng = _rng(seed)
    u = np.clip(rng.random(n + burn), 1e-15, 1.0 - 1e-16)
    z = ged_quantile(u, params.nu)
    return egarch_from_innovations(spec, params, z)[burn:]
