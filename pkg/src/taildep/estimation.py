"""Likelihood maximization, curvature-based standard errors, model ranking.

The engine is derivative-free Nelder-Mead with a seeded restart ladder:
after the first run, up to ``restarts`` further runs start from the best
point so far plus a small relative jitter, and the best value ever seen is
kept (so the reported maximum is monotone in the budget).  Constrained
copula parameters are optimized through the link transforms and reported
in their natural space; standard errors always come from a
central-difference Hessian of the *natural*-space likelihood at the
natural argmax.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize as sp_optimize
from scipy import stats as sp_stats

from .copulas import (
    FAMILIES,
    StaticCopulaParams,
    static_loglik,
)
from .dynamic import (
    EvolutionParams,
    ParamPath,
    dynamic_loglik,
    family_roles,
    filter_dynamic,
    link_inverse,
    link_transform,
)

__all__ = [
    "PENALTY",
    "OptimResult",
    "FitReport",
    "maximize",
    "std_errors",
    "aic",
    "bic",
    "select_best",
    "fit_static_copula",
    "fit_dynamic_copula",
    "static_params_from",
    "evolution_params_from",
]

PENALTY = -1e10
_PENALTY_FLOOR = -1e8  # stencil values at or below this count as "in the penalty region"

_PARAM_NAMES = {
    "normal": ("rho",),
    "student_t": ("rho", "dof"),
    "gumbel": ("theta",),
    "clayton": ("delta",),
    "sjc": ("lam_u", "lam_l"),
}


@dataclass(frozen=True)
class OptimResult:
    """Outcome of :func:`maximize`; ``x`` maximizes among all points tried."""

    x: np.ndarray
    value: float
    iterations: int
    converged: bool
    restarts_used: int


@dataclass(frozen=True)
class FitReport:
    """One fitted dependence model, ready for ranking and reporting.

    ``estimates`` and ``std_errors`` share keys and order; a NaN standard
    error means the curvature at the optimum was unusable there.
    """

    family: str
    mode: str
    estimates: dict[str, float]
    std_errors: dict[str, float]
    loglik: float
    aic: float
    bic: float
    n: int
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.mode not in ("static", "dynamic"):
            raise ValueError(f"mode must be 'static' or 'dynamic', got {self.mode!r}")
        if tuple(self.estimates) != tuple(self.std_errors):
            raise ValueError("estimates and std_errors must share keys and order")
        if self.n < 1:
            raise ValueError("n must be positive")
        k = len(self.estimates)
        if not math.isclose(self.aic, 2.0 * k - 2.0 * self.loglik, rel_tol=1e-12, abs_tol=1e-9):
            raise ValueError("stored aic does not match 2k - 2*loglik")
        if not math.isclose(self.bic, k * math.log(self.n) - 2.0 * self.loglik,
                            rel_tol=1e-12, abs_tol=1e-9):
            raise ValueError("stored bic does not match k*ln(n) - 2*loglik")


def maximize(objective, start, *, seed: int = 0, restarts: int = 5,
             maxiter: int | None = None, xatol: float = 1e-8,
             fatol: float = 1e-10) -> OptimResult:
    """Maximize ``objective`` by Nelder-Mead with seeded jittered restarts.

    The first run starts at ``start``; each later run starts at the best
    point found so far plus N(0, (0.1 * (1 + |x|))^2) noise from a
    generator seeded with ``seed``.  Restarting stops early after two
    consecutive runs without material improvement.  The best point ever
    evaluated is returned even if no run formally converged (then
    ``converged`` is False).
    """
    x0 = np.atleast_1d(np.asarray(start, dtype=float))
    if x0.ndim != 1 or not np.all(np.isfinite(x0)):
        raise ValueError("start must be a finite one-dimensional point")
    if restarts < 0:
        raise ValueError("restarts must be >= 0")
    dim = x0.size
    rng = np.random.default_rng(seed)
    options = {"xatol": xatol, "fatol": fatol,
               "maxiter": maxiter if maxiter is not None else 400 * dim,
               "maxfev": (maxiter if maxiter is not None else 400 * dim) * 2}

    def neg(x):
        val = float(objective(x))
        return -val if np.isfinite(val) else -PENALTY

    best_x = None
    best_val = -np.inf
    best_ok = False
    total_iter = 0
    used = 0
    stale = 0
    current = x0
    for attempt in range(restarts + 1):
        res = sp_optimize.minimize(neg, current, method="Nelder-Mead", options=options)
        total_iter += int(res.nit)
        used = attempt
        val = -float(res.fun)
        if val > best_val:
            improved = best_x is None or val > best_val + 10.0 * fatol
            best_val = val
            best_x = np.asarray(res.x, dtype=float)
            best_ok = bool(res.success)
        else:
            improved = False
        stale = 0 if improved else stale + 1
        if stale >= 2 and attempt >= 1:
            break
        jitter = rng.normal(size=dim) * 0.1 * (1.0 + np.abs(best_x))
        current = best_x + jitter
    return OptimResult(x=best_x, value=best_val, iterations=total_iter,
                       converged=best_ok, restarts_used=used)


def std_errors(objective, argmax, step=None) -> np.ndarray:
    """Asymptotic standard errors from the central-difference Hessian.

    Uses per-coordinate steps h_i = max(1e-5, 1e-5 * |x_i|) unless ``step``
    overrides them.  Raises ValueError when any stencil point evaluates
    non-finite or into the penalty region (the optimum sits too close to a
    constraint for curvature to mean anything).  A singular or non-concave
    Hessian yields NaN entries instead of an exception.
    """
    x = np.atleast_1d(np.asarray(argmax, dtype=float))
    d = x.size
    if step is None:
        h = np.maximum(1e-5, 1e-5 * np.abs(x))
    else:
        h = np.broadcast_to(np.asarray(step, dtype=float), x.shape).copy()
        if np.any(h <= 0):
            raise ValueError("steps must be positive")

    def ev(point):
        val = float(objective(point))
        if not np.isfinite(val) or val <= _PENALTY_FLOOR:
            raise ValueError("difference stencil left the valid parameter region")
        return val

    f0 = ev(x)
    hess = np.empty((d, d))
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h[i]
        hess[i, i] = (ev(x + ei) - 2.0 * f0 + ev(x - ei)) / h[i] ** 2
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h[i]
        for j in range(i):
            ej = np.zeros(d)
            ej[j] = h[j]
            hess[i, j] = hess[j, i] = (
                ev(x + ei + ej) - ev(x + ei - ej) - ev(x - ei + ej) + ev(x - ei - ej)
            ) / (4.0 * h[i] * h[j])
    try:
        cov = np.linalg.inv(-hess)
    except np.linalg.LinAlgError:
        return np.full(d, np.nan)
    diag = np.diagonal(cov)
    with np.errstate(invalid="ignore"):
        return np.where(diag > 0.0, np.sqrt(np.abs(diag)), np.nan)


def aic(loglik: float, k: int) -> float:
    """Akaike information criterion, 2k - 2*loglik (smaller is better)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return 2.0 * k - 2.0 * float(loglik)


def bic(loglik: float, k: int, n: int) -> float:
    """Bayesian information criterion, k*ln(n) - 2*loglik."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if n < 1:
        raise ValueError("n must be positive")
    return k * math.log(n) - 2.0 * float(loglik)


def select_best(reports) -> FitReport:
    """Smallest-AIC report; ties fall to fewer parameters, then family
    enumeration order (normal, student_t, gumbel, clayton, sjc), then
    static before dynamic."""
    reports = list(reports)
    if not reports:
        raise ValueError("no fitted models to select from")
    sizes = {r.n for r in reports}
    if len(sizes) > 1:
        raise ValueError(f"reports cover different sample sizes {sorted(sizes)}; not comparable")
    return min(reports, key=lambda r: (r.aic, len(r.estimates),
                                       FAMILIES.index(r.family), r.mode != "static"))


# ---------------------------------------------------------------------------
# static copula fitting


def _static_to_natural(family: str, x: np.ndarray) -> tuple[float, ...]:
    if family == "normal":
        return (link_transform("corr", x[0]),)
    if family == "student_t":
        return (link_transform("corr", x[0]), link_transform("dof", x[1]))
    if family == "gumbel":
        return (link_transform("gumbel", x[0]),)
    if family == "clayton":
        return (float(np.expm1(x[0])),)  # covers the negative-dependence branch
    return (link_transform("sjc", x[0]), link_transform("sjc", x[1]))


def _static_from_natural(family: str, vals) -> np.ndarray:
    if family == "normal":
        return np.array([link_inverse("corr", vals[0])])
    if family == "student_t":
        return np.array([link_inverse("corr", vals[0]), link_inverse("dof", vals[1])])
    if family == "gumbel":
        return np.array([link_inverse("gumbel", vals[0])])
    if family == "clayton":
        return np.array([np.log1p(vals[0])])
    return np.array([link_inverse("sjc", vals[0]), link_inverse("sjc", vals[1])])


def _static_params(family: str, natural) -> StaticCopulaParams:
    return StaticCopulaParams(family, **dict(zip(_PARAM_NAMES[family], map(float, natural))))


def static_params_from(report: FitReport) -> StaticCopulaParams:
    """Rebuild the parameter record of a static-mode fit report."""
    if report.mode != "static":
        raise ValueError("report is not a static fit")
    return StaticCopulaParams(report.family, **report.estimates)


def evolution_params_from(report: FitReport) -> EvolutionParams:
    """Rebuild the evolution coefficients of a dynamic-mode fit report."""
    if report.mode != "dynamic":
        raise ValueError("report is not a dynamic fit")
    return EvolutionParams(report.family, **report.estimates)


def _start_values(family: str, u: np.ndarray, v: np.ndarray) -> tuple[float, ...]:
    """Moment-style starting point from Kendall's tau of the sample."""
    tau = sp_stats.kendalltau(u, v).statistic
    if not np.isfinite(tau):
        tau = 0.0
    if family in ("normal", "student_t"):
        rho0 = float(np.clip(np.sin(0.5 * np.pi * tau), -0.9, 0.9))
        return (rho0,) if family == "normal" else (rho0, 10.0)
    if family == "gumbel":
        theta0 = 1.0 / (1.0 - tau) if tau > 0.0 else 1.05
        return (float(np.clip(theta0, 1.05, 10.0)),)
    if family == "clayton":
        delta0 = 2.0 * tau / (1.0 - tau)
        if abs(delta0) < 0.05:
            delta0 = 0.05 if delta0 >= 0 else -0.05
        return (float(np.clip(delta0, -0.5, 10.0)),)
    lam0 = float(np.clip(tau, 0.05, 0.8))
    return (lam0, lam0)


def _check_pit_pair(u, v) -> tuple[np.ndarray, np.ndarray]:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim != 1 or u.shape != v.shape:
        raise ValueError("u and v must be one-dimensional arrays of equal length")
    if u.size < 10:
        raise ValueError("too few observations to fit a copula")
    if np.any(~np.isfinite(u)) or np.any(~np.isfinite(v)) \
            or np.any((u < 0) | (u > 1)) or np.any((v < 0) | (v > 1)):
        raise ValueError("PIT values must be finite and lie in [0, 1]")
    return u, v


def fit_static_copula(family: str, u, v, *, seed: int = 0, restarts: int = 5) -> FitReport:
    """Fit one static copula family to a PIT pair by maximum likelihood.

    Optimization runs in an unconstrained reparameterization; estimates and
    standard errors are reported in the natural parameter space.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    u, v = _check_pit_pair(u, v)
    n = u.size
    names = _PARAM_NAMES[family]

    def obj_transformed(x):
        try:
            params = _static_params(family, _static_to_natural(family, x))
        except ValueError:
            return PENALTY
        ll = static_loglik(params, u, v)
        return ll if np.isfinite(ll) else PENALTY

    x0 = _static_from_natural(family, _start_values(family, u, v))
    res = maximize(obj_transformed, x0, seed=seed, restarts=restarts)
    natural = np.array(_static_to_natural(family, res.x))

    def obj_natural(p):
        try:
            params = _static_params(family, p)
        except ValueError:
            return PENALTY
        ll = static_loglik(params, u, v)
        return ll if np.isfinite(ll) else PENALTY

    warnings: list[str] = []
    try:
        se = std_errors(obj_natural, natural)
    except ValueError:
        se = np.full(len(names), np.nan)
        warnings.append("standard errors unavailable: optimum too close to the parameter boundary")
    if np.any(np.isnan(se)) and not warnings:
        warnings.append("standard errors incomplete: curvature not negative definite")
    if not res.converged:
        warnings.append("optimizer did not formally converge within its budget")
    if family == "student_t" and natural[1] > 199.0:
        warnings.append("degrees of freedom at the cap; indistinguishable from the normal copula here")
    k = len(names)
    return FitReport(family=family, mode="static",
                     estimates=dict(zip(names, map(float, natural))),
                     std_errors=dict(zip(names, map(float, se))),
                     loglik=res.value, aic=aic(res.value, k), bic=bic(res.value, k, n),
                     n=n, warnings=tuple(warnings))


# ---------------------------------------------------------------------------
# dynamic copula fitting


_EVO_NAMES_1 = ("omega", "alpha", "beta")
_EVO_NAMES_2 = _EVO_NAMES_1 + ("omega2", "alpha2", "beta2")

# static estimates are pulled into a comfortably invertible part of the link
# range before seeding the intercept, so extreme fits cannot produce infinities
_SAFE_RANGE = {"corr": (-0.95, 0.95), "dof": (4.0, 190.0), "gumbel": (1.05, 20.0),
               "clayton": (0.05, 20.0), "sjc": (0.02, 0.9)}


def _dynamic_start(family: str, static_report: FitReport) -> np.ndarray:
    roles = family_roles(family)
    statics = list(static_report.estimates.values())
    if family == "sjc":
        anchors = statics  # (lam_u, lam_l)
    elif family == "student_t":
        anchors = statics  # (rho, dof)
    else:
        anchors = statics[:1]
    out = []
    for role, val in zip(roles, anchors):
        lo, hi = _SAFE_RANGE[role]
        out.extend([link_inverse(role, float(np.clip(val, lo, hi))), 0.05, 0.8])
    return np.array(out)


def fit_dynamic_copula(family: str, u, v, *, seed: int = 0, restarts: int = 5,
                       static_report: FitReport | None = None) -> tuple[FitReport, ParamPath]:
    """Fit the evolution coefficients of a time-varying copula.

    Starts from (link_inverse(static estimate), 0.05, 0.8) per recursion;
    a static fit is run first when none is supplied.  Returns the report
    and the filtered parameter path at the optimum.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    u, v = _check_pit_pair(u, v)
    n = u.size
    if static_report is None:
        static_report = fit_static_copula(family, u, v, seed=seed, restarts=restarts)
    elif static_report.family != family or static_report.mode != "static":
        raise ValueError("static_report must be a static fit of the same family")
    names = _EVO_NAMES_2 if len(family_roles(family)) == 2 else _EVO_NAMES_1

    def obj(x):
        try:
            evo = EvolutionParams(family, *map(float, x))
            ll = dynamic_loglik(evo, u, v)
        except ValueError:
            return PENALTY
        return ll if np.isfinite(ll) else PENALTY

    x0 = _dynamic_start(family, static_report)
    res = maximize(obj, x0, seed=seed, restarts=restarts)
    warnings: list[str] = []
    try:
        se = std_errors(obj, res.x)
    except ValueError:
        se = np.full(len(names), np.nan)
        warnings.append("standard errors unavailable: optimum adjoins a penalized region")
    if np.any(np.isnan(se)) and not warnings:
        warnings.append("standard errors incomplete: curvature not negative definite")
    if not res.converged:
        warnings.append("optimizer did not formally converge within its budget")
    k = len(names)
    report = FitReport(family=family, mode="dynamic",
                       estimates=dict(zip(names, map(float, res.x))),
                       std_errors=dict(zip(names, map(float, se))),
                       loglik=res.value, aic=aic(res.value, k), bic=bic(res.value, k, n),
                       n=n, warnings=tuple(warnings))
    path = filter_dynamic(EvolutionParams(family, *map(float, res.x)), u, v)
    return report, path
