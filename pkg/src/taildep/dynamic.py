"""Time-varying copula parameters driven by observation-history recursions.

Each dependence parameter follows

    param_t = link(omega + beta * param_{t-1} + alpha * forcing_t)

where ``link`` maps the real line onto the parameter's valid region, the
``beta`` term feeds back the previous *transformed* parameter, and
``forcing_t`` averages a dependence signal over the last up-to-10
observations.  The recursion starts from the fixed-point style value
``link(omega / (1 - beta))`` (``link(omega)`` when ``|beta| >= 1``).

Forcing signals: Normal and Student-t use the mean product of quantile
transforms of the lagged arguments (Student-t at the previous step's
degrees of freedom); Gumbel, Clayton and SJC use the mean absolute
difference |u - v|, which is small under strong dependence.

Two-parameter families run two recursions: Student-t evolves (rho, dof)
off a common forcing; SJC evolves its upper and lower tail coefficients
independently, again off a common forcing.

Raw recursion states are clipped to [-50, 50] before the link so that
explosive coefficient regions stay finite (and poor) rather than
overflowing; the optimizer sees a penalty-like surface instead of NaNs.

The hot loops are numba kernels.  The single-step helpers are shared with
the sampling module, which guarantees that filtering a simulated series
reproduces the generating parameter path exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import special

from .copulas import FAMILIES, UV_EPS

__all__ = [
    "EvolutionParams",
    "ParamPath",
    "LINK_ROLES",
    "family_roles",
    "link_transform",
    "link_inverse",
    "forcing_term",
    "filter_dynamic",
    "dynamic_loglik",
]

LINK_ROLES = ("corr", "dof", "gumbel", "clayton", "sjc")
_ROLE_ID = {role: i for i, role in enumerate(LINK_ROLES)}

_CORR_CAP = 1.0 - 1e-12
_UNIT_EPS = 1e-12
_STATE_CAP = 50.0
_DOF_LO, _DOF_SPAN = 2.0, 198.0
_LOG2 = math.log(2.0)

_FAMILY_ROLES = {
    "normal": ("corr",),
    "student_t": ("corr", "dof"),
    "gumbel": ("gumbel",),
    "clayton": ("clayton",),
    "sjc": ("sjc", "sjc"),
}


def family_roles(family: str) -> tuple[str, ...]:
    """Link roles of the evolving parameter(s) of ``family``, in order."""
    try:
        return _FAMILY_ROLES[family]
    except KeyError:
        raise ValueError(f"unknown copula family {family!r}; expected one of {FAMILIES}") from None


@dataclass(frozen=True)
class EvolutionParams:
    """Evolution coefficients: one (omega, alpha, beta) triple per recursion.

    Single-recursion families (normal, gumbel, clayton) use only the first
    triple.  Student-t carries (rho-triple, dof-triple) and SJC
    (upper-tail-triple, lower-tail-triple) in the ``*2`` slots.
    """

    family: str
    omega: float
    alpha: float
    beta: float
    omega2: float | None = None
    alpha2: float | None = None
    beta2: float | None = None

    def __post_init__(self):
        roles = family_roles(self.family)
        first = (self.omega, self.alpha, self.beta)
        second = (self.omega2, self.alpha2, self.beta2)
        if any(v is None or not np.isfinite(v) for v in first):
            raise ValueError("omega, alpha, beta must be finite")
        if len(roles) == 2:
            if any(v is None or not np.isfinite(v) for v in second):
                raise ValueError(f"{self.family} evolves two parameters and needs omega2, alpha2, beta2")
        elif any(v is not None for v in second):
            raise ValueError(f"{self.family} evolves a single parameter; second triple must be unset")

    @property
    def triples(self) -> list[tuple[float, float, float]]:
        out = [(float(self.omega), float(self.alpha), float(self.beta))]
        if self.omega2 is not None:
            out.append((float(self.omega2), float(self.alpha2), float(self.beta2)))
        return out


@dataclass(frozen=True)
class ParamPath:
    """Filtered parameter path with its implied tail-dependence coefficients.

    ``params`` has shape (n,) for one-parameter families and (n, 2)
    otherwise; ``lambda_u``/``lambda_l`` always have shape (n,).
    """

    family: str
    params: np.ndarray
    lambda_u: np.ndarray
    lambda_l: np.ndarray
    loglik: float

    def __post_init__(self):
        n = self.params.shape[0]
        if self.lambda_u.shape != (n,) or self.lambda_l.shape != (n,):
            raise ValueError("tail coefficient paths must match the parameter path length")
        for lam in (self.lambda_u, self.lambda_l):
            if np.any((lam < 0.0) | (lam >= 1.0)):
                raise ValueError("tail coefficients must lie in [0, 1)")


# ---------------------------------------------------------------------------
# link transforms


def link_transform(role: str, x):
    """Map the real line onto the valid region of the parameter ``role``.

    corr    -> (-1, 1)      via (1 - e^-x) / (1 + e^-x) = tanh(x/2)
    dof     -> (2, 200)     via 2 + 198 * sigmoid(x)
    gumbel  -> [1, inf)     via 1 + log(1 + e^x)
    clayton -> (0, inf)     via log(1 + e^x)
    sjc     -> (0, 1)       via sigmoid(x)

    Outputs that would round onto a closed boundary of an open region are
    pulled a hair inside (1e-12) so downstream densities stay finite.
    """
    x = np.asarray(x, dtype=float)
    if role == "corr":
        out = np.clip(np.tanh(0.5 * x), -_CORR_CAP, _CORR_CAP)
    elif role == "dof":
        out = _DOF_LO + _DOF_SPAN * special.expit(x)
    elif role == "gumbel":
        out = 1.0 + _softplus(x)
    elif role == "clayton":
        out = np.maximum(_softplus(x), _UNIT_EPS)
    elif role == "sjc":
        out = np.clip(special.expit(x), _UNIT_EPS, 1.0 - _UNIT_EPS)
    else:
        raise ValueError(f"unknown link role {role!r}; expected one of {LINK_ROLES}")
    return out if out.ndim else float(out)


def link_inverse(role: str, value):
    """Inverse of :func:`link_transform` on the interior of the range."""
    value = np.asarray(value, dtype=float)
    if role == "corr":
        bad = (value <= -1.0) | (value >= 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.log1p(value) - np.log1p(-value)
    elif role == "dof":
        bad = (value <= _DOF_LO) | (value >= _DOF_LO + _DOF_SPAN)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = special.logit((value - _DOF_LO) / _DOF_SPAN)
    elif role == "gumbel":
        bad = value <= 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.log(np.expm1(value - 1.0))
    elif role == "clayton":
        bad = value <= 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.log(np.expm1(value))
    elif role == "sjc":
        bad = (value <= 0.0) | (value >= 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = special.logit(value)
    else:
        raise ValueError(f"unknown link role {role!r}; expected one of {LINK_ROLES}")
    if np.any(bad):
        raise ValueError(f"value outside the open range of link role {role!r}")
    return out if out.ndim else float(out)


def _softplus(x):
    return np.where(x > 30.0, x + np.log1p(np.exp(-np.abs(x))), np.log1p(np.exp(np.minimum(x, 30.0))))


# ---------------------------------------------------------------------------
# numba scalar helpers (shared with the sampler for step-exact agreement)


@njit(cache=True)
def _link_scalar(role_id: int, x: float) -> float:
    if role_id == 0:  # corr
        val = math.tanh(0.5 * x)
        if val > _CORR_CAP:
            val = _CORR_CAP
        elif val < -_CORR_CAP:
            val = -_CORR_CAP
        return val
    if role_id == 2:  # gumbel
        if x > 30.0:
            return 1.0 + x + math.log1p(math.exp(-x))
        return 1.0 + math.log1p(math.exp(x))
    if role_id == 3:  # clayton
        if x > 30.0:
            sp = x + math.log1p(math.exp(-x))
        else:
            sp = math.log1p(math.exp(x))
        return sp if sp > _UNIT_EPS else _UNIT_EPS
    if role_id == 4:  # sjc
        if x >= 0.0:
            val = 1.0 / (1.0 + math.exp(-x))
        else:
            e = math.exp(x)
            val = e / (1.0 + e)
        if val < _UNIT_EPS:
            val = _UNIT_EPS
        elif val > 1.0 - _UNIT_EPS:
            val = 1.0 - _UNIT_EPS
        return val
    # dof (role_id == 1); kept for completeness, the Student-t loop runs in Python
    if x >= 0.0:
        val = 1.0 / (1.0 + math.exp(-x))
    else:
        e = math.exp(x)
        val = e / (1.0 + e)
    return _DOF_LO + _DOF_SPAN * val


@njit(cache=True)
def _init_scalar(role_id: int, omega: float, beta: float) -> float:
    if abs(beta) < 1.0:
        return _link_scalar(role_id, omega / (1.0 - beta))
    return _link_scalar(role_id, omega)


@njit(cache=True)
def _step_scalar(role_id: int, prev: float, omega: float, alpha: float, beta: float,
                 forcing: float) -> float:
    raw = omega + beta * prev + alpha * forcing
    if raw > _STATE_CAP:
        raw = _STATE_CAP
    elif raw < -_STATE_CAP:
        raw = -_STATE_CAP
    return _link_scalar(role_id, raw)


@njit(cache=True)
def _forcing_window(d: np.ndarray, t: int) -> float:
    """Mean of d[t-j], j = 1..min(10, t); zero when no lags exist."""
    k = t if t < 10 else 10
    if k == 0:
        return 0.0
    s = 0.0
    for j in range(1, k + 1):
        s += d[t - j]
    return s / k


# scalar log densities; algebra mirrors the vectorized forms in copulas.py


@njit(cache=True)
def _normal_lc(x: float, y: float, rho: float) -> float:
    s = rho * rho
    return -0.5 * math.log1p(-s) - (s * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * (1.0 - s))


@njit(cache=True)
def _gumbel_lc(u: float, v: float, theta: float) -> float:
    if theta == 1.0:
        return 0.0
    xt = -math.log(u)
    yt = -math.log(v)
    lxt = math.log(xt)
    lyt = math.log(yt)
    a1 = theta * lxt
    a2 = theta * lyt
    m = a1 if a1 > a2 else a2
    log_a = m + math.log(math.exp(a1 - m) + math.exp(a2 - m))
    a_rt = math.exp(log_a / theta)
    return (-a_rt + xt + yt + (theta - 1.0) * (lxt + lyt)
            + (2.0 / theta - 2.0) * log_a + math.log1p((theta - 1.0) / a_rt))


@njit(cache=True)
def _clayton_lc(u: float, v: float, delta: float) -> float:
    lu = math.log(u)
    lv = math.log(v)
    a1 = -delta * lu
    a2 = -delta * lv
    big = a1 if a1 > a2 else a2
    if big > 30.0:
        log_t = big + math.log(math.exp(a1 - big) + math.exp(a2 - big) - math.exp(-big))
    else:
        s = math.expm1(a1) + math.expm1(a2)
        if s <= -1.0:
            return -np.inf
        log_t = math.log1p(s)
    return math.log1p(delta) - (1.0 + delta) * (lu + lv) - (2.0 + 1.0 / delta) * log_t


@njit(cache=True)
def _log1mexp_s(l: float) -> float:
    if l > -_LOG2:
        return math.log(-math.expm1(l))
    return math.log1p(-math.exp(l))


@njit(cache=True)
def _jc_lc(u: float, v: float, a: float, b: float) -> float:
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
    log_k = -log_t / b
    if log_t == 0.0:
        # both tail exponents underflow; 1 - K collapses to (1-u)^a + (1-v)^a
        e1 = a * lubar
        e2 = a * lvbar
        me = e1 if e1 > e2 else e2
        l1mk = me + math.log(math.exp(e1 - me) + math.exp(e2 - me))
    else:
        l1mk = _log1mexp_s(log_k)
    bracket = (a - 1.0) + a * (1.0 + b) * math.exp(l1mk + log_t / b)
    return ((a - 1.0) * (lubar + lvbar) + (-b - 1.0) * (lx + ly)
            + (-2.0 / b - 2.0) * log_t + (1.0 / a - 2.0) * l1mk + math.log(bracket))


@njit(cache=True)
def _sjc_lc(u: float, v: float, lam_u: float, lam_l: float) -> float:
    a = _LOG2 / math.log(2.0 - lam_u)
    b = -_LOG2 / math.log(lam_l)
    ar = _LOG2 / math.log(2.0 - lam_l)
    br = -_LOG2 / math.log(lam_u)
    t1 = _jc_lc(u, v, a, b)
    t2 = _jc_lc(1.0 - u, 1.0 - v, ar, br)
    m = t1 if t1 > t2 else t2
    return m + math.log(math.exp(t1 - m) + math.exp(t2 - m)) - _LOG2


# ---------------------------------------------------------------------------
# full-path kernels


@njit(cache=True)
def _filter_normal(x, y, d, omega, alpha, beta):
    n = x.shape[0]
    path = np.empty(n)
    rho = _init_scalar(0, omega, beta)
    ll = 0.0
    for t in range(n):
        if t > 0:
            rho = _step_scalar(0, rho, omega, alpha, beta, _forcing_window(d, t))
        path[t] = rho
        ll += _normal_lc(x[t], y[t], rho)
    return path, ll


@njit(cache=True)
def _filter_gumbel(u, v, d, omega, alpha, beta):
    n = u.shape[0]
    path = np.empty(n)
    theta = _init_scalar(2, omega, beta)
    ll = 0.0
    for t in range(n):
        if t > 0:
            theta = _step_scalar(2, theta, omega, alpha, beta, _forcing_window(d, t))
        path[t] = theta
        ll += _gumbel_lc(u[t], v[t], theta)
    return path, ll


@njit(cache=True)
def _filter_clayton(u, v, d, omega, alpha, beta):
    n = u.shape[0]
    path = np.empty(n)
    delta = _init_scalar(3, omega, beta)
    ll = 0.0
    for t in range(n):
        if t > 0:
            delta = _step_scalar(3, delta, omega, alpha, beta, _forcing_window(d, t))
        path[t] = delta
        ll += _clayton_lc(u[t], v[t], delta)
    return path, ll


@njit(cache=True)
def _filter_sjc(u, v, d, o_u, a_u, b_u, o_l, a_l, b_l):
    n = u.shape[0]
    path_u = np.empty(n)
    path_l = np.empty(n)
    lam_u = _init_scalar(4, o_u, b_u)
    lam_l = _init_scalar(4, o_l, b_l)
    ll = 0.0
    for t in range(n):
        if t > 0:
            f = _forcing_window(d, t)
            lam_u = _step_scalar(4, lam_u, o_u, a_u, b_u, f)
            lam_l = _step_scalar(4, lam_l, o_l, a_l, b_l, f)
        path_u[t] = lam_u
        path_l[t] = lam_l
        ll += _sjc_lc(u[t], v[t], lam_u, lam_l)
    return path_u, path_l, ll


# ---------------------------------------------------------------------------
# Student-t path in Python (quantile transforms dominate the cost anyway)


def _t_forcing(u: np.ndarray, v: np.ndarray, t: int, dof: float) -> float:
    k = min(10, t)
    if k == 0:
        return 0.0
    qu = special.stdtrit(dof, u[t - k:t])
    qv = special.stdtrit(dof, v[t - k:t])
    return float(np.mean(qu * qv))


def _step_py(role: str, prev: float, omega: float, alpha: float, beta: float,
             forcing: float) -> float:
    raw = omega + beta * prev + alpha * forcing
    raw = min(max(raw, -_STATE_CAP), _STATE_CAP)
    return float(link_transform(role, raw))


def _init_py(role: str, omega: float, beta: float) -> float:
    if abs(beta) < 1.0:
        return float(link_transform(role, omega / (1.0 - beta)))
    return float(link_transform(role, omega))


def _t_lc(u: float, v: float, rho: float, dof: float) -> float:
    x = float(special.stdtrit(dof, u))
    y = float(special.stdtrit(dof, v))
    s = rho * rho
    q = (x * x - 2.0 * rho * x * y + y * y) / (1.0 - s)
    log_joint = (special.gammaln(0.5 * dof + 1.0) - special.gammaln(0.5 * dof)
                 - math.log(dof * math.pi) - 0.5 * math.log1p(-s)
                 - (0.5 * dof + 1.0) * math.log1p(q / dof))
    lpx = (special.gammaln(0.5 * (dof + 1.0)) - special.gammaln(0.5 * dof)
           - 0.5 * math.log(dof * math.pi) - 0.5 * (dof + 1.0) * math.log1p(x * x / dof))
    lpy = (special.gammaln(0.5 * (dof + 1.0)) - special.gammaln(0.5 * dof)
           - 0.5 * math.log(dof * math.pi) - 0.5 * (dof + 1.0) * math.log1p(y * y / dof))
    return float(log_joint - lpx - lpy)


def _filter_student_t(u, v, evo: EvolutionParams):
    n = u.shape[0]
    (o1, a1, b1), (o2, a2, b2) = evo.triples
    rho = _init_py("corr", o1, b1)
    dof = _init_py("dof", o2, b2)
    path = np.empty((n, 2))
    ll = 0.0
    for t in range(n):
        if t > 0:
            f = _t_forcing(u, v, t, dof)  # previous step's dof
            rho_new = _step_py("corr", rho, o1, a1, b1, f)
            dof_new = _step_py("dof", dof, o2, a2, b2, f)
            rho, dof = rho_new, dof_new
        path[t, 0] = rho
        path[t, 1] = dof
        ll += _t_lc(u[t], v[t], rho, dof)
    return path, ll


# ---------------------------------------------------------------------------
# public entry points


def forcing_term(family: str, u, v, t: int, *, dof: float | None = None) -> float:
    """Forcing value entering the recursion at position ``t``.

    Averages over the min(10, t) preceding observations; returns 0.0 at
    t = 0.  Student-t requires ``dof`` (the previous step's value) for its
    quantile transforms.
    """
    u, v = _check_pair(u, v)
    if not 0 <= t < u.shape[0]:
        raise ValueError(f"t must lie in [0, {u.shape[0]}), got {t}")
    roles = family_roles(family)
    if family == "student_t":
        if dof is None:
            raise ValueError("student_t forcing needs the previous step's dof")
        return _t_forcing(u, v, t, float(dof))
    if roles[0] == "corr":
        d = special.ndtri(u) * special.ndtri(v)
    else:
        d = np.abs(u - v)
    return float(_forcing_window(d, t))


def filter_dynamic(evo: EvolutionParams, u, v) -> ParamPath:
    """Run the evolution recursion through observed PITs and score them.

    Returns the full parameter path, the implied tail-dependence paths and
    the accumulated log likelihood.
    """
    u, v = _check_pair(u, v)
    fam = evo.family
    if fam == "normal":
        x = special.ndtri(u)
        y = special.ndtri(v)
        path, ll = _filter_normal(x, y, x * y, evo.omega, evo.alpha, evo.beta)
        zero = np.zeros_like(path)
        return ParamPath(fam, path, zero, zero, float(ll))
    if fam == "student_t":
        path, ll = _filter_student_t(u, v, evo)
        rho, dof = path[:, 0], path[:, 1]
        lam = 2.0 * special.stdtr(dof + 1.0, -np.sqrt((dof + 1.0) * (1.0 - rho) / (1.0 + rho)))
        return ParamPath(fam, path, lam, lam.copy(), float(ll))
    d = np.abs(u - v)
    if fam == "gumbel":
        path, ll = _filter_gumbel(u, v, d, evo.omega, evo.alpha, evo.beta)
        return ParamPath(fam, path, 2.0 - 2.0 ** (1.0 / path), np.zeros_like(path), float(ll))
    if fam == "clayton":
        path, ll = _filter_clayton(u, v, d, evo.omega, evo.alpha, evo.beta)
        return ParamPath(fam, path, np.zeros_like(path), 2.0 ** (-1.0 / path), float(ll))
    path_u, path_l, ll = _filter_sjc(u, v, d, evo.omega, evo.alpha, evo.beta,
                                     evo.omega2, evo.alpha2, evo.beta2)
    return ParamPath(fam, np.column_stack((path_u, path_l)), path_u, path_l, float(ll))


def dynamic_loglik(evo: EvolutionParams, u, v) -> float:
    """Log likelihood of the PIT pair under the evolving copula."""
    return filter_dynamic(evo, u, v).loglik


def _check_pair(u, v):
    u = np.ascontiguousarray(u, dtype=float)
    v = np.ascontiguousarray(v, dtype=float)
    if u.ndim != 1 or u.shape != v.shape:
        raise ValueError("u and v must be one-dimensional arrays of equal length")
    if u.size == 0:
        raise ValueError("empty sample")
    if np.any(~np.isfinite(u)) or np.any(~np.isfinite(v)) \
            or np.any((u < 0) | (u > 1)) or np.any((v < 0) | (v > 1)):
        raise ValueError("PIT values must be finite and lie in [0, 1]")
    return np.clip(u, UV_EPS, 1.0 - UV_EPS), np.clip(v, UV_EPS, 1.0 - UV_EPS)
