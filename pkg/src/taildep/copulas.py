"""Static bivariate copulas: Normal, Student-t, Gumbel, Clayton, SJC.

Each family exposes its CDF, log density, and tail-dependence coefficients
through a single dispatch on :class:`StaticCopulaParams`.  Densities are
evaluated in log space throughout; arguments are nudged into
[UV_EPS, 1 - UV_EPS] before any quantile transform so that boundary values
produced by empirical PITs cannot generate infinities.

Conventions:

* Normal: correlation rho in (-1, 1), no tail dependence.
* Student-t: rho in (-1, 1), dof in (2, 200]; symmetric tail dependence
  2 * T_{nu+1}(-sqrt((nu+1)(1-rho)/(1+rho))).
* Gumbel: theta in [1, inf), upper tail 2 - 2**(1/theta).
* Clayton: delta in (-1, inf) \\ {0}; lower tail 2**(-1/delta) for delta > 0,
  no tail dependence for delta < 0.
* SJC: parameterized directly by (lam_u, lam_l) in (0, 1)^2, the upper and
  lower tail-dependence coefficients.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

__all__ = [
    "FAMILIES",
    "StaticCopulaParams",
    "TailDependence",
    "copula_cdf",
    "copula_logpdf",
    "tail_dependence",
    "static_loglik",
    "joe_clayton_cdf",
    "sjc_cdf",
    "sjc_conditional",
    "normal_params",
    "student_t_params",
    "gumbel_params",
    "clayton_params",
    "sjc_params",
]

log = logging.getLogger(__name__)

# enumeration order; used as the final tie-break when ranking fits
FAMILIES = ("normal", "student_t", "gumbel", "clayton", "sjc")

DOF_MAX = 200.0
UV_EPS = 1e-10

_LOG2 = np.log(2.0)
# 64 Gauss-Legendre nodes resolve the arcsine correlation integral to ~1e-14
_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


@dataclass(frozen=True)
class StaticCopulaParams:
    """Tagged parameter record; exactly the fields of ``family`` are set.

    rho      : Normal, Student-t correlation
    dof      : Student-t degrees of freedom
    theta    : Gumbel
    delta    : Clayton
    lam_u/lam_l : SJC tail coefficients
    """

    family: str
    rho: float | None = None
    dof: float | None = None
    theta: float | None = None
    delta: float | None = None
    lam_u: float | None = None
    lam_l: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown copula family {self.family!r}; expected one of {FAMILIES}")
        required = {
            "normal": ("rho",),
            "student_t": ("rho", "dof"),
            "gumbel": ("theta",),
            "clayton": ("delta",),
            "sjc": ("lam_u", "lam_l"),
        }[self.family]
        for name in ("rho", "dof", "theta", "delta", "lam_u", "lam_l"):
            val = getattr(self, name)
            if name in required:
                if val is None or not np.isfinite(val):
                    raise ValueError(f"{self.family} copula requires finite {name}")
            elif val is not None:
                raise ValueError(f"{self.family} copula does not take parameter {name}")
        if self.rho is not None and not -1.0 < self.rho < 1.0:
            raise ValueError(f"correlation must lie in (-1, 1), got {self.rho}")
        if self.dof is not None and not 2.0 < self.dof <= DOF_MAX:
            raise ValueError(f"degrees of freedom must lie in (2, {DOF_MAX:g}], got {self.dof}")
        if self.theta is not None and self.theta < 1.0:
            raise ValueError(f"Gumbel parameter must be >= 1, got {self.theta}")
        if self.delta is not None and (self.delta <= -1.0 or self.delta == 0.0):
            raise ValueError(f"Clayton parameter must lie in (-1, inf) excluding 0, got {self.delta}")
        for name in ("lam_u", "lam_l"):
            val = getattr(self, name)
            if val is not None and not 0.0 < val < 1.0:
                raise ValueError(f"tail coefficient {name} must lie in (0, 1), got {val}")

    @property
    def values(self) -> dict[str, float]:
        """Set parameters as an ordered name -> value mapping."""
        out = {}
        for name in ("rho", "dof", "theta", "delta", "lam_u", "lam_l"):
            val = getattr(self, name)
            if val is not None:
                out[name] = float(val)
        return out


def normal_params(rho: float) -> StaticCopulaParams:
    return StaticCopulaParams("normal", rho=rho)


def student_t_params(rho: float, dof: float) -> StaticCopulaParams:
    return StaticCopulaParams("student_t", rho=rho, dof=dof)


def gumbel_params(theta: float) -> StaticCopulaParams:
    return StaticCopulaParams("gumbel", theta=theta)


def clayton_params(delta: float) -> StaticCopulaParams:
    return StaticCopulaParams("clayton", delta=delta)


def sjc_params(lam_u: float, lam_l: float) -> StaticCopulaParams:
    return StaticCopulaParams("sjc", lam_u=lam_u, lam_l=lam_l)


@dataclass(frozen=True)
class TailDependence:
    upper: float
    lower: float


def _clip_uv(u):
    u = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(u)) or np.any(u < 0.0) or np.any(u > 1.0):
        raise ValueError("copula arguments must be finite and lie in [0, 1]")
    clipped = np.clip(u, UV_EPS, 1.0 - UV_EPS)
    n_moved = int(np.sum(clipped != u))
    if n_moved:
        log.debug("nudged %d copula argument(s) off the boundary", n_moved)
    return clipped


# ---------------------------------------------------------------------------
# bivariate normal / t CDF helpers


def _bvn_cdf(x, y, rho: float):
    """P(X <= x, Y <= y) for standard bivariate normal with correlation rho.

    Arcsine substitution: Phi2 = Phi(x)Phi(y)
    + (1/2pi) * int_0^{asin rho} exp(-(x^2 + y^2 - 2xy sin t) / (2 cos^2 t)) dt,
    integrated with fixed Gauss-Legendre nodes.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if abs(rho) >= 1.0 - 1e-14:
        if rho > 0:
            return np.minimum(special.ndtr(x), special.ndtr(y))
        return np.maximum(special.ndtr(x) + special.ndtr(y) - 1.0, 0.0)
    base = special.ndtr(x) * special.ndtr(y)
    lim = np.arcsin(rho)
    t = 0.5 * lim * (_GL_X + 1.0)  # nodes on [0, asin rho]
    ct2 = np.cos(t) ** 2
    expo = -(x[..., None] ** 2 + y[..., None] ** 2
             - 2.0 * x[..., None] * y[..., None] * np.sin(t)) / (2.0 * ct2)
    integral = np.sum(_GL_W * np.exp(expo), axis=-1) * 0.5 * lim
    return base + integral / (2.0 * np.pi)


def _t_logpdf_1d(x, dof: float):
    return (special.gammaln(0.5 * (dof + 1.0)) - special.gammaln(0.5 * dof)
            - 0.5 * np.log(dof * np.pi) - 0.5 * (dof + 1.0) * np.log1p(x * x / dof))


def _bvt_cdf_scalar(x: float, y: float, rho: float, dof: float) -> float:
    """Bivariate t rectangle probability by integrating the conditional CDF.

    Given X = s, (Y - rho s) / sqrt((1 - rho^2)(dof + s^2) / (dof + 1)) is
    t with dof + 1 degrees of freedom.
    """
    if abs(rho) >= 1.0 - 1e-14:
        fx, fy = special.stdtr(dof, x), special.stdtr(dof, y)
        return float(min(fx, fy) if rho > 0 else max(fx + fy - 1.0, 0.0))
    s1 = np.sqrt(1.0 - rho * rho)

    def integrand(s):
        scale = s1 * np.sqrt((dof + s * s) / (dof + 1.0))
        return np.exp(_t_logpdf_1d(s, dof)) * special.stdtr(dof + 1.0, (y - rho * s) / scale)

    val, _ = integrate.quad(integrand, -np.inf, x, epsabs=1e-12, epsrel=1e-10, limit=200)
    return float(val)


# ---------------------------------------------------------------------------
# per-family log densities


def _normal_logpdf(u, v, rho: float):
    x = special.ndtri(u)
    y = special.ndtri(v)
    s = rho * rho
    return -0.5 * np.log1p(-s) - (s * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * (1.0 - s))


def _student_t_logpdf(u, v, rho: float, dof: float):
    x = special.stdtrit(dof, u)
    y = special.stdtrit(dof, v)
    s = rho * rho
    q = (x * x - 2.0 * rho * x * y + y * y) / (1.0 - s)
    log_joint = (special.gammaln(0.5 * dof + 1.0) - special.gammaln(0.5 * dof)
                 - np.log(dof * np.pi) - 0.5 * np.log1p(-s)
                 - (0.5 * dof + 1.0) * np.log1p(q / dof))
    return log_joint - _t_logpdf_1d(x, dof) - _t_logpdf_1d(y, dof)


def _gumbel_pieces(u, v, theta: float):
    xt = -np.log(u)
    yt = -np.log(v)
    lxt = np.log(xt)
    lyt = np.log(yt)
    a1 = theta * lxt
    a2 = theta * lyt
    m = np.maximum(a1, a2)
    log_a = m + np.log(np.exp(a1 - m) + np.exp(a2 - m))  # log(xt^th + yt^th)
    return xt, yt, lxt, lyt, log_a


def _gumbel_logpdf(u, v, theta: float):
    if theta == 1.0:
        return np.zeros(np.broadcast(np.asarray(u), np.asarray(v)).shape)
    xt, yt, lxt, lyt, log_a = _gumbel_pieces(u, v, theta)
    a_rt = np.exp(log_a / theta)  # (xt^th + yt^th)^(1/th)
    return (-a_rt + xt + yt + (theta - 1.0) * (lxt + lyt)
            + (2.0 / theta - 2.0) * log_a + np.log1p((theta - 1.0) / a_rt))


def _gumbel_cdf(u, v, theta: float):
    if theta == 1.0:
        return np.asarray(u, dtype=float) * np.asarray(v, dtype=float)
    _, _, _, _, log_a = _gumbel_pieces(u, v, theta)
    return np.exp(-np.exp(log_a / theta))


def _clayton_log_t(u, v, delta: float):
    """log(u^-d + v^-d - 1) with the sum kept in a numerically safe form.

    Returns -inf where the argument is non-positive (possible for delta < 0,
    where the copula has zero mass outside u^-d + v^-d > 1).
    """
    a1 = np.asarray(-delta * np.log(u), dtype=float)
    a2 = np.asarray(-delta * np.log(v), dtype=float)
    shape = np.broadcast(a1, a2).shape
    a1, a2 = (np.ravel(x) for x in np.broadcast_arrays(a1, a2))
    big = np.maximum(a1, a2)
    out = np.empty(a1.shape)
    hi = big > 30.0
    lo = ~hi
    if np.any(lo):
        s = np.expm1(a1[lo]) + np.expm1(a2[lo])  # T - 1, exact near delta ~ 0
        with np.errstate(divide="ignore", invalid="ignore"):
            out[lo] = np.where(s > -1.0, np.log1p(s), -np.inf)
    if np.any(hi):
        m = big[hi]
        out[hi] = m + np.log(np.exp(a1[hi] - m) + np.exp(a2[hi] - m) - np.exp(-m))
    return out.reshape(shape)


def _clayton_logpdf(u, v, delta: float):
    log_t = _clayton_log_t(u, v, delta)
    lu = np.log(u)
    lv = np.log(v)
    with np.errstate(invalid="ignore"):
        out = np.log1p(delta) - (1.0 + delta) * (lu + lv) - (2.0 + 1.0 / delta) * log_t
    return np.where(np.isfinite(log_t), out, -np.inf)


def _clayton_cdf(u, v, delta: float):
    log_t = _clayton_log_t(u, v, delta)
    with np.errstate(over="ignore"):
        out = np.where(np.isfinite(log_t), np.exp(-log_t / delta), 0.0)
    return out


def _sjc_ab(lam_u: float, lam_l: float) -> tuple[float, float]:
    """Joe-Clayton shape pair (a, b) pinned by the two tail coefficients:
    lam_u = 2 - 2^(1/a) and lam_l = 2^(-1/b)."""
    a = _LOG2 / np.log(2.0 - lam_u)
    b = -_LOG2 / np.log(lam_l)
    return a, b


def _log1mexp(l):
    """log(1 - e^l) for l < 0, accurate at both ends."""
    l = np.asarray(l, dtype=float)
    flat = l.ravel()
    out = np.empty_like(flat)
    near = flat > -_LOG2
    with np.errstate(divide="ignore"):  # -inf at l == 0 is the correct limit
        out[near] = np.log(-np.expm1(flat[near]))
    out[~near] = np.log1p(-np.exp(flat[~near]))
    return out.reshape(l.shape)


def _jc_pieces(u, v, a: float, b: float):
    lubar = np.log1p(-u)
    lvbar = np.log1p(-v)
    lx = _log1mexp(a * lubar)  # log(1 - (1-u)^a), stable into both corners
    ly = _log1mexp(a * lvbar)
    a1 = -b * lx
    a2 = -b * ly
    shape = np.broadcast_shapes(a1.shape, a2.shape)
    a1 = np.broadcast_to(a1, shape).ravel()
    a2 = np.broadcast_to(a2, shape).ravel()
    m = np.maximum(a1, a2)
    log_t = np.empty_like(m)
    big = m > 30.0
    if np.any(big):
        b1, b2, bm = a1[big], a2[big], m[big]
        log_t[big] = bm + np.log(np.exp(b1 - bm) + np.exp(b2 - bm) - np.exp(-bm))
    small = ~big
    if np.any(small):
        log_t[small] = np.log1p(np.expm1(a1[small]) + np.expm1(a2[small]))
    log_t = log_t.reshape(shape)
    log_k = -log_t / b
    l1mk = _log1mexp(log_k)  # log(1 - K), K < 1 strictly
    # log_t underflows when both tail exponents vanish (shape a enormous);
    # there 1 - K collapses to (1-u)^a + (1-v)^a
    dead = log_t == 0.0
    if np.any(dead):
        l1mk = np.where(dead, np.logaddexp(a * lubar, a * lvbar), l1mk)
    return lubar, lvbar, lx, ly, log_t, log_k, l1mk


def _jc_cdf(u, v, a: float, b: float):
    _, _, _, _, _, _, l1mk = _jc_pieces(u, v, a, b)
    return -np.expm1(l1mk / a)


def _jc_du(u, v, a: float, b: float):
    """d C_JC / d u, used for conditional sampling."""
    lubar, _, lx, _, log_t, _, l1mk = _jc_pieces(u, v, a, b)
    return np.exp((1.0 / a - 1.0) * l1mk + (-1.0 / b - 1.0) * log_t
                  + (-b - 1.0) * lx + (a - 1.0) * lubar)


def _jc_logpdf(u, v, a: float, b: float):
    lubar, lvbar, lx, ly, log_t, log_k, l1mk = _jc_pieces(u, v, a, b)
    bracket = (a - 1.0) + a * (1.0 + b) * np.exp(l1mk + log_t / b)
    return ((a - 1.0) * (lubar + lvbar) + (-b - 1.0) * (lx + ly)
            + (-2.0 / b - 2.0) * log_t + (1.0 / a - 2.0) * l1mk + np.log(bracket))


def joe_clayton_cdf(u, v, lam_u: float, lam_l: float):
    """Joe-Clayton copula CDF with tail coefficients (lam_u, lam_l).

    C(u, v) = 1 - (1 - [(1-(1-u)^a)^-b + (1-(1-v)^a)^-b - 1]^(-1/b))^(1/a)
    with a, b recovered from the tail coefficients.  Asymmetric: its lower
    tail still depends on lam_u through a.
    """
    _check_tail(lam_u, lam_l)
    a, b = _sjc_ab(lam_u, lam_l)
    u = _clip_uv(u)
    v = _clip_uv(v)
    out = _jc_cdf(u, v, a, b)
    return out if out.ndim else float(out)


def sjc_cdf(u, v, lam_u: float, lam_l: float):
    """Symmetrized Joe-Clayton CDF.

    Mixes the Joe-Clayton copula with its survival copula, swapping the tail
    roles in the reflected term so that (lam_u, lam_l) are exactly the upper
    and lower tail-dependence coefficients of the mixture:

    C(u,v) = [C_JC(u,v | lam_u, lam_l) + C_JC(1-u,1-v | lam_l, lam_u) + u + v - 1] / 2
    """
    _check_tail(lam_u, lam_l)
    a, b = _sjc_ab(lam_u, lam_l)
    ar, br = _sjc_ab(lam_l, lam_u)
    u = _clip_uv(u)
    v = _clip_uv(v)
    out = 0.5 * (_jc_cdf(u, v, a, b) + _jc_cdf(1.0 - u, 1.0 - v, ar, br) + u + v - 1.0)
    return out if out.ndim else float(out)


def sjc_conditional(u, v, lam_u: float, lam_l: float):
    """P(V <= v | U = u) under the SJC copula; increasing in v on (0, 1)."""
    _check_tail(lam_u, lam_l)
    a, b = _sjc_ab(lam_u, lam_l)
    ar, br = _sjc_ab(lam_l, lam_u)
    u = _clip_uv(u)
    v = _clip_uv(v)
    out = 0.5 * (_jc_du(u, v, a, b) - _jc_du(1.0 - u, 1.0 - v, ar, br) + 1.0)
    return out if out.ndim else float(out)


def _sjc_logpdf(u, v, lam_u: float, lam_l: float):
    a, b = _sjc_ab(lam_u, lam_l)
    ar, br = _sjc_ab(lam_l, lam_u)
    t1 = _jc_logpdf(u, v, a, b)
    t2 = _jc_logpdf(1.0 - u, 1.0 - v, ar, br)
    return np.logaddexp(t1, t2) - _LOG2


def _check_tail(lam_u, lam_l):
    for name, val in (("lam_u", lam_u), ("lam_l", lam_l)):
        if not (np.isfinite(val) and 0.0 < val < 1.0):
            raise ValueError(f"{name} must lie strictly inside (0, 1), got {val}")


# ---------------------------------------------------------------------------
# public dispatch


def copula_cdf(params: StaticCopulaParams, u, v):
    """C(u, v) for the given family; vectorized over broadcastable u, v.

    Boundary arguments are honored exactly: C(0, v) = 0, C(1, v) = v, and
    symmetrically in u.
    """
    u_in = np.asarray(u, dtype=float)
    v_in = np.asarray(v, dtype=float)
    scalar = u_in.ndim == 0 and v_in.ndim == 0
    u_in, v_in = np.broadcast_arrays(u_in, v_in)
    uc = _clip_uv(u_in)
    vc = _clip_uv(v_in)
    fam = params.family
    if fam == "normal":
        out = _bvn_cdf(special.ndtri(uc), special.ndtri(vc), params.rho)
    elif fam == "student_t":
        x = special.stdtrit(params.dof, uc)
        y = special.stdtrit(params.dof, vc)
        # boundary points take the exact identities below; keep the
        # quadrature away from infinite effective limits
        interior = (u_in > 0.0) & (u_in < 1.0) & (v_in > 0.0) & (v_in < 1.0)
        flat = np.array([_bvt_cdf_scalar(xi, yi, params.rho, params.dof) if ok else 0.0
                         for ok, xi, yi in zip(np.ravel(interior), np.ravel(x), np.ravel(y))])
        out = flat.reshape(x.shape)
    elif fam == "gumbel":
        out = _gumbel_cdf(uc, vc, params.theta)
    elif fam == "clayton":
        out = _clayton_cdf(uc, vc, params.delta)
    else:
        out = np.asarray(sjc_cdf(uc, vc, params.lam_u, params.lam_l))
    # exact boundary identities
    out = np.where(u_in <= 0.0, 0.0, out)
    out = np.where(v_in <= 0.0, 0.0, out)
    out = np.where(u_in >= 1.0, np.where(v_in >= 1.0, 1.0, v_in), out)
    out = np.where((v_in >= 1.0) & (u_in < 1.0), u_in, out)
    return float(out) if scalar else out


def copula_logpdf(params: StaticCopulaParams, u, v):
    """log c(u, v); arguments are nudged off {0, 1} before evaluation."""
    u = _clip_uv(u)
    v = _clip_uv(v)
    fam = params.family
    if fam == "normal":
        out = _normal_logpdf(u, v, params.rho)
    elif fam == "student_t":
        out = _student_t_logpdf(u, v, params.rho, params.dof)
    elif fam == "gumbel":
        out = _gumbel_logpdf(u, v, params.theta)
    elif fam == "clayton":
        out = _clayton_logpdf(u, v, params.delta)
    else:
        out = _sjc_logpdf(u, v, params.lam_u, params.lam_l)
    out = np.asarray(out)
    return out if out.ndim else float(out)


def tail_dependence(params: StaticCopulaParams) -> TailDependence:
    """Upper/lower tail-dependence coefficients of the family at ``params``."""
    fam = params.family
    if fam == "normal":
        return TailDependence(0.0, 0.0)
    if fam == "student_t":
        arg = -np.sqrt((params.dof + 1.0) * (1.0 - params.rho) / (1.0 + params.rho))
        lam = 2.0 * float(special.stdtr(params.dof + 1.0, arg))
        return TailDependence(lam, lam)
    if fam == "gumbel":
        return TailDependence(2.0 - 2.0 ** (1.0 / params.theta), 0.0)
    if fam == "clayton":
        if params.delta > 0.0:
            return TailDependence(0.0, 2.0 ** (-1.0 / params.delta))
        return TailDependence(0.0, 0.0)
    return TailDependence(params.lam_u, params.lam_l)


def static_loglik(params: StaticCopulaParams, u, v) -> float:
    """Sum of log c(u_t, v_t) over the sample."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError("u and v must have identical shapes")
    if u.size == 0:
        raise ValueError("empty sample")
    return float(np.sum(copula_logpdf(params, u, v)))
