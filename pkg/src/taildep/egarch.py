"""Univariate ARMA mean with EGARCH log-variance and GED innovations.

Model for an observed series Z_t:

    Z_t = a0 + sum_i a_i Z_{t-i} + sum_j b_j eps_{t-j} + eps_t
    log h_t = w + sum_i kappa_i (|eps_{t-i}| + gamma_i eps_{t-i}) / sqrt(h_{t-i})
                + sum_j beta_j log h_{t-j}
    eps_t = sqrt(h_t) z_t,   z_t ~ GED(nu), unit variance

The kappa term equals kappa_i (|z| + gamma_i z): the magnitude part reacts
to shocks of either sign, gamma tilts the response asymmetric.  Filtering
is two-pass: ARMA residuals first (pre-sample residuals zero, pre-sample
observations at the sample mean), then the log-variance recursion seeded
with the log sample variance of those residuals.

Estimation maximizes the exact GED likelihood of the standardized
residuals.  The persistence constraint sum|beta_j| < 1 is imposed softly
(a large likelihood penalty) so that the optimizer can approach, but not
settle in, the nonstationary region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy import special, stats as sp_stats

from .estimation import PENALTY, OptimResult, maximize, std_errors
from .ged import ged_cdf, ged_logpdf

__all__ = [
    "ArmaEgarchSpec",
    "MarginalParams",
    "MarginalFit",
    "egarch_filter",
    "fit_marginal",
    "pit_uniformity_check",
    "auto_order_search",
]

_LOGH_CAP = 50.0
_PIT_EPS = 1e-10


@dataclass(frozen=True)
class ArmaEgarchSpec:
    """Model orders: AR(ar), MA(ma), EGARCH(arch, garch).

    A log-variance lag without any shock term would be unidentified, so
    ``garch >= 1`` requires ``arch >= 1``.  All orders zero is valid and
    means constant mean, constant variance.
    """

    ar: int = 0
    ma: int = 0
    arch: int = 1
    garch: int = 1

    def __post_init__(self):
        for name in ("ar", "ma", "arch", "garch"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"order {name} must be a nonnegative integer, got {v!r}")
        if self.garch >= 1 and self.arch == 0:
            raise ValueError("a log-variance lag (garch >= 1) requires at least one shock term (arch >= 1)")

    @property
    def n_params(self) -> int:
        # a0, w, nu always present
        return 3 + self.ar + self.ma + 2 * self.arch + self.garch

    def param_names(self) -> tuple[str, ...]:
        names = ["a0"]
        names += [f"ar{i + 1}" for i in range(self.ar)]
        names += [f"ma{i + 1}" for i in range(self.ma)]
        names.append("w")
        names += [f"kappa{i + 1}" for i in range(self.arch)]
        names += [f"gamma{i + 1}" for i in range(self.arch)]
        names += [f"beta{i + 1}" for i in range(self.garch)]
        names.append("nu")
        return tuple(names)


@dataclass(frozen=True)
class MarginalParams:
    """Parameter record for one fitted (or assumed) marginal model."""

    a0: float
    ar: np.ndarray
    ma: np.ndarray
    w: float
    kappa: np.ndarray
    gamma: np.ndarray
    beta: np.ndarray
    nu: float

    def __post_init__(self):
        object.__setattr__(self, "ar", np.atleast_1d(np.asarray(self.ar, dtype=float)))
        object.__setattr__(self, "ma", np.atleast_1d(np.asarray(self.ma, dtype=float)))
        object.__setattr__(self, "kappa", np.atleast_1d(np.asarray(self.kappa, dtype=float)))
        object.__setattr__(self, "gamma", np.atleast_1d(np.asarray(self.gamma, dtype=float)))
        object.__setattr__(self, "beta", np.atleast_1d(np.asarray(self.beta, dtype=float)))
        vals = np.concatenate([[self.a0, self.w, self.nu], self.ar, self.ma,
                               self.kappa, self.gamma, self.beta])
        if not np.all(np.isfinite(vals)):
            raise ValueError("marginal parameters must all be finite")
        if self.kappa.size != self.gamma.size:
            raise ValueError("kappa and gamma must have one entry per shock lag")
        if self.nu <= 0:
            raise ValueError(f"GED shape must be positive, got {self.nu}")
        if np.sum(np.abs(self.beta)) >= 1.0:
            raise ValueError("persistence sum |beta| must stay below 1")

    def spec(self) -> ArmaEgarchSpec:
        return ArmaEgarchSpec(int(self.ar.size), int(self.ma.size),
                              int(self.kappa.size), int(self.beta.size))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([[self.a0], self.ar, self.ma, [self.w],
                               self.kappa, self.gamma, self.beta, [self.nu]])

    @staticmethod
    def from_vector(spec: ArmaEgarchSpec, x: np.ndarray) -> "MarginalParams":
        a0, ar, ma, w, kappa, gamma, beta, nu = _unpack(spec, np.asarray(x, dtype=float))
        return MarginalParams(a0, ar, ma, w, kappa, gamma, beta, nu)


def _unpack(spec: ArmaEgarchSpec, x: np.ndarray):
    if x.size != spec.n_params:
        raise ValueError(f"expected {spec.n_params} parameters for {spec}, got {x.size}")
    pos = 0

    def take(k):
        nonlocal pos
        out = x[pos:pos + k]
        pos += k
        return out

    a0 = float(take(1)[0])
    ar = take(spec.ar).copy()
    ma = take(spec.ma).copy()
    w = float(take(1)[0])
    kappa = take(spec.arch).copy()
    gamma = take(spec.arch).copy()
    beta = take(spec.garch).copy()
    nu = float(take(1)[0])
    return a0, ar, ma, w, kappa, gamma, beta, nu


@dataclass(frozen=True)
class MarginalFit:
    """Fitted marginal: parameters, likelihood, filtered series, PITs."""

    spec: ArmaEgarchSpec
    params: MarginalParams
    loglik: float
    std_errors: dict[str, float]
    std_residuals: np.ndarray
    cond_variance: np.ndarray
    pit: np.ndarray
    warnings: tuple[str, ...] = field(default=())

    @property
    def estimates(self) -> dict[str, float]:
        return dict(zip(self.spec.param_names(), map(float, self.params.to_vector())))


# ---------------------------------------------------------------------------
# recursion kernels


@njit(cache=True)
def _arma_residuals(y, a0, ar, ma, y_pre):
    n = y.shape[0]
    eps = np.empty(n)
    for t in range(n):
        mean = a0
        for i in range(ar.shape[0]):
            j = t - 1 - i
            mean += ar[i] * (y[j] if j >= 0 else y_pre)
        for k in range(ma.shape[0]):
            j = t - 1 - k
            if j >= 0:
                mean += ma[k] * eps[j]
        eps[t] = y[t] - mean
    return eps


@njit(cache=True)
def _egarch_logvar(eps, w, kappa, gamma, beta, logh0):
    n = eps.shape[0]
    logh = np.empty(n)
    stable = True
    for t in range(n):
        val = w
        for i in range(kappa.shape[0]):
            j = t - 1 - i
            if j >= 0:
                z = eps[j] * math.exp(-0.5 * logh[j])
                val += kappa[i] * (abs(z) + gamma[i] * z)
            # pre-sample shocks are zero and contribute nothing
        for k in range(beta.shape[0]):
            j = t - 1 - k
            val += beta[k] * (logh[j] if j >= 0 else logh0)
        if not math.isfinite(val):
            stable = False
            val = _LOGH_CAP
        elif val > _LOGH_CAP:
            stable = False
            val = _LOGH_CAP
        elif val < -_LOGH_CAP:
            stable = False
            val = -_LOGH_CAP
        logh[t] = val
    return logh, stable


@dataclass(frozen=True)
class FilterResult:
    residuals: np.ndarray
    cond_variance: np.ndarray
    loglik_terms: np.ndarray
    stable: bool

    @property
    def loglik(self) -> float:
        return float(np.sum(self.loglik_terms))

    @property
    def std_residuals(self) -> np.ndarray:
        return self.residuals / np.sqrt(self.cond_variance)


def egarch_filter(y, spec: ArmaEgarchSpec, params: MarginalParams) -> FilterResult:
    """Two-pass filter: ARMA residuals, then the log-variance recursion.

    ``stable`` is False when the log variance had to be clipped at |50|
    (an effectively explosive parameter point); values are still returned.
    """
    y = np.ascontiguousarray(y, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise ValueError("series must be one-dimensional with at least two observations")
    if not np.all(np.isfinite(y)):
        raise ValueError("series contains non-finite values")
    if params.spec() != spec:
        raise ValueError(f"parameter shapes {params.spec()} do not match the model spec {spec}")
    return _filter_vec(y, params.to_vector(), spec)


def _filter_vec(y: np.ndarray, x: np.ndarray, spec: ArmaEgarchSpec) -> FilterResult:
    a0, ar, ma, w, kappa, gamma, beta, nu = _unpack(spec, x)
    eps = _arma_residuals(y, a0, np.ascontiguousarray(ar), np.ascontiguousarray(ma),
                          float(np.mean(y)))
    var0 = float(np.var(eps))
    logh0 = math.log(var0) if var0 > 0 else math.log(1e-12)
    logh, stable = _egarch_logvar(eps, w, np.ascontiguousarray(kappa),
                                  np.ascontiguousarray(gamma),
                                  np.ascontiguousarray(beta), logh0)
    z = eps * np.exp(-0.5 * logh)
    terms = ged_logpdf(z, nu) - 0.5 * logh
    return FilterResult(eps, np.exp(logh), terms, stable)


# ---------------------------------------------------------------------------
# estimation


def _start_vector(y: np.ndarray, spec: ArmaEgarchSpec) -> np.ndarray:
    x = np.zeros(spec.n_params)
    names = spec.param_names()
    idx = {name: i for i, name in enumerate(names)}
    x[idx["a0"]] = float(np.mean(y))
    var0 = float(np.var(y - np.mean(y)))
    if var0 <= 0:
        raise ValueError("series is degenerate (zero variance)")
    beta_total = 0.9 if spec.garch else 0.0
    for j in range(spec.garch):
        x[idx[f"beta{j + 1}"]] = beta_total / spec.garch
    for i in range(spec.arch):
        x[idx[f"kappa{i + 1}"]] = 0.1
        x[idx[f"gamma{i + 1}"]] = 0.0
    x[idx["w"]] = (1.0 - beta_total) * math.log(var0)
    x[idx["nu"]] = 1.5
    return x


def fit_marginal(y, spec: ArmaEgarchSpec, *, seed: int = 0, restarts: int = 5,
                 pit: str = "parametric") -> MarginalFit:
    """Maximum-likelihood fit of the marginal model, then PIT extraction.

    ``pit`` selects the probability transform of the standardized
    residuals: "parametric" pushes them through the fitted GED CDF,
    "empirical" uses ranks over (n + 1).  Raises RuntimeError if no
    restart produces a finite likelihood at a stationary point.
    """
    y = np.ascontiguousarray(y, dtype=float)
    if y.ndim != 1 or y.size < 20:
        raise ValueError("need a one-dimensional series with at least 20 observations")
    if not np.all(np.isfinite(y)):
        raise ValueError("series contains non-finite values")
    if pit not in ("parametric", "empirical"):
        raise ValueError(f"pit must be 'parametric' or 'empirical', got {pit!r}")
    names = spec.param_names()
    beta_slice = slice(1 + spec.ar + spec.ma + 1 + 2 * spec.arch,
                       1 + spec.ar + spec.ma + 1 + 2 * spec.arch + spec.garch)

    def objective(x):
        nu = x[-1]
        if not np.all(np.isfinite(x)) or nu <= 0.05:
            return PENALTY
        res = _filter_vec(y, np.asarray(x, dtype=float), spec)
        if not res.stable:
            return PENALTY
        ll = res.loglik
        if not np.isfinite(ll):
            return PENALTY
        if np.sum(np.abs(x[beta_slice])) >= 1.0:
            ll -= 1e6  # soft stationarity penalty; keeps the surface informative
        return ll

    x0 = _start_vector(y, spec)
    res: OptimResult = maximize(objective, x0, seed=seed, restarts=restarts)
    if not np.isfinite(res.value) or res.value <= PENALTY / 2:
        raise RuntimeError("marginal estimation failed: no stationary parameter point found")
    if np.sum(np.abs(res.x[beta_slice])) >= 1.0:
        raise RuntimeError("marginal estimation failed: persistence stuck at the unit boundary")
    params = MarginalParams.from_vector(spec, res.x)
    filt = egarch_filter(y, spec, params)

    warnings: list[str] = []
    try:
        se = std_errors(objective, res.x)
    except ValueError:
        se = np.full(spec.n_params, np.nan)
        warnings.append("standard errors unavailable: optimum adjoins the penalized region")
    if np.any(np.isnan(se)) and not warnings:
        warnings.append("standard errors incomplete: curvature not negative definite")
    if not res.converged:
        warnings.append("optimizer did not formally converge within its budget")

    z = filt.std_residuals
    if pit == "parametric":
        u = ged_cdf(z, params.nu)
    else:
        u = sp_stats.rankdata(z, method="average") / (z.size + 1.0)
    u = np.clip(u, _PIT_EPS, 1.0 - _PIT_EPS)
    return MarginalFit(spec=spec, params=params, loglik=filt.loglik,
                       std_errors=dict(zip(names, map(float, se))),
                       std_residuals=z, cond_variance=filt.cond_variance,
                       pit=u, warnings=tuple(warnings))


def pit_uniformity_check(pit) -> tuple[float, float]:
    """Kolmogorov-Smirnov distance of the PITs from U(0, 1) and its
    asymptotic p-value."""
    u = np.asarray(pit, dtype=float)
    if u.ndim != 1 or u.size == 0:
        raise ValueError("need a one-dimensional nonempty PIT array")
    if np.any((u < 0) | (u > 1)) or np.any(~np.isfinite(u)):
        raise ValueError("PIT values must lie in [0, 1]")
    n = u.size
    s = np.sort(u)
    grid_hi = np.arange(1, n + 1) / n
    grid_lo = np.arange(0, n) / n
    d = float(max(np.max(grid_hi - s), np.max(s - grid_lo)))
    return d, float(special.kolmogorov(math.sqrt(n) * d))


def auto_order_search(y, *, max_ar: int = 2, max_ma: int = 2, max_arch: int = 2,
                      max_garch: int = 2, seed: int = 0) -> tuple[ArmaEgarchSpec, MarginalFit]:
    """Pick model orders by AIC over a small grid (restarts trimmed to 1).

    Ties prefer fewer parameters, then lexicographic (ar, ma, arch, garch).
    """
    y = np.ascontiguousarray(y, dtype=float)
    best = None
    for ar in range(max_ar + 1):
        for ma in range(max_ma + 1):
            for arch in range(max_arch + 1):
                for garch in range(max_garch + 1):
                    if garch >= 1 and arch == 0:
                        continue
                    spec = ArmaEgarchSpec(ar, ma, arch, garch)
                    try:
                        fit = fit_marginal(y, spec, seed=seed, restarts=1)
                    except (RuntimeError, ValueError):
                        continue
                    crit = 2.0 * spec.n_params - 2.0 * fit.loglik
                    key = (crit, spec.n_params, (ar, ma, arch, garch))
                    if best is None or key < best[0]:
                        best = (key, spec, fit)
    if best is None:
        raise RuntimeError("no candidate marginal model could be fitted")
    return best[1], best[2]
