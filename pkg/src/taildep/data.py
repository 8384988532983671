"""Dated series ingestion, return transforms, and residual diagnostics.

CSV contract: a header row whose first column holds ISO dates (YYYY-MM-DD)
and whose remaining columns hold numeric values; one value column is
selected by name.  Rows are sorted by date on load and duplicate dates are
rejected.  Error messages carry 1-based line numbers (the header is line 1).

The diagnostics follow the plain moment conventions: skewness and kurtosis
use 1/n moment estimators, Jarque-Bera is n/6 * (S^2 + (K-3)^2/4) against
chi-square(2), Ljung-Box uses the n(n+2) small-sample weighting against
chi-square(lags), and the ARCH-LM statistic is (aux sample size) * R^2 from
the regression of squared centered values on their own lags.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date as _date
from pathlib import Path

import numpy as np
from scipy import special

__all__ = [
    "RawSeries",
    "ReturnSeries",
    "DiagnosticReport",
    "TRANSFORMS",
    "load_csv",
    "log_returns",
    "transform_series",
    "align",
    "jarque_bera",
    "jarque_bera_stat",
    "ljung_box",
    "arch_lm",
    "diagnose",
]

TRANSFORMS = ("level", "log-level", "log-return")


@dataclass(frozen=True)
class RawSeries:
    """Values indexed by strictly increasing dates (datetime64[D])."""

    dates: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", np.asarray(self.dates, dtype="datetime64[D]"))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.dates.ndim != 1 or self.dates.shape != self.values.shape:
            raise ValueError("dates and values must be one-dimensional and equally long")
        if self.dates.size < 2:
            raise ValueError("need at least two observations")
        if np.any(np.diff(self.dates) <= np.timedelta64(0, "D")):
            raise ValueError("dates must be strictly increasing (duplicates are not allowed)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must all be finite")

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class ReturnSeries:
    """A transformed series ready for the marginal stage."""

    dates: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", np.asarray(self.dates, dtype="datetime64[D]"))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.dates.ndim != 1 or self.dates.shape != self.values.shape:
            raise ValueError("dates and values must be one-dimensional and equally long")
        if self.dates.size == 0:
            raise ValueError("empty series")
        if np.any(np.diff(self.dates) <= np.timedelta64(0, "D")):
            raise ValueError("dates must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must all be finite")

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class DiagnosticReport:
    """Moments plus the three screening tests for one series."""

    n: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    jarque_bera: tuple[float, float]
    ljung_box: tuple[float, float]
    arch_lm: tuple[float, float]
    lags: int


def load_csv(path, column: str) -> RawSeries:
    """Read one dated value column from a CSV file.

    The first header field names the date column; ``column`` selects among
    the remaining fields.  Malformed dates or values raise ValueError with
    the offending 1-based line number.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if len(header) < 2:
            raise ValueError(f"{path}: need a date column plus at least one value column")
        if column not in header[1:]:
            raise ValueError(f"{path}: column {column!r} not found; available: {header[1:]}")
        col_idx = header.index(column)
        dates: list[_date] = []
        values: list[float] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                dates.append(_date.fromisoformat(row[0].strip()))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed date {row[0].strip()!r} "
                                 "(expected YYYY-MM-DD)") from None
            cell = row[col_idx].strip()
            try:
                values.append(float(cell))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed value {cell!r} "
                                 f"in column {column!r}") from None
    if len(dates) < 2:
        raise ValueError(f"{path}: need at least two data rows, got {len(dates)}")
    d = np.array(dates, dtype="datetime64[D]")
    v = np.array(values, dtype=float)
    order = np.argsort(d, kind="stable")
    d, v = d[order], v[order]
    if not np.all(np.isfinite(v)):
        bad = ", ".join(str(d[i]) for i in np.nonzero(~np.isfinite(v))[0][:5])
        raise ValueError(f"{path}: non-finite values at dates {bad}")
    return RawSeries(d, v)


def log_returns(series: RawSeries) -> ReturnSeries:
    """Log differences; drops the first date.  Requires positive levels."""
    if np.any(series.values <= 0):
        i = int(np.argmax(series.values <= 0))
        raise ValueError(f"log returns need positive levels; found {series.values[i]} "
                         f"at {series.dates[i]}")
    return ReturnSeries(series.dates[1:], np.diff(np.log(series.values)))


def transform_series(series: RawSeries, transform: str) -> ReturnSeries:
    """Apply one of the supported transforms: level, log-level, log-return."""
    if transform == "level":
        return ReturnSeries(series.dates, series.values.copy())
    if transform == "log-level":
        if np.any(series.values <= 0):
            raise ValueError("log-level transform needs positive values")
        return ReturnSeries(series.dates, np.log(series.values))
    if transform == "log-return":
        return log_returns(series)
    raise ValueError(f"unknown transform {transform!r}; expected one of {TRANSFORMS}")


def align(a: ReturnSeries, b: ReturnSeries) -> tuple[ReturnSeries, ReturnSeries]:
    """Restrict both series to their common dates, in date order."""
    common, ia, ib = np.intersect1d(a.dates, b.dates, return_indices=True)
    if common.size == 0:
        raise ValueError("series share no dates")
    return (ReturnSeries(common, a.values[ia]), ReturnSeries(common, b.values[ib]))


def _chi2_sf(x: float, df: float) -> float:
    return float(special.gammaincc(0.5 * df, 0.5 * x))


def jarque_bera_stat(n: int, skewness: float, kurtosis: float) -> float:
    """JB statistic from precomputed moments (kurtosis is the raw fourth
    standardized moment, 3 under normality)."""
    return n / 6.0 * (skewness ** 2 + 0.25 * (kurtosis - 3.0) ** 2)


def _moments(x: np.ndarray) -> tuple[float, float, float, float]:
    mean = float(np.mean(x))
    c = x - mean
    m2 = float(np.mean(c ** 2))
    if m2 <= 0:
        raise ValueError("series is degenerate (zero variance)")
    skew = float(np.mean(c ** 3)) / m2 ** 1.5
    kurt = float(np.mean(c ** 4)) / m2 ** 2
    return mean, m2, skew, kurt


def jarque_bera(x) -> tuple[float, float]:
    """Normality test from sample skewness and kurtosis.

    Returns (statistic, p-value) against the chi-square(2) reference.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 4:
        raise ValueError("need a one-dimensional sample with at least 4 observations")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    _, _, skew, kurt = _moments(x)
    stat = jarque_bera_stat(x.size, skew, kurt)
    return stat, _chi2_sf(stat, 2.0)


def ljung_box(x, lags: int) -> tuple[float, float]:
    """Serial-correlation test: Q = n(n+2) sum_k acf_k^2 / (n-k).

    Returns (statistic, p-value) against chi-square(lags).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("need a one-dimensional sample")
    n = x.size
    if not 1 <= lags < n:
        raise ValueError(f"lags must satisfy 1 <= lags < n = {n}, got {lags}")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    c = x - np.mean(x)
    denom = float(np.sum(c ** 2))
    if denom <= 0:
        raise ValueError("series is degenerate (zero variance)")
    ks = np.arange(1, lags + 1)
    acf = np.array([float(np.sum(c[k:] * c[:-k])) for k in ks]) / denom
    stat = float(n * (n + 2.0) * np.sum(acf ** 2 / (n - ks)))
    return stat, _chi2_sf(stat, float(lags))


def arch_lm(x, lags: int) -> tuple[float, float]:
    """LM test for conditional heteroskedasticity on squared deviations.

    Regresses (x_t - mean)^2 on an intercept and its first ``lags`` lags;
    the statistic is (regression sample size) * R^2 against
    chi-square(lags).  Centering first makes the statistic invariant to a
    location shift.  Serially constant squares yield statistic 0 (nothing
    to explain).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("need a one-dimensional sample")
    n = x.size
    if not 1 <= lags < n - 1:
        raise ValueError(f"lags must satisfy 1 <= lags < n - 1 = {n - 1}, got {lags}")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    sq = (x - np.mean(x)) ** 2
    y = sq[lags:]
    m = y.size
    design = np.empty((m, lags + 1))
    design[:, 0] = 1.0
    for k in range(1, lags + 1):
        design[:, k] = sq[lags - k:n - k]
    sst = float(np.sum((y - np.mean(y)) ** 2))
    if sst <= 1e-12 * max(1.0, float(np.mean(y)) ** 2) * m:
        return 0.0, 1.0
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    r2 = 1.0 - float(np.sum(resid ** 2)) / sst
    r2 = min(max(r2, 0.0), 1.0)
    stat = m * r2
    return stat, _chi2_sf(stat, float(lags))


def diagnose(x, *, lags: int = 30) -> DiagnosticReport:
    """Bundle moments and the three screening tests for one series."""
    x = np.asarray(x, dtype=float)
    jb = jarque_bera(x)
    lb = ljung_box(x, lags)
    arch = arch_lm(x, lags)
    mean, m2, skew, kurt = _moments(x)
    return DiagnosticReport(n=x.size, mean=mean, variance=m2, skewness=skew,
                            excess_kurtosis=kurt - 3.0, jarque_bera=jb,
                            ljung_box=lb, arch_lm=arch, lags=lags)
