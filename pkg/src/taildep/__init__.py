"""Tail-dependence modeling for paired financial series.

Two-stage workflow: filter each series with an ARMA-EGARCH-GED marginal
model, transform the standardized residuals to probability integral
transforms, then fit static and time-varying bivariate copulas (Normal,
Student-t, Gumbel, Clayton, symmetrized Joe-Clayton) to the pair and rank
them by information criteria.  Seeded samplers cover every family for
Monte Carlo work, and a small CLI drives the whole pipeline from YAML
configs.
"""

__version__ = "0.1.0"

from .copulas import (
    FAMILIES,
    StaticCopulaParams,
    TailDependence,
    copula_cdf,
    copula_logpdf,
    joe_clayton_cdf,
    sjc_cdf,
    static_loglik,
    tail_dependence,
)
from .data import (
    DiagnosticReport,
    RawSeries,
    ReturnSeries,
    align,
    arch_lm,
    diagnose,
    jarque_bera,
    ljung_box,
    load_csv,
    log_returns,
    transform_series,
)
from .dynamic import (
    EvolutionParams,
    ParamPath,
    dynamic_loglik,
    filter_dynamic,
    forcing_term,
    link_inverse,
    link_transform,
)
from .egarch import (
    ArmaEgarchSpec,
    MarginalFit,
    MarginalParams,
    auto_order_search,
    egarch_filter,
    fit_marginal,
    pit_uniformity_check,
)
from .estimation import (
    FitReport,
    OptimResult,
    aic,
    bic,
    fit_dynamic_copula,
    fit_static_copula,
    maximize,
    select_best,
    std_errors,
)
from .ged import ged_cdf, ged_logpdf, ged_quantile
from .simulate import (
    egarch_from_innovations,
    sample_copula,
    sample_dynamic,
    simulate_egarch,
)

__all__ = [
    "__version__",
    "FAMILIES",
    "StaticCopulaParams",
    "TailDependence",
    "copula_cdf",
    "copula_logpdf",
    "joe_clayton_cdf",
    "sjc_cdf",
    "static_loglik",
    "tail_dependence",
    "DiagnosticReport",
    "RawSeries",
    "ReturnSeries",
    "align",
    "arch_lm",
    "diagnose",
    "jarque_bera",
    "ljung_box",
    "load_csv",
    "log_returns",
    "transform_series",
    "EvolutionParams",
    "ParamPath",
    "dynamic_loglik",
    "filter_dynamic",
    "forcing_term",
    "link_inverse",
    "link_transform",
    "ArmaEgarchSpec",
    "MarginalFit",
    "MarginalParams",
    "auto_order_search",
    "egarch_filter",
    "fit_marginal",
    "pit_uniformity_check",
    "FitReport",
    "OptimResult",
    "aic",
    "bic",
    "fit_dynamic_copula",
    "fit_static_copula",
    "maximize",
    "select_best",
    "std_errors",
    "ged_cdf",
    "ged_logpdf",
    "ged_quantile",
    "egarch_from_innovations",
    "sample_copula",
    "sample_dynamic",
    "simulate_egarch",
]
