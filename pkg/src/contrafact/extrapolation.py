"""Linear trend fitting of an annual series and forward crossing prediction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np


@dataclass(frozen=True)
class TrendFit:
    slope: float       # change per year
    intercept: float   # level at year 0
    r2: float
    n: int
    last_year: int


@dataclass(frozen=True)
class CrossingPrediction:
    year: float | None
    # why there is no forward crossing: "flat", "diverging" or "already-crossed"
    reason: str | None


def fit_trend(series: Mapping[int, float]) -> TrendFit:
    """Ordinary least squares over (year, value) pairs.

    Raises ValueError with fewer than two distinct years.
    """
    if len(series) < 2:
        raise ValueError("trend fit needs at least two points")
    years = np.array(sorted(series), dtype=np.float64)
    values = np.array([series[int(y)] for y in years], dtype=np.float64)
    if np.unique(years).size < 2:
        raise ValueError("trend fit needs at least two distinct years")

    # compute on value residuals so a constant series yields an exactly
    # zero slope
    v0 = values[0]
    resid = values - v0
    x_mean = years.mean()
    r_mean = resid.mean()
    dx = years - x_mean
    slope = float(np.sum(dx * (resid - r_mean)) / np.sum(dx * dx))
    intercept = float(v0 + (r_mean - slope * x_mean))

    fitted = intercept + slope * years
    ss_res = float(np.sum((values - fitted) ** 2))
    ss_tot = float(np.sum((values - values.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return TrendFit(slope=slope, intercept=intercept, r2=r2,
                    n=len(values), last_year=int(years[-1]))


def predict_crossing(fit: TrendFit, level: float = 1.0) -> CrossingPrediction:
    """Year at which the fitted line reaches ``level``, if it lies forward.

    Crossings at or after the last observed year are reported; otherwise the
    prediction is absent with a reason code.
    """
    if fit.slope == 0.0:
        return CrossingPrediction(year=None, reason="flat")
    crossing = (level - fit.intercept) / fit.slope
    if crossing >= fit.last_year:
        return CrossingPrediction(year=float(crossing), reason=None)
    value_at_last = fit.intercept + fit.slope * fit.last_year
    if value_at_last >= level:
        return CrossingPrediction(year=None, reason="already-crossed")
    return CrossingPrediction(year=None, reason="diverging")


def trend_summary(fit: TrendFit, prediction: CrossingPrediction) -> dict:
    """JSON-ready summary of a fit and its crossing prediction."""
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r2": fit.r2,
        "n": fit.n,
        "predicted_crossing_year": prediction.year,
        "reason": prediction.reason,
    }
