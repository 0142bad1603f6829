"""No-intercept least squares linking indicator values to mid-price moves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .book import LobError
from .indicators import IndicatorKind, IndicatorSeries

OOS_FIXED_BETA = "fixed-beta"
OOS_REFIT = "refit"
_OOS_MODES = (OOS_FIXED_BETA, OOS_REFIT)

R2_CENTERED = "centered"
R2_UNCENTERED = "uncentered"
_R2_MODES = (R2_CENTERED, R2_UNCENTERED)


class RegressionError(LobError):
    """A regression precondition does not hold."""


def _as_vector(seq, name: str) -> np.ndarray:
    arr = np.asarray(seq, dtype=float)
    if arr.ndim != 1:
        raise RegressionError(f"{name} must be one-dimensional", code="length-mismatch")
    return arr


def fit_no_intercept(x, y) -> float:
    """Least-squares slope through the origin: sum(x*y) / sum(x*x)."""
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    if xv.shape != yv.shape:
        raise RegressionError(
            f"x has {xv.size} samples, y has {yv.size}", code="length-mismatch"
        )
    if xv.size < 2:
        raise RegressionError("need at least 2 samples", code="too-few-samples")
    sxx = float(xv @ xv)
    if sxx == 0.0:
        raise RegressionError("regressor is identically zero", code="degenerate-regressor")
    return float(xv @ yv) / sxx


def r_squared(x, y, beta: float, mode: str = R2_CENTERED) -> float:
    """Coefficient of determination of predictions beta*x against y.

    Centered mode compares residuals against deviations from the
    evaluation set's own mean (so a transferred beta can score below
    zero); uncentered mode compares against raw sum of squares.
    """
    if mode not in _R2_MODES:
        raise RegressionError(f"unknown r2 mode {mode!r}", code="unknown-mode")
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    if xv.shape != yv.shape:
        raise RegressionError(
            f"x has {xv.size} samples, y has {yv.size}", code="length-mismatch"
        )
    if xv.size < 2:
        raise RegressionError("need at least 2 samples", code="too-few-samples")
    resid = yv - beta * xv
    ss_res = float(resid @ resid)
    if mode == R2_CENTERED:
        dev = yv - yv.mean()
        ss_tot = float(dev @ dev)
    else:
        ss_tot = float(yv @ yv)
    if ss_tot == 0.0:
        raise RegressionError("response has no variation", code="constant-response")
    return 1.0 - ss_res / ss_tot


@dataclass(frozen=True)
class RegressionResult:
    """Fit of one indicator series pair, with evaluation metadata."""

    beta: float              # ticks per unit imbalance
    r2_in: float
    r2_out: float
    n_in: int
    n_out: int
    kind: IndicatorKind
    interval_length: int
    oos_mode: str = OOS_FIXED_BETA
    r2_mode: str = R2_CENTERED


def evaluate_indicator(
    series_in: IndicatorSeries,
    series_out: IndicatorSeries,
    oos_mode: str = OOS_FIXED_BETA,
    r2_mode: str = R2_CENTERED,
) -> RegressionResult:
    """Fit on the in-sample series and score both series.

    The out-of-sample score reuses the in-sample beta by default; refit
    mode fits a fresh beta on the out-sample before scoring it. An
    evaluation set whose indicator is identically zero is rejected as
    degenerate rather than scored vacuously.
    """
    if oos_mode not in _OOS_MODES:
        raise RegressionError(f"unknown oos mode {oos_mode!r}", code="unknown-mode")
    if series_in.kind != series_out.kind or series_in.interval_length != series_out.interval_length:
        raise RegressionError(
            "in and out series disagree on kind or interval length", code="kind-mismatch"
        )
    x_in, y_in = series_in.values(), series_in.mid_changes()
    x_out, y_out = series_out.values(), series_out.mid_changes()
    beta = fit_no_intercept(x_in, y_in)
    r2_in = r_squared(x_in, y_in, beta, r2_mode)
    if not any(v != 0.0 for v in x_out):
        raise RegressionError(
            "out-of-sample regressor is identically zero", code="degenerate-regressor"
        )
    beta_out = fit_no_intercept(x_out, y_out) if oos_mode == OOS_REFIT else beta
    r2_out = r_squared(x_out, y_out, beta_out, r2_mode)
    return RegressionResult(
        beta, r2_in, r2_out, len(x_in), len(x_out),
        series_in.kind, series_in.interval_length, oos_mode, r2_mode,
    )
