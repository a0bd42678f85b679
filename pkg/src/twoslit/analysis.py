"""Fringe visibility estimators and the wave-particle duality bookkeeping."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .optics import DensityCurve, SlitGeometry, envelope_density

IDENTITY_TOL = 1e-12
SIGMA_BAND = 5.0
MAX_REPORTED_VISIBILITY = 1.05
MIN_PHASOR_SAMPLES = 100
MIN_POINTS_PER_PERIOD = 32

REPORT_FIELDS = (
    "c",
    "v_analytic",
    "v_all",
    "v_a1",
    "v_a2",
    "d_q",
    "d_englert",
    "sum_dq_v",
    "sum_v2_d2",
    "pass_identity",
    "pass_inequality",
)


def _check_overlap(c: float) -> float:
    c = float(c)
    if not (0.0 <= c <= 1.0):
        raise ValueError(f"detector overlap must lie in [0, 1], got {c!r}")
    return c


def visibility_analytic(c: float) -> float:
    """Fringe visibility behind a detector with ``<d1|d2> = c``: just ``c``."""
    return _check_overlap(c)


def distinguishability_q(c: float) -> float:
    """Fraction of quantons whose slit can be named without error: ``1 - c``."""
    return 1.0 - _check_overlap(c)


def englert_d(c: float) -> float:
    """Englert's distinguishability ``sqrt(1 - c^2)`` for pure detector states."""
    c = _check_overlap(c)
    return math.sqrt(1.0 - c * c)


class EstimatorMethod(str, enum.Enum):
    BORN_NEIGHBORHOOD = "BORN_NEIGHBORHOOD"
    PHASOR = "PHASOR"


@dataclass(frozen=True)
class FringeEstimate:
    v_hat: float
    std_error: float
    method: EstimatorMethod
    overshoot: bool = False


def _bounded(v_hat: float, std_error: float, method: EstimatorMethod) -> FringeEstimate:
    if not math.isfinite(v_hat):
        raise ValueError("visibility estimate is not finite")
    v_hat = max(v_hat, 0.0)
    overshoot = v_hat > 1.0
    return FringeEstimate(min(v_hat, MAX_REPORTED_VISIBILITY), std_error, method, overshoot)


def _sinusoid_extremes(x: np.ndarray, y: np.ndarray, k: float) -> tuple[float, float]:
    """Max and min of ``a + b cos(kx) + s sin(kx)`` through three samples."""
    basis = np.column_stack([np.ones_like(x), np.cos(k * x), np.sin(k * x)])
    a, b, s = np.linalg.solve(basis, y)
    amp = math.hypot(b, s)
    return a + amp, a - amp


def visibility_born(curve: DensityCurve, geom: SlitGeometry) -> FringeEstimate:
    """``(I_max - I_min) / (I_max + I_min)`` over the central fringe period.

    The curve is divided by the known envelope first. The discrete extrema
    in ``[-period/2, period/2]`` are located on the grid and then refined by
    a three-point fit of a sinusoid of the known period, so the result is not
    limited by where the grid happens to fall relative to the fringe peaks.
    """
    grid = np.asarray(curve.grid, dtype=float)
    values = np.asarray(curve.values, dtype=float)
    period = geom.fringe_period
    step = float(np.max(np.diff(grid)))
    if step > period / MIN_POINTS_PER_PERIOD:
        raise ValueError(
            f"insufficient resolution: grid step {step:.3g} m exceeds period/{MIN_POINTS_PER_PERIOD}"
        )
    if grid[0] > -period / 2 or grid[-1] < period / 2:
        raise ValueError("curve must cover the central fringe period around x = 0")

    intensity = values / envelope_density(grid, geom)
    central = np.nonzero(np.abs(grid) <= period / 2)[0]
    k = geom.wavenumber

    def refine(i: int) -> tuple[float, float]:
        i = min(max(i, 1), grid.size - 2)
        sl = slice(i - 1, i + 2)
        return _sinusoid_extremes(grid[sl], intensity[sl], k)

    i_max = refine(int(central[np.argmax(intensity[central])]))[0]
    i_min = refine(int(central[np.argmin(intensity[central])]))[1]
    i_min = max(i_min, 0.0)
    v_hat = (i_max - i_min) / (i_max + i_min)
    return _bounded(float(v_hat), 0.0, EstimatorMethod.BORN_NEIGHBORHOOD)


def _positions_and_weights(data) -> tuple[np.ndarray, np.ndarray, bool]:
    if isinstance(data, DensityCurve):
        return np.asarray(data.grid), np.asarray(data.values, dtype=float), False
    if hasattr(data, "bin_edges") and hasattr(data, "counts"):
        edges = np.asarray(data.bin_edges, dtype=float)
        return 0.5 * (edges[:-1] + edges[1:]), np.asarray(data.counts, dtype=float), True
    x = np.asarray(data, dtype=float).ravel()
    return x, np.ones_like(x), True


def visibility_phasor(data, geom: SlitGeometry) -> FringeEstimate:
    """``2 |<exp(i 2 pi x / period)>|`` over samples, a histogram or a curve.

    Histograms use bin centers weighted by counts; density curves use the
    grid weighted by density, and report zero standard error.
    """
    x, weights, sampled = _positions_and_weights(data)
    total = float(np.sum(weights))
    if sampled and total < MIN_PHASOR_SAMPLES:
        raise ValueError(f"phasor estimate needs at least {MIN_PHASOR_SAMPLES} samples, got {total:g}")
    if total <= 0:
        raise ValueError("no weight to estimate a visibility from")
    phasor = np.sum(weights * np.exp(1j * geom.wavenumber * x)) / total
    std_error = math.sqrt(2.0 / total) if sampled else 0.0
    return _bounded(float(2.0 * abs(phasor)), std_error, EstimatorMethod.PHASOR)


@dataclass(frozen=True)
class DualityReport:
    c: float
    v_analytic: float
    v_measured_all: Optional[FringeEstimate]
    v_measured_a1: Optional[FringeEstimate]
    v_measured_a2: Optional[FringeEstimate]
    d_q: float
    d_englert: float
    sum_dq_v: float
    sum_v2_d2: float
    identity_residual_linear: float
    identity_residual_quadratic: float
    inequality_slack_linear: float
    inequality_slack_quadratic: float
    pass_identity: bool
    pass_inequality: bool

    def as_dict(self) -> dict:
        def v(est):
            return None if est is None else est.v_hat

        return {
            "c": self.c,
            "v_analytic": self.v_analytic,
            "v_all": v(self.v_measured_all),
            "v_a1": v(self.v_measured_a1),
            "v_a2": v(self.v_measured_a2),
            "d_q": self.d_q,
            "d_englert": self.d_englert,
            "sum_dq_v": self.sum_dq_v,
            "sum_v2_d2": self.sum_v2_d2,
            "pass_identity": self.pass_identity,
            "pass_inequality": self.pass_inequality,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"


def duality_report(
    c: float,
    v_all: Optional[FringeEstimate] = None,
    v_a1: Optional[FringeEstimate] = None,
    v_a2: Optional[FringeEstimate] = None,
) -> DualityReport:
    """Evaluate ``D_Q + V = 1`` and ``V^2 + D^2 = 1`` and the matching inequalities.

    When a measured visibility of the full pattern is supplied, the
    inequalities ``D_Q + V <= 1`` and ``V^2 + D^2 <= 1`` are checked with it,
    allowing the measured value to sit up to five standard errors high.
    Otherwise they are checked with the analytic visibility.
    """
    v = visibility_analytic(c)
    d_q = distinguishability_q(c)
    d = englert_d(c)
    sum_dq_v = d_q + v
    sum_v2_d2 = v * v + d * d
    res_lin = abs(sum_dq_v - 1.0)
    res_quad = abs(sum_v2_d2 - 1.0)
    pass_identity = res_lin <= IDENTITY_TOL and res_quad <= IDENTITY_TOL

    if v_all is None:
        v_low = v
    else:
        v_low = max(v_all.v_hat - SIGMA_BAND * v_all.std_error, 0.0)
    slack_lin = 1.0 - (d_q + v_low)
    slack_quad = 1.0 - (v_low * v_low + d * d)
    pass_inequality = slack_lin >= -IDENTITY_TOL and slack_quad >= -IDENTITY_TOL

    return DualityReport(
        c=float(c),
        v_analytic=v,
        v_measured_all=v_all,
        v_measured_a1=v_a1,
        v_measured_a2=v_a2,
        d_q=d_q,
        d_englert=d,
        sum_dq_v=sum_dq_v,
        sum_v2_d2=sum_v2_d2,
        identity_residual_linear=res_lin,
        identity_residual_quadratic=res_quad,
        inequality_slack_linear=slack_lin,
        inequality_slack_quadratic=slack_quad,
        pass_identity=pass_identity,
        pass_inequality=pass_inequality,
    )
