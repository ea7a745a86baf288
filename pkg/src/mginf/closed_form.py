"""Closed forms for the constant-beta service family.

For a constant monotony indicator beta, the service CDF, busy-period CDF and
busy-cycle CDF of the M|G|inf queue all have elementary expressions built from
exponentials plus an atom at zero.  Everything here is written in
overflow-safe form (only decaying exponentials are evaluated) and the
busy-cycle formula uses an expm1 rearrangement that stays stable through the
confluent point where its textbook denominator vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple

import numpy as np
from scipy.integrate import quad

from .errors import (
    BetaOutOfRange,
    DegenerateDistribution,
    NegativeTime,
    ProbabilityOutOfRange,
)
from .params import QueueParams, beta_bounds

# Evaluators admit beta marginally beyond the certified bounds so that
# continuity studies across the confluent point (rho near ln 2, beta at the
# upper endpoint) can probe both sides; certification in params stays strict.
BOUND_SLACK_REL = 1e-5

# Switch the busy-cycle formula to its confluent limit when the mixture
# denominator lambda - e^{-rho}(lambda+beta) is this small relative to lambda.
CONFLUENCE_EPS_REL = 1e-9


def _check_beta(params: QueueParams, beta: float) -> None:
    lo, hi = beta_bounds(params)
    slack = BOUND_SLACK_REL * params.lam
    if not (lo - slack <= beta <= hi + slack):
        raise BetaOutOfRange(f"beta {beta} outside [{lo}, {hi:.6f}]")


def _check_time(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise NegativeTime("t must be >= 0")
    return t


def _ret(x: np.ndarray, scalar: bool):
    return float(x) if scalar else x


def service_cdf(params: QueueParams, beta: float, t) -> float | np.ndarray:
    """G(t) for constant beta; G == 1 at the degenerate endpoint beta = -lambda."""
    _check_beta(params, beta)
    tt = _check_time(t)
    scalar = tt.ndim == 0
    lam, q0 = params.lam, params.exp_neg_rho
    s = lam + beta
    if s <= 0:
        return _ret(np.ones_like(tt), scalar)
    e = np.exp(-s * tt)
    g = 1.0 - (1.0 - q0) * s * e / (lam * q0 + lam * (1.0 - q0) * e)
    return _ret(g, scalar)


def service_atom(params: QueueParams, beta: float) -> float:
    """G(0), the probability of a zero-length service."""
    _check_beta(params, beta)
    lam, q0 = params.lam, params.exp_neg_rho
    return 1.0 - (1.0 - q0) * (lam + beta) / lam


def service_pdf(params: QueueParams, beta: float, t) -> float | np.ndarray:
    """Density of the continuous part of G; undefined at beta = -lambda."""
    _check_beta(params, beta)
    if beta <= -params.lam:
        raise DegenerateDistribution("no density at beta = -lambda")
    tt = _check_time(t)
    scalar = tt.ndim == 0
    lam, q0 = params.lam, params.exp_neg_rho
    s = lam + beta
    e = np.exp(-s * tt)
    d = lam * (q0 + (1.0 - q0) * e)
    g = s * (1.0 - q0) * e * lam * q0 * s / d**2
    return _ret(g, scalar)


def service_quantile(params: QueueParams, beta: float, u: float) -> float:
    """Inverse of service_cdf: 0 inside the atom, else the closed-form root."""
    _check_beta(params, beta)
    if not (0.0 <= u < 1.0):
        raise ProbabilityOutOfRange(f"u must be in [0, 1), got {u}")
    lam, q0 = params.lam, params.exp_neg_rho
    s = lam + beta
    if s <= 0:
        return 0.0  # degenerate at the origin
    if u <= service_atom(params, beta):
        return 0.0
    t = (1.0 / s) * math.log(
        (1.0 - q0) * (s - (1.0 - u) * lam) / ((1.0 - u) * lam * q0)
    )
    return max(t, 0.0)


def busy_period_cdf(params: QueueParams, beta: float, t) -> float | np.ndarray:
    """B(t): atom of size G(0) plus an exponential of rate e^{-rho}(lambda+beta)."""
    _check_beta(params, beta)
    tt = _check_time(t)
    scalar = tt.ndim == 0
    lam, q0 = params.lam, params.exp_neg_rho
    s = lam + beta
    b = 1.0 - (s / lam) * (1.0 - q0) * np.exp(-q0 * s * tt)
    return _ret(b, scalar)


def busy_cycle_cdf(params: QueueParams, beta: float, t) -> float | np.ndarray:
    """Z(t): mixture of two exponentials, evaluated in confluence-stable form.

    With x = (1 - e^{-rho})(lambda+beta) and d = lambda - e^{-rho}(lambda+beta),
    Z(t) = 1 - e^{-lambda t} (1 + x * expm1(d t)/d); expm1(dt)/d -> t as d -> 0,
    which reproduces the documented limit 1 - (1 + x t)e^{-lambda t}.
    """
    _check_beta(params, beta)
    tt = _check_time(t)
    scalar = tt.ndim == 0
    lam, q0 = params.lam, params.exp_neg_rho
    s = lam + beta
    x = (1.0 - q0) * s
    d = lam - q0 * s
    if abs(d) < CONFLUENCE_EPS_REL * lam:
        z = 1.0 - (1.0 + x * tt) * np.exp(-lam * tt)
    else:
        z = 1.0 - np.exp(-lam * tt) * (1.0 + x * np.expm1(d * tt) / d)
    return _ret(z, scalar)


def empty_probability(params: QueueParams, beta: float, t) -> float | np.ndarray:
    """p00(t) = e^{-lambda int_0^t [1-G]}; closed form e^{-rho} + (1-e^{-rho})e^{-(lambda+beta)t}."""
    _check_beta(params, beta)
    tt = _check_time(t)
    scalar = tt.ndim == 0
    q0 = params.exp_neg_rho
    s = params.lam + beta
    p = q0 + (1.0 - q0) * np.exp(-s * tt)
    return _ret(p, scalar)


def busy_start_empty_probability(params: QueueParams, beta: float, t) -> float | np.ndarray:
    """p1'0(t) = p00(t) G(t): probability the system is empty at t after a busy period starts at 0."""
    return empty_probability(params, beta, t) * service_cdf(params, beta, t)


def monotony_indicator(params: QueueParams, beta: float, t) -> float | np.ndarray:
    """g(t)/(1-G(t)) - lambda G(t), from the analytic density.

    The hazard ratio simplifies to s*lambda*e^{-rho}/D(t) with
    D(t) = lambda(e^{-rho} + (1-e^{-rho})e^{-st}), which avoids the 0/0 of the
    raw quotient at large t.  For the constant family this equals beta
    identically.
    """
    _check_beta(params, beta)
    if beta <= -params.lam:
        raise DegenerateDistribution("no density at beta = -lambda")
    tt = _check_time(t)
    scalar = tt.ndim == 0
    lam, q0 = params.lam, params.exp_neg_rho
    s = lam + beta
    e = np.exp(-s * tt)
    d = lam * (q0 + (1.0 - q0) * e)
    hazard = s * lam * q0 / d
    g = 1.0 - (1.0 - q0) * s * e / d
    return _ret(hazard - lam * g, scalar)


class EnvelopeBounds(NamedTuple):
    bp_floor: float | np.ndarray
    cycle_floor: float | np.ndarray
    cycle_ceiling: float | np.ndarray


def envelope_bounds(params: QueueParams, t) -> EnvelopeBounds:
    """Universal envelopes: B >= bp_floor and cycle_floor <= Z <= cycle_ceiling.

    bp_floor and cycle_floor are the busy-period and busy-cycle CDFs at the
    upper beta endpoint; cycle_ceiling is the exponential idle-period CDF.
    """
    tt = _check_time(t)
    scalar = tt.ndim == 0
    lam = params.lam
    hi = lam / math.expm1(params.rho)
    bp_floor = -np.expm1(-hi * tt)
    cycle_ceiling = -np.expm1(-lam * tt)
    cycle_floor = busy_cycle_cdf(params, hi, tt)
    return EnvelopeBounds(
        _ret(bp_floor, scalar), _ret(cycle_floor, scalar), _ret(cycle_ceiling, scalar)
    )


@dataclass(frozen=True)
class DistributionCurve:
    """An evaluable CDF with an explicit atom at zero and a lazily computed mean."""

    atom_at_zero: float
    cdf: Callable[[float], float]
    tail_rate: float  # asymptotic exponential decay rate of 1 - cdf

    @cached_property
    def mean(self) -> float:
        return _survival_mean(self.cdf, self.tail_rate)


def _survival_mean(cdf: Callable, tail_rate: float) -> float:
    """int_0^inf (1 - F) by adaptive quadrature plus closed-form exponential tail."""
    if tail_rate <= 0:
        return 0.0  # degenerate curve: all mass at the origin
    t_star = 28.0 / tail_rate
    val, _ = quad(lambda u: 1.0 - cdf(u), 0.0, t_star, limit=200,
                  epsabs=1e-13, epsrel=1e-11)
    return val + (1.0 - cdf(t_star)) / tail_rate


def service_curve(params: QueueParams, beta: float) -> DistributionCurve:
    s = params.lam + beta
    return DistributionCurve(
        atom_at_zero=service_atom(params, beta),
        cdf=lambda t: service_cdf(params, beta, t),
        tail_rate=s,
    )


def busy_period_curve(params: QueueParams, beta: float) -> DistributionCurve:
    s = params.lam + beta
    return DistributionCurve(
        atom_at_zero=service_atom(params, beta),
        cdf=lambda t: busy_period_cdf(params, beta, t),
        tail_rate=params.exp_neg_rho * s,
    )


def busy_cycle_curve(params: QueueParams, beta: float) -> DistributionCurve:
    s = params.lam + beta
    slow = min(params.lam, params.exp_neg_rho * s) if s > 0 else params.lam
    return DistributionCurve(
        atom_at_zero=0.0,
        cdf=lambda t: busy_cycle_cdf(params, beta, t),
        tail_rate=slow,
    )
