"""System parameters and the beta-function family with admissibility certification.

The service-time family is parameterized by a rate function beta(t), either a
single constant or a piecewise-linear table.  A beta function is admissible when
its running average (1/t) * int_0^t beta(u) du stays inside [-lambda,
lambda/(e^rho - 1)] on the whole horizon of interest; every downstream module
requires a certified ValidatedBeta.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BetaOutOfRange,
    EmptyTable,
    NonFiniteParameter,
    NonPositiveParameter,
    NonPositiveTime,
)

VALIDATION_GRID_POINTS = 10_000


@dataclass(frozen=True)
class QueueParams:
    """Arrival rate, traffic intensity, and derived quantities."""

    lam: float
    rho: float
    alpha: float = field(init=False)
    exp_neg_rho: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", self.rho / self.lam)
        object.__setattr__(self, "exp_neg_rho", math.exp(-self.rho))


@dataclass(frozen=True)
class BetaSpec:
    """Constant or tabulated beta(t).

    A tabulated spec holds (t, beta) knots with strictly increasing abscissae
    starting at t = 0; beta is piecewise linear between knots and held constant
    at the last ordinate beyond the table.
    """

    constant: float | None = None
    knots: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if (self.constant is None) == (self.knots is None):
            raise ValueError("exactly one of constant / knots must be given")
        if self.knots is not None:
            if len(self.knots) == 0:
                raise EmptyTable("tabulated beta needs at least one knot")
            ts = [t for t, _ in self.knots]
            if ts[0] != 0.0:
                raise ValueError("first knot must be at t = 0")
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError("knot abscissae must be strictly increasing")
            if not all(math.isfinite(t) and math.isfinite(v) for t, v in self.knots):
                raise NonFiniteParameter("non-finite knot in beta table")

    @property
    def is_constant(self) -> bool:
        return self.constant is not None

    def value(self, t):
        """beta(t); vectorized over t."""
        if self.constant is not None:
            return np.full_like(np.asarray(t, dtype=float), self.constant)
        ts = np.array([k[0] for k in self.knots])
        vs = np.array([k[1] for k in self.knots])
        return np.interp(t, ts, vs)

    def tail_rate(self) -> float:
        """Constant value of beta beyond the last knot."""
        if self.constant is not None:
            return self.constant
        return self.knots[-1][1]

    def cumulative(self, t):
        """int_0^t beta(u) du, exact for the piecewise-linear table; vectorized."""
        t = np.asarray(t, dtype=float)
        if self.constant is not None:
            return self.constant * t
        ts = np.array([k[0] for k in self.knots])
        vs = np.array([k[1] for k in self.knots])
        # prefix trapezoid areas at the knots
        prefix = np.concatenate([[0.0], np.cumsum(0.5 * (vs[1:] + vs[:-1]) * np.diff(ts))])
        idx = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 1)
        dt = t - ts[idx]
        bl = vs[idx]
        # interpolated beta at t (constant beyond the last knot)
        bt = np.interp(t, ts, vs)
        out = prefix[idx] + 0.5 * (bl + bt) * dt
        return out if out.shape else float(out)


@dataclass(frozen=True)
class ValidatedBeta:
    """A BetaSpec certified admissible for params up to t_max_checked."""

    spec: BetaSpec
    params: QueueParams
    t_max_checked: float


def validate_queue_params(lam: float, rho: float) -> QueueParams:
    """Check and package (lambda, rho); alpha = rho/lambda is derived."""
    for name, v in (("lambda", lam), ("rho", rho)):
        if not math.isfinite(v):
            raise NonFiniteParameter(f"{name} must be finite, got {v}")
        if v <= 0:
            raise NonPositiveParameter(f"{name} must be > 0, got {v}")
    return QueueParams(lam=float(lam), rho=float(rho))


def beta_bounds(params: QueueParams) -> tuple[float, float]:
    """Admissible range [-lambda, lambda/(e^rho - 1)] for the running average of beta."""
    return -params.lam, params.lam / math.expm1(params.rho)


def validate_beta(params: QueueParams, spec: BetaSpec, t_max: float) -> ValidatedBeta:
    """Certify that the running average of beta stays within beta_bounds up to t_max.

    Constant beta is checked directly against the closed brackets.  Tabulated
    beta is checked on a fixed grid of 10^4 points; the cumulative integral is
    exact trapezoidal, so piecewise-linear tables are verified exactly at the
    grid points.
    """
    if t_max <= 0:
        raise NonPositiveTime(f"t_max must be > 0, got {t_max}")
    lo, hi = beta_bounds(params)
    if spec.is_constant:
        b = spec.constant
        if not (lo <= b <= hi):
            raise BetaOutOfRange(
                f"constant beta {b} outside [{lo}, {hi:.6f}]"
            )
        return ValidatedBeta(spec=spec, params=params, t_max_checked=float(t_max))
    ts = np.linspace(0.0, t_max, VALIDATION_GRID_POINTS + 1)[1:]
    avg = spec.cumulative(ts) / ts
    bad = np.nonzero((avg < lo) | (avg > hi))[0]
    if bad.size:
        i = bad[0]
        raise BetaOutOfRange(
            f"running average of beta at t={ts[i]:.6g} is {avg[i]:.6g}, "
            f"outside [{lo}, {hi:.6f}]"
        )
    return ValidatedBeta(spec=spec, params=params, t_max_checked=float(t_max))


def running_average_beta(vbeta: ValidatedBeta, t: float) -> float:
    """(1/t) int_0^t beta(u) du."""
    if t <= 0:
        raise NonPositiveTime(f"t must be > 0, got {t}")
    return float(vbeta.spec.cumulative(t)) / t


def load_beta_table(path: str | Path) -> BetaSpec:
    """Read a two-column CSV `t,beta` with a header row into a tabulated BetaSpec."""
    knots = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyTable(f"{path}: empty file")
        for row in reader:
            if not row:
                continue
            knots.append((float(row[0]), float(row[1])))
    if not knots:
        raise EmptyTable(f"{path}: no data rows")
    return BetaSpec(knots=tuple(knots))
