"""Laplace transforms and convolution-series inversion of the busy-period law.

The busy-period transform has two equivalent routes: a nested-quadrature
evaluation straight from the service CDF, and the kernel-based rational form.
The time-domain CDFs are recovered by a truncated Neumann series of
self-convolutions of the kernel on a uniform grid; the busy-cycle CDF is one
extra convolution with the exponential idle-period density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.signal import fftconvolve

from .errors import (
    NegativeS,
    QuadratureFailure,
    StepMismatch,
    StepTooCoarse,
    TruncationBudgetExceeded,
)
from .kernel import KernelContext, riccati_service_atom
from .params import QueueParams, ValidatedBeta

MAX_SERIES_TERMS = 2000


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function at t = 0, h, 2h, ..., n*h."""

    step: float
    values: np.ndarray
    kind: str = "density"  # "density" or "cdf"

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be > 0")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.step

    def at(self, t: float) -> float:
        """Linear interpolation between grid samples."""
        return float(np.interp(t, self.times, self.values))


class LaplacePoint(NamedTuple):
    s: float
    value: float


@dataclass(frozen=True)
class GridSpec:
    step: float
    t_max: float


def default_grid(params: QueueParams) -> GridSpec:
    """h small vs both the arrival and service scales; horizon 12 busy-period means."""
    h = min(0.005 / params.lam, params.alpha / 200.0)
    t_max = 12.0 * math.expm1(params.rho) / params.lam
    return GridSpec(step=h, t_max=t_max)


def grid_convolve(a: GridFunction, b: GridFunction) -> GridFunction:
    """Trapezoidal discrete convolution with half-weight endpoints."""
    if abs(a.step - b.step) > 1e-15 * max(a.step, b.step):
        raise StepMismatch(f"steps differ: {a.step} vs {b.step}")
    n = min(len(a.values), len(b.values))
    av, bv = a.values[:n], b.values[:n]
    full = fftconvolve(av, bv)[:n]
    trap = a.step * (full - 0.5 * av[0] * bv - 0.5 * av * bv[0])
    return GridFunction(step=a.step, values=trap, kind="density")


def series_truncation_order(params: QueueParams, tol: float) -> int:
    """Smallest N with q^{N+1}/(1-q) < tol, q = 1 - e^{-rho} (geometric term mass)."""
    if not (0.0 < tol < 1.0):
        raise ValueError("tol must be in (0, 1)")
    q = 1.0 - params.exp_neg_rho
    n = 0
    while q ** (n + 1) / (1.0 - q) >= tol:
        n += 1
        if n > MAX_SERIES_TERMS:
            raise TruncationBudgetExceeded(
                f"more than {MAX_SERIES_TERMS} series terms needed for tol={tol}"
            )
    return n


def _max_abs_beta(vbeta: ValidatedBeta) -> float:
    spec = vbeta.spec
    if spec.is_constant:
        return abs(spec.constant)
    return max(abs(v) for _, v in spec.knots)


def _series_parts(ctx: KernelContext, grid: GridSpec, tol: float):
    """Grid samples of the kernel, the bracket factor, and the series weight."""
    params = ctx.params
    h = grid.step
    if h * (params.lam + _max_abs_beta(ctx.vbeta)) > 0.01 * (1 + 1e-9):
        raise StepTooCoarse(
            f"step {h} too coarse for rates up to {params.lam + _max_abs_beta(ctx.vbeta)}"
        )
    n = int(round(grid.t_max / h)) + 1
    ts = np.arange(n) * h
    f = ctx.kernel(ts)
    prefix = ctx.prefix_integral(ts)
    g0 = riccati_service_atom(ctx)
    bracket = 1.0 - (1.0 - g0) * (f + params.lam * prefix)
    weight = params.lam * (1.0 - g0)
    n_terms = series_truncation_order(params, tol)
    return ts, GridFunction(h, f), GridFunction(h, bracket), weight, n_terms


def busy_period_cdf_series(ctx: KernelContext, grid: GridSpec, tol: float = 1e-8) -> GridFunction:
    """B(t) on the grid via the truncated Neumann series of kernel self-convolutions.

    The n = 0 term is the convolution identity, so the series starts from the
    bracket factor itself; each further term convolves once more with the
    kernel and picks up a factor lambda*(1 - G(0)).
    """
    _, f, bracket, weight, n_terms = _series_parts(ctx, grid, tol)
    total = bracket.values.copy()
    cur = bracket
    for _ in range(n_terms):
        cur = GridFunction(grid.step, weight * grid_convolve(cur, f).values)
        total += cur.values
    return GridFunction(step=grid.step, values=total, kind="cdf")


def busy_cycle_cdf_series(ctx: KernelContext, grid: GridSpec, tol: float = 1e-8) -> GridFunction:
    """Z(t) = (idle-period exponential density) * B(t) on the grid."""
    b = busy_period_cdf_series(ctx, grid, tol)
    lam = ctx.params.lam
    idle = GridFunction(grid.step, lam * np.exp(-lam * b.times))
    z = grid_convolve(idle, GridFunction(grid.step, b.values))
    return GridFunction(step=grid.step, values=z.values, kind="cdf")


def degenerate_series_curves(params: QueueParams, grid: GridSpec) -> tuple[GridFunction, GridFunction]:
    """Exact B and Z grids for the degenerate service endpoint beta = -lambda."""
    n = int(round(grid.t_max / grid.step)) + 1
    ts = np.arange(n) * grid.step
    b = GridFunction(grid.step, np.ones(n), kind="cdf")
    z = GridFunction(grid.step, -np.expm1(-params.lam * ts), kind="cdf")
    return b, z


def busy_period_laplace_from_service(
    params: QueueParams,
    service_cdf: Callable[[np.ndarray], np.ndarray],
    s: float,
) -> LaplacePoint:
    """Busy-period transform straight from the service CDF by nested quadrature.

    Evaluates 1 + (s - 1/J)/lambda with
    J = int_0^inf exp(-s*t - lambda int_0^t [1 - G(v)] dv) dt; the inner
    integral saturates at rho, so the integrand tail is e^{-rho} e^{-s t} and
    is added in closed form.  At s = 0 the outer integral diverges and the
    normalization value 1 is returned.
    """
    if s < 0:
        raise NegativeS(f"s must be >= 0, got {s}")
    if s == 0:
        return LaplacePoint(0.0, 1.0)
    t_star = 34.0 / s + 40.0 * params.alpha
    m = 20000
    h = t_star / (2 * m)
    ts = np.arange(2 * m + 1) * h
    y = params.lam * (1.0 - np.asarray(service_cdf(ts), dtype=float))
    if not np.all(np.isfinite(y)):
        raise QuadratureFailure("service CDF returned non-finite values")
    # composite Simpson prefix of the inner integral at the even nodes
    cells = h / 3.0 * (y[:-2:2] + 4.0 * y[1::2] + y[2::2])
    inner = np.concatenate([[0.0], np.cumsum(cells)])
    t_even = ts[::2]
    integrand = np.exp(-s * t_even - inner)
    # Simpson again over the even nodes
    h2 = 2.0 * h
    j = h2 / 3.0 * (
        integrand[0] + integrand[-1]
        + 4.0 * integrand[1:-1:2].sum() + 2.0 * integrand[2:-1:2].sum()
    )
    j += integrand[-1] / s  # exponential tail with the saturated inner integral
    if not math.isfinite(j) or j <= 0:
        raise QuadratureFailure("outer Laplace integral failed")
    return LaplacePoint(s, 1.0 + (s - 1.0 / j) / params.lam)


def kernel_laplace(ctx: KernelContext, s: float) -> float:
    """L f(s) = int_0^inf e^{-s t} f(t) dt, numeric on [0, t_knot] + exact tail."""
    if s < 0:
        raise NegativeS(f"s must be >= 0, got {s}")
    tail = ctx.kernel(ctx.t_knot) * math.exp(-s * ctx.t_knot) / (s + ctx.tail_rate)
    if ctx.t_knot == 0:
        return float(tail)
    ts = ctx.grid_t
    h = ts[1] - ts[0]
    vals = np.exp(-s * ts) * ctx.grid_f
    mid = ts[:-1] + 0.5 * h
    vals_mid = np.exp(-s * mid) * ctx.kernel(mid)
    numeric = (h / 6.0 * (vals[:-1] + 4.0 * vals_mid + vals[1:])).sum()
    return float(numeric + tail)


def busy_period_laplace_general(ctx: KernelContext, s: float) -> LaplacePoint:
    """Busy-period transform from the kernel: rational in L f(s) and G(0)."""
    if s < 0:
        raise NegativeS(f"s must be >= 0, got {s}")
    lam = ctx.params.lam
    g0 = riccati_service_atom(ctx)
    lf = kernel_laplace(ctx, s)
    num = 1.0 - (s + lam) * (1.0 - g0) * lf
    den = 1.0 - lam * (1.0 - g0) * lf
    return LaplacePoint(s, num / den)


def busy_cycle_laplace(params: QueueParams, bp: LaplacePoint) -> LaplacePoint:
    """Idle and busy periods are independent: Zbar(s) = lambda/(lambda+s) * Bbar(s)."""
    return LaplacePoint(bp.s, params.lam / (params.lam + bp.s) * bp.value)
