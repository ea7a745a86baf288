"""General beta(t) evaluation of the Riccati-family service CDF.

Everything is driven by the kernel f(t) = exp(-lambda*t - int_0^t beta(u)du).
Beyond the last beta knot the kernel is exactly exponential, so the total
integral I = int_0^inf f and all prefix integrals split into a numeric part on
[0, t_knot] plus an analytic tail; for constant beta the whole computation is
analytic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DivergentKernelIntegral, NegativeTime
from .params import QueueParams, ValidatedBeta

# Relative contribution below which the analytic tail of I is considered
# resolved; the tail itself is exact, this only caps the numeric horizon.
TAIL_TOL = 1e-12


def cumulative_beta(vbeta: ValidatedBeta, t) -> float | np.ndarray:
    """int_0^t beta(u) du, exact for constant and piecewise-linear beta."""
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0):
        raise NegativeTime("t must be >= 0")
    out = vbeta.spec.cumulative(tt)
    return float(out) if tt.ndim == 0 else np.asarray(out)


@dataclass(frozen=True)
class KernelContext:
    """Precomputed kernel state: grid prefix integral on [0, t_knot] + exact tail."""

    params: QueueParams
    vbeta: ValidatedBeta
    t_knot: float            # last beta knot; kernel is exponential beyond it
    tail_rate: float         # lambda + beta(inf)
    grid_t: np.ndarray       # uniform grid on [0, t_knot] (empty for constant beta)
    grid_f: np.ndarray
    grid_prefix: np.ndarray  # int_0^{grid_t} f
    total_integral: float    # I = int_0^inf f
    horizon: float           # end of the numeric part

    def kernel(self, t) -> np.ndarray:
        """f(t), evaluated exactly from the cumulative beta integral."""
        tt = np.asarray(t, dtype=float)
        return np.exp(-self.params.lam * tt - self.vbeta.spec.cumulative(tt))

    def prefix_integral(self, t) -> float | np.ndarray:
        """int_0^t f(w) dw."""
        tt = np.asarray(t, dtype=float)
        if np.any(tt < 0):
            raise NegativeTime("t must be >= 0")
        scalar = tt.ndim == 0
        tt = np.atleast_1d(tt)
        out = np.empty_like(tt)
        inside = tt <= self.t_knot
        if np.any(inside):
            out[inside] = self._prefix_numeric(tt[inside])
        if np.any(~inside):
            te = tt[~inside]
            f_end = self.kernel(self.t_knot)
            decay = -np.expm1(-self.tail_rate * (te - self.t_knot))
            out[~inside] = self._prefix_end + f_end * decay / self.tail_rate
        return float(out[0]) if scalar else out

    @property
    def _prefix_end(self) -> float:
        return float(self.grid_prefix[-1]) if self.grid_prefix.size else 0.0

    def _prefix_numeric(self, t: np.ndarray) -> np.ndarray:
        if self.grid_t.size == 0:
            # constant beta: exact
            r = self.tail_rate
            return -np.expm1(-r * t) / r
        h = self.grid_t[1] - self.grid_t[0]
        idx = np.clip((t // h).astype(int), 0, len(self.grid_t) - 1)
        t0 = self.grid_t[idx]
        # Simpson over the residual [t0, t]; f evaluated exactly at 3 points
        dt = t - t0
        fm = self.kernel(t0 + 0.5 * dt)
        ft = self.kernel(t)
        return self.grid_prefix[idx] + dt / 6.0 * (self.grid_f[idx] + 4.0 * fm + ft)


def build_kernel(params: QueueParams, vbeta: ValidatedBeta) -> KernelContext:
    """Integrate the kernel once: grid prefix on [0, t_knot], exact exponential tail."""
    spec = vbeta.spec
    tail_rate = params.lam + spec.tail_rate()
    t_knot = 0.0 if spec.is_constant else spec.knots[-1][0]
    if tail_rate <= 0:
        raise DivergentKernelIntegral(
            "kernel tail rate lambda + beta(inf) must be > 0 "
            f"(got {tail_rate}); the degenerate service case is handled in closed form"
        )
    if t_knot > 0:
        n = max(int(math.ceil(t_knot / (1e-3 * params.alpha))), 100)
        grid_t = np.linspace(0.0, t_knot, n + 1)
        h = grid_t[1] - grid_t[0]
        cum = spec.cumulative(grid_t)
        grid_f = np.exp(-params.lam * grid_t - cum)
        mid = grid_t[:-1] + 0.5 * h
        f_mid = np.exp(-params.lam * mid - spec.cumulative(mid))
        cells = h / 6.0 * (grid_f[:-1] + 4.0 * f_mid + grid_f[1:])
        grid_prefix = np.concatenate([[0.0], np.cumsum(cells)])
        f_end = grid_f[-1]
    else:
        grid_t = np.array([])
        grid_f = np.array([])
        grid_prefix = np.array([])
        f_end = 1.0
    total = (grid_prefix[-1] if t_knot > 0 else 0.0) + f_end / tail_rate
    horizon = t_knot - math.log(TAIL_TOL) / tail_rate
    return KernelContext(
        params=params,
        vbeta=vbeta,
        t_knot=t_knot,
        tail_rate=tail_rate,
        grid_t=grid_t,
        grid_f=grid_f,
        grid_prefix=grid_prefix,
        total_integral=float(total),
        horizon=horizon,
    )


def riccati_service_atom(ctx: KernelContext) -> float:
    """G(0) = (lambda*I + e^{-rho} - 1)/(lambda*I)."""
    lam_i = ctx.params.lam * ctx.total_integral
    return (lam_i + ctx.params.exp_neg_rho - 1.0) / lam_i


def riccati_service_cdf(ctx: KernelContext, t) -> float | np.ndarray:
    """G(t) = 1 - (1/lambda)(1-e^{-rho}) f(t) / (I - (1-e^{-rho}) int_0^t f)."""
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0):
        raise NegativeTime("t must be >= 0")
    scalar = tt.ndim == 0
    lam = ctx.params.lam
    one_m_q0 = 1.0 - ctx.params.exp_neg_rho
    f = ctx.kernel(tt)
    prefix = ctx.prefix_integral(tt)
    g = 1.0 - one_m_q0 * f / (lam * (ctx.total_integral - one_m_q0 * prefix))
    return float(g) if scalar else g


def riccati_service_quantile(ctx: KernelContext, u: float) -> float:
    """Inverse CDF by bracketed root finding; 0 inside the atom at zero."""
    atom = riccati_service_atom(ctx)
    if u <= atom:
        return 0.0
    hi = ctx.horizon
    while riccati_service_cdf(ctx, hi) < u:
        hi *= 2.0
    return brentq(lambda t: riccati_service_cdf(ctx, t) - u, 0.0, hi, xtol=1e-14, rtol=1e-15)
