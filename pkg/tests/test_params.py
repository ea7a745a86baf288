import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mginf.errors import (
    BetaOutOfRange,
    EmptyTable,
    NonFiniteParameter,
    NonPositiveParameter,
    NonPositiveTime,
)
from mginf.params import (
    BetaSpec,
    beta_bounds,
    load_beta_table,
    running_average_beta,
    validate_beta,
    validate_queue_params,
)


def test_validate_queue_params_basic():
    p = validate_queue_params(1.0, 1.0)
    assert p.alpha == 1.0
    assert p.exp_neg_rho == pytest.approx(0.36787944117144233, rel=1e-12)


def test_validate_queue_params_derived_alpha():
    p = validate_queue_params(2.0, math.log(2))
    assert p.alpha == pytest.approx(0.34657359027997264, rel=1e-12)
    assert p.exp_neg_rho == pytest.approx(0.5, rel=1e-14)


@pytest.mark.parametrize("lam,rho", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_nonpositive_rejected(lam, rho):
    with pytest.raises(NonPositiveParameter):
        validate_queue_params(lam, rho)


@pytest.mark.parametrize("lam,rho", [(math.nan, 1.0), (1.0, math.inf)])
def test_nonfinite_rejected(lam, rho):
    with pytest.raises(NonFiniteParameter):
        validate_queue_params(lam, rho)


def test_beta_bounds_ln2():
    p = validate_queue_params(1.0, math.log(2))
    lo, hi = beta_bounds(p)
    assert lo == -1.0
    assert hi == pytest.approx(1.0, rel=1e-12)


def test_beta_bounds_values():
    p = validate_queue_params(1.0, 1.0)
    assert beta_bounds(p)[1] == pytest.approx(0.5819767068693265, rel=1e-12)
    p2 = validate_queue_params(2.0, 1.0)
    assert beta_bounds(p2) == pytest.approx((-2.0, 1.163953413738653), rel=1e-12)


@given(st.floats(min_value=0.01, max_value=10), st.floats(min_value=0.01, max_value=5))
def test_beta_bounds_ordering(lam, rho):
    p = validate_queue_params(lam, rho)
    lo, hi = beta_bounds(p)
    assert lo == -lam < 0 < hi


def test_validate_constant_beta():
    p = validate_queue_params(1.0, 1.0)
    vb = validate_beta(p, BetaSpec(constant=0.0), 50.0)
    assert vb.t_max_checked == 50.0
    with pytest.raises(BetaOutOfRange):
        validate_beta(p, BetaSpec(constant=0.6), 50.0)


def test_endpoints_admitted():
    p = validate_queue_params(1.0, math.log(2))
    validate_beta(p, BetaSpec(constant=-1.0), 50.0)
    validate_beta(p, BetaSpec(constant=1.0), 50.0)


@given(st.floats(min_value=-2.0, max_value=2.0))
def test_constant_admitted_iff_within_bounds(b):
    p = validate_queue_params(1.0, 1.0)
    lo, hi = beta_bounds(p)
    if lo <= b <= hi:
        validate_beta(p, BetaSpec(constant=b), 10.0)
    else:
        with pytest.raises(BetaOutOfRange):
            validate_beta(p, BetaSpec(constant=b), 10.0)


def test_validate_tabulated_running_average():
    p = validate_queue_params(1.0, 1.0)
    # ramp 0 -> 0.2 stays well within (-1, 0.582)
    spec = BetaSpec(knots=((0.0, 0.0), (1.0, 0.2)))
    vb = validate_beta(p, spec, 50.0)
    assert running_average_beta(vb, 3.0) == pytest.approx((0.1 + 0.2 * 2) / 3, rel=1e-12)


def test_validate_tabulated_violation_reported():
    p = validate_queue_params(1.0, 1.0)
    spec = BetaSpec(knots=((0.0, 0.7), (1.0, 0.7)))
    with pytest.raises(BetaOutOfRange):
        validate_beta(p, spec, 10.0)


def test_running_average_constant():
    p = validate_queue_params(1.0, 1.0)
    vb = validate_beta(p, BetaSpec(constant=0.3), 50.0)
    assert running_average_beta(vb, 7.0) == pytest.approx(0.3, rel=1e-14)


def test_running_average_linear():
    p = validate_queue_params(1.0, math.log(2))
    # beta(u) = u on [0, 2]: admissible since avg(t) = t/2 <= 1 up to 2
    vb = validate_beta(p, BetaSpec(knots=((0.0, 0.0), (2.0, 2.0))), 2.0)
    assert running_average_beta(vb, 2.0) == pytest.approx(1.0, rel=1e-12)


def test_running_average_constant_extension():
    p = validate_queue_params(2.0, 0.5)
    vb = validate_beta(p, BetaSpec(knots=((0.0, 1.0), (1.0, 1.0))), 10.0)
    assert running_average_beta(vb, 3.0) == pytest.approx(1.0, rel=1e-12)


def test_running_average_rejects_nonpositive_time():
    p = validate_queue_params(1.0, 1.0)
    vb = validate_beta(p, BetaSpec(constant=0.0), 10.0)
    with pytest.raises(NonPositiveTime):
        running_average_beta(vb, 0.0)


def test_t_max_must_be_positive():
    p = validate_queue_params(1.0, 1.0)
    with pytest.raises(NonPositiveTime):
        validate_beta(p, BetaSpec(constant=0.0), 0.0)


def test_beta_spec_shape_errors():
    with pytest.raises(ValueError):
        BetaSpec(constant=0.0, knots=((0.0, 0.0),))
    with pytest.raises(ValueError):
        BetaSpec(knots=((1.0, 0.0),))  # must start at t = 0
    with pytest.raises(ValueError):
        BetaSpec(knots=((0.0, 0.0), (0.0, 1.0)))  # strictly increasing t
    with pytest.raises(EmptyTable):
        BetaSpec(knots=())


def test_cumulative_beta_vectorized():
    spec = BetaSpec(knots=((0.0, 0.0), (2.0, 2.0)))
    ts = np.array([0.0, 1.0, 2.0, 4.0])
    # triangle up to t=2, then constant 2 beyond
    assert spec.cumulative(ts) == pytest.approx([0.0, 0.5, 2.0, 6.0])


def test_load_beta_table(tmp_path):
    f = tmp_path / "beta.csv"
    f.write_text("t,beta\n0,0\n1,0.2\n")
    spec = load_beta_table(f)
    assert spec.knots == ((0.0, 0.0), (1.0, 0.2))
    empty = tmp_path / "empty.csv"
    empty.write_text("t,beta\n")
    with pytest.raises(EmptyTable):
        load_beta_table(empty)
