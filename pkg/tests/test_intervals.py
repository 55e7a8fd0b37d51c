import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopdeg.intervals import EMPTY, Box2, Interval, det2

ULP = 4  # outward rounding may widen each bound by up to a few ulps


def assert_encloses_tightly(result: Interval, lo: float, hi: float, slack=1e-12):
    """Result must contain [lo, hi] and exceed it only by rounding dust."""
    assert result.lo <= lo and hi <= result.hi
    scale = max(abs(lo), abs(hi), 1.0)
    assert lo - result.lo <= slack * scale
    assert result.hi - hi <= slack * scale


def test_add_endpoint_sums():
    assert_encloses_tightly(Interval(1, 2) + Interval(3, 4), 4.0, 6.0)


def test_sub_displayed_rule():
    # lower bound pairs x_lo - y_hi, upper pairs x_hi - y_lo
    assert_encloses_tightly(Interval(0, 1) - Interval(0, 1), -1.0, 1.0)


def test_mul_against_endpoint_enumeration():
    x, y = Interval(-1, 2), Interval(3, 4)
    products = [a * b for a in (x.lo, x.hi) for b in (y.lo, y.hi)]
    assert min(products) == -4.0 and max(products) == 8.0  # frozen oracle
    assert_encloses_tightly(x * y, -4.0, 8.0)


def test_neg_exact():
    assert -Interval(-1.5, 2.5) == Interval(-2.5, 1.5)


@pytest.mark.parametrize(
    "box,expect",
    [
        (Box2(Interval(-1, 1), Interval(-2, 0)), True),
        (Box2(Interval(1, 2), Interval(-1, 1)), False),
        (Box2(EMPTY, Interval(-1, 1)), False),
    ],
)
def test_contains_zero(box, expect):
    assert box.contains_zero is expect


def test_det2_identity():
    one, zero = Interval(1, 1), Interval(0, 0)
    assert_encloses_tightly(det2(one, zero, zero, one), 1.0, 1.0)


def test_det2_unit_boxes():
    u = Interval(0, 1)
    # oracle: interval composition [0,1]*[0,1] - [0,1]*[0,1] = [0,1] - [0,1]
    assert_encloses_tightly(det2(u, u, u, u), -1.0, 1.0)


def test_det2_exact_scalars():
    two, one = Interval(2, 2), Interval(1, 1)
    assert_encloses_tightly(det2(two, one, one, one), 1.0, 1.0)


def test_empty_absorbs():
    x = Interval(1, 2)
    for v in (EMPTY + x, x - EMPTY, EMPTY * x, -EMPTY):
        assert v.is_empty
    assert EMPTY.intersect(x).is_empty
    assert EMPTY.hull(x) == x


def test_disjoint_intersection_empty():
    assert Interval(0, 1).intersect(Interval(2, 3)).is_empty


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


@st.composite
def intervals(draw):
    a, b = draw(finite), draw(finite)
    return Interval(min(a, b), max(a, b))


@given(intervals(), intervals(), intervals(), intervals())
@settings(max_examples=200, deadline=None)
def test_inclusion_monotonicity(x, xw, y, yw):
    bigx = x.hull(xw)
    bigy = y.hull(yw)
    for op in (lambda a, b: a + b, lambda a, b: a - b, lambda a, b: a * b):
        small, big = op(x, y), op(bigx, bigy)
        assert big.contains_interval(small)


@given(intervals(), intervals(), st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_soundness_against_sampling(x, y, seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(x.lo, x.hi, 200)
    b = rng.uniform(y.lo, y.hi, 200)
    for op, vals in (("add", a + b), ("sub", a - b), ("mul", a * b)):
        r = {"add": x + y, "sub": x - y, "mul": x * y}[op]
        assert (vals >= r.lo).all() and (vals <= r.hi).all(), op


def test_soundness_dense_sampling_10k():
    rng = np.random.default_rng(7)
    x, y = Interval(-3.7, 11.2), Interval(-0.03, 5.9)
    a = rng.uniform(x.lo, x.hi, 10_000)
    b = rng.uniform(y.lo, y.hi, 10_000)
    for r, vals in ((x + y, a + b), (x - y, a - b), (x * y, a * b)):
        assert (vals >= r.lo).all() and (vals <= r.hi).all()


@given(finite, finite)
@settings(max_examples=200, deadline=None)
def test_point_arithmetic_within_one_ulp(a, b):
    pa, pb = Interval.point(a), Interval.point(b)
    for res, exact in ((pa + pb, a + b), (pa - pb, a - b), (pa * pb, a * b)):
        assert res.lo <= exact <= res.hi
        assert res.hi - res.lo <= ULP * math.ulp(max(abs(exact), 5e-324))
