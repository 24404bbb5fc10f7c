from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from ftregime.kernels import (
    Interval,
    KernelError,
    UnitMismatch,
    ZERO,
    all_children_required,
    interval_contains,
    interval_sum,
    scalar_min,
    set_intersection,
    vector_min,
)

small = st.integers(-1000, 1000)


@st.composite
def intervals(draw):
    a, b = draw(small), draw(small)
    return Interval(min(a, b), max(a, b))


def test_sum_pools_ranges():
    assert interval_sum(Interval(-30, 30), Interval(-60, 60)) == Interval(-90, 90)


def test_unit_mismatch():
    with pytest.raises(UnitMismatch):
        interval_sum(Interval(0, 1, "Nm"), Interval(0, 1, "deg"))
    assert interval_sum(Interval(0, 1, "Nm"), Interval(0, 1)).unit == "Nm"


def test_checked_rejects_inverted():
    with pytest.raises(KernelError):
        Interval.checked(2, 1)
    assert not Interval(2, 1).is_valid
    assert Interval.checked(1, 1).width == 0


def test_vector_length_mismatch():
    with pytest.raises(KernelError):
        vector_min((1.0,), (1.0, 2.0))


def test_all_children_required_gates_to_zero():
    assert all_children_required([5, 3], [5, 3], 7) == 7
    assert all_children_required([5, 2], [5, 3], 7) == 0


@given(intervals(), intervals())
def test_sum_commutes(a, b):
    assert interval_sum(a, b) == interval_sum(b, a)


@given(intervals(), intervals(), intervals())
def test_sum_associates(a, b, c):
    assert interval_sum(interval_sum(a, b), c) == interval_sum(a, interval_sum(b, c))


@given(intervals())
def test_zero_is_identity(a):
    assert interval_sum(a, ZERO) == a


@given(intervals())
def test_containment_reflexive(a):
    assert interval_contains(a, a)


@given(intervals(), intervals())
def test_containment_antisymmetric(a, b):
    if interval_contains(a, b) and interval_contains(b, a):
        assert a == b


@given(intervals(), intervals(), intervals())
def test_containment_transitive(a, b, c):
    if interval_contains(a, b) and interval_contains(b, c):
        assert interval_contains(a, c)


@given(intervals(), intervals(), intervals())
def test_sum_monotone_in_containment(a, b, c):
    # enlarging one operand never shrinks the pooled range
    if interval_contains(b, a):
        assert interval_contains(interval_sum(b, c), interval_sum(a, c))


@given(st.frozensets(st.sampled_from("abcde")), st.frozensets(st.sampled_from("abcde")),
       st.frozensets(st.sampled_from("abcde")))
def test_intersection_monotone(a, b, c):
    if a <= b:
        assert set_intersection(a, c) <= set_intersection(b, c)
    assert set_intersection(a, b) == set_intersection(b, a)


@given(st.lists(st.tuples(small, small), min_size=1, max_size=5))
def test_vector_min_is_componentwise_lower_bound(pairs):
    a = tuple(p[0] for p in pairs)
    b = tuple(p[1] for p in pairs)
    m = vector_min(a, b)
    assert all(x <= y and x <= z for x, y, z in zip(m, a, b))
    assert scalar_min(a[0], b[0]) == m[0]


def test_sum_matches_endpoint_grid_sampling():
    a, b = Interval(-30, 30), Interval(10, 20)
    grid = [x + y for x in (a.lo, a.hi) for y in (b.lo, b.hi)]
    assert interval_sum(a, b) == Interval(min(grid), max(grid)) == Interval(-20, 50)
    assert interval_sum(Interval(0, 0), Interval(-60, 60)) == Interval(-60, 60)


def test_containment_examples():
    assert interval_contains(Interval(-60, 60), Interval(-50, 50))
    assert not interval_contains(Interval(-40, 40), Interval(-50, 50))


def test_set_and_vector_examples():
    assert set_intersection({"m1", "m2", "m3"}, {"m1", "m3"}) == {"m1", "m3"}
    assert set_intersection({"m2"}, {"m1", "m3"}) == frozenset()
    assert set_intersection({"m1"}, ()) == frozenset()
    assert vector_min((0.9, 0.8), (1.0, 0.5)) == (0.9, 0.5)
    assert vector_min((1, 2, 3), (3, 2, 1)) == (1, 2, 1)
