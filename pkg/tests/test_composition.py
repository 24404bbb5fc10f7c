from __future__ import annotations

import pytest

from ftregime.composition import CompositionError, propagate, table_row
from ftregime.kernels import Interval
from ftregime.model import PerformanceValue


def test_pooled_torque_from_children(sbw):
    perf = propagate(sbw, "SbW", {
        "MotorA": PerformanceValue({"torque": Interval(0, 0)}),
        "MotorB": PerformanceValue({"torque": Interval(-60, 60)}),
    })
    assert perf["torque"] == Interval(-60, 60)
    assert perf["angle"] == Interval(-40, 40)  # unbound, stays nominal


def test_missing_child_is_an_error(sbw):
    with pytest.raises(CompositionError, match="missing child"):
        propagate(sbw, "SbW", {"MotorA": PerformanceValue({"torque": Interval(0, 0)})})


def test_leaf_has_no_composition(sbw):
    with pytest.raises(CompositionError):
        propagate(sbw, "SbW.MotorA", {})


def test_table_lookup(sbw):
    root = sbw.component("SbW")
    assert not table_row(root, {"MotorA": 0, "MotorB": 0, "ECU": 1}).safe
    row = table_row(root, {"MotorA": 0, "MotorB": 1, "ECU": 1})
    assert row.safe and row.functional
    with pytest.raises(CompositionError):
        table_row(root, {"MotorA": 1})


def test_set_and_vector_kernels(ads):
    perf = propagate(ads, "ADS", {
        "NADF": PerformanceValue({"missions": frozenset({"m1", "m3"}), "quality": (1, 0, 1)}),
        "VMC": PerformanceValue({"missions": frozenset({"m1", "m2", "m3"}), "quality": (1, 1, 0.5)}),
    })
    assert perf["missions"] == frozenset({"m1", "m3"})
    assert perf["quality"] == (1.0, 0.0, 0.5)
