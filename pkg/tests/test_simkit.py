from __future__ import annotations

import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from ftregime.classifier import classify, iter_combinations
from ftregime.dsl import loads_model
from ftregime.kernels import Interval, interval_contains, interval_sum
from ftregime.model import Regime
from ftregime.simkit import SimulationError, State, TransitionError, crosscheck, simulate
from ftregime.simkit.ads import TRANSITIONS, _Machine, simulate_ads
from ftregime.simkit.common import TraceLog
from ftregime.simkit.sbw import scenario_from_model, simulate_sbw


def test_healthy_torque_envelope_is_pooled_saturation(sbw):
    out = simulate(sbw, None, "")
    pooled = interval_sum(sbw.component("SbW.MotorA").nominal["torque"],
                          sbw.component("SbW.MotorB").nominal["torque"])
    assert out.measured_performance["torque"] == pooled == Interval(-90, 90)
    assert out.functionality_observed and out.safe_state_observed


def test_single_motor_loss_still_tracks(sbw):
    out = simulate(sbw, None, "fA")
    assert out.functionality_observed
    assert out.measured_performance["torque"] == Interval(-60, 60)


def test_double_motor_loss_is_unsafe(sbw):
    out = simulate(sbw, None, "fA+fB")
    assert not out.functionality_observed and not out.safe_state_observed


def test_motor_target_goes_torque_free(sbw):
    out = simulate(sbw, "MotorA", "fA")
    assert out.measured_performance["torque"] == Interval(0, 0)
    assert crosscheck(sbw, "MotorA", "fA", out).match


def test_trace_is_deterministic(sbw):
    a = simulate(sbw, None, "fB", noise=0.05, seed=7).trace_lines()
    b = simulate(sbw, None, "fB", noise=0.05, seed=7).trace_lines()
    c = simulate(sbw, None, "fB", noise=0.05, seed=8).trace_lines()
    assert a == b and a != c


@pytest.mark.parametrize("override", [{"step": 0.0}, {"band": 0.0}, {"inject_at": 99.0}])
def test_invalid_scenarios_are_rejected(sbw, override):
    with pytest.raises(SimulationError):
        simulate(sbw, None, "", **override)


def test_late_injection_only_measures_afterwards(sbw):
    out = simulate(sbw, None, "fA", inject_at=0.05)
    assert any(r.signal == "inject" and r.t > 0 for r in out.trace)
    assert out.measured_performance["torque"] == Interval(-60, 60)


def test_non_finite_values_abort_with_trace():
    log = TraceLog()
    log.add(0.0, "x", 1.0)
    with pytest.raises(SimulationError) as exc:
        log.add(0.1, "x", float("nan"))
    assert len(exc.value.trace) == 2


@settings(max_examples=25, deadline=None)
@given(st.integers(5, 60), st.integers(5, 60), st.integers(0, 20))
def test_angle_envelope_grows_with_motor_torque(small, extra, other):
    # containment-larger motor interval never shrinks the achieved angle range
    base = {"limit.MotorA": Interval(-small, small), "limit.MotorB": Interval(-other, other)}
    big = dict(base, **{"limit.MotorA": Interval(-small - extra, small + extra)})
    text = (
        "component R\n  metrics\n    angle: interval\n    torque: interval\n"
        "  nominal\n    angle = [-40, 40]\n    torque = [-50, 50]\n"
        "  compose\n    torque = interval-sum(MotorA.torque, MotorB.torque)\n    operability = min-of-children\n"
        "  component MotorA\n    metrics\n      torque: interval\n    nominal\n      torque = [-200, 200]\n  end\n"
        "  component MotorB\n    metrics\n      torque: interval\n    nominal\n      torque = [-200, 200]\n  end\n"
        "end\nscenario sbw\n  motors = {MotorA, MotorB}\n  duration = 2\n  step = 0.002\nend\n"
    )
    model = loads_model(text)
    a = simulate_sbw(model, None, "", **base).measured_performance["angle"]
    b = simulate_sbw(model, None, "", **big).measured_performance["angle"]
    assert interval_contains(b, a, 1e-9)


def test_scenario_reads_plant_limits(sbw_text):
    model = loads_model(sbw_text.replace("trace_every = 10", "trace_every = 10\n  limit.MotorB = [-40, 40]"))
    sc = scenario_from_model(model, "fA")
    assert sc.plant_limits == {"MotorB": Interval(-40, 40)}


# ------------------------------------------------------------------ ADS


def test_ads_fault_free_completes_all(ads):
    out = simulate(ads, None, "", requests={"m1", "m2"})
    assert out.final_state == State.NORMAL.value
    assert out.measured_performance["missions"] == {"m1", "m2"}


def test_ads_missing_mission_is_rejected(ads):
    out = simulate(ads, None, "fMap")
    rejected = [r.value for r in out.trace if r.signal == "mission_rejected"]
    assert rejected == ["m2"]
    assert out.final_state == State.DEGRADED.value
    assert crosscheck(ads, "ADS", "fMap", out).observed is Regime.FAIL_DEGRADED


def test_ads_safe_halt_engages(ads):
    out = simulate(ads, None, "fNADF")
    states = [r.value for r in out.trace if r.signal == "state"]
    sources = [r.value for r in out.trace if r.signal == "trajectory_source"]
    assert states == [State.SAFE_HALT.value, State.MRC.value]
    assert sources == ["emergency", "normal"]


def test_ads_mrm_without_fallback(ads):
    out = simulate(ads, None, "fLoc")
    assert [r.value for r in out.trace if r.signal == "state"] == [State.MRM.value, State.MRC.value]


def test_ads_rejects_unknown_mission(ads):
    with pytest.raises(SimulationError):
        simulate(ads, None, "", requests={"m9"})


def test_transition_table_is_enforced():
    m = _Machine(TraceLog())
    m.go(0.0, State.MRM, "test")
    with pytest.raises(TransitionError):
        m.go(1.0, State.NORMAL, "test")
    assert State.NORMAL not in TRANSITIONS[State.MRC]


def test_ads_never_visits_unsafe_unless_predicted(ads):
    for combo in iter_combinations(ads.fault_universe, len(ads.fault_universe)):
        out = simulate_ads(ads, None, combo)
        visited = {r.value for r in out.trace if r.signal == "state"}
        if classify(ads, "ADS", combo).regime is not Regime.FAIL_UNSAFE:
            assert State.UNSAFE.value not in visited


def test_measured_types_match_specs(sbw, ads):
    for model in (sbw, ads):
        out = simulate(model, None, "")
        assert out.measured_performance.names() == model.root.nominal.names()
