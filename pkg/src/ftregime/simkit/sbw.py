"""Steer-by-wire rack simulation with motor fault injection.

The plant is a first-order rate model with a linear aligning load:

    d(delta)/dt = k * (tau - c * delta)

so a torque range ``[lo, hi]`` can hold the rack at angles up to
``hi / c``.  The rack is clipped at ``rack_limit``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from ..classifier import Mode, NoMatchingRule, available_performance, evaluate_operability
from ..kernels import Interval
from ..model import FaultCombination, PerformanceValue, SystemModel
from .common import SimOutcome, SimulationError, TraceLog, as_names, scenario_params


@dataclass(frozen=True)
class MotorState:
    path: str
    operability: int
    limit: Interval  # torque the motor can deliver after injection


@dataclass(frozen=True)
class SbwScenario:
    root: str
    motors: tuple
    controller: Optional[str]
    angle_metric: str
    torque_metric: str
    nominal_angle: Interval
    combination: FaultCombination
    duration: float = 5.0
    step: float = 1e-3
    inject_at: float = 0.0
    rate_gain: float = 20.0
    load_gradient: float = 1.25
    kp: float = 10.0
    rack_limit: float = 48.0
    band: float = 0.5
    safe_fraction: float = 0.5
    hold_fraction: float = 0.3
    noise: float = 0.0
    seed: int = 0
    trace_every: int = 10
    plant_limits: Mapping[str, Interval] = field(default_factory=dict)

    def check(self) -> None:
        if not self.step > 0:
            raise SimulationError("step size must be > 0")
        if not self.duration >= self.inject_at >= 0:
            raise SimulationError("need 0 <= inject_at <= duration")
        if not self.band > 0:
            raise SimulationError("tolerance band must be > 0")
        if self.rate_gain <= 0 or self.load_gradient <= 0 or self.rack_limit <= 0:
            raise SimulationError("rate_gain, load_gradient and rack_limit must be > 0")
        if not self.motors:
            raise SimulationError("no motors declared")

    def reference(self, t: float) -> float:
        """Step out to the nominal bounds, then hold a moderate angle."""
        T, n = self.duration, self.nominal_angle
        if t < 0.1 * T:
            return 0.0
        if t < 0.4 * T:
            return n.hi
        if t < 0.7 * T:
            return n.lo
        return self.hold_fraction * n.hi


def scenario_from_model(model: SystemModel, combination, **overrides) -> SbwScenario:
    """Build a scenario from the model's ``scenario sbw`` section.

    Keys of the form ``limit.<Motor>`` set a physical torque limit that may
    differ from what the model declares for that motor.
    """
    p = scenario_params(model, "sbw", overrides)
    combo = combination if isinstance(combination, FaultCombination) else FaultCombination.parse(combination)
    root = model.root
    angle_metric = str(p.get("angle", "angle"))
    torque_metric = str(p.get("torque", "torque"))
    try:
        nominal_angle = root.nominal[angle_metric]
    except KeyError:
        raise SimulationError(f"root has no angle metric {angle_metric!r}") from None
    limits = {}
    for key, value in p.items():
        if key.startswith("limit."):
            if not isinstance(value, Interval):
                raise SimulationError(f"{key} must be an interval")
            limits[key[len("limit."):]] = value
    controller = p.get("controller")
    return SbwScenario(
        root=model.root.name,
        motors=as_names(p.get("motors", ())),
        controller=str(controller) if controller else None,
        angle_metric=angle_metric,
        torque_metric=torque_metric,
        nominal_angle=nominal_angle,
        combination=combo,
        duration=float(p.get("duration", 5.0)),
        step=float(p.get("step", 1e-3)),
        inject_at=float(p.get("inject_at", 0.0)),
        rate_gain=float(p.get("rate_gain", 20.0)),
        load_gradient=float(p.get("load_gradient", 1.25)),
        kp=float(p.get("kp", 10.0)),
        rack_limit=float(p.get("rack_limit", 48.0)),
        band=float(p.get("band", 0.5)),
        safe_fraction=float(p.get("safe_fraction", 0.5)),
        hold_fraction=float(p.get("hold_fraction", 0.3)),
        noise=float(p.get("noise", 0.0)),
        seed=int(p.get("seed", 0)),
        trace_every=int(p.get("trace_every", 10)),
        plant_limits=limits,
    )


def _intersect(a: Interval, b: Interval) -> Interval:
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if lo > hi:
        return Interval(0.0, 0.0, a.unit)
    return Interval(lo, hi, a.unit)


def _component_state(model: SystemModel, path: str, combo: FaultCombination, mode: Mode):
    try:
        op = evaluate_operability(model, path, combo, mode).value
        perf = available_performance(model, path, combo, mode)
    except NoMatchingRule as exc:
        raise SimulationError(f"cannot simulate {path}: {exc}") from None
    return op, perf


def _motor_states(model: SystemModel, sc: SbwScenario, combo: FaultCombination, mode: Mode) -> list:
    out = []
    for name in sc.motors:
        path = model.resolve_target(name)
        comp = model.component(path)
        op, perf = _component_state(model, path, combo, mode)
        declared = perf[sc.torque_metric]
        plant = sc.plant_limits.get(comp.name, comp.nominal[sc.torque_metric])
        out.append(MotorState(path, op, _intersect(declared, plant)))
    return out


def _allocate(demand: float, motors: list) -> list:
    """Split the demand over the motors, each clipped to its interval.

    Motors with operability -1 are stuck at their upper limit; the rest
    fill the remaining demand in declaration order.
    """
    out = [0.0] * len(motors)
    remaining = demand
    for i, m in enumerate(motors):
        if m.operability < 0:
            out[i] = m.limit.hi
            remaining -= m.limit.hi
    for i, m in enumerate(motors):
        if m.operability >= 0:
            out[i] = min(max(remaining, m.limit.lo), m.limit.hi)
            remaining -= out[i]
    return out


def simulate_sbw(model: SystemModel, target: Optional[str] = None, combination=FaultCombination(),
                 mode: Mode | str = Mode.STRICT, scenario: Optional[SbwScenario] = None,
                 **overrides) -> SimOutcome:
    """Run the rack simulation and report what was observed at ``target``.

    ``target`` is the root (default) or one of the scenario's motors.
    """
    mode = Mode(mode)
    sc = scenario or scenario_from_model(model, combination, **overrides)
    sc.check()
    combo = sc.combination
    model.check_combination(combo)
    target_path = model.resolve_target(target or model.root.name)

    healthy = _motor_states(model, sc, FaultCombination(), mode)
    faulted = _motor_states(model, sc, combo, mode)
    ctrl_op = 1
    if sc.controller:
        ctrl_op, _ = _component_state(model, model.resolve_target(sc.controller), combo, mode)

    rng = np.random.default_rng(sc.seed)
    log = TraceLog(sc.trace_every)
    n_steps = int(round(sc.duration / sc.step))
    k, c, dt = sc.rate_gain, sc.load_gradient, sc.step
    delta = 0.0
    rack_hit = False
    tracked = True
    angle_lo = angle_hi = None
    tau_lo = tau_hi = None
    motor_env = [[None, None] for _ in sc.motors]
    injected = sc.inject_at <= 0.0
    if injected and combo:
        log.add(0.0, "inject", combo.label)

    for i in range(n_steps + 1):
        t = i * sc.step
        if not injected and t >= sc.inject_at:
            injected = True
            log.add(t, "inject", combo.label)
        motors = faulted if injected else healthy
        ref = sc.reference(t)
        measured = delta + (rng.normal(0.0, sc.noise) if sc.noise > 0 else 0.0)
        ctrl = ctrl_op if injected else 1
        if ctrl == 1:
            demand = sc.kp * (ref - measured) + c * ref
        elif ctrl == 0:
            demand = 0.0  # controller shut down, motors torque-free
        else:
            demand = float("inf") if ref >= 0 else float("-inf")
        torques = _allocate(demand, motors)
        tau = float(sum(torques))

        if injected:
            angle_lo = delta if angle_lo is None else min(angle_lo, delta)
            angle_hi = delta if angle_hi is None else max(angle_hi, delta)
            tau_lo = tau if tau_lo is None else min(tau_lo, tau)
            tau_hi = tau if tau_hi is None else max(tau_hi, tau)
            for env, tq in zip(motor_env, torques):
                env[0] = tq if env[0] is None else min(env[0], tq)
                env[1] = tq if env[1] is None else max(env[1], tq)
            if t >= 0.8 * sc.duration and abs(delta - ref) > sc.band:
                tracked = False

        sample = {"angle": delta, "angle_ref": ref, "torque": tau}
        for m, tq in zip(motors, torques):
            sample[f"torque.{model.component(m.path).name}"] = tq
        log.sample(i, t, sample)

        delta = delta + dt * k * (tau - c * delta)
        if abs(delta) >= sc.rack_limit:
            if not rack_hit:
                log.add(t, "rack_limit", delta)
            rack_hit = True
            delta = max(-sc.rack_limit, min(sc.rack_limit, delta))

    n = sc.nominal_angle
    steerable = (angle_lo <= sc.safe_fraction * n.lo and angle_hi >= sc.safe_fraction * n.hi)
    root = model.root
    if target_path == root.name:
        measured = {sc.angle_metric: Interval(angle_lo, angle_hi),
                    sc.torque_metric: Interval(tau_lo, tau_hi)}
        missing = set(root.nominal.names()) - set(measured)
        if missing:
            raise SimulationError(f"simulation does not measure {sorted(missing)}")
        functional = tracked
        safe = steerable and not rack_hit
    else:
        paths = [m.path for m in faulted]
        if target_path not in paths:
            raise SimulationError(f"target {target_path!r} is neither the root nor a motor")
        lo, hi = motor_env[paths.index(target_path)]
        measured = {sc.torque_metric: Interval(lo, hi)}
        # a motor stuck at a nonzero torque has lost its defined state
        functional = hi > lo
        safe = functional or (lo == hi == 0.0)
    log.add(sc.duration, "functional", functional)
    log.add(sc.duration, "safe_state", safe)
    return SimOutcome(target_path, combo.restrict(model.scope(target_path)), functional, safe,
                      PerformanceValue(measured), log.freeze(), "")
