"""Mission-level simulation of an automated driving system with a fallback.

A trajectory selector forwards the normal trajectory while the normal
driving function is usable and switches to the emergency trajectory of the
fallback otherwise.  The selector logic lives here and does not consult
the model's operability table.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..classifier import Mode, NoMatchingRule, available_performance, evaluate_operability
from ..model import FaultCombination, PerformanceValue, SystemModel
from .common import SimOutcome, SimulationError, TraceLog, as_names, scenario_params


class State(str, Enum):
    NORMAL = "normal-operation"
    DEGRADED = "degraded-operation"
    MRM = "minimal-risk-maneuver-nadf"
    SAFE_HALT = "safe-halt-engaged"
    MRC = "minimal-risk-condition-reached"
    UNSAFE = "unsafe"


TRANSITIONS = {
    State.NORMAL: {State.DEGRADED, State.MRM, State.SAFE_HALT, State.UNSAFE},
    State.DEGRADED: {State.MRM, State.SAFE_HALT, State.UNSAFE},
    State.MRM: {State.MRC, State.SAFE_HALT, State.UNSAFE},
    State.SAFE_HALT: {State.MRC, State.UNSAFE},
    State.MRC: set(),
    State.UNSAFE: set(),
}

TERMINAL = {State.MRC, State.UNSAFE}


class TransitionError(SimulationError):
    pass


def trajectory_source(state: State) -> str:
    return "emergency" if state is State.SAFE_HALT else "normal"


@dataclass(frozen=True)
class AdsScenario:
    nadf: str
    fallback: str
    selector: str
    actuation: Optional[str]
    missions_metric: str
    quality_metric: str
    requests: tuple
    injections: tuple  # (time, fault id), applied before the next mission starts
    mission_time: float = 600.0
    maneuver_time: float = 30.0

    def check(self) -> None:
        if self.mission_time <= 0 or self.maneuver_time <= 0:
            raise SimulationError("mission_time and maneuver_time must be > 0")
        if any(t < 0 for t, _ in self.injections):
            raise SimulationError("injection times must be >= 0")


def scenario_from_model(model: SystemModel, combination, **overrides) -> AdsScenario:
    p = scenario_params(model, "ads", overrides)
    combo = combination if isinstance(combination, FaultCombination) else FaultCombination.parse(combination)
    missions_metric = str(p.get("missions", "missions"))
    try:
        nominal_missions = model.root.nominal[missions_metric]
    except KeyError:
        raise SimulationError(f"root has no mission set metric {missions_metric!r}") from None
    requests = as_names(p["requests"]) if "requests" in p else tuple(sorted(nominal_missions))
    inject_at = float(p.get("inject_at", 0.0))
    actuation = p.get("actuation")
    return AdsScenario(
        nadf=str(p.get("nadf", "NADF")),
        fallback=str(p.get("fallback", "SafeHalt")),
        selector=str(p.get("selector", "TrajSel")),
        actuation=str(actuation) if actuation else None,
        missions_metric=missions_metric,
        quality_metric=str(p.get("quality", "quality")),
        requests=requests,
        injections=tuple((inject_at, f) for f in combo),
        mission_time=float(p.get("mission_time", 600.0)),
        maneuver_time=float(p.get("maneuver_time", 30.0)),
    )


class _Machine:
    def __init__(self, log: TraceLog):
        self.state = State.NORMAL
        self.log = log
        self.visited = [State.NORMAL]

    def go(self, t: float, new: State, why: str) -> None:
        if new is self.state:
            return
        if new not in TRANSITIONS[self.state]:
            raise TransitionError(f"illegal transition {self.state.value} -> {new.value} ({why})",
                                  self.log.freeze())
        self.log.add(t, "state", new.value)
        self.log.add(t, "trajectory_source", trajectory_source(new))
        self.state = new
        self.visited.append(new)


def _op(model, path, active, mode) -> int:
    try:
        return evaluate_operability(model, path, active, mode).value
    except NoMatchingRule as exc:
        raise SimulationError(f"cannot simulate {path}: {exc}") from None


def _select(nadf_o: int, fallback_o: int, selector_o: int, full: bool) -> State:
    if selector_o < 1:
        return State.UNSAFE  # no checked trajectory reaches the actuators
    if nadf_o == 1:
        return State.NORMAL if full else State.DEGRADED
    if nadf_o == 0:
        return State.MRM
    return State.SAFE_HALT if fallback_o == 1 else State.UNSAFE


def simulate_ads(model: SystemModel, target: Optional[str] = None, combination=FaultCombination(),
                 mode: Mode | str = Mode.STRICT, scenario: Optional[AdsScenario] = None,
                 **overrides) -> SimOutcome:
    mode = Mode(mode)
    sc = scenario or scenario_from_model(model, combination, **overrides)
    sc.check()
    root = model.root
    target_path = model.resolve_target(target or root.name)
    if target_path != root.name:
        raise SimulationError("the mission simulation observes the root only")
    combo = FaultCombination(f for _, f in sc.injections)
    model.check_combination(combo)
    nadf, fallback, selector = (model.resolve_target(n) for n in (sc.nadf, sc.fallback, sc.selector))
    actuation = model.resolve_target(sc.actuation) if sc.actuation else None
    nominal_missions = root.nominal[sc.missions_metric]
    order = sorted(nominal_missions)
    for r in sc.requests:
        if r not in nominal_missions:
            raise SimulationError(f"requested mission {r!r} is not in the nominal mission set")

    log = TraceLog()
    machine = _Machine(log)
    pending = sorted(sc.injections)
    active: set = set()
    completed: dict = {}
    clock = 0.0
    queue = list(sc.requests)

    def capability():
        faults = FaultCombination(active)
        try:
            perf = available_performance(model, nadf, faults, mode)
        except NoMatchingRule as exc:
            raise SimulationError(str(exc)) from None
        missions = set(perf[sc.missions_metric])
        quality = dict(zip(order, perf[sc.quality_metric]))
        if actuation:
            act = available_performance(model, actuation, faults, mode)
            missions &= set(act[sc.missions_metric])
            for m, q in zip(order, act[sc.quality_metric]):
                quality[m] = min(quality[m], q)
        return missions, quality

    def update():
        while pending and pending[0][0] <= clock:
            t, f = pending.pop(0)
            active.add(f)
            log.add(t, "inject", f)
        faults = FaultCombination(active)
        missions, quality = capability()
        full = missions >= set(nominal_missions) and all(quality[m] >= 1.0 for m in order)
        new = _select(_op(model, nadf, faults, mode), _op(model, fallback, faults, mode),
                      _op(model, selector, faults, mode), full)
        machine.go(clock, new, f"faults {faults.label}")
        return missions, quality

    missions, quality = update()
    while queue and machine.state in (State.NORMAL, State.DEGRADED):
        m = queue.pop(0)
        q = quality[m]
        if m not in missions or q <= 0:
            log.add(clock, "mission_rejected", m)
        else:
            duration = sc.mission_time / q
            log.add(clock, "mission_start", m)
            clock += duration
            completed[m] = sc.mission_time / duration
            log.add(clock, "mission_complete", m)
        missions, quality = update()

    for m in queue:
        log.add(clock, "mission_aborted", m)
    if machine.state in (State.MRM, State.SAFE_HALT):
        clock += sc.maneuver_time
        machine.go(clock, State.MRC, "maneuver finished")

    functional = machine.state in (State.NORMAL, State.DEGRADED)
    safe = machine.state is not State.UNSAFE
    measured = {
        sc.missions_metric: frozenset(completed),
        sc.quality_metric: tuple(completed.get(m, 0.0) for m in order),
    }
    extra = set(root.nominal.names()) - set(measured)
    if extra:
        raise SimulationError(f"simulation does not measure {sorted(extra)}")
    log.add(clock, "functional", functional)
    log.add(clock, "safe_state", safe)
    return SimOutcome(root.name, combo.restrict(model.scope(root.name)), functional, safe,
                      PerformanceValue(measured), log.freeze(), machine.state.value)


def visited_states(outcome: SimOutcome) -> list:
    return [State.NORMAL.value] + [r.value for r in outcome.trace if r.signal == "state"]
