"""Outcome and trace types shared by the simulators."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from ..kernels import Interval
from ..model import FaultCombination, PerformanceValue, SystemModel


class SimulationError(RuntimeError):
    """Invalid scenario or a numerically broken run.

    ``trace`` holds the records produced before the failure.
    """

    def __init__(self, message: str, trace: tuple = ()):
        super().__init__(message)
        self.trace = tuple(trace)


@dataclass(frozen=True)
class TraceRecord:
    t: float
    signal: str
    value: object

    def to_json(self) -> str:
        return json.dumps({"t": _num(self.t), "signal": self.signal, "value": _jsonable(self.value)},
                          sort_keys=True, ensure_ascii=False)


def _num(x: float):
    x = float(x)
    return int(x) if x.is_integer() else float(f"{x:.9g}")


def _jsonable(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, float)):
        return _num(v)
    if isinstance(v, Interval):
        return [_num(v.lo), _num(v.hi)]
    if isinstance(v, (set, frozenset)):
        return sorted(v)
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    return str(v)


@dataclass(frozen=True)
class SimOutcome:
    target: str
    combination: FaultCombination
    functionality_observed: bool
    safe_state_observed: bool
    measured_performance: PerformanceValue
    trace: tuple = field(default=(), repr=False)
    final_state: str = ""

    def trace_lines(self) -> str:
        return "".join(r.to_json() + "\n" for r in self.trace)


class TraceLog:
    """Append-only trace with finiteness checks and optional decimation."""

    def __init__(self, every: int = 1):
        self.every = max(1, int(every))
        self.records: list[TraceRecord] = []

    def add(self, t: float, signal: str, value) -> None:
        if isinstance(value, float) and not math.isfinite(value):
            self.records.append(TraceRecord(t, signal, str(value)))
            tail = "".join(r.to_json() + "\n" for r in self.records[-20:])
            raise SimulationError(f"non-finite {signal} at t={t}\n{tail}", self.records)
        self.records.append(TraceRecord(t, signal, value))

    def sample(self, step: int, t: float, values: Mapping[str, float]) -> None:
        if step % self.every == 0:
            for name in sorted(values):
                self.add(t, name, values[name])
        else:
            for name, v in values.items():
                if not math.isfinite(v):
                    self.add(t, name, v)

    def freeze(self) -> tuple:
        return tuple(self.records)


def scenario_params(model: SystemModel, kind: str, overrides: Optional[Mapping] = None) -> dict:
    if model.scenario is None:
        raise SimulationError("model has no scenario section")
    if model.scenario.kind != kind:
        raise SimulationError(f"scenario kind is {model.scenario.kind!r}, expected {kind!r}")
    params = model.scenario.as_dict()
    params.update(overrides or {})
    return params


def as_names(value) -> tuple:
    if isinstance(value, str):
        return (value,)
    if isinstance(value, Iterable):
        return tuple(sorted(str(v) for v in value))
    raise SimulationError(f"expected component names, got {value!r}")
