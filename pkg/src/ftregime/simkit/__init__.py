"""Executable example systems with fault injection."""

from __future__ import annotations

from typing import Optional

from ..classifier import Mode
from ..model import FaultCombination, SystemModel
from .ads import AdsScenario, State, TransitionError, simulate_ads
from .common import SimOutcome, SimulationError, TraceRecord
from .crosscheck import CrosscheckResult, crosscheck
from .sbw import SbwScenario, simulate_sbw

SIMULATORS = {"sbw": simulate_sbw, "ads": simulate_ads}


def simulate(model: SystemModel, target: Optional[str] = None, combination=FaultCombination(),
             mode: Mode | str = Mode.STRICT, **overrides) -> SimOutcome:
    """Dispatch on the model's scenario kind."""
    if model.scenario is None:
        raise SimulationError("model has no scenario section")
    try:
        sim = SIMULATORS[model.scenario.kind]
    except KeyError:
        raise SimulationError(f"unknown scenario kind {model.scenario.kind!r}") from None
    return sim(model, target, combination, mode, **overrides)


__all__ = [
    "AdsScenario",
    "CrosscheckResult",
    "SbwScenario",
    "SimOutcome",
    "SimulationError",
    "State",
    "TraceRecord",
    "TransitionError",
    "crosscheck",
    "simulate",
    "simulate_ads",
    "simulate_sbw",
]
