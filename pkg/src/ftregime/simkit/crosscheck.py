"""Compare simulated behaviour with the classifier's prediction."""

from __future__ import annotations

from dataclasses import dataclass

from ..classifier import Mode, classify
from ..model import Comparison, Regime, RegimeVerdict, SystemModel, compare_performance
from .common import SimOutcome

CRITERIA = ("fault-present", "safe-state", "functional", "performance")


@dataclass(frozen=True)
class CrosscheckResult:
    target: str
    combination: object
    predicted: Regime
    observed: Regime
    predicted_trace: tuple
    observed_trace: tuple
    mismatches: tuple

    @property
    def match(self) -> bool:
        return not self.mismatches


def observed_trace(model: SystemModel, outcome: SimOutcome) -> tuple:
    comp = model.component(outcome.target)
    faulted = bool(outcome.combination)
    cmp = compare_performance(outcome.measured_performance, comp.nominal, comp.metrics)
    perf = "yes" if cmp is Comparison.AT_LEAST else "no"
    if not faulted:
        if outcome.safe_state_observed and outcome.functionality_observed and perf == "yes":
            return ("no", "-", "-", "-")
        return ("no", _yn(outcome.safe_state_observed), _yn(outcome.functionality_observed), perf)
    if not outcome.safe_state_observed:
        return ("yes", "no", "-", "-")
    if not outcome.functionality_observed:
        return ("yes", "yes", "no", "-")
    return ("yes", "yes", "yes", perf)


def _yn(b: bool) -> str:
    return "yes" if b else "no"


_BY_TRACE = {
    ("no", "-", "-", "-"): Regime.OPERATIONAL,
    ("yes", "no", "-", "-"): Regime.FAIL_UNSAFE,
    ("yes", "yes", "no", "-"): Regime.FAIL_SAFE,
    ("yes", "yes", "yes", "yes"): Regime.FAIL_OPERATIONAL,
    ("yes", "yes", "yes", "no"): Regime.FAIL_DEGRADED,
}


def crosscheck(model: SystemModel, target: str, combination, outcome: SimOutcome,
               mode: Mode | str = Mode.STRICT) -> CrosscheckResult:
    """Recompute the regime from observed facts and diff it per criterion."""
    verdict: RegimeVerdict = classify(model, target, combination, mode)
    obs = observed_trace(model, outcome)
    pred = verdict.criteria_trace
    diffs = tuple(name for name, p, o in zip(CRITERIA, pred, obs) if p != o)
    return CrosscheckResult(verdict.target, verdict.combination, verdict.regime,
                            _BY_TRACE.get(obs, Regime.UNKNOWN), pred, obs, diffs)
