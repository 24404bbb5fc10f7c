"""Operability evaluation and fault-tolerance regime classification.

A component is evaluated under the part of a fault combination that falls
inside its own subtree.  The fault-free case is always safe and functional.
Otherwise the first matching effect rule of the component decides; a
composite without a matching rule falls back to its operability combiner
(minimum over children, or an operability table over child health).
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations as _subsets
from math import comb
from typing import Iterable, Optional

from .composition import CompositionError, propagate, table_row
from .model import (
    Combiner,
    Comparison,
    FaultCombination,
    MetricKind,
    OperabilityVerdict,
    PerformanceValue,
    Regime,
    RegimeVerdict,
    SystemModel,
    compare_performance,
)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 2 ** 20


class Mode(str, Enum):
    STRICT = "strict"
    CONSERVATIVE = "conservative"


class ClassificationError(ValueError):
    pass


class NoMatchingRule(ClassificationError):
    pass


class BudgetExceeded(ClassificationError):
    pass


@dataclass(frozen=True)
class Evaluation:
    """Operability plus available performance of one component.

    ``verdict`` is ``None`` when no rule matched in strict mode.
    """

    verdict: Optional[OperabilityVerdict]
    performance: Optional[PerformanceValue]
    evidence: str = ""


def _describe_match(rule) -> str:
    m = rule.match
    if m.faults:
        return f"{m.kind.value} {{{', '.join(sorted(m.faults))}}}"
    if m.count is not None:
        return f"{m.kind.value} {m.count}"
    return m.kind.value


class Evaluator:
    """Memoising evaluator over a shared immutable model.

    One instance is not thread-safe because of its cache; use one per
    worker.  The model itself may be shared freely.
    """

    def __init__(self, model: SystemModel, mode: Mode | str = Mode.STRICT):
        self.model = model
        self.mode = Mode(mode)
        self._cache: dict = {}

    def evaluate(self, path: str, combination: FaultCombination) -> Evaluation:
        local = combination.restrict(self.model.scope(path))
        key = (path, local.members)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = self._evaluate(path, local)
        return hit

    def _unmatched(self, path: str, why: str) -> Evaluation:
        if self.mode is Mode.CONSERVATIVE:
            comp = self.model.component(path)
            return Evaluation(OperabilityVerdict(False, False, f"unmatched: {why}"), comp.nominal,
                              f"unmatched: {why}")
        return Evaluation(None, None, f"unmatched: {why}")

    def _evaluate(self, path: str, local: FaultCombination) -> Evaluation:
        comp = self.model.component(path)
        rule_index, rule = None, None
        if local:
            for i, r in enumerate(comp.rules):
                if r.match.matches(local):
                    rule_index, rule = i, r
                    break

        if comp.composition is None or not comp.children:
            if not local:
                return Evaluation(OperabilityVerdict(True, True, "fault-free"), comp.nominal, "fault-free")
            if rule is None:
                return self._unmatched(path, f"no effect rule of {path} matches {local.label}")
            ev = f"{path} rule {rule_index} ({_describe_match(rule)})"
            perf = comp.nominal.updated(rule.performance) if rule.performance else comp.nominal
            return Evaluation(OperabilityVerdict(rule.safe, rule.functional, ev), perf, ev)

        comp_rule = comp.composition
        needed = [c.name for c in comp.children]
        for rel in comp_rule.table_children:
            if rel not in needed:
                needed.append(rel)
        for b in comp_rule.bindings:
            for rel, _ in b.sources:
                if rel not in needed:
                    needed.append(rel)
        children = {rel: self.evaluate(f"{path}.{rel}", local) for rel in needed}
        for rel, child in children.items():
            if child.verdict is None:
                return Evaluation(None, None, f"unmatched: child {path}.{rel}: {child.evidence}")

        health = {rel: ev.verdict.value for rel, ev in children.items()}
        use_table = comp_rule.combiner is Combiner.TABLE and rule is None
        try:
            perf = propagate(self.model, path, {rel: ev.performance for rel, ev in children.items()},
                             health if use_table else None)
        except CompositionError as exc:
            if "no table entry" in str(exc):
                return self._unmatched(path, str(exc))
            raise

        if not local:
            return Evaluation(OperabilityVerdict(True, True, "fault-free"), perf, "fault-free")
        if rule is not None:
            ev = f"{path} rule {rule_index} ({_describe_match(rule)})"
            if rule.performance:
                perf = perf.updated(rule.performance)
            return Evaluation(OperabilityVerdict(rule.safe, rule.functional, ev), perf, ev)
        if comp_rule.combiner is Combiner.MIN:
            worst = min((health[c.name], c.name) for c in comp.children)
            ev = f"{path} min-of-children ({worst[1]}={worst[0]})"
            return Evaluation(OperabilityVerdict.from_value(worst[0], ev), perf, ev)
        if comp_rule.combiner is Combiner.TABLE:
            row = table_row(comp, health)
            idx = comp_rule.table.index(row)
            cells = ", ".join("*" if p is None else str(p) for p in row.pattern)
            ev = f"{path} table row {idx} ({cells})"
            return Evaluation(OperabilityVerdict(row.safe, row.functional, ev), perf, ev)
        return self._unmatched(path, f"no effect rule of {path} matches {local.label}")


def _prepare(model: SystemModel, target: str, combination) -> tuple[str, FaultCombination]:
    if not isinstance(combination, FaultCombination):
        combination = (FaultCombination.parse(combination) if isinstance(combination, str)
                       else FaultCombination(combination))
    model.check_combination(combination)
    path = model.resolve_target(target)
    return path, combination.restrict(model.scope(path))


def evaluate_operability(model: SystemModel, target: str, combination,
                         mode: Mode | str = Mode.STRICT) -> OperabilityVerdict:
    """o(f) of ``target``: +1 safe and functional, 0 safe only, -1 unsafe."""
    path, combo = _prepare(model, target, combination)
    ev = Evaluator(model, mode).evaluate(path, combo)
    if ev.verdict is None:
        raise NoMatchingRule(ev.evidence)
    return ev.verdict


def available_performance(model: SystemModel, target: str, combination,
                          mode: Mode | str = Mode.STRICT) -> PerformanceValue:
    path, combo = _prepare(model, target, combination)
    ev = Evaluator(model, mode).evaluate(path, combo)
    if ev.performance is None:
        raise NoMatchingRule(ev.evidence)
    return ev.performance


NA = "-"


def classify(model: SystemModel, target: str, combination, mode: Mode | str = Mode.STRICT,
             evaluator: Optional[Evaluator] = None) -> RegimeVerdict:
    """Walk the four criteria in order and return the regime with its trace."""
    path, combo = _prepare(model, target, combination)
    if not combo:
        return RegimeVerdict(path, combo, Regime.OPERATIONAL, ("no", NA, NA, NA),
                             Comparison.NOT_APPLICABLE, OperabilityVerdict(True, True, "fault-free"),
                             "fault-free")
    evaluator = evaluator or Evaluator(model, mode)
    ev = evaluator.evaluate(path, combo)
    op = ev.verdict
    if op is None:
        return RegimeVerdict(path, combo, Regime.UNKNOWN, ("yes", "?", NA, NA),
                             Comparison.NOT_APPLICABLE, None, ev.evidence)
    if not op.safe_state:
        return RegimeVerdict(path, combo, Regime.FAIL_UNSAFE, ("yes", "no", NA, NA),
                             Comparison.NOT_APPLICABLE, op, ev.evidence)
    if not op.functional:
        return RegimeVerdict(path, combo, Regime.FAIL_SAFE, ("yes", "yes", "no", NA),
                             Comparison.NOT_APPLICABLE, op, ev.evidence)
    comp = model.component(path)
    cmp = compare_performance(ev.performance, comp.nominal, comp.metrics)
    if cmp is Comparison.AT_LEAST:
        return RegimeVerdict(path, combo, Regime.FAIL_OPERATIONAL, ("yes", "yes", "yes", "yes"),
                             cmp, op, ev.evidence)
    # incomparable is reported as such but cannot count as at least nominal
    return RegimeVerdict(path, combo, Regime.FAIL_DEGRADED, ("yes", "yes", "yes", "no"),
                         cmp, op, ev.evidence)


def _at_least_nominal(available: PerformanceValue, nominal: PerformanceValue, specs) -> bool:
    for spec in specs:
        a, n, tol = available[spec.name], nominal[spec.name], spec.tol
        if spec.kind is MetricKind.SCALAR:
            ok = a + tol >= n
        elif spec.kind is MetricKind.VECTOR:
            ok = len(a) == len(n) and not any(x + tol < y for x, y in zip(a, n))
        elif spec.kind is MetricKind.INTERVAL:
            # every point of the nominal range must be deliverable
            ok = min(a.lo, n.lo + tol) == a.lo and max(a.hi + tol, n.hi) == a.hi + tol
        else:
            ok = not (set(n) - set(a))
        if not ok:
            return False
    return True


_TRACE = {
    Regime.OPERATIONAL: ("no", NA, NA, NA),
    Regime.FAIL_UNSAFE: ("yes", "no", NA, NA),
    Regime.FAIL_SAFE: ("yes", "yes", "no", NA),
    Regime.FAIL_DEGRADED: ("yes", "yes", "yes", "no"),
    Regime.FAIL_OPERATIONAL: ("yes", "yes", "yes", "yes"),
    Regime.UNKNOWN: ("yes", "?", NA, NA),
}


def classify_by_definition(model: SystemModel, target: str, combination,
                           mode: Mode | str = Mode.STRICT) -> RegimeVerdict:
    """Reference classifier built from the set characterisations.

    Computes o(f) and p_a(f), tests membership of f in each of the five
    regime sets independently and requires exactly one hit.  It exists to
    witness equivalence with :func:`classify` in tests.
    """
    path, combo = _prepare(model, target, combination)
    ev = Evaluator(model, mode).evaluate(path, combo)
    comp = model.component(path)
    faulty = len(combo) > 0
    o = ev.verdict.value if ev.verdict is not None else None
    ge = None
    if o == 1 and ev.performance is not None:
        ge = _at_least_nominal(ev.performance, comp.nominal, comp.metrics)
    sets = {
        Regime.OPERATIONAL: not faulty,
        Regime.FAIL_UNSAFE: faulty and o == -1,
        Regime.FAIL_SAFE: faulty and o == 0,
        Regime.FAIL_DEGRADED: faulty and o == 1 and ge is False,
        Regime.FAIL_OPERATIONAL: faulty and o == 1 and ge is True,
        Regime.UNKNOWN: faulty and o is None,
    }
    hits = [r for r, member in sets.items() if member]
    if len(hits) != 1:
        raise ClassificationError(f"regime sets overlap or leave a gap for {combo.label}: {hits}")
    regime = hits[0]
    cmp = Comparison.NOT_APPLICABLE
    if regime is Regime.FAIL_OPERATIONAL:
        cmp = Comparison.AT_LEAST
    elif regime is Regime.FAIL_DEGRADED:
        cmp = Comparison.BELOW
    op = ev.verdict if faulty else OperabilityVerdict(True, True, "fault-free")
    return RegimeVerdict(path, combo, regime, _TRACE[regime], cmp, op, "by definition")


def same_regime(a: RegimeVerdict, b: RegimeVerdict) -> bool:
    return (a.target, a.combination, a.regime, a.criteria_trace) == (
        b.target, b.combination, b.regime, b.criteria_trace)


# ---------------------------------------------------------------- enumeration


@dataclass(frozen=True)
class EnumerationReport:
    target: str
    max_cardinality: int
    mode: Mode
    universe: tuple
    verdicts: tuple = field(default=())

    @property
    def regime_sets(self) -> dict:
        sets = {r: [] for r in Regime}
        for v in self.verdicts:
            sets[v.regime].append(v.combination)
        return {r: tuple(c) for r, c in sets.items()}

    @property
    def combinations(self) -> tuple:
        return tuple(v.combination for v in self.verdicts)

    def verdict(self, combination) -> RegimeVerdict:
        if not isinstance(combination, FaultCombination):
            combination = (FaultCombination.parse(combination) if isinstance(combination, str)
                           else FaultCombination(combination))
        for v in self.verdicts:
            if v.combination == combination:
                return v
        raise KeyError(combination.label)

    @property
    def unsafe(self) -> tuple:
        return self.regime_sets[Regime.FAIL_UNSAFE]


def count_combinations(n: int, k: int) -> int:
    return sum(comb(n, i) for i in range(0, min(k, n) + 1))


def iter_combinations(universe: Iterable[str], k: int):
    ids = sorted(universe)
    for size in range(0, min(k, len(ids)) + 1):
        for members in _subsets(ids, size):
            yield FaultCombination(members)


def _classify_chunk(args) -> list:
    model, path, mode, combos = args
    evaluator = Evaluator(model, mode)
    return [classify(model, path, c, mode, evaluator) for c in combos]


def enumerate_regimes(model: SystemModel, target: str, max_cardinality: int = 1,
                      mode: Mode | str = Mode.STRICT, budget: int = DEFAULT_BUDGET,
                      jobs: int = 1) -> EnumerationReport:
    """Classify every combination of the target's faults with at most ``k`` members."""
    if max_cardinality < 0:
        raise ValueError("max_cardinality must be >= 0")
    mode = Mode(mode)
    path = model.resolve_target(target)
    universe = tuple(sorted(model.scope(path)))
    total = count_combinations(len(universe), max_cardinality)
    if total > budget:
        raise BudgetExceeded(f"{total} combinations for |F|={len(universe)}, k={max_cardinality} "
                             f"exceed budget {budget}")
    combos = list(iter_combinations(universe, max_cardinality))
    log.debug("enumerating %d combinations of %s", len(combos), path)
    if jobs > 1 and len(combos) > 1:
        size = -(-len(combos) // jobs)
        chunks = [(model, path, mode, combos[i:i + size]) for i in range(0, len(combos), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            verdicts = [v for part in pool.map(_classify_chunk, chunks) for v in part]
    else:
        verdicts = _classify_chunk((model, path, mode, combos))
    return EnumerationReport(path, min(max_cardinality, len(universe)), mode, universe, tuple(verdicts))


def minimal_unsafe_cut_sets(report: EnumerationReport) -> list:
    """Inclusion-minimal fail-unsafe combinations within the enumerated bound."""
    unsafe = sorted(report.unsafe, key=FaultCombination.sort_key)
    minimal = []
    for c in unsafe:
        if not any(m.members < c.members for m in minimal):
            minimal.append(c)
    return minimal


def monotonicity_warnings(model: SystemModel, report: EnumerationReport) -> list:
    """Pairs (f, g) with f ⊂ g where g still has strictly better performance.

    More faults are not assumed to degrade performance; this only flags
    models where they appear to improve it.
    """
    comp = model.component(report.target)
    evaluator = Evaluator(model, report.mode)
    perf = {}
    for v in report.verdicts:
        if v.regime in (Regime.FAIL_OPERATIONAL, Regime.FAIL_DEGRADED, Regime.OPERATIONAL):
            p = evaluator.evaluate(report.target, v.combination).performance
            if p is not None:
                perf[v.combination] = p
    out = []
    for small, p_small in perf.items():
        for big, p_big in perf.items():
            if small.members < big.members and compare_performance(
                    p_big, p_small, comp.metrics) is Comparison.AT_LEAST and p_big != p_small:
                out.append((small, big))
    return sorted(out, key=lambda pair: (pair[0].sort_key(), pair[1].sort_key()))


__all__ = [
    "BudgetExceeded",
    "ClassificationError",
    "EnumerationReport",
    "Evaluation",
    "Evaluator",
    "Mode",
    "NoMatchingRule",
    "available_performance",
    "classify",
    "classify_by_definition",
    "count_combinations",
    "enumerate_regimes",
    "evaluate_operability",
    "iter_combinations",
    "minimal_unsafe_cut_sets",
    "monotonicity_warnings",
    "same_regime",
]
