"""Domain types for hierarchical fault-tolerance models.

Everything here is an immutable value object.  A :class:`SystemModel` is a
tree of :class:`Component` objects; each component declares its local
faults, the metrics its performance is measured by, its nominal
performance, ordered effect rules, and optionally how its performance and
operability are composed from its children.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from enum import Enum
from itertools import product
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .kernels import Interval, interval_contains

Value = Union[float, Interval, tuple, frozenset]

IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
EMPTY_LABEL = "∅"


class ModelError(ValueError):
    pass


class MetricMismatch(ModelError):
    pass


class UnknownTarget(ModelError):
    pass


class UnknownFault(ModelError):
    pass


# --------------------------------------------------------------------- faults


@dataclass(frozen=True)
class FaultId:
    id: str
    description: str = ""


@dataclass(frozen=True)
class FaultCombination:
    """A finite set of fault ids; the empty combination is the fault-free case."""

    members: frozenset = frozenset()

    def __init__(self, members: Iterable[str] = ()):
        object.__setattr__(self, "members", frozenset(members))

    @classmethod
    def parse(cls, literal: str) -> "FaultCombination":
        """Parse ``"fA+fB"``; ``""``, ``"∅"`` and ``"{}"`` denote the empty set."""
        text = literal.strip()
        if text in ("", EMPTY_LABEL, "{}", "none"):
            return cls()
        parts = [p.strip() for p in text.split("+")]
        for p in parts:
            if not IDENT_RE.match(p):
                raise ModelError(f"invalid fault id {p!r} in combination {literal!r}")
        return cls(parts)

    @property
    def label(self) -> str:
        if not self.members:
            return EMPTY_LABEL
        return "+".join(sorted(self.members))

    def sort_key(self) -> tuple:
        return (len(self.members), tuple(sorted(self.members)))

    def restrict(self, scope: Iterable[str]) -> "FaultCombination":
        return FaultCombination(self.members & frozenset(scope))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self.members))

    def __contains__(self, item: object) -> bool:
        return item in self.members

    def __le__(self, other: "FaultCombination") -> bool:
        return self.members <= other.members

    def __lt__(self, other: "FaultCombination") -> bool:
        return self.members < other.members

    def __bool__(self) -> bool:
        return bool(self.members)

    def __repr__(self) -> str:
        return f"FaultCombination({self.label})"


# -------------------------------------------------------------------- metrics


class MetricKind(str, Enum):
    SCALAR = "scalar"
    INTERVAL = "interval"
    VECTOR = "vector"
    SET = "set"


class Direction(str, Enum):
    HIGHER = "higher-is-better"
    CONTAINMENT = "containment"


DEFAULT_DIRECTION = {
    MetricKind.SCALAR: Direction.HIGHER,
    MetricKind.VECTOR: Direction.HIGHER,
    MetricKind.INTERVAL: Direction.CONTAINMENT,
    MetricKind.SET: Direction.CONTAINMENT,
}


@dataclass(frozen=True)
class MetricSpec:
    name: str
    kind: MetricKind
    unit: str = ""
    direction: Optional[Direction] = None
    length: Optional[int] = None
    tol: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", MetricKind(self.kind))
        if self.direction is None:
            object.__setattr__(self, "direction", DEFAULT_DIRECTION[self.kind])
        else:
            object.__setattr__(self, "direction", Direction(self.direction))
        object.__setattr__(self, "tol", float(self.tol))


def value_kind(value: object) -> Optional[MetricKind]:
    if isinstance(value, Interval):
        return MetricKind.INTERVAL
    if isinstance(value, frozenset):
        return MetricKind.SET
    if isinstance(value, tuple):
        return MetricKind.VECTOR
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return MetricKind.SCALAR
    return None


def normalize_value(value: object) -> Value:
    """Coerce plain Python values into the canonical value representation."""
    if isinstance(value, Interval):
        return Interval(float(value.lo), float(value.hi))
    if isinstance(value, (set, frozenset)):
        return frozenset(value)
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise TypeError(f"unsupported performance value {value!r}")


@dataclass(frozen=True)
class PerformanceValue:
    """Named bundle of metric values, stored sorted by metric name."""

    entries: tuple = ()

    def __init__(self, entries: Union[Mapping[str, object], Iterable[tuple]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        norm = tuple(sorted(((str(k), normalize_value(v)) for k, v in items), key=lambda kv: kv[0]))
        names = [k for k, _ in norm]
        if len(names) != len(set(names)):
            raise ModelError(f"duplicate metric in performance value: {names}")
        object.__setattr__(self, "entries", norm)

    def __getitem__(self, name: str) -> Value:
        for k, v in self.entries:
            if k == name:
                return v
        raise KeyError(name)

    def get(self, name: str, default=None):
        for k, v in self.entries:
            if k == name:
                return v
        return default

    def __contains__(self, name: object) -> bool:
        return any(k == name for k, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def names(self) -> list[str]:
        return [k for k, _ in self.entries]

    def as_dict(self) -> dict:
        return dict(self.entries)

    def updated(self, other: Union["PerformanceValue", Mapping[str, object]]) -> "PerformanceValue":
        merged = self.as_dict()
        merged.update(other.as_dict() if isinstance(other, PerformanceValue) else other)
        return PerformanceValue(merged)


# -------------------------------------------------------------- effect rules


class MatchKind(str, Enum):
    EXACT = "exact"
    SUPERSET = "superset"
    AT_MOST = "at-most"
    EXACTLY = "exactly"
    ANY = "any"


@dataclass(frozen=True)
class Match:
    kind: MatchKind
    faults: frozenset = frozenset()
    count: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", MatchKind(self.kind))
        object.__setattr__(self, "faults", frozenset(self.faults))

    def matches(self, combo: FaultCombination) -> bool:
        k = self.kind
        if k is MatchKind.ANY:
            return True
        if k is MatchKind.EXACT:
            return combo.members == self.faults
        if k is MatchKind.SUPERSET:
            return self.faults <= combo.members
        if k is MatchKind.AT_MOST:
            return len(combo) <= self.count
        return len(combo) == self.count


@dataclass(frozen=True)
class EffectRule:
    """Declared behavior of a component under matching fault combinations.

    ``performance`` of ``None`` is the ``nominal`` token; a partial
    performance value overrides only the metrics it names.
    """

    match: Match
    safe: bool
    functional: bool = False
    performance: Optional[PerformanceValue] = None
    note: str = ""

    def __post_init__(self):
        perf = self.performance
        if perf is not None and not isinstance(perf, PerformanceValue):
            perf = PerformanceValue(perf)
        if perf is not None and len(perf) == 0:
            perf = None
        object.__setattr__(self, "performance", perf)


# ---------------------------------------------------------------- composition


class Kernel(str, Enum):
    INTERVAL_SUM = "interval-sum"
    SET_INTERSECTION = "set-intersection"
    VECTOR_MIN = "vector-min"
    SCALAR_MIN = "scalar-min"
    ALL_REQUIRED = "all-children-required"


KERNEL_KIND = {
    Kernel.INTERVAL_SUM: MetricKind.INTERVAL,
    Kernel.SET_INTERSECTION: MetricKind.SET,
    Kernel.VECTOR_MIN: MetricKind.VECTOR,
    Kernel.SCALAR_MIN: MetricKind.SCALAR,
    Kernel.ALL_REQUIRED: MetricKind.SCALAR,
}


class Combiner(str, Enum):
    MIN = "min-of-children"
    RULES = "declared-by-effect-rules"
    TABLE = "custom-table"


@dataclass(frozen=True)
class Binding:
    """``metric = kernel(child.metric, ...)``; child paths are relative."""

    metric: str
    kernel: Kernel
    sources: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kernel", Kernel(self.kernel))
        object.__setattr__(self, "sources", tuple((str(c), str(m)) for c, m in self.sources))


@dataclass(frozen=True)
class TableRow:
    """Maps a tuple of child operability values (``None`` = wildcard)."""

    pattern: tuple
    safe: bool
    functional: bool = False
    performance: Optional[PerformanceValue] = None

    def __post_init__(self):
        object.__setattr__(self, "pattern", tuple(self.pattern))
        perf = self.performance
        if perf is not None and not isinstance(perf, PerformanceValue):
            perf = PerformanceValue(perf)
        if perf is not None and len(perf) == 0:
            perf = None
        object.__setattr__(self, "performance", perf)

    def matches(self, health: Sequence[int]) -> bool:
        return len(health) == len(self.pattern) and all(
            p is None or p == h for p, h in zip(self.pattern, health)
        )


@dataclass(frozen=True)
class CompositionRule:
    bindings: tuple = ()
    combiner: Combiner = Combiner.RULES
    table_children: tuple = ()
    table: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "bindings", tuple(self.bindings))
        object.__setattr__(self, "combiner", Combiner(self.combiner))
        object.__setattr__(self, "table_children", tuple(self.table_children))
        object.__setattr__(self, "table", tuple(self.table))

    def binding_for(self, metric: str) -> Optional[Binding]:
        for b in self.bindings:
            if b.metric == metric:
                return b
        return None

    @property
    def bound_metrics(self) -> set:
        return {b.metric for b in self.bindings}


# ----------------------------------------------------------------- components


@dataclass(frozen=True)
class Component:
    name: str
    description: str = ""
    functionality: str = ""
    predicate: str = ""
    faults: tuple = ()
    metrics: tuple = ()
    nominal: PerformanceValue = field(default_factory=PerformanceValue)
    rules: tuple = ()
    composition: Optional[CompositionRule] = None
    children: tuple = ()

    def __post_init__(self):
        faults = tuple(f if isinstance(f, FaultId) else FaultId(str(f)) for f in self.faults)
        object.__setattr__(self, "faults", faults)
        object.__setattr__(self, "metrics", tuple(self.metrics))
        if not isinstance(self.nominal, PerformanceValue):
            object.__setattr__(self, "nominal", PerformanceValue(self.nominal))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "children", tuple(self.children))

    def metric(self, name: str) -> Optional[MetricSpec]:
        for m in self.metrics:
            if m.name == name:
                return m
        return None

    def child(self, name: str) -> Optional["Component"]:
        for c in self.children:
            if c.name == name:
                return c
        return None

    def descendant(self, relpath: str) -> Optional["Component"]:
        node: Optional[Component] = self
        for part in relpath.split("."):
            node = node.child(part) if node is not None else None
        return node

    @property
    def fault_ids(self) -> tuple:
        return tuple(f.id for f in self.faults)


@dataclass(frozen=True)
class ScenarioSpec:
    """Simulation parameters carried alongside a model (``scenario`` section)."""

    kind: str
    params: tuple = ()

    def __init__(self, kind: str, params: Union[Mapping[str, object], Iterable[tuple]] = ()):
        items = params.items() if isinstance(params, Mapping) else params
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", tuple(sorted(((str(k), v) for k, v in items), key=lambda kv: kv[0])))

    def as_dict(self) -> dict:
        return dict(self.params)


@dataclass(frozen=True)
class SystemModel:
    root: Component
    scenario: Optional[ScenarioSpec] = None

    def walk(self) -> Iterator[tuple[str, Component]]:
        stack = [(self.root.name, self.root)]
        while stack:
            path, comp = stack.pop()
            yield path, comp
            for child in reversed(comp.children):
                stack.append((f"{path}.{child.name}", child))

    @cached_property
    def _index(self) -> dict:
        return dict(self.walk())

    @cached_property
    def _scopes(self) -> dict:
        scopes = {}
        for path, _ in self.walk():
            prefix = path + "."
            scopes[path] = frozenset(
                fid for p, c in self.walk() if p == path or p.startswith(prefix) for fid in c.fault_ids)
        return scopes

    def components(self) -> dict:
        return dict(self._index)

    def component(self, path: str) -> Component:
        try:
            return self._index[path]
        except KeyError:
            raise UnknownTarget(path) from None

    def resolve_target(self, name: str) -> str:
        """Accept a full dotted path or a unique component name."""
        comps = self.components()
        if name in comps:
            return name
        hits = [p for p in comps if p.rsplit(".", 1)[-1] == name]
        if len(hits) == 1:
            return hits[0]
        if not hits:
            raise UnknownTarget(f"no component {name!r}")
        raise UnknownTarget(f"ambiguous component {name!r}: {sorted(hits)}")

    @property
    def fault_universe(self) -> tuple:
        ids = []
        for _, comp in self.walk():
            ids.extend(comp.fault_ids)
        return tuple(sorted(set(ids)))

    def scope(self, path: str) -> frozenset:
        """Faults declared by the component at ``path`` or any descendant."""
        try:
            return self._scopes[path]
        except KeyError:
            raise UnknownTarget(path) from None

    def owner(self, fault: str) -> str:
        for p, comp in self.walk():
            if fault in comp.fault_ids:
                return p
        raise UnknownFault(fault)

    def check_combination(self, combination: FaultCombination) -> None:
        unknown = combination.members - set(self.fault_universe)
        if unknown:
            raise UnknownFault(f"unknown fault id(s): {', '.join(sorted(unknown))}")


# ------------------------------------------------------------------- verdicts


class Regime(str, Enum):
    OPERATIONAL = "operational"
    FAIL_OPERATIONAL = "fail-operational"
    FAIL_DEGRADED = "fail-degraded"
    FAIL_SAFE = "fail-safe"
    FAIL_UNSAFE = "fail-unsafe"
    UNKNOWN = "unknown"


class Comparison(str, Enum):
    AT_LEAST = "at-least-nominal"
    BELOW = "below-nominal"
    INCOMPARABLE = "incomparable"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class OperabilityVerdict:
    safe_state: bool
    functional: bool
    evidence: str = ""

    @property
    def value(self) -> int:
        if not self.safe_state:
            return -1
        return 1 if self.functional else 0

    @classmethod
    def from_value(cls, value: int, evidence: str = "") -> "OperabilityVerdict":
        if value not in (1, 0, -1):
            raise ValueError(f"operability must be 1, 0 or -1, got {value!r}")
        return cls(value >= 0, value == 1, evidence)


@dataclass(frozen=True)
class RegimeVerdict:
    """Classification of one target under one fault combination.

    ``criteria_trace`` holds the answers to the four questions in order:
    fault present, safe state maintained, functionality provided,
    performance at least nominal.  Each answer is ``"yes"``, ``"no"``,
    ``"-"`` (not reached) or ``"?"`` (unmatched in strict mode).
    """

    target: str
    combination: FaultCombination
    regime: Regime
    criteria_trace: tuple
    performance_comparison: Comparison = Comparison.NOT_APPLICABLE
    operability: Optional[OperabilityVerdict] = None
    evidence: str = ""


# ---------------------------------------------------------------- diagnostics


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    path: str = ""
    rule_index: Optional[int] = None
    element: str = ""
    line: Optional[int] = None
    col: Optional[int] = None

    def __str__(self) -> str:
        where = self.path
        if self.rule_index is not None:
            where += f"[rule {self.rule_index}]"
        return f"{self.code}: {self.message}" + (f" ({where})" if where else "")


def _value_ok(spec: MetricSpec, value: object) -> Optional[str]:
    kind = value_kind(value)
    if kind is not spec.kind:
        return f"expected {spec.kind.value}, got {kind.value if kind else type(value).__name__}"
    if kind is MetricKind.SCALAR and not math.isfinite(value):
        return "non-finite scalar"
    if kind is MetricKind.VECTOR:
        if spec.length is not None and len(value) != spec.length:
            return f"vector length {len(value)} != declared {spec.length}"
        if not all(math.isfinite(v) for v in value):
            return "non-finite vector entry"
    if kind is MetricKind.INTERVAL and not (math.isfinite(value.lo) and math.isfinite(value.hi)):
        return "non-finite interval bound"
    return None


def _check_value(diags: list, spec: MetricSpec, value: object, path: str, element: str,
                 rule_index: Optional[int] = None) -> None:
    problem = _value_ok(spec, value)
    if problem:
        diags.append(Diagnostic("type-mismatch", f"{problem} at {path}.{spec.name}", path,
                                rule_index, element))
    elif isinstance(value, Interval) and not value.is_valid:
        diags.append(Diagnostic("interval-lo-gt-hi", f"interval lo>hi at {path}.{spec.name}", path,
                                rule_index, element))


def _check_perf(diags: list, comp: Component, path: str, perf: Optional[PerformanceValue],
                element: str, rule_index: Optional[int], bound: set, what: str) -> None:
    if perf is None:
        return
    for name, value in perf.entries:
        spec = comp.metric(name)
        if spec is None:
            diags.append(Diagnostic(f"{what}-unknown-metric",
                                    f"unknown metric {name!r} at {path}", path, rule_index, element))
            continue
        if name in bound:
            diags.append(Diagnostic(f"{what}-binds-composed-metric",
                                    f"metric {name!r} at {path} is both composed and declared",
                                    path, rule_index, element))
        _check_value(diags, spec, value, path, element, rule_index)


def validate_model(model: SystemModel) -> list[Diagnostic]:
    """Check every structural invariant; return diagnostics (empty when valid)."""
    diags: list[Diagnostic] = []
    seen_paths: set = set()
    fault_owner: dict = {}

    for path, comp in model.walk():
        if not IDENT_RE.match(comp.name or ""):
            diags.append(Diagnostic("invalid-name", f"invalid component name {comp.name!r}", path,
                                    element=path))
        if path in seen_paths:
            diags.append(Diagnostic("duplicate-component", f"duplicate component path {path}", path,
                                    element=path))
        seen_paths.add(path)

        for f in comp.faults:
            el = f"{path}/fault:{f.id}"
            if not IDENT_RE.match(f.id or ""):
                diags.append(Diagnostic("invalid-fault-id", f"invalid fault id {f.id!r}", path, element=el))
            elif f.id in fault_owner:
                diags.append(Diagnostic("duplicate-fault-id",
                                        f"duplicate fault id {f.id!r} in {fault_owner[f.id]} and {path}",
                                        path, element=el))
            else:
                fault_owner[f.id] = path

        names = set()
        for spec in comp.metrics:
            el = f"{path}/metric:{spec.name}"
            if not IDENT_RE.match(spec.name or ""):
                diags.append(Diagnostic("invalid-name", f"invalid metric name {spec.name!r}", path, element=el))
            if spec.name in names:
                diags.append(Diagnostic("duplicate-metric", f"duplicate metric {spec.name!r} at {path}",
                                        path, element=el))
            names.add(spec.name)
            if spec.direction is not DEFAULT_DIRECTION[spec.kind]:
                diags.append(Diagnostic("metric-kind-direction",
                                        f"{spec.kind.value} metric {spec.name!r} requires direction "
                                        f"{DEFAULT_DIRECTION[spec.kind].value}", path, element=el))
            if spec.kind is MetricKind.VECTOR and (spec.length is None or spec.length < 1):
                diags.append(Diagnostic("vector-length", f"vector metric {spec.name!r} needs length >= 1",
                                        path, element=el))
            if spec.kind is not MetricKind.VECTOR and spec.length is not None:
                diags.append(Diagnostic("vector-length", f"length given for non-vector metric {spec.name!r}",
                                        path, element=el))
            if not (spec.tol >= 0 and math.isfinite(spec.tol)):
                diags.append(Diagnostic("negative-tolerance", f"tolerance of {spec.name!r} must be >= 0",
                                        path, element=el))

        for spec in comp.metrics:
            if spec.name not in comp.nominal:
                diags.append(Diagnostic("nominal-missing", f"no nominal value for {path}.{spec.name}", path,
                                        element=path))
        for name, value in comp.nominal.entries:
            spec = comp.metric(name)
            el = f"{path}/nominal:{name}"
            if spec is None:
                diags.append(Diagnostic("nominal-unknown-metric", f"unknown metric {name!r} at {path}", path,
                                        element=el))
            else:
                _check_value(diags, spec, value, path, el)

        comp_rule = comp.composition
        bound = comp_rule.bound_metrics if comp_rule else set()
        scope = model.scope(path)
        for i, rule in enumerate(comp.rules):
            el = f"{path}/rule:{i}"
            m = rule.match
            if m.kind in (MatchKind.EXACT, MatchKind.SUPERSET):
                for fid in sorted(m.faults - scope):
                    diags.append(Diagnostic("rule-dangling-fault",
                                            f"rule references undeclared fault {fid!r} at {path}",
                                            path, i, el))
            elif m.kind in (MatchKind.AT_MOST, MatchKind.EXACTLY):
                if m.count is None or m.count < 0:
                    diags.append(Diagnostic("rule-bad-cardinality", f"bad cardinality at {path}", path, i, el))
            _check_perf(diags, comp, path, rule.performance, el, i, bound, "rule")

        if comp_rule is not None:
            _validate_composition(diags, comp, path, comp_rule)

    return diags


def _validate_composition(diags: list, comp: Component, path: str, rule: CompositionRule) -> None:
    if not comp.children:
        diags.append(Diagnostic("composition-on-leaf", f"composition declared on leaf {path}", path,
                                element=f"{path}/operability"))
        return
    seen = set()
    for b in rule.bindings:
        el = f"{path}/bind:{b.metric}"
        if b.metric in seen:
            diags.append(Diagnostic("bind-duplicate", f"metric {b.metric!r} bound twice at {path}", path,
                                    element=el))
        seen.add(b.metric)
        spec = comp.metric(b.metric)
        if spec is None:
            diags.append(Diagnostic("bind-unknown-metric", f"unknown metric {b.metric!r} at {path}", path,
                                    element=el))
            continue
        want = KERNEL_KIND[b.kernel]
        if spec.kind is not want:
            diags.append(Diagnostic("bind-kind-mismatch",
                                    f"{b.kernel.value} binds only {want.value} metrics "
                                    f"({path}.{b.metric} is {spec.kind.value})", path, element=el))
        if not b.sources:
            diags.append(Diagnostic("bind-empty", f"binding of {path}.{b.metric} has no sources", path,
                                    element=el))
        for child_path, child_metric in b.sources:
            child = comp.descendant(child_path)
            if child is None:
                diags.append(Diagnostic("bind-unknown-child", f"no child {child_path!r} under {path}", path,
                                        element=el))
                continue
            cspec = child.metric(child_metric)
            if cspec is None:
                diags.append(Diagnostic("bind-unknown-child-metric",
                                        f"unknown metric {child_path}.{child_metric} under {path}", path,
                                        element=el))
                continue
            if cspec.kind is not want:
                diags.append(Diagnostic("bind-kind-mismatch",
                                        f"{b.kernel.value} binds only {want.value} metrics "
                                        f"({child_path}.{child_metric} is {cspec.kind.value})", path,
                                        element=el))
            if cspec.unit != spec.unit:
                diags.append(Diagnostic("bind-unit-mismatch",
                                        f"unit {cspec.unit!r} of {child_path}.{child_metric} != {spec.unit!r}",
                                        path, element=el))
            if want is MetricKind.VECTOR and cspec.kind is want and cspec.length != spec.length:
                diags.append(Diagnostic("bind-vector-length",
                                        f"vector-min needs equal lengths at {path}.{b.metric}", path,
                                        element=el))

    if rule.combiner is Combiner.TABLE:
        el = f"{path}/operability"
        cols = rule.table_children
        if not cols:
            diags.append(Diagnostic("table-arity", f"table at {path} names no children", path, element=el))
        for c in cols:
            if comp.descendant(c) is None:
                diags.append(Diagnostic("table-unknown-child", f"no child {c!r} under {path}", path,
                                        element=el))
        for i, row in enumerate(rule.table):
            rel = f"{path}/table:{i}"
            if len(row.pattern) != len(cols):
                diags.append(Diagnostic("table-arity", f"table row {i} at {path} has {len(row.pattern)} "
                                        f"columns, expected {len(cols)}", path, element=rel))
            if any(p not in (None, 1, 0, -1) for p in row.pattern):
                diags.append(Diagnostic("table-bad-value", f"table row {i} at {path} has a value outside "
                                        "{1, 0, -1, *}", path, element=rel))
            _check_perf(diags, comp, path, row.performance, rel, None, rule.bound_metrics, "table")
        if cols and all(len(r.pattern) == len(cols) for r in rule.table) and len(cols) <= 8:
            for health in product((1, 0, -1), repeat=len(cols)):
                if not any(r.matches(health) for r in rule.table):
                    diags.append(Diagnostic("table-not-exhaustive",
                                            f"no table entry at {path} for {health}", path, element=el))
                    break


# --------------------------------------------------------------- performance


def _compare_metric(spec: MetricSpec, available: Value, nominal: Value) -> Comparison:
    tol = spec.tol
    if spec.kind is MetricKind.SCALAR:
        return Comparison.AT_LEAST if available >= nominal - tol else Comparison.BELOW
    if spec.kind is MetricKind.VECTOR:
        if all(a >= n - tol for a, n in zip(available, nominal)):
            return Comparison.AT_LEAST
        return Comparison.BELOW
    if spec.kind is MetricKind.INTERVAL:
        if interval_contains(available, nominal, tol):
            return Comparison.AT_LEAST
        if interval_contains(nominal, available, tol):
            return Comparison.BELOW
        return Comparison.INCOMPARABLE
    if nominal <= available:
        return Comparison.AT_LEAST
    if available <= nominal:
        return Comparison.BELOW
    return Comparison.INCOMPARABLE


def compare_metric(spec: MetricSpec, available: Value, nominal: Value) -> Comparison:
    for v in (available, nominal):
        if value_kind(v) is not spec.kind:
            raise MetricMismatch(f"metric {spec.name!r}: {v!r} is not {spec.kind.value}")
    if spec.kind is MetricKind.VECTOR and len(available) != len(nominal):
        raise MetricMismatch(f"metric {spec.name!r}: vector length mismatch")
    return _compare_metric(spec, available, nominal)


def compare_performance(available: PerformanceValue, nominal: PerformanceValue,
                        specs: Sequence[MetricSpec]) -> Comparison:
    """Partial-order comparison of available against nominal performance.

    Equality counts as at-least-nominal.  Any incomparable interval or set
    pair makes the whole comparison incomparable.
    """
    spec_names = sorted(s.name for s in specs)
    if available.names() != spec_names or nominal.names() != spec_names:
        raise MetricMismatch(
            f"metric names differ: available {available.names()}, nominal {nominal.names()}, "
            f"specs {spec_names}")
    outcomes = {compare_metric(s, available[s.name], nominal[s.name]) for s in specs}
    if Comparison.INCOMPARABLE in outcomes:
        return Comparison.INCOMPARABLE
    if Comparison.BELOW in outcomes:
        return Comparison.BELOW
    return Comparison.AT_LEAST
