"""Hierarchical propagation of performance through composition rules."""

from __future__ import annotations

from functools import reduce
from typing import Mapping, Optional

from .kernels import (
    Interval,
    KernelError,
    UnitMismatch,
    all_children_required,
    interval_contains,
    interval_sum,
    scalar_min,
    set_intersection,
    vector_min,
)
from .model import (
    Binding,
    Combiner,
    Component,
    Kernel,
    PerformanceValue,
    SystemModel,
    TableRow,
    value_kind,
    KERNEL_KIND,
)

__all__ = [
    "CompositionError",
    "Interval",
    "interval_sum",
    "interval_contains",
    "set_intersection",
    "vector_min",
    "scalar_min",
    "propagate",
    "table_row",
    "UnitMismatch",
]


class CompositionError(ValueError):
    pass


def _apply(binding: Binding, parent: Component, values: list, nominals: list):
    want = KERNEL_KIND[binding.kernel]
    for v in values:
        if value_kind(v) is not want:
            raise CompositionError(
                f"{binding.kernel.value} expects {want.value} values for {parent.name}.{binding.metric}, "
                f"got {v!r}")
    k = binding.kernel
    try:
        if k is Kernel.INTERVAL_SUM:
            return reduce(interval_sum, values)
        if k is Kernel.SET_INTERSECTION:
            return reduce(set_intersection, values)
        if k is Kernel.VECTOR_MIN:
            return reduce(vector_min, values)
        if k is Kernel.SCALAR_MIN:
            return reduce(scalar_min, values)
        return all_children_required(values, nominals, parent.nominal[binding.metric])
    except KernelError as exc:
        raise CompositionError(f"{parent.name}.{binding.metric}: {exc}") from exc


def table_row(component: Component, health: Mapping[str, int]) -> TableRow:
    """First table row of ``component`` matching the children's operability."""
    rule = component.composition
    if rule is None or rule.combiner is not Combiner.TABLE:
        raise CompositionError(f"{component.name} has no operability table")
    try:
        key = tuple(health[c] for c in rule.table_children)
    except KeyError as exc:
        raise CompositionError(f"missing child {exc.args[0]!r} for table of {component.name}") from None
    for row in rule.table:
        if row.matches(key):
            return row
    raise CompositionError(f"no table entry for {component.name} at {key}")


def propagate(model: SystemModel, target: str, child_performances: Mapping[str, PerformanceValue],
              health: Optional[Mapping[str, int]] = None) -> PerformanceValue:
    """Compose the target's performance from its children's available performance.

    ``child_performances`` is keyed by child path relative to the target.
    Bound metrics come from the kernels; unbound metrics start from the
    target's nominal value and take any override from the matching table row
    when ``health`` (child operability values) is given.
    """
    comp = model.component(target)
    rule = comp.composition
    if rule is None:
        raise CompositionError(f"{target} has no composition rule")
    out = comp.nominal.as_dict()
    for binding in rule.bindings:
        values, nominals = [], []
        for child_path, child_metric in binding.sources:
            if child_path not in child_performances:
                raise CompositionError(f"missing child {child_path!r} for {target}.{binding.metric}")
            perf = child_performances[child_path]
            if child_metric not in perf:
                raise CompositionError(f"child {child_path!r} has no metric {child_metric!r}")
            values.append(perf[child_metric])
            child = comp.descendant(child_path)
            nominals.append(child.nominal[child_metric] if child is not None else values[-1])
        out[binding.metric] = _apply(binding, comp, values, nominals)
    if rule.combiner is Combiner.TABLE and health is not None:
        row = table_row(comp, health)
        if row.performance is not None:
            out.update(row.performance.as_dict())
    return PerformanceValue(out)

