"""Seeded generator of random valid system models for property tests."""

from __future__ import annotations

import random
from itertools import product

from ftregime.kernels import Interval
from ftregime.model import (
    Binding,
    Combiner,
    Component,
    CompositionRule,
    EffectRule,
    FaultId,
    Kernel,
    Match,
    MatchKind,
    MetricKind,
    MetricSpec,
    PerformanceValue,
    SystemModel,
    TableRow,
)

SET_ITEMS = ("a", "b", "c", "d")
# dyadic steps keep tolerance arithmetic exact
STEPS = (0.0, 0.5, 1.0, 1.5, 2.0)

KERNELS = {
    MetricKind.INTERVAL: (Kernel.INTERVAL_SUM,),
    MetricKind.SET: (Kernel.SET_INTERSECTION,),
    MetricKind.VECTOR: (Kernel.VECTOR_MIN,),
    MetricKind.SCALAR: (Kernel.SCALAR_MIN, Kernel.ALL_REQUIRED),
}


def _value(rng: random.Random, spec: MetricSpec):
    if spec.kind is MetricKind.SCALAR:
        return float(rng.randint(0, 8)) / 2
    if spec.kind is MetricKind.INTERVAL:
        lo = rng.randint(-6, 2) / 2
        return Interval(lo, lo + rng.randint(0, 8) / 2)
    if spec.kind is MetricKind.VECTOR:
        return tuple(rng.choice(STEPS) for _ in range(spec.length))
    return frozenset(rng.sample(SET_ITEMS, rng.randint(0, len(SET_ITEMS))))


def _specs(rng: random.Random) -> tuple:
    out = []
    for i in range(rng.randint(0, 3)):
        kind = rng.choice(list(MetricKind))
        out.append(MetricSpec(
            f"m{i}", kind, rng.choice(("", "Nm", "s")),
            length=rng.randint(1, 3) if kind is MetricKind.VECTOR else None,
            tol=rng.choice((0.0, 0.0, 0.5)),
        ))
    return tuple(out)


def _perf(rng: random.Random, specs, allowed) -> dict:
    return {s.name: _value(rng, s) for s in specs if s.name in allowed and rng.random() < 0.5}


def _match(rng: random.Random, scope: list) -> Match:
    kind = rng.choice(list(MatchKind))
    if kind in (MatchKind.EXACT, MatchKind.SUPERSET):
        return Match(kind, frozenset(rng.sample(scope, rng.randint(0, len(scope)))))
    if kind in (MatchKind.AT_MOST, MatchKind.EXACTLY):
        return Match(kind, count=rng.randint(0, len(scope)))
    return Match(kind)


def _outcome(rng: random.Random):
    safe = rng.random() < 0.8
    return safe, safe and rng.random() < 0.6


def random_model(seed: int, max_faults: int = 4, max_depth: int = 3) -> SystemModel:
    rng = random.Random(seed)
    specs = _specs(rng)
    names = iter(f"C{i}" for i in range(1000))

    def shape(depth: int) -> list:
        n = rng.randint(1, 3) if depth < max_depth and rng.random() < 0.6 else 0
        return [shape(depth + 1) for _ in range(n)]

    tree = shape(1)
    slots: list = []

    def collect(node, path):
        slots.append(path)
        for i, child in enumerate(node):
            collect(child, path + (i,))

    collect(tree, ())
    n_faults = rng.randint(0, max_faults)
    owners = {}
    for j in range(n_faults):
        owners.setdefault(rng.choice(slots), []).append(f"f{j}")

    def build(node, path) -> tuple[Component, list]:
        children, scope = [], list(owners.get(path, []))
        for i, child in enumerate(node):
            comp, sub = build(child, path + (i,))
            children.append(comp)
            scope += sub
        scope.sort()
        composition = None
        bound: set = set()
        if children:
            bindings = []
            for spec in specs:
                if rng.random() < 0.6:
                    srcs = rng.sample(children, rng.randint(1, len(children)))
                    bindings.append(Binding(spec.name, rng.choice(KERNELS[spec.kind]),
                                            tuple((c.name, spec.name) for c in srcs)))
                    bound.add(spec.name)
            combiner = rng.choice(list(Combiner))
            table_children, table = (), ()
            if combiner is Combiner.TABLE:
                cols = rng.sample(children, rng.randint(1, min(3, len(children))))
                table_children = tuple(c.name for c in cols)
                rows = []
                for _ in range(rng.randint(0, 4)):
                    pattern = tuple(rng.choice((None, 1, 0, -1)) for _ in cols)
                    safe, func = _outcome(rng)
                    rows.append(TableRow(pattern, safe, func, _perf(rng, specs, {s.name for s in specs} - bound)))
                if not all(any(r.matches(h) for r in rows) for h in product((1, 0, -1), repeat=len(cols))):
                    safe, func = _outcome(rng)
                    rows.append(TableRow((None,) * len(cols), safe, func))
                table = tuple(rows)
            composition = CompositionRule(tuple(bindings), combiner, table_children, table)
        free = {s.name for s in specs} - bound
        rules = []
        for _ in range(rng.randint(0, 3 if scope else 1)):
            safe, func = _outcome(rng)
            rules.append(EffectRule(_match(rng, scope), safe, func, _perf(rng, specs, free),
                                    rng.choice(("", "", 'says "hi"', "back\\slash"))))
        comp = Component(
            next(names),
            description=rng.choice(("", "a part", 'quoted "name"')),
            functionality=rng.choice(("", "do the job")),
            predicate=rng.choice(("", "works")),
            faults=tuple(FaultId(f, rng.choice(("", "fault of " + f))) for f in owners.get(path, [])),
            metrics=specs,
            nominal=PerformanceValue({s.name: _value(rng, s) for s in specs}),
            rules=tuple(rules),
            composition=composition,
            children=tuple(children),
        )
        return comp, scope

    root, _ = build(tree, ())
    return SystemModel(root)
