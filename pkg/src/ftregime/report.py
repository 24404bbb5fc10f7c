"""Report bundles and their json, csv and markdown renderings."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import __version__
from .classifier import EnumerationReport, minimal_unsafe_cut_sets
from .dsl import serialize_model
from .model import EMPTY_LABEL, Regime, RegimeVerdict, SystemModel

SCHEMA_VERSION = 1
FORMATS = ("json", "csv", "markdown")
CSV_HEADER = ("combination", "target", "regime", "safe_state", "functional", "perf_comparison")


class ReportError(ValueError):
    pass


def model_digest(model: SystemModel) -> str:
    return "sha256:" + hashlib.sha256(serialize_model(model).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RegimeRow:
    target: str
    combination: str
    regime: str
    fault_present: str
    safe_state: str
    functional: str
    performance: str
    perf_comparison: str
    evidence: str = ""

    @classmethod
    def from_verdict(cls, v: RegimeVerdict) -> "RegimeRow":
        fault, safe, func, perf = v.criteria_trace
        if v.regime is Regime.OPERATIONAL:
            safe, func, perf = "yes", "yes", "yes"
        return cls(v.target, v.combination.label, v.regime.value, fault, safe, func, perf,
                   v.performance_comparison.value, v.evidence)


@dataclass(frozen=True)
class CrosscheckRow:
    target: str
    combination: str
    predicted: str
    observed: str
    mismatches: tuple = ()

    @property
    def match(self) -> bool:
        return not self.mismatches


@dataclass(frozen=True)
class ReportBundle:
    model_digest: str
    tool_version: str
    k: int
    mode: str
    targets: tuple
    rows: tuple
    cut_sets: tuple = ()  # (target, (label, ...))
    crosschecks: tuple = ()
    schema_version: int = SCHEMA_VERSION

    def regime_sets(self) -> dict:
        """target -> regime -> combination labels, every regime listed."""
        out = {t: {r.value: [] for r in Regime} for t in self.targets}
        for row in self.rows:
            out[row.target][row.regime].append(row.combination)
        return out

    @property
    def has_unsafe(self) -> bool:
        return any(row.regime == Regime.FAIL_UNSAFE.value for row in self.rows)

    @property
    def has_mismatch(self) -> bool:
        return any(not c.match for c in self.crosschecks)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "model_digest": self.model_digest,
            "tool_version": self.tool_version,
            "parameters": {"k": self.k, "mode": self.mode},
            "targets": list(self.targets),
            "regime_table": [_row_dict(r) for r in self.rows],
            "regime_sets": self.regime_sets(),
            "cut_sets": {t: list(cs) for t, cs in self.cut_sets},
            "crosschecks": [
                {"target": c.target, "combination": c.combination, "predicted": c.predicted,
                 "observed": c.observed, "mismatches": list(c.mismatches), "match": c.match}
                for c in self.crosschecks
            ],
        }


def _row_dict(r: RegimeRow) -> dict:
    return {
        "target": r.target, "combination": r.combination, "regime": r.regime,
        "fault_present": r.fault_present, "safe_state": r.safe_state, "functional": r.functional,
        "performance_at_least_nominal": r.performance, "perf_comparison": r.perf_comparison,
        "evidence": r.evidence,
    }


def build_bundle(model: SystemModel, reports: Sequence[EnumerationReport],
                 crosschecks: Iterable = ()) -> ReportBundle:
    if not reports:
        raise ReportError("no enumeration reports")
    targets = [r.target for r in reports]
    if len(set(targets)) != len(targets):
        raise ReportError("each target may appear only once")
    modes = {r.mode.value for r in reports}
    ks = {r.max_cardinality for r in reports}
    rows, cuts = [], []
    for rep in reports:
        rows.extend(RegimeRow.from_verdict(v) for v in rep.verdicts)
        cuts.append((rep.target, tuple(c.label for c in minimal_unsafe_cut_sets(rep))))
    xs = tuple(CrosscheckRow(c.target, c.combination.label, c.predicted.value, c.observed.value,
                             tuple(c.mismatches)) for c in crosschecks)
    return ReportBundle(model_digest(model), __version__, max(ks), "/".join(sorted(modes)),
                        tuple(r.target for r in reports), tuple(rows), tuple(cuts), xs)


def _render_json(b: ReportBundle) -> str:
    return json.dumps(b.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _render_csv(b: ReportBundle) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in b.rows:
        w.writerow((r.combination, r.target, r.regime, r.safe_state, r.functional, r.perf_comparison))
    return buf.getvalue()


def _md_cell(s: str) -> str:
    return s.replace("|", "\\|")


def _render_markdown(b: ReportBundle) -> str:
    out = ["# Fault-tolerance regimes", "",
           f"- model digest: `{b.model_digest}`",
           f"- tool version: {b.tool_version}",
           f"- max faults per combination (k): {b.k}",
           f"- mode: {b.mode}", ""]
    cuts = dict(b.cut_sets)
    for target in b.targets:
        out += [f"## {target}", "",
                "| combination | fault present | safe state | functional | performance >= nominal | regime |",
                "|---|---|---|---|---|---|"]
        for r in b.rows:
            if r.target == target:
                out.append(f"| {_md_cell(r.combination)} | {r.fault_present} | {r.safe_state} | "
                           f"{r.functional} | {r.performance} | {r.regime} |")
        cs = cuts.get(target, ())
        out += ["", "Minimal unsafe cut sets: " + (", ".join(f"`{c}`" for c in cs) if cs else "none"), ""]
    if b.crosschecks:
        out += ["## Simulation cross-check", "",
                "| target | combination | predicted | observed | mismatches |",
                "|---|---|---|---|---|"]
        for c in b.crosschecks:
            out.append(f"| {c.target} | {_md_cell(c.combination)} | {c.predicted} | {c.observed} | "
                       f"{', '.join(c.mismatches) or '-'} |")
        out.append("")
    return "\n".join(out)


def render(bundle: ReportBundle, fmt: str = "json") -> bytes:
    """Render a bundle.  json is lossless; csv and markdown are projections."""
    if fmt == "json":
        text = _render_json(bundle)
    elif fmt == "csv":
        text = _render_csv(bundle)
    elif fmt == "markdown":
        text = _render_markdown(bundle)
    else:
        raise ReportError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    return text.encode("utf-8")


def load_bundle(data: bytes | str) -> ReportBundle:
    """Inverse of ``render(bundle, "json")``."""
    try:
        d = json.loads(data)
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ReportError(f"unsupported schema version {d.get('schema_version')!r}")
        rows = tuple(RegimeRow(r["target"], r["combination"], r["regime"], r["fault_present"],
                               r["safe_state"], r["functional"], r["performance_at_least_nominal"],
                               r["perf_comparison"], r.get("evidence", ""))
                     for r in d["regime_table"])
        xs = tuple(CrosscheckRow(c["target"], c["combination"], c["predicted"], c["observed"],
                                 tuple(c["mismatches"])) for c in d["crosschecks"])
        return ReportBundle(d["model_digest"], d["tool_version"], int(d["parameters"]["k"]),
                            d["parameters"]["mode"], tuple(d["targets"]), rows,
                            tuple((t, tuple(d["cut_sets"][t])) for t in d["targets"]), xs,
                            d["schema_version"])
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, ReportError):
            raise
        raise ReportError(f"malformed report: {exc}") from None


__all__ = ["CSV_HEADER", "EMPTY_LABEL", "FORMATS", "CrosscheckRow", "RegimeRow", "ReportBundle",
           "ReportError", "SCHEMA_VERSION", "build_bundle", "load_bundle", "model_digest", "render"]
