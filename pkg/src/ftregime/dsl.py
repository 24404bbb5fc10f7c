"""Text format for system models.

The format is line oriented.  A file holds exactly one root ``component``
block (blocks nest and close with ``end``) and optionally one ``scenario``
block.  Inside a component the section keywords ``faults``, ``metrics``,
``nominal``, ``on-fault`` and ``compose`` start a list of entries that runs
until the next keyword line.  ``#`` starts a comment.  See
``docs/model-format.md`` for the full grammar.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .kernels import Interval
from .model import (
    Binding,
    Combiner,
    Component,
    CompositionRule,
    DEFAULT_DIRECTION,
    Diagnostic,
    EffectRule,
    FaultId,
    Match,
    MatchKind,
    MetricKind,
    MetricSpec,
    ModelError,
    PerformanceValue,
    ScenarioSpec,
    SystemModel,
    TableRow,
    validate_model,
)

MAX_DEPTH = 64

SECTIONS = {"faults", "metrics", "nominal", "on-fault", "compose"}
INLINE = {"description", "functionality"}
STRUCTURE = {"component", "end", "scenario"}
KEYWORDS = SECTIONS | INLINE | STRUCTURE | {"operability"}

KERNEL_NAMES = {
    "interval-sum": "interval-sum",
    "set-intersection": "set-intersection",
    "vector-min": "vector-min",
    "scalar-min": "scalar-min",
    "all-children-required": "all-children-required",
}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\f\v]+)
  | (?P<comment>\#.*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<arrow>->)
  | (?P<number>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_](?:[A-Za-z0-9_.]|-(?=[A-Za-z0-9_]))*)
  | (?P<punct>[\[\](){},;=:*])
""", re.VERBOSE)


class ModelSyntaxError(ModelError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ModelParseError(ModelError):
    """Raised by :func:`load_model` when a file does not yield a valid model."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(format_diagnostic(d) for d in self.diagnostics))


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


@dataclass
class ModelDocument:
    """Result of parsing: either a model or diagnostics, never both."""

    text: str
    model: Optional[SystemModel] = None
    spans: dict = field(default_factory=dict)
    diagnostics: tuple = ()

    @property
    def ok(self) -> bool:
        return self.model is not None

    def span_of(self, diagnostic: Diagnostic) -> Optional[Span]:
        for key in (diagnostic.element, diagnostic.path):
            if key and key in self.spans:
                return self.spans[key]
        if diagnostic.line is not None:
            return Span(diagnostic.line, diagnostic.col or 1, diagnostic.line, diagnostic.col or 1)
        return None


def format_diagnostic(d: Diagnostic) -> str:
    loc = f"{d.line}:{d.col}: " if d.line is not None else ""
    return f"{loc}{d.code}: {d.message}"


# ------------------------------------------------------------------ tokenizer


def _tokenize_line(text: str, lineno: int) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ModelSyntaxError(f"unexpected character {text[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind == "comment":
            break
        if kind != "ws":
            tokens.append(Token(kind, m.group(), lineno, pos + 1))
        pos = m.end()
    return tokens


def _unquote(tok: Token) -> str:
    body = tok.text[1:-1]
    out, i = [], 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            out.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


class _Cursor:
    def __init__(self, tokens: list, lineno: int):
        self.tokens = tokens
        self.i = 0
        self.lineno = lineno

    def peek(self) -> Optional[Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    def error(self, message: str) -> ModelSyntaxError:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            col = last.col + len(last.text) if last else 1
            return ModelSyntaxError(message + " at end of line", self.lineno, col)
        return ModelSyntaxError(f"{message}, found {tok.text!r}", tok.line, tok.col)

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of line")
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.text == text and tok.kind != "string":
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok is None or tok.text != text or tok.kind == "string":
            raise self.error(f"expected {text!r}")
        self.i += 1
        return tok

    def ident(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok is None or tok.kind != "ident":
            raise self.error(f"expected {what}")
        self.i += 1
        return tok

    def string(self) -> str:
        tok = self.peek()
        if tok is None or tok.kind != "string":
            raise self.error("expected string")
        self.i += 1
        return _unquote(tok)

    def number(self) -> float:
        tok = self.peek()
        if tok is None or tok.kind != "number":
            raise self.error("expected number")
        self.i += 1
        value = float(tok.text)
        if not math.isfinite(value):
            raise ModelSyntaxError(f"number out of range: {tok.text}", tok.line, tok.col)
        return value

    def integer(self) -> int:
        tok = self.peek()
        value = self.number()
        if not value.is_integer():
            raise ModelSyntaxError(f"expected integer, found {tok.text!r}", tok.line, tok.col)
        return int(value)

    def done(self) -> None:
        if not self.at_end():
            raise self.error("unexpected trailing input")


def _parse_value(cur: _Cursor, allow_words: bool = False):
    tok = cur.peek()
    if tok is None:
        raise cur.error("expected value")
    if tok.kind == "number":
        return cur.number()
    if tok.kind == "string" and allow_words:
        return cur.string()
    if tok.kind == "ident" and allow_words:
        cur.next()
        return tok.text
    if tok.text == "[":
        cur.next()
        lo = cur.number()
        cur.expect(",")
        hi = cur.number()
        cur.expect("]")
        return Interval(lo, hi)
    if tok.text == "(":
        cur.next()
        items = [cur.number()]
        while cur.accept(","):
            items.append(cur.number())
        cur.expect(")")
        return tuple(items)
    if tok.text == "{":
        cur.next()
        items = []
        if not cur.accept("}"):
            items.append(cur.ident("set member").text)
            while cur.accept(","):
                items.append(cur.ident("set member").text)
            cur.expect("}")
        return frozenset(items)
    raise cur.error("expected value")


def _parse_id_set(cur: _Cursor) -> frozenset:
    cur.expect("{")
    items = []
    if not cur.accept("}"):
        items.append(cur.ident("fault id").text)
        while cur.accept(","):
            items.append(cur.ident("fault id").text)
        cur.expect("}")
    return frozenset(items)


def _parse_assigns(cur: _Cursor) -> dict:
    out = {}
    while True:
        name = cur.ident("metric name")
        cur.expect("=")
        if name.text in out:
            raise ModelSyntaxError(f"metric {name.text!r} assigned twice", name.line, name.col)
        out[name.text] = _parse_value(cur)
        if not cur.accept(";"):
            return out


def _parse_outcome(cur: _Cursor) -> tuple:
    """``unsafe [assigns]`` or ``safe functional|nonfunctional [nominal|assigns]``."""
    word = cur.ident("outcome").text
    if word == "unsafe":
        safe, functional = False, False
    elif word == "safe":
        flag = cur.ident("'functional' or 'nonfunctional'").text
        if flag not in ("functional", "nonfunctional"):
            raise ModelSyntaxError(f"expected 'functional' or 'nonfunctional', found {flag!r}",
                                   cur.lineno, cur.tokens[cur.i - 1].col)
        safe, functional = True, flag == "functional"
    else:
        raise ModelSyntaxError(f"expected 'safe' or 'unsafe', found {word!r}", cur.lineno,
                               cur.tokens[cur.i - 1].col)
    perf = None
    note = ""
    tok = cur.peek()
    if tok is not None and tok.kind == "ident" and tok.text == "nominal":
        cur.next()
    elif tok is not None and tok.kind == "ident" and tok.text != "because":
        perf = _parse_assigns(cur)
    if cur.accept("because"):
        note = cur.string()
    cur.done()
    return safe, functional, perf, note


# -------------------------------------------------------------------- parsing


@dataclass
class _Builder:
    name: str
    path: str
    line: int
    description: str = ""
    functionality: str = ""
    predicate: str = ""
    faults: list = field(default_factory=list)
    metrics: list = field(default_factory=list)
    nominal: dict = field(default_factory=dict)
    rules: list = field(default_factory=list)
    bindings: list = field(default_factory=list)
    combiner: Optional[str] = None
    table_children: tuple = ()
    table: list = field(default_factory=list)
    has_compose: bool = False
    children: list = field(default_factory=list)
    seen_inline: set = field(default_factory=set)

    def build(self) -> Component:
        composition = None
        if self.has_compose:
            composition = CompositionRule(tuple(self.bindings), Combiner(self.combiner or Combiner.RULES.value),
                                          self.table_children, tuple(self.table))
        return Component(
            name=self.name,
            description=self.description,
            functionality=self.functionality,
            predicate=self.predicate,
            faults=tuple(self.faults),
            metrics=tuple(self.metrics),
            nominal=PerformanceValue(self.nominal),
            rules=tuple(self.rules),
            composition=composition,
            children=tuple(c.build() for c in self.children),
        )


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.spans: dict = {}
        self.scenario: Optional[ScenarioSpec] = None

    def span(self, key: str, tokens: list) -> None:
        first, last = tokens[0], tokens[-1]
        self.spans.setdefault(key, Span(first.line, first.col, last.line, last.col + len(last.text)))

    def parse(self) -> tuple:
        root: Optional[_Builder] = None
        stack: list = []
        section: Optional[str] = None
        scenario: Optional[dict] = None
        scenario_kind = ""
        scenario_seen = False

        lines = self.text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
        for lineno, raw in enumerate(lines, start=1):
            tokens = _tokenize_line(raw, lineno)
            if not tokens:
                continue
            cur = _Cursor(tokens, lineno)
            head = tokens[0]
            word = head.text if head.kind == "ident" else None

            if scenario is not None:
                if word == "end":
                    cur.next()
                    cur.done()
                    self.scenario = ScenarioSpec(scenario_kind, scenario)
                    scenario = None
                    continue
                key = cur.ident("scenario key")
                cur.expect("=")
                value = _parse_value(cur, allow_words=True)
                cur.done()
                if key.text in scenario:
                    raise ModelSyntaxError(f"scenario key {key.text!r} given twice", key.line, key.col)
                scenario[key.text] = value
                self.span(f"scenario/{key.text}", tokens)
                continue

            if word == "component":
                cur.next()
                name = cur.ident("component name")
                cur.done()
                if len(stack) >= MAX_DEPTH:
                    raise ModelSyntaxError("components nested too deeply", head.line, head.col)
                if stack:
                    parent = stack[-1]
                    b = _Builder(name.text, f"{parent.path}.{name.text}", lineno)
                    parent.children.append(b)
                else:
                    if root is not None:
                        raise ModelSyntaxError("more than one root component", head.line, head.col)
                    b = _Builder(name.text, name.text, lineno)
                    root = b
                self.span(b.path, tokens)
                stack.append(b)
                section = None
                continue
            if word == "end":
                cur.next()
                cur.done()
                if not stack:
                    raise ModelSyntaxError("'end' without open block", head.line, head.col)
                stack.pop()
                section = None
                continue
            if word == "scenario":
                cur.next()
                kind = cur.ident("scenario kind")
                cur.done()
                if stack:
                    raise ModelSyntaxError("scenario block inside a component", head.line, head.col)
                if scenario_seen:
                    raise ModelSyntaxError("more than one scenario block", head.line, head.col)
                scenario_seen = True
                scenario, scenario_kind = {}, kind.text
                self.span("scenario", tokens)
                continue
            if not stack:
                raise ModelSyntaxError(f"expected 'component', found {head.text!r}", head.line, head.col)

            comp = stack[-1]
            if word in INLINE:
                cur.next()
                if word in comp.seen_inline:
                    raise ModelSyntaxError(f"{word} given twice", head.line, head.col)
                comp.seen_inline.add(word)
                if word == "description":
                    comp.description = cur.string()
                else:
                    comp.functionality = cur.string()
                    if cur.accept("predicate"):
                        comp.predicate = cur.ident("predicate name").text
                cur.done()
                continue
            if word in SECTIONS:
                cur.next()
                cur.done()
                section = word
                if word == "compose":
                    comp.has_compose = True
                continue
            if section is None:
                raise ModelSyntaxError(f"entry {head.text!r} outside any section", head.line, head.col)
            getattr(self, "_" + section.replace("-", "_"))(comp, cur, tokens)

        if scenario is not None:
            raise ModelSyntaxError("scenario block not closed with 'end'", len(lines), 1)
        if stack:
            b = stack[-1]
            raise ModelSyntaxError(f"component {b.name!r} not closed with 'end'", b.line, 1)
        return root, self.scenario

    # section entry parsers --------------------------------------------------

    def _faults(self, comp: _Builder, cur: _Cursor, tokens: list) -> None:
        fid = cur.ident("fault id")
        if fid.text in KEYWORDS:
            raise ModelSyntaxError(f"reserved word {fid.text!r} used as fault id", fid.line, fid.col)
        desc = cur.string() if not cur.at_end() else ""
        cur.done()
        comp.faults.append(FaultId(fid.text, desc))
        self.span(f"{comp.path}/fault:{fid.text}", tokens)

    def _metrics(self, comp: _Builder, cur: _Cursor, tokens: list) -> None:
        name = cur.ident("metric name")
        if name.text in KEYWORDS:
            raise ModelSyntaxError(f"reserved word {name.text!r} used as metric name", name.line, name.col)
        cur.expect(":")
        kind_tok = cur.ident("metric kind")
        length = None
        if kind_tok.text == "vector":
            cur.expect("[")
            length = cur.integer()
            cur.expect("]")
        elif kind_tok.text not in ("scalar", "interval", "set"):
            raise ModelSyntaxError(f"unknown metric kind {kind_tok.text!r}", kind_tok.line, kind_tok.col)
        kind = MetricKind(kind_tok.text)
        unit, tol, direction = "", 0.0, None
        while not cur.at_end():
            opt = cur.ident("metric option")
            if opt.text == "unit":
                unit = cur.string()
            elif opt.text == "tol":
                tol = cur.number()
            elif opt.text == "direction":
                direction = cur.ident("direction").text
                if direction not in ("higher-is-better", "containment"):
                    raise ModelSyntaxError(f"unknown direction {direction!r}", opt.line, opt.col)
            else:
                raise ModelSyntaxError(f"unknown metric option {opt.text!r}", opt.line, opt.col)
        comp.metrics.append(MetricSpec(name.text, kind, unit, direction, length, tol))
        self.span(f"{comp.path}/metric:{name.text}", tokens)

    def _nominal(self, comp: _Builder, cur: _Cursor, tokens: list) -> None:
        name = cur.ident("metric name")
        cur.expect("=")
        value = _parse_value(cur)
        cur.done()
        if name.text in comp.nominal:
            raise ModelSyntaxError(f"nominal value of {name.text!r} given twice", name.line, name.col)
        comp.nominal[name.text] = value
        self.span(f"{comp.path}/nominal:{name.text}", tokens)

    def _on_fault(self, comp: _Builder, cur: _Cursor, tokens: list) -> None:
        kw = cur.ident("match kind")
        if kw.text in ("exact", "superset"):
            match = Match(MatchKind(kw.text), _parse_id_set(cur))
        elif kw.text in ("at-most", "exactly"):
            match = Match(MatchKind(kw.text), count=cur.integer())
        elif kw.text == "any":
            match = Match(MatchKind.ANY)
        else:
            raise ModelSyntaxError(f"unknown match kind {kw.text!r}", kw.line, kw.col)
        cur.expect("->")
        safe, functional, perf, note = _parse_outcome(cur)
        self.span(f"{comp.path}/rule:{len(comp.rules)}", tokens)
        comp.rules.append(EffectRule(match, safe, functional, perf, note))

    def _compose(self, comp: _Builder, cur: _Cursor, tokens: list) -> None:
        head = cur.peek()
        if head.text == "(":
            cur.next()
            cells = [self._cell(cur)]
            while cur.accept(","):
                cells.append(self._cell(cur))
            cur.expect(")")
            cur.expect("->")
            safe, functional, perf, note = _parse_outcome(cur)
            if note:
                raise ModelSyntaxError("table rows take no 'because' note", head.line, head.col)
            self.span(f"{comp.path}/table:{len(comp.table)}", tokens)
            comp.table.append(TableRow(tuple(cells), safe, functional, perf))
            return
        name = cur.ident("metric name or 'operability'")
        cur.expect("=")
        if name.text == "operability":
            if comp.combiner is not None:
                raise ModelSyntaxError("operability given twice", name.line, name.col)
            kind = cur.ident("operability combiner")
            if kind.text == "custom-table":
                cur.expect("(")
                cols = [cur.ident("child path").text]
                while cur.accept(","):
                    cols.append(cur.ident("child path").text)
                cur.expect(")")
                comp.table_children = tuple(cols)
            elif kind.text not in ("min-of-children", "declared-by-effect-rules"):
                raise ModelSyntaxError(f"unknown operability combiner {kind.text!r}", kind.line, kind.col)
            cur.done()
            comp.combiner = kind.text
            self.span(f"{comp.path}/operability", tokens)
            return
        kernel = cur.ident("kernel")
        if kernel.text not in KERNEL_NAMES:
            raise ModelSyntaxError(f"unknown kernel {kernel.text!r}", kernel.line, kernel.col)
        cur.expect("(")
        sources = [self._ref(cur)]
        while cur.accept(","):
            sources.append(self._ref(cur))
        cur.expect(")")
        cur.done()
        self.span(f"{comp.path}/bind:{name.text}", tokens)
        comp.bindings.append(Binding(name.text, KERNEL_NAMES[kernel.text], tuple(sources)))

    @staticmethod
    def _cell(cur: _Cursor):
        if cur.accept("*"):
            return None
        tok = cur.peek()
        value = cur.integer()
        if value not in (1, 0, -1):
            raise ModelSyntaxError(f"table cell must be 1, 0, -1 or *, found {tok.text!r}", tok.line, tok.col)
        return value

    @staticmethod
    def _ref(cur: _Cursor) -> tuple:
        tok = cur.ident("child.metric reference")
        if "." not in tok.text:
            raise ModelSyntaxError(f"expected child.metric, found {tok.text!r}", tok.line, tok.col)
        child, metric = tok.text.rsplit(".", 1)
        if not child or not metric:
            raise ModelSyntaxError(f"malformed reference {tok.text!r}", tok.line, tok.col)
        return child, metric


def parse_model(text: Union[str, bytes]) -> ModelDocument:
    """Parse model text; return a document holding a valid model or diagnostics."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            return ModelDocument("", None, {}, (
                Diagnostic("encoding", f"input is not valid UTF-8: {exc.reason}", line=1, col=1),))
    if text.startswith("\ufeff"):
        text = text[1:]
    parser = _Parser(text)
    try:
        root, scenario = parser.parse()
        if root is None:
            return ModelDocument(text, None, parser.spans, (
                Diagnostic("no-root", "no root component", line=1, col=1),))
        model = SystemModel(root.build(), scenario)
    except ModelSyntaxError as exc:
        return ModelDocument(text, None, parser.spans, (
            Diagnostic("syntax-error", exc.message, line=exc.line, col=exc.col),))
    except (ModelError, ValueError, TypeError) as exc:
        return ModelDocument(text, None, parser.spans, (Diagnostic("semantic-error", str(exc), line=1, col=1),))

    diags = []
    for d in validate_model(model):
        doc_span = parser.spans.get(d.element) or parser.spans.get(d.path)
        if doc_span is not None:
            d = Diagnostic(d.code, d.message, d.path, d.rule_index, d.element, doc_span.line, doc_span.col)
        diags.append(d)
    if diags:
        return ModelDocument(text, None, parser.spans, tuple(diags))
    return ModelDocument(text, model, parser.spans, ())


def loads_model(text: Union[str, bytes]) -> SystemModel:
    """Parse model text, raising :class:`ModelParseError` on any diagnostic."""
    doc = parse_model(text)
    if not doc.ok:
        raise ModelParseError(doc.diagnostics)
    return doc.model


def load_model(path) -> SystemModel:
    with open(path, "rb") as fh:
        return loads_model(fh.read())


# -------------------------------------------------------------- serialization


def format_number(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_value(value) -> str:
    if isinstance(value, Interval):
        return f"[{format_number(value.lo)}, {format_number(value.hi)}]"
    if isinstance(value, frozenset):
        return "{" + ", ".join(sorted(value)) + "}"
    if isinstance(value, tuple):
        return "(" + ", ".join(format_number(v) for v in value) + ")"
    if isinstance(value, str):
        return value if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.]*", value) and value not in KEYWORDS else quote(value)
    return format_number(value)


def _format_perf(perf: PerformanceValue) -> str:
    return "; ".join(f"{k} = {format_value(v)}" for k, v in perf.entries)


def _format_outcome(safe: bool, functional: bool, perf: Optional[PerformanceValue], note: str = "") -> str:
    if safe:
        out = "safe " + ("functional" if functional else "nonfunctional")
        out += " " + (_format_perf(perf) if perf else "nominal")
    else:
        out = "unsafe" + (" " + _format_perf(perf) if perf else "")
    if note:
        out += " because " + quote(note)
    return out


def _format_match(m: Match) -> str:
    if m.kind in (MatchKind.EXACT, MatchKind.SUPERSET):
        return f"{m.kind.value} {{{', '.join(sorted(m.faults))}}}"
    if m.kind is MatchKind.ANY:
        return "any"
    return f"{m.kind.value} {m.count}"


def _emit(comp: Component, depth: int, out: list) -> None:
    pad = "  " * depth
    inner = pad + "  "
    item = inner + "  "
    out.append(f"{pad}component {comp.name}")
    if comp.description:
        out.append(f"{inner}description {quote(comp.description)}")
    if comp.functionality or comp.predicate:
        line = f"{inner}functionality {quote(comp.functionality)}"
        if comp.predicate:
            line += f" predicate {comp.predicate}"
        out.append(line)
    if comp.faults:
        out.append(f"{inner}faults")
        for f in comp.faults:
            out.append(f"{item}{f.id}" + (f" {quote(f.description)}" if f.description else ""))
    if comp.metrics:
        out.append(f"{inner}metrics")
        for m in comp.metrics:
            kind = f"vector[{m.length}]" if m.kind is MetricKind.VECTOR else m.kind.value
            line = f"{item}{m.name}: {kind}"
            if m.unit:
                line += f" unit {quote(m.unit)}"
            if m.tol:
                line += f" tol {format_number(m.tol)}"
            if m.direction is not DEFAULT_DIRECTION[m.kind]:
                line += f" direction {m.direction.value}"
            out.append(line)
    if comp.nominal.entries:
        out.append(f"{inner}nominal")
        for k, v in comp.nominal.entries:
            out.append(f"{item}{k} = {format_value(v)}")
    if comp.rules:
        out.append(f"{inner}on-fault")
        for r in comp.rules:
            out.append(f"{item}{_format_match(r.match)} -> "
                       f"{_format_outcome(r.safe, r.functional, r.performance, r.note)}")
    rule = comp.composition
    if rule is not None:
        out.append(f"{inner}compose")
        for b in rule.bindings:
            refs = ", ".join(f"{c}.{m}" for c, m in b.sources)
            out.append(f"{item}{b.metric} = {b.kernel.value}({refs})")
        if rule.combiner is Combiner.TABLE:
            out.append(f"{item}operability = custom-table({', '.join(rule.table_children)})")
        else:
            out.append(f"{item}operability = {rule.combiner.value}")
        for row in rule.table:
            cells = ", ".join("*" if p is None else str(p) for p in row.pattern)
            out.append(f"{item}({cells}) -> {_format_outcome(row.safe, row.functional, row.performance)}")
    for child in comp.children:
        _emit(child, depth + 1, out)
    out.append(f"{pad}end")


def serialize_model(model: SystemModel) -> str:
    """Canonical text of ``model``; a fixed point of parse then serialize."""
    out: list = []
    _emit(model.root, 0, out)
    if model.scenario is not None:
        out.append("")
        out.append(f"scenario {model.scenario.kind}")
        for k, v in model.scenario.params:
            out.append(f"  {k} = {format_value(v)}")
        out.append("end")
    return "\n".join(out) + "\n"
