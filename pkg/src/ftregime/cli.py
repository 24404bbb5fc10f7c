"""Command-line interface.

Exit codes: 0 success, 1 diagnostics or unreadable input, 2 fail-unsafe
found or simulation mismatch, 3 usage error (including unknown targets or
fault ids).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources
from typing import Optional, Sequence

from . import __version__
from .classifier import BudgetExceeded, DEFAULT_BUDGET, Mode, classify, enumerate_regimes
from .dsl import format_diagnostic, format_value, parse_model
from .model import FaultCombination, ModelError, Regime, UnknownFault, UnknownTarget
from .report import FORMATS, ReportError, build_bundle, load_bundle, model_digest, render

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_GATE, EXIT_USAGE = 0, 1, 2, 3
JOBS_ENV = "FTREGIME_JOBS"
BUNDLED = ("sbw", "ads")

log = logging.getLogger("ftregime")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def bundled_model_path(name: str):
    return resources.files("ftregime") / "data" / f"{name}.ftm"


def _read_model(path: str):
    if path.startswith("@"):
        name = path[1:]
        if name not in BUNDLED:
            raise UsageError(f"no bundled model {name!r}; choose from {', '.join('@' + b for b in BUNDLED)}")
        data = bundled_model_path(name).read_bytes()
    else:
        try:
            with open(path, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    doc = parse_model(data)
    for d in doc.diagnostics:
        print(f"{path}:{format_diagnostic(d)}", file=sys.stderr)
    if not doc.ok:
        raise InputError(f"{path}: {len(doc.diagnostics)} diagnostic(s)")
    return doc.model


def _emit(data: bytes, output: Optional[str]) -> None:
    if output and output != "-":
        with open(output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _json(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _verdict_dict(v) -> dict:
    op = v.operability
    return {
        "target": v.target,
        "combination": v.combination.label,
        "regime": v.regime.value,
        "criteria_trace": dict(zip(("fault_present", "safe_state", "functional",
                                    "performance_at_least_nominal"), v.criteria_trace)),
        "performance_comparison": v.performance_comparison.value,
        "operability": None if op is None else op.value,
        "evidence": v.evidence,
    }


def _combination(text: str) -> FaultCombination:
    try:
        return FaultCombination.parse(text)
    except ModelError as exc:
        raise UsageError(str(exc)) from None


# ----------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    _read_model(args.model)
    print(f"{args.model}: ok", file=sys.stderr)
    return EXIT_OK


def cmd_classify(args) -> int:
    model = _read_model(args.model)
    v = classify(model, args.target, _combination(args.faults), args.mode)
    print(f"{v.target} under {v.combination.label}: {v.regime.value} ({v.evidence})", file=sys.stderr)
    _emit(_json(_verdict_dict(v)), args.output)
    return EXIT_GATE if v.regime is Regime.FAIL_UNSAFE else EXIT_OK


def _enumerate_all(model, args):
    targets = args.target or [model.root.name]
    return [enumerate_regimes(model, t, args.k, args.mode, args.budget, args.jobs) for t in targets]


def _crosschecks(model, reports, mode):
    from .simkit import SimulationError, crosscheck, simulate
    out = []
    for rep in reports:
        for c in rep.combinations:
            try:
                outcome = simulate(model, rep.target, c, mode)
            except SimulationError as exc:
                log.info("no simulation for %s under %s: %s", rep.target, c.label, exc)
                continue
            out.append(crosscheck(model, rep.target, c, outcome, mode))
    return out


def cmd_enumerate(args) -> int:
    model = _read_model(args.model)
    reports = _enumerate_all(model, args)
    xs = _crosschecks(model, reports, args.mode) if args.crosscheck else ()
    bundle = build_bundle(model, reports, xs)
    _emit(render(bundle, args.format), args.output)
    for target, cuts in bundle.cut_sets:
        if cuts:
            print(f"{target}: fail-unsafe cut sets {', '.join(cuts)}", file=sys.stderr)
    for c in bundle.crosschecks:
        if not c.match:
            print(f"{c.target} under {c.combination}: simulation disagrees on {', '.join(c.mismatches)}",
                  file=sys.stderr)
    return EXIT_GATE if bundle.has_unsafe or bundle.has_mismatch else EXIT_OK


def cmd_simulate(args) -> int:
    from .simkit import SimulationError, crosscheck, simulate
    model = _read_model(args.model)
    combo = _combination(args.faults)
    target = args.target or model.root.name
    try:
        outcome = simulate(model, target, combo, args.mode)
    except SimulationError as exc:
        raise InputError(str(exc)) from None
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(outcome.trace_lines())
    result = crosscheck(model, target, combo, outcome, args.mode)
    doc = {
        "target": result.target,
        "combination": result.combination.label,
        "functionality_observed": outcome.functionality_observed,
        "safe_state_observed": outcome.safe_state_observed,
        "final_state": outcome.final_state,
        "measured_performance": {k: format_value(v) for k, v in outcome.measured_performance.as_dict().items()},
        "predicted": result.predicted.value,
        "observed": result.observed.value,
        "mismatches": list(result.mismatches),
        "match": result.match,
    }
    _emit(_json(doc), args.output)
    if not result.match:
        print(f"mismatch on {', '.join(result.mismatches)}", file=sys.stderr)
        return EXIT_GATE
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        with open(args.bundle, "rb") as fh:
            bundle = load_bundle(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {args.bundle}: {exc.strerror or exc}") from None
    except ReportError as exc:
        raise InputError(f"{args.bundle}: {exc}") from None
    if args.model:
        digest = model_digest(_read_model(args.model))
        if digest != bundle.model_digest:
            raise InputError(f"digest mismatch: report has {bundle.model_digest}, model is {digest}")
    _emit(render(bundle, args.format), args.output)
    return EXIT_GATE if bundle.has_unsafe or bundle.has_mismatch else EXIT_OK


# ------------------------------------------------------------------ parsing


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _cardinality(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ftregime", description="Classify fault-tolerance regimes of hierarchical system models.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="JSON file with default option values")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def model_arg(sp):
        sp.add_argument("model", help="model file, or @sbw / @ads for a bundled model")

    def mode_arg(sp):
        sp.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.STRICT.value,
                        help="treatment of fault combinations no rule covers (default: strict)")

    sp = sub.add_parser("validate", help="parse and validate a model")
    model_arg(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("classify", help="classify one fault combination")
    model_arg(sp)
    sp.add_argument("--target", required=True)
    sp.add_argument("--faults", required=True, help='combination such as "fA+fB"; "" for none')
    mode_arg(sp)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("enumerate", help="classify all combinations up to k faults")
    model_arg(sp)
    sp.add_argument("--target", action="append", help="repeatable; default is the root")
    sp.add_argument("-k", type=_cardinality, default=1)
    mode_arg(sp)
    sp.add_argument("--format", choices=FORMATS, default="json")
    sp.add_argument("-o", "--output")
    sp.add_argument("--jobs", type=_positive_int, default=_default_jobs())
    sp.add_argument("--budget", type=_positive_int, default=DEFAULT_BUDGET)
    sp.add_argument("--crosscheck", action="store_true",
                    help="also simulate every combination and compare")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("simulate", help="simulate one combination and cross-check it")
    model_arg(sp)
    sp.add_argument("--target")
    sp.add_argument("--faults", default="")
    mode_arg(sp)
    sp.add_argument("--trace", help="write the event trace as JSON lines")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("report", help="re-render a json report")
    sp.add_argument("bundle")
    sp.add_argument("--model", help="check the report digest against this model")
    sp.add_argument("--format", choices=FORMATS, default="markdown")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_report)
    return p


def _load_config(argv: Sequence[str]) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        with open(known.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"bad config {known.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        cfg = _load_config(argv)
    except UsageError as exc:
        print(f"ftregime: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg:
        for action in parser._subparsers._group_actions:
            for sp in action.choices.values():
                sp.set_defaults(**{k: v for k, v in cfg.items() if k not in ("func", "command")})
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, UnknownTarget, UnknownFault, BudgetExceeded) as exc:
        print(f"ftregime: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, ReportError) as exc:
        print(f"ftregime: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except ModelError as exc:
        print(f"ftregime: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS


if __name__ == "__main__":
    sys.exit(main())
