"""Acceptance criteria, one marked group per criterion.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

from __future__ import annotations

import itertools
import json
import random
import subprocess
import sys
import time

import pytest

from ftregime.classifier import (
    classify,
    classify_by_definition,
    enumerate_regimes,
    evaluate_operability,
    iter_combinations,
    minimal_unsafe_cut_sets,
)
from ftregime.dsl import loads_model, parse_model, serialize_model
from ftregime.model import FaultCombination, Regime
from ftregime.simkit import crosscheck, simulate

from conftest import DATA
from modelgen import random_model

N_RANDOM_MODELS = 1000
N_ROUND_TRIPS = 500
N_FUZZ = 100_000


def criterion(n, title):
    return pytest.mark.criterion(n, title)


def _timed(fn):
    t0 = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - t0


# --------------------------------------------------------------- criterion 1

C1 = criterion(1, "steer-by-wire reproduction")


@C1
def test_c1_motor_a_is_fail_safe(sbw_text):
    def run():
        model = loads_model(sbw_text)
        return classify(model, "MotorA", "fA"), evaluate_operability(model, "MotorA", "fA")
    (v, op), elapsed = _timed(run)
    assert v.regime is Regime.FAIL_SAFE
    assert op.value == 0
    assert elapsed < 1.0


@C1
def test_c1_system_fail_operational_when_motor_b_covers_nominal(sbw_text):
    def run():
        model = loads_model(sbw_text)
        b = model.component("SbW.MotorB").nominal["torque"]
        need = model.root.nominal["torque"]
        assert b.lo <= need.lo and need.hi <= b.hi
        return classify(model, "SbW", "fA")
    v, elapsed = _timed(run)
    assert v.regime is Regime.FAIL_OPERATIONAL
    assert elapsed < 1.0


@C1
def test_c1_system_fail_degraded_when_motor_b_falls_short(sbw_text):
    variant = sbw_text.replace("torque = [-60, 60]", "torque = [-40, 40]")
    assert variant != sbw_text

    def run():
        return classify(loads_model(variant), "SbW", "fA")
    v, elapsed = _timed(run)
    assert v.regime is Regime.FAIL_DEGRADED
    assert v.operability.safe_state and v.operability.functional
    assert elapsed < 1.0


# --------------------------------------------------------------- criterion 2

C2 = criterion(2, "automated driving system reproduction")

ADS_SCRIPT = [
    ("fPerc", Regime.FAIL_OPERATIONAL),
    ("fMap", Regime.FAIL_DEGRADED),
    ("fPlan", Regime.FAIL_DEGRADED),
    ("fLoc", Regime.FAIL_SAFE),
    ("fNADF", Regime.FAIL_SAFE),
]


@C2
@pytest.mark.parametrize("faults,expected", ADS_SCRIPT)
def test_c2_scripted_combinations(faults, expected):
    def run():
        model = loads_model((DATA / "ads.ftm").read_bytes())
        return model, classify(model, "ADS", faults)
    (model, v), elapsed = _timed(run)
    assert v.regime is expected
    assert elapsed < 1.0
    if expected is Regime.FAIL_OPERATIONAL:
        # full mission set and quality preserved
        assert v.performance_comparison.value == "at-least-nominal"


@C2
def test_c2_degraded_means_partial_missions_or_lower_quality(ads):
    from ftregime.classifier import available_performance
    nominal = ads.root.nominal
    for faults in ("fMap", "fPlan"):
        p = available_performance(ads, "ADS", faults)
        partial = frozenset() != p["missions"] < nominal["missions"]
        lower = any(a < n for a, n in zip(p["quality"], nominal["quality"]))
        assert partial or lower


@C2
def test_c2_two_fail_safe_paths_differ(ads):
    # minimal risk maneuver by the driving function itself
    assert evaluate_operability(ads, "NADF", "fLoc").value == 0
    from ftregime.classifier import available_performance
    assert available_performance(ads, "NADF", "fLoc")["missions"] == frozenset()
    # driving function unsafe, Safe Halt keeps the vehicle safe
    assert evaluate_operability(ads, "NADF", "fNADF").value == -1
    assert evaluate_operability(ads, "ADS", "fNADF").value == 0


# --------------------------------------------------------- criteria 3 and 4

C3 = criterion(3, "decision tree equals set definitions")
C4 = criterion(4, "regimes partition the combinations")


def _corpus():
    yield "sbw", loads_model((DATA / "sbw.ftm").read_bytes())
    yield "ads", loads_model((DATA / "ads.ftm").read_bytes())
    for seed in range(N_RANDOM_MODELS):
        yield f"random-{seed}", random_model(seed, max_faults=4)


def _all_targets(model):
    for path in model.components():
        yield path, len(model.scope(path))


@pytest.fixture(scope="module")
def corpus():
    return list(_corpus())


@C3
def test_c3_equivalence(corpus):
    t0 = time.perf_counter()
    checked = mismatches = 0
    for name, model in corpus:
        if name.startswith("random"):
            assert len(model.fault_universe) <= 4
        for mode in ("strict", "conservative"):
            for path, n in _all_targets(model):
                rep = enumerate_regimes(model, path, n, mode)
                for v in rep.verdicts:
                    ref = classify_by_definition(model, path, v.combination, mode)
                    checked += 1
                    if ref.regime is not v.regime or ref.criteria_trace != v.criteria_trace:
                        mismatches += 1
    elapsed = time.perf_counter() - t0
    print(f"\n  equivalence: {checked} verdicts, {mismatches} mismatches, {elapsed:.1f}s")
    assert mismatches == 0
    assert elapsed < 60.0
    assert sum(1 for n, _ in corpus if n.startswith("random")) >= 1000


@C4
def test_c4_partition(corpus):
    violations = 0
    for _, model in corpus:
        for mode in ("strict", "conservative"):
            for path, n in _all_targets(model):
                rep = enumerate_regimes(model, path, n, mode)
                sets = rep.regime_sets
                everything = set(rep.combinations)
                members = [set(s) for s in sets.values()]
                if set().union(*members) != everything:
                    violations += 1
                for a, b in itertools.combinations(members, 2):
                    if a & b:
                        violations += 1
                if len(everything) != 2 ** n:
                    violations += 1
    assert violations == 0


# --------------------------------------------------------------- criterion 5

C5 = criterion(5, "arbitrary concurrent faults")


def _brute_force_cut_sets(model, target):
    universe = sorted(model.scope(model.resolve_target(target)))
    unsafe = []
    for r in range(len(universe) + 1):
        for members in itertools.combinations(universe, r):
            if classify_by_definition(model, target, FaultCombination(members)).regime is Regime.FAIL_UNSAFE:
                unsafe.append(frozenset(members))
    return sorted((u for u in unsafe if not any(o < u for o in unsafe)), key=lambda s: (len(s), sorted(s)))


@C5
def test_c5_full_enumeration_and_cut_sets(sbw):
    k = len(sbw.fault_universe)
    rep = enumerate_regimes(sbw, "SbW", k)
    assert len(rep.verdicts) == 2 ** k
    assert all(v.regime is not Regime.UNKNOWN for v in rep.verdicts)
    assert rep.verdict("fA+fB").regime is Regime.FAIL_UNSAFE
    cuts = minimal_unsafe_cut_sets(rep)
    assert [c.members for c in cuts] == [frozenset({"fA", "fB"})]
    assert [c.members for c in cuts] == _brute_force_cut_sets(sbw, "SbW")


# --------------------------------------------------------------- criterion 6

C6 = criterion(6, "simulation cross-check")


@C6
def test_c6_bundled_models_agree_with_simulation(sbw, ads):
    t0 = time.perf_counter()
    results = []
    for model in (sbw, ads):
        target = model.root.name
        for combo in iter_combinations(model.fault_universe, 2):
            results.append(crosscheck(model, target, combo, simulate(model, target, combo)))
    bad = [(r.target, r.combination.label, r.mismatches) for r in results if not r.match]
    assert bad == []
    assert len(results) == 7 + 29
    assert time.perf_counter() - t0 < 30.0


@C6
def test_c6_reduced_motor_b_agrees_on_degraded(sbw_text):
    model = loads_model(sbw_text.replace("torque = [-60, 60]", "torque = [-40, 40]"))
    r = crosscheck(model, "SbW", "fA", simulate(model, "SbW", "fA"))
    assert r.match and r.predicted is r.observed is Regime.FAIL_DEGRADED


@C6
def test_c6_corrupted_fixture_is_flagged(sbw_text):
    # the model still claims motor B's full range, the plant saturates lower
    corrupted = loads_model(sbw_text.replace("trace_every = 10", "trace_every = 10\n  limit.MotorB = [-40, 40]"))
    r = crosscheck(corrupted, "SbW", "fA", simulate(corrupted, "SbW", "fA"))
    assert not r.match
    assert r.mismatches == ("performance",)


# --------------------------------------------------------------- criterion 7

C7 = criterion(7, "model format round trip and parser robustness")


@C7
@pytest.mark.parametrize("name", ["sbw", "ads"])
def test_c7_bundled_round_trip(name):
    model = loads_model((DATA / f"{name}.ftm").read_bytes())
    text = serialize_model(model)
    assert loads_model(text) == model
    assert serialize_model(loads_model(text)) == text


@C7
def test_c7_random_round_trips():
    for seed in range(N_ROUND_TRIPS):
        model = random_model(10_000 + seed)
        text = serialize_model(model)
        again = loads_model(text)
        assert again == model, seed
        assert serialize_model(again) == text, seed


@C7
def test_c7_fuzz_does_not_crash():
    rng = random.Random(20240501)
    seed_text = (DATA / "sbw.ftm").read_bytes() + (DATA / "ads.ftm").read_bytes()
    printable = b"{}[](),;=:*-> \n\"+fAB01.component end"
    for i in range(N_FUZZ):
        kind = i % 3
        if kind == 0:
            data = rng.randbytes(rng.randint(0, 96))
        else:
            buf = bytearray(seed_text[: rng.randint(0, len(seed_text))])
            for _ in range(rng.randint(1, 6)):
                if not buf:
                    break
                pos = rng.randrange(len(buf))
                buf[pos] = rng.choice(printable) if kind == 1 else rng.randrange(256)
            data = bytes(buf)
        doc = parse_model(data)
        assert doc.ok or doc.diagnostics


# --------------------------------------------------------------- criterion 8

C8 = criterion(8, "one model file, different regimes per level")


@C8
def test_c8_cli_pair():
    model = str(DATA / "sbw.ftm")

    def cli(target):
        proc = subprocess.run(
            [sys.executable, "-m", "ftregime", "classify", model, "--target", target, "--faults", "fA"],
            capture_output=True, text=True, check=False)
        assert proc.returncode == 0, proc.stderr
        return json.loads(proc.stdout)["regime"]

    motor, system = cli("MotorA"), cli("SbW")
    assert (motor, system) == ("fail-safe", "fail-operational")
