from __future__ import annotations

import numpy as np
import pytest
from sklearn.base import clone

from ftregime.estimator import RegimeClassifier, check_combinations
from ftregime.model import UnknownFault

from conftest import DATA


def test_predict_labels(sbw):
    est = RegimeClassifier(target="SbW").fit(sbw)
    assert list(est.predict(["fA", "fB", "fA+fB", ""])) == [
        "fail-operational", "fail-degraded", "fail-unsafe", "operational"]
    assert list(est.predict_operability(["fA", "fA+fB"])) == [1, -1]


def test_fit_accepts_paths_and_text(sbw_text):
    a = RegimeClassifier(target="MotorA").fit(DATA / "sbw.ftm")
    b = RegimeClassifier(target="MotorA").fit(sbw_text)
    assert a.predict(["fA"])[0] == b.predict(["fA"])[0] == "fail-safe"
    assert a.fault_universe_ == ("fA",)


def test_indicator_matrix(sbw):
    est = RegimeClassifier().fit(sbw)
    X = np.array([[1, 0, 0], [1, 1, 0]])  # columns fA, fB, fECU
    assert list(est.predict(X)) == ["fail-operational", "fail-unsafe"]
    assert est.transform(X).shape == (2, 4)


def test_params_and_clone():
    est = RegimeClassifier(target="SbW", mode="conservative", max_cardinality=2)
    assert est.get_params()["mode"] == "conservative"
    assert clone(est).get_params() == est.get_params()


def test_validation(sbw):
    with pytest.raises(UnknownFault):
        check_combinations(["fZ"], sbw.fault_universe)
    with pytest.raises(TypeError):
        check_combinations("fA", sbw.fault_universe)
    with pytest.raises(ValueError):
        check_combinations(np.array([[2, 0, 0]]), sbw.fault_universe)
    with pytest.raises(Exception):
        RegimeClassifier().predict(["fA"])


def test_enumerate_uses_params(sbw):
    rep = RegimeClassifier(target="SbW", max_cardinality=3).fit(sbw).enumerate()
    assert len(rep.verdicts) == 8
