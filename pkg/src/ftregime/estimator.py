"""Estimator-style wrapper around the classifier.

``fit`` binds a system model and a target; ``predict`` maps fault
combinations to regime labels.  Nothing is learned from data.
"""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .classifier import Evaluator, Mode, classify, enumerate_regimes
from .dsl import load_model, loads_model
from .model import FaultCombination, SystemModel, UnknownFault

CRITERIA_COLUMNS = ("fault_present", "safe_state", "functional", "performance_at_least_nominal")
_CODE = {"yes": 1, "no": 0, "-": -1, "?": -2}


def check_combinations(X, universe: Iterable[str]) -> list:
    """Normalize ``X`` to a list of fault combinations.

    Accepts labels such as ``"fA+fB"``, iterables of fault ids, or a 0/1
    indicator matrix whose columns follow the sorted fault universe.
    """
    universe = tuple(sorted(universe))
    if isinstance(X, (str, FaultCombination)):
        raise TypeError("expected a sequence of combinations, got a single combination")
    if isinstance(X, np.ndarray) and X.ndim == 2:
        if X.shape[1] != len(universe):
            raise ValueError(f"indicator matrix has {X.shape[1]} columns, fault universe has {len(universe)}")
        if not np.isin(X, (0, 1)).all():
            raise ValueError("indicator matrix must be 0/1")
        return [FaultCombination(f for f, bit in zip(universe, row) if bit) for row in X]
    out = []
    known = set(universe)
    for item in X:
        combo = item if isinstance(item, FaultCombination) else (
            FaultCombination.parse(item) if isinstance(item, str) else FaultCombination(item))
        unknown = set(combo.members) - known
        if unknown:
            raise UnknownFault(f"unknown fault ids: {', '.join(sorted(unknown))}")
        out.append(combo)
    return out


class RegimeClassifier(BaseEstimator):
    def __init__(self, target: Optional[str] = None, mode: str = "strict", max_cardinality: int = 1,
                 n_jobs: int = 1):
        self.target = target
        self.mode = mode
        self.max_cardinality = max_cardinality
        self.n_jobs = n_jobs

    def fit(self, model, y=None):
        """Bind a ``SystemModel``, model text, or path to a model file."""
        if isinstance(model, SystemModel):
            self.model_ = model
        elif isinstance(model, str) and "\n" in model:
            self.model_ = loads_model(model)
        else:
            self.model_ = load_model(model)
        Mode(self.mode)
        self.target_ = self.model_.resolve_target(self.target or self.model_.root.name)
        self.fault_universe_ = tuple(sorted(self.model_.scope(self.target_)))
        self._evaluator = Evaluator(self.model_, self.mode)
        return self

    def _verdicts(self, X):
        check_is_fitted(self, "model_")
        combos = check_combinations(X, self.model_.fault_universe)
        return [classify(self.model_, self.target_, c, self.mode, self._evaluator) for c in combos]

    def predict(self, X) -> np.ndarray:
        return np.array([v.regime.value for v in self._verdicts(X)], dtype=object)

    def predict_operability(self, X) -> np.ndarray:
        """o(f) per combination; unknown verdicts give 2 (outside {1, 0, -1})."""
        return np.array([2 if v.operability is None else v.operability.value
                         for v in self._verdicts(X)], dtype=int)

    def transform(self, X) -> np.ndarray:
        """Criteria matrix: yes=1, no=0, not reached=-1, undecided=-2."""
        rows = [[_CODE[c] for c in v.criteria_trace] for v in self._verdicts(X)]
        return np.array(rows, dtype=int).reshape(-1, len(CRITERIA_COLUMNS))

    def enumerate(self):
        check_is_fitted(self, "model_")
        return enumerate_regimes(self.model_, self.target_, self.max_cardinality, self.mode,
                                 jobs=self.n_jobs)
