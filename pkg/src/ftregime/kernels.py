"""Interval, set and vector kernels used to compose performance values.

All kernels are pure functions over immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class KernelError(ValueError):
    """Raised when kernel operands are incompatible."""


class UnitMismatch(KernelError):
    pass


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]``.

    Construction does not enforce ``lo <= hi`` so that malformed models can
    still be built and then reported by ``validate_model``.  Use
    :meth:`checked` where a valid interval is required.
    """

    lo: float
    hi: float
    unit: str = ""

    @classmethod
    def checked(cls, lo: float, hi: float, unit: str = "") -> "Interval":
        if not lo <= hi:
            raise KernelError(f"interval lo>hi: [{lo}, {hi}]")
        return cls(float(lo), float(hi), unit)

    @property
    def is_valid(self) -> bool:
        return self.lo <= self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __eq__(self, other: object) -> bool:
        # units are labels on the operands of a kernel, not part of the value
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))


ZERO = Interval(0.0, 0.0)


def _check_units(a: Interval, b: Interval) -> str:
    if a.unit and b.unit and a.unit != b.unit:
        raise UnitMismatch(f"unit mismatch: {a.unit!r} vs {b.unit!r}")
    return a.unit or b.unit


def interval_sum(a: Interval, b: Interval) -> Interval:
    """Pool two capability ranges: ``[a.lo + b.lo, a.hi + b.hi]``."""
    unit = _check_units(a, b)
    return Interval(a.lo + b.lo, a.hi + b.hi, unit)


def interval_contains(outer: Interval, inner: Interval, tol: float = 0.0) -> bool:
    """True when ``inner`` lies within ``outer`` (each bound relaxed by ``tol``)."""
    _check_units(outer, inner)
    return outer.lo <= inner.lo + tol and inner.hi <= outer.hi + tol


def set_intersection(a: Iterable[str], b: Iterable[str]) -> frozenset[str]:
    return frozenset(a) & frozenset(b)


def sorted_set(items: Iterable[str]) -> list[str]:
    return sorted(items)


def vector_min(a: Sequence[float], b: Sequence[float]) -> tuple[float, ...]:
    if len(a) != len(b):
        raise KernelError(f"vector length mismatch: {len(a)} vs {len(b)}")
    return tuple(min(x, y) for x, y in zip(a, b))


def scalar_min(a: float, b: float) -> float:
    return min(a, b)


def all_children_required(values: Sequence[float], nominals: Sequence[float],
                          parent_nominal: float) -> float:
    """Gate kernel: the parent keeps its nominal scalar only while every
    bound child meets its own nominal, otherwise it drops to zero."""
    if len(values) != len(nominals):
        raise KernelError("all-children-required: arity mismatch")
    if all(v >= n for v, n in zip(values, nominals)):
        return parent_nominal
    return 0.0
