"""Finite unions of closed bounded intervals on the real line.

Support bookkeeping for functions on the multiplicative group: every
support set is a finite union of compact intervals, and the algebra
below (scaling, reflection, reciprocal, Minkowski sum, set product and
quotient) is exactly what the integral-transform formulas need in order
to map supports around without any quadrature.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Tuple

import numpy as np

Interval = Tuple[float, float]

# Relative slack used when merging near-touching intervals and dropping
# measure-zero slivers.  Touching intervals are merged; degenerate
# (point) intervals are treated as empty, matching the convention that
# measure-zero contact does not contribute to any integral.
_EPS = 1e-13


def _scale_of(lo: float, hi: float) -> float:
    return max(1.0, abs(lo), abs(hi))


class IntervalSet:
    """Immutable, sorted, pairwise-disjoint union of closed intervals."""

    __slots__ = ("_ivs",)

    def __init__(self, intervals: Iterable[Interval] = ()):
        raw = []
        for lo, hi in intervals:
            lo = float(lo)
            hi = float(hi)
            if hi < lo:
                lo, hi = hi, lo
            if hi - lo <= _EPS * _scale_of(lo, hi):
                continue
            raw.append((lo, hi))
        raw.sort()
        merged: list[Interval] = []
        for lo, hi in raw:
            if merged and lo <= merged[-1][1] + _EPS * _scale_of(lo, hi):
                prev_lo, prev_hi = merged[-1]
                merged[-1] = (prev_lo, max(prev_hi, hi))
            else:
                merged.append((lo, hi))
        self._ivs: Tuple[Interval, ...] = tuple(merged)

    # -- basic queries ------------------------------------------------

    @property
    def intervals(self) -> Tuple[Interval, ...]:
        return self._ivs

    @property
    def empty(self) -> bool:
        return not self._ivs

    @property
    def measure(self) -> float:
        return sum(hi - lo for lo, hi in self._ivs)

    @property
    def endpoints(self) -> Tuple[float, ...]:
        out = []
        for lo, hi in self._ivs:
            out.append(lo)
            out.append(hi)
        return tuple(out)

    def bounds(self) -> Interval:
        if self.empty:
            raise ValueError("empty interval set has no bounds")
        return self._ivs[0][0], self._ivs[-1][1]

    def max_abs(self) -> float:
        if self.empty:
            return 0.0
        return max(abs(self._ivs[0][0]), abs(self._ivs[-1][1]))

    def min_abs(self) -> float:
        """Smallest |x| over the set (0 if the set touches/crosses 0)."""
        if self.empty:
            raise ValueError("empty interval set")
        best = np.inf
        for lo, hi in self._ivs:
            if lo <= 0.0 <= hi:
                return 0.0
            best = min(best, abs(lo), abs(hi))
        return best

    def contains(self, x: float) -> bool:
        return any(lo <= x <= hi for lo, hi in self._ivs)

    def mask(self, t: np.ndarray) -> np.ndarray:
        """Vectorized membership test."""
        out = np.zeros(t.shape, dtype=bool)
        for lo, hi in self._ivs:
            out |= (t >= lo) & (t <= hi)
        return out

    def distance_to(self, points: Sequence[float]) -> float:
        """Min distance from any endpoint-bounded interval to the given points."""
        best = np.inf
        for p in points:
            for lo, hi in self._ivs:
                if lo <= p <= hi:
                    return 0.0
                best = min(best, abs(lo - p), abs(hi - p))
        return best

    # -- set algebra --------------------------------------------------

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self._ivs + other._ivs)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for a_lo, a_hi in self._ivs:
            for b_lo, b_hi in other._ivs:
                lo = max(a_lo, b_lo)
                hi = min(a_hi, b_hi)
                if lo < hi:
                    out.append((lo, hi))
        return IntervalSet(out)

    def scale(self, r: float) -> "IntervalSet":
        """{r·x : x in self}; r < 0 reflects."""
        if r == 0.0:
            raise ValueError("scaling by zero collapses the set")
        return IntervalSet((r * lo, r * hi) for lo, hi in self._ivs)

    def shift(self, c: float) -> "IntervalSet":
        return IntervalSet((lo + c, hi + c) for lo, hi in self._ivs)

    def affine(self, a: float, b: float) -> "IntervalSet":
        """{a·x + b : x in self}."""
        if a == 0.0:
            raise ValueError("degenerate affine map")
        return IntervalSet((a * lo + b, a * hi + b) for lo, hi in self._ivs)

    def reciprocal(self) -> "IntervalSet":
        """{1/x : x in self}; every interval must avoid 0."""
        out = []
        for lo, hi in self._ivs:
            if lo <= 0.0 <= hi:
                raise ValueError("reciprocal of an interval containing 0")
            out.append((1.0 / hi, 1.0 / lo))
        return IntervalSet(out)

    def product_set(self, other: "IntervalSet") -> "IntervalSet":
        """{x·y}: pairwise interval products (continuous image, so intervals)."""
        out = []
        for a_lo, a_hi in self._ivs:
            for b_lo, b_hi in other._ivs:
                vals = (a_lo * b_lo, a_lo * b_hi, a_hi * b_lo, a_hi * b_hi)
                out.append((min(vals), max(vals)))
        return IntervalSet(out)

    def quotient(self, other: "IntervalSet") -> "IntervalSet":
        """{x/y : x in self, y in other}; other must avoid 0."""
        return self.product_set(other.reciprocal())

    def minkowski(self, other: "IntervalSet") -> "IntervalSet":
        """{x + y}: pairwise interval sums."""
        out = []
        for a_lo, a_hi in self._ivs:
            for b_lo, b_hi in other._ivs:
                out.append((a_lo + b_lo, a_hi + b_hi))
        return IntervalSet(out)

    # -- misc ---------------------------------------------------------

    def split_at_zero(self) -> "IntervalSet":
        """Same point set, but no interval straddles 0."""
        out = []
        for lo, hi in self._ivs:
            if lo < 0.0 < hi:
                out.append((lo, 0.0))
                out.append((0.0, hi))
            else:
                out.append((lo, hi))
        s = IntervalSet.__new__(IntervalSet)
        # bypass merging (it would re-join at 0)
        s._ivs = tuple(
            (lo, hi) for lo, hi in out if hi - lo > _EPS * _scale_of(lo, hi)
        )
        return s

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._ivs == other._ivs

    def __hash__(self) -> int:
        return hash(self._ivs)

    def __repr__(self) -> str:
        body = ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in self._ivs)
        return f"IntervalSet({body})" if body else "IntervalSet(empty)"


EMPTY = IntervalSet()


def interval(lo: float, hi: float) -> IntervalSet:
    return IntervalSet([(lo, hi)])
