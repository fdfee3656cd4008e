"""Interval sets on the extended real line and signed-endpoint bookkeeping.

The spectral window J is an ordered disjoint union of open intervals,
possibly unbounded on either side.  Every boundary operator and endpoint
derivative in the package runs over the finite endpoints of J, each
carrying a sign: +1 where an interval of J opens, -1 where one closes.
That orientation is frozen by a finite-difference bootstrap of the
endpoint derivative of the resolvent inner product u (see
tests/test_tw_system.py); for J = (-inf, a) the single endpoint gets
sign -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "IntervalSet",
    "SignedEndpoint",
    "complement",
    "signed_endpoints",
    "parse_interval_set",
    "format_interval_set",
]

_INF = math.inf


@dataclass(frozen=True)
class SignedEndpoint:
    """A finite endpoint of J with its 1-based ascending index and sign."""

    value: float
    index_k: int
    sign: int


@dataclass(frozen=True)
class IntervalSet:
    """Canonical ordered disjoint union of open intervals.

    ``intervals`` is a tuple of (lo, hi) pairs with lo < hi, strictly
    increasing and separated by gaps; lo may be -inf on the first pair
    and hi may be +inf on the last.  Construct through :meth:`from_pairs`
    unless the input is already canonical.
    """

    intervals: tuple[tuple[float, float], ...]

    @classmethod
    def from_pairs(cls, pairs) -> "IntervalSet":
        items = []
        for lo, hi in pairs:
            lo, hi = float(lo), float(hi)
            if math.isnan(lo) or math.isnan(hi):
                raise ValueError("interval endpoints must not be NaN")
            if not lo < hi:
                raise ValueError(f"interval ({lo}, {hi}) is empty or reversed")
            items.append((lo, hi))
        items.sort()
        merged: list[tuple[float, float]] = []
        for lo, hi in items:
            if merged and lo <= merged[-1][1]:
                prev_lo, prev_hi = merged[-1]
                if lo < prev_hi:
                    raise ValueError("intervals overlap")
                merged[-1] = (prev_lo, hi)
            else:
                merged.append((lo, hi))
        return cls(tuple(merged))

    @classmethod
    def real_line(cls) -> "IntervalSet":
        return cls(((-_INF, _INF),))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def is_real_line(self) -> bool:
        return self.intervals == ((-_INF, _INF),)

    def finite_endpoints(self) -> tuple[float, ...]:
        out = []
        for lo, hi in self.intervals:
            if math.isfinite(lo):
                out.append(lo)
            if math.isfinite(hi):
                out.append(hi)
        return tuple(out)

    def max_abs_finite_endpoint(self) -> float:
        pts = self.finite_endpoints()
        return max((abs(a) for a in pts), default=0.0)

    def min_endpoint_gap(self) -> float:
        """Smallest separation between consecutive finite endpoints."""
        pts = self.finite_endpoints()
        if len(pts) < 2:
            return _INF
        return min(b - a for a, b in zip(pts, pts[1:]))

    def contains(self, x: float) -> bool:
        return any(lo < x < hi for lo, hi in self.intervals)

    def complement(self) -> "IntervalSet":
        if self.is_empty:
            return IntervalSet.real_line()
        out = []
        cursor = -_INF
        for lo, hi in self.intervals:
            if lo > cursor:
                out.append((cursor, lo))
            cursor = hi
        if cursor < _INF:
            out.append((cursor, _INF))
        return IntervalSet(tuple(out))

    def bounded(self, L: float) -> "IntervalSet":
        """Intersection with (-L, L); infinite endpoints become +-L."""
        out = []
        for lo, hi in self.intervals:
            lo2, hi2 = max(lo, -L), min(hi, L)
            if lo2 < hi2:
                out.append((lo2, hi2))
        return IntervalSet(tuple(out))

    def shifted(self, c: float) -> "IntervalSet":
        """Translate all finite endpoints by c (infinite ones stay put)."""
        out = []
        for lo, hi in self.intervals:
            out.append((lo + c if math.isfinite(lo) else lo,
                        hi + c if math.isfinite(hi) else hi))
        return IntervalSet(tuple(out))

    def scaled(self, factor: float) -> "IntervalSet":
        """Multiply all finite endpoints by factor > 0."""
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        out = []
        for lo, hi in self.intervals:
            out.append((lo * factor if math.isfinite(lo) else lo,
                        hi * factor if math.isfinite(hi) else hi))
        return IntervalSet(tuple(out))

    def with_endpoint_moved(self, index_k: int, delta: float) -> "IntervalSet":
        """Move the index_k-th (1-based) finite endpoint by delta.

        The result must remain a valid interval set; collisions raise
        ValueError at construction.
        """
        target = index_k - 1
        count = -1
        out = []
        for lo, hi in self.intervals:
            if math.isfinite(lo):
                count += 1
                if count == target:
                    lo = lo + delta
            if math.isfinite(hi):
                count += 1
                if count == target:
                    hi = hi + delta
            out.append((lo, hi))
        if count < target:
            raise ValueError(f"endpoint index {index_k} out of range")
        return IntervalSet.from_pairs(out)

    def __str__(self) -> str:
        return format_interval_set(self)


def complement(J: IntervalSet) -> IntervalSet:
    """Closure-disjoint complement of J in the real line, canonical."""
    return J.complement()


def signed_endpoints(J: IntervalSet) -> tuple[SignedEndpoint, ...]:
    """Ascending finite endpoints of J with orientation signs.

    Sign is +1 where an interval of J opens (finite lo) and -1 where one
    closes (finite hi).  Infinite endpoints carry no derivative and are
    excluded.  Returns an empty tuple for J = R or J = empty.
    """
    out = []
    k = 0
    for lo, hi in J.intervals:
        if math.isfinite(lo):
            k += 1
            out.append(SignedEndpoint(lo, k, +1))
        if math.isfinite(hi):
            k += 1
            out.append(SignedEndpoint(hi, k, -1))
    return tuple(out)


def _parse_bound(tok: str) -> float:
    t = tok.strip().lower()
    if t in ("-inf", "-infinity"):
        return -_INF
    if t in ("inf", "+inf", "infinity", "+infinity"):
        return _INF
    try:
        return float(t)
    except ValueError:
        raise ValueError(f"cannot parse interval bound {tok!r}") from None


def parse_interval_set(text: str) -> IntervalSet:
    """Parse the CLI string form: comma-separated ``lo:hi`` pairs.

    Examples: ``-1:1``, ``-inf:-1,1:inf``, ``-1.5:0.25,1:2``.
    """
    text = text.strip()
    if not text:
        return IntervalSet.empty()
    pairs = []
    for part in text.split(","):
        pieces = part.split(":")
        if len(pieces) != 2:
            raise ValueError(f"bad interval {part!r}: expected lo:hi")
        pairs.append((_parse_bound(pieces[0]), _parse_bound(pieces[1])))
    return IntervalSet.from_pairs(pairs)


def _format_bound(x: float) -> str:
    if x == -_INF:
        return "-inf"
    if x == _INF:
        return "inf"
    return f"{x:.12g}"


def format_interval_set(J: IntervalSet) -> str:
    """Inverse of :func:`parse_interval_set` (empty set formats as '')."""
    return ",".join(f"{_format_bound(lo)}:{_format_bound(hi)}"
                    for lo, hi in J.intervals)
