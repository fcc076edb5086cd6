"""Error-tracked real arithmetic and one-dimensional root finding.

Values are represented as ``BoundedReal`` intervals (center plus absolute
error radius) with exact rational endpoints, so every operation encloses the
true image of its operand intervals with no hidden rounding.  Denominator
growth is controlled explicitly with :meth:`BoundedReal.shrink`, which rounds
outward to a dyadic grid.

Root finding is plain bisection: deterministic, bracketing, and independent
of floating point behaviour.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

Rational = Union[int, Fraction]


class Ordering(enum.Enum):
    """Outcome of an interval comparison.

    LESS/GREATER are only reported when the two intervals are disjoint, so
    the strict order of the underlying exact values is certain.  Overlapping
    intervals (including two identical exact points, which cannot be strictly
    ordered) report INDETERMINATE.
    """

    LESS = -1
    GREATER = 1
    INDETERMINATE = 0


class IndeterminateSignError(ArithmeticError):
    """Division by an interval whose sign is not determined."""


class NoBracketError(ValueError):
    """Bisection endpoints do not bracket a sign change."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)  # accepts "3/2" and exact decimal strings
    if isinstance(x, float):
        # floats are binary-exact; callers wanting decimal intent should pass str
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True)
class BoundedReal:
    """A real number known to lie in [center - radius, center + radius].

    All arithmetic is outward-safe: the interval of the result contains every
    value op(a, b) with a, b drawn from the operand intervals.  Centers and
    radii are exact rationals, so the only widening ever introduced is the
    explicit one performed by :meth:`shrink`.
    """

    center: Fraction
    radius: Fraction = Fraction(0)

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be non-negative")

    # -- construction ------------------------------------------------------

    @classmethod
    def exact(cls, value) -> "BoundedReal":
        return cls(_as_fraction(value), Fraction(0))

    @classmethod
    def from_endpoints(cls, lo, hi) -> "BoundedReal":
        lo = _as_fraction(lo)
        hi = _as_fraction(hi)
        if hi < lo:
            raise ValueError("endpoints out of order")
        half = (hi - lo) / 2
        return cls(lo + half, half)

    @classmethod
    def from_decimal(cls, text: str) -> "BoundedReal":
        return cls(Fraction(text), Fraction(0))

    # -- views --------------------------------------------------------------

    @property
    def lo(self) -> Fraction:
        return self.center - self.radius

    @property
    def hi(self) -> Fraction:
        return self.center + self.radius

    @property
    def is_exact(self) -> bool:
        return self.radius == 0

    def contains(self, value) -> bool:
        v = _as_fraction(value)
        return self.lo <= v <= self.hi

    def __float__(self) -> float:
        return float(self.center)

    def __repr__(self) -> str:
        if self.radius == 0:
            return f"BoundedReal({float(self.center)!r})"
        return f"BoundedReal({float(self.center)!r} ± {float(self.radius)!r})"

    # -- arithmetic ----------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "BoundedReal":
        if isinstance(other, BoundedReal):
            return other
        return BoundedReal.exact(other)

    def __add__(self, other) -> "BoundedReal":
        o = self._coerce(other)
        return BoundedReal(self.center + o.center, self.radius + o.radius)

    __radd__ = __add__

    def __neg__(self) -> "BoundedReal":
        return BoundedReal(-self.center, self.radius)

    def __sub__(self, other) -> "BoundedReal":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "BoundedReal":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "BoundedReal":
        o = self._coerce(other)
        corners = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ]
        return BoundedReal.from_endpoints(min(corners), max(corners))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "BoundedReal":
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise IndeterminateSignError("indeterminate sign")
        corners = [
            self.lo / o.lo,
            self.lo / o.hi,
            self.hi / o.lo,
            self.hi / o.hi,
        ]
        return BoundedReal.from_endpoints(min(corners), max(corners))

    def __rtruediv__(self, other) -> "BoundedReal":
        return self._coerce(other) / self

    def __abs__(self) -> "BoundedReal":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return BoundedReal.from_endpoints(Fraction(0), max(-self.lo, self.hi))

    def powi(self, k: int) -> "BoundedReal":
        """Integer power by repeated interval squaring (k may be negative)."""
        if k == 0:
            return BoundedReal.exact(1)
        if k < 0:
            return BoundedReal.exact(1) / self.powi(-k)
        acc = BoundedReal.exact(1)
        base = self
        e = k
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def shrink(self, bits: int) -> "BoundedReal":
        """Round outward to denominators 2**bits, bounding representation size.

        The returned interval contains this one; its width grows by at most
        2**(1 - bits).
        """
        scale = 1 << bits
        lo = Fraction((self.lo * scale).__floor__(), scale)
        hi = Fraction(-((-self.hi * scale).__floor__()), scale)
        return BoundedReal.from_endpoints(lo, hi)

    # -- comparison ----------------------------------------------------------

    def compare(self, other) -> Ordering:
        o = self._coerce(other)
        if self.hi < o.lo:
            return Ordering.LESS
        if self.lo > o.hi:
            return Ordering.GREATER
        return Ordering.INDETERMINATE


def bisect_root(
    f: Callable[[Fraction], Rational],
    lo,
    hi,
    tol,
) -> Fraction:
    """Locate the root of a continuous, strictly monotone f by bisection.

    f is evaluated at exact rational points and only its sign is used, so the
    result is deterministic across platforms.  Returns the midpoint of the
    final bracket, which is within tol of the root.

    Raises NoBracketError when f(lo) and f(hi) have the same sign.
    """
    blo, bhi = bisect_root_bounds(f, lo, hi, tol)
    return (blo + bhi) / 2


def bisect_root_bounds(
    f: Callable[[Fraction], Rational],
    lo,
    hi,
    tol,
) -> tuple[Fraction, Fraction]:
    """Bisection returning the final bracket [lo, hi] with hi - lo <= 2*tol."""
    lo = _as_fraction(lo)
    hi = _as_fraction(hi)
    tol = _as_fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if hi <= lo:
        raise ValueError("empty bracket")
    flo = f(lo)
    fhi = f(hi)
    if flo == 0:
        return lo, lo
    if fhi == 0:
        return hi, hi
    if (flo > 0) == (fhi > 0):
        raise NoBracketError("no bracketed root")
    increasing = fhi > 0
    while hi - lo > 2 * tol:
        mid = (lo + hi) / 2
        fm = f(mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == increasing:
            hi = mid
        else:
            lo = mid
    return lo, hi
