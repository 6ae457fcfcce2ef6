"""Exact rational 3D points, segments and the segment intersection test.

Everything here is computed with ``int`` and ``fractions.Fraction``; no float
ever enters a predicate or a returned coordinate.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Optional, Sequence, Tuple, Union

from .exceptions import (
    DegenerateSegment,
    EmptyBoxList,
    InvalidRational,
    PreconditionFailed,
)

LOG = logging.getLogger(__name__)

Number = Union[int, Fraction]
Triple = Tuple[Number, Number, Number]

ZERO = (0, 0, 0)


def make_rational(n: int, d: int) -> Fraction:
    if isinstance(n, bool) or isinstance(d, bool):
        raise InvalidRational("Booleans are not integers here")
    if not isinstance(n, int) or not isinstance(d, int):
        raise InvalidRational(f"Expected integers, got {n!r}/{d!r}")
    if d == 0:
        raise InvalidRational(f"Zero denominator in {n}/{d}")
    return Fraction(n, d)


def _as_fraction(value: Number) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, Rational):
        raise InvalidRational(f"Coordinate {value!r} is not an exact rational")
    return Fraction(value)


def _sub(u: Sequence[Number], v: Sequence[Number]) -> Triple:
    return (u[0] - v[0], u[1] - v[1], u[2] - v[2])


def _dot(u: Sequence[Number], v: Sequence[Number]) -> Number:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def _cross(u: Sequence[Number], v: Sequence[Number]) -> Triple:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def _point_at(
    origin: Sequence[Number], direction: Sequence[Number], num: Number, den: Number
) -> Tuple[Fraction, Fraction, Fraction]:
    # origin + direction * num / den, with den > 0
    return (
        Fraction(origin[0] * den + direction[0] * num, den),
        Fraction(origin[1] * den + direction[1] * num, den),
        Fraction(origin[2] * den + direction[2] * num, den),
    )


POINT = "point"
OVERLAP = "overlap"


def intersect_coordinates(
    a1: Sequence[Number],
    b1: Sequence[Number],
    a2: Sequence[Number],
    b2: Sequence[Number],
) -> Optional[Tuple[str, tuple]]:
    """Intersect segment a1-b1 with segment a2-b2 given as raw coordinates.

    Works on ``int`` or ``Fraction`` triples. Returns ``None`` when the
    segments are disjoint, ``(POINT, xyz)`` for a single common point and
    ``(OVERLAP, (p, q))`` for a common sub-segment of positive length.
    """
    d1 = _sub(b1, a1)
    d2 = _sub(b2, a2)
    w = _sub(a2, a1)
    normal = _cross(d1, d2)
    nn = _dot(normal, normal)

    if nn == 0:
        if _cross(w, d1) != ZERO:
            return None
        # collinear: measure both ends of s2 along d1, scaled by |d1|^2
        dd = _dot(d1, d1)
        ta = _dot(w, d1)
        tb = _dot(_sub(b2, a1), d1)
        lo = max(0, min(ta, tb))
        hi = min(dd, max(ta, tb))
        if lo > hi:
            return None
        if lo == hi:
            return POINT, _point_at(a1, d1, lo, dd)
        return OVERLAP, (_point_at(a1, d1, lo, dd), _point_at(a1, d1, hi, dd))

    if _dot(w, normal) != 0:
        return None  # skew
    t_num = _dot(_cross(w, d2), normal)
    if t_num < 0 or t_num > nn:
        return None
    s_num = _dot(_cross(w, d1), normal)
    if s_num < 0 or s_num > nn:
        return None
    return POINT, _point_at(a1, d1, t_num, nn)


@dataclass(frozen=True, order=True)
class RationalPoint3:
    x: Fraction
    y: Fraction
    z: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", _as_fraction(self.x))
        object.__setattr__(self, "y", _as_fraction(self.y))
        object.__setattr__(self, "z", _as_fraction(self.z))

    @classmethod
    def of(cls, coords: Iterable[Number]) -> "RationalPoint3":
        x, y, z = coords
        return cls(x, y, z)

    @property
    def coords(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.x, self.y, self.z)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def integer_coords(self) -> Optional[Tuple[int, int, int]]:
        if not self.is_integral():
            return None
        return (self.x.numerator, self.y.numerator, self.z.numerator)

    def _serialize(self) -> Tuple[Fraction, Fraction, Fraction]:
        return self.coords

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True, order=True)
class Segment:
    """Closed segment with unordered endpoints; stored with ``a < b``."""

    a: RationalPoint3
    b: RationalPoint3

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise DegenerateSegment(f"Segment endpoints coincide at {self.a}")
        if self.b < self.a:
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    @classmethod
    def between(cls, a: Iterable[Number], b: Iterable[Number]) -> "Segment":
        return cls(RationalPoint3.of(a), RationalPoint3.of(b))

    @property
    def direction(self) -> Tuple[Fraction, Fraction, Fraction]:
        return _sub(self.b.coords, self.a.coords)  # type: ignore

    @property
    def midpoint(self) -> RationalPoint3:
        return RationalPoint3.of(
            (p + q) / 2 for p, q in zip(self.a.coords, self.b.coords)
        )

    def length_squared(self) -> Fraction:
        d = self.direction
        return Fraction(_dot(d, d))

    def contains(self, p: RationalPoint3) -> bool:
        d = self.direction
        w = _sub(p.coords, self.a.coords)
        if _cross(w, d) != ZERO:
            return False
        t = _dot(w, d)
        return 0 <= t <= _dot(d, d)

    def _serialize(self) -> Tuple[RationalPoint3, RationalPoint3]:
        return (self.a, self.b)

    def __str__(self) -> str:
        return f"{self.a}-{self.b}"


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Point:
    point: RationalPoint3


@dataclass(frozen=True)
class Overlap:
    segment: Segment


IntersectionResult = Union[Empty, Point, Overlap]

EMPTY = Empty()


def wrap_intersection(raw: Optional[Tuple[str, tuple]]) -> IntersectionResult:
    if raw is None:
        return EMPTY
    tag, value = raw
    if tag == POINT:
        return Point(RationalPoint3.of(value))
    return Overlap(Segment.between(*value))


def intersect_segments(s1: Segment, s2: Segment) -> IntersectionResult:
    return wrap_intersection(
        intersect_coordinates(s1.a.coords, s1.b.coords, s2.a.coords, s2.b.coords)
    )


def point_interior_to_segment(p: RationalPoint3, s: Segment) -> bool:
    return p not in (s.a, s.b) and s.contains(p)


@dataclass(frozen=True, order=True)
class Box3:
    """Closed axis-aligned box with integer corners."""

    lo: Tuple[int, int, int]
    hi: Tuple[int, int, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", tuple(self.lo))
        object.__setattr__(self, "hi", tuple(self.hi))
        if len(self.lo) != 3 or len(self.hi) != 3:
            raise PreconditionFailed(
                f"Box corners must be 3-vectors: {self.lo}, {self.hi}"
            )
        if not all(low < high for low, high in zip(self.lo, self.hi)):
            raise PreconditionFailed(f"Box {self.lo}..{self.hi} has no volume")

    @classmethod
    def unit(cls, corner: Sequence[int]) -> "Box3":
        lo = tuple(corner)
        return cls(lo, tuple(c + 1 for c in lo))  # type: ignore

    def contains(self, p: RationalPoint3) -> bool:
        return all(low <= c <= high for low, c, high in zip(self.lo, p.coords, self.hi))

    def corners(self) -> Iterator[Tuple[int, int, int]]:
        for x in (self.lo[0], self.hi[0]):
            for y in (self.lo[1], self.hi[1]):
                for z in (self.lo[2], self.hi[2]):
                    yield (x, y, z)

    def _serialize(self) -> Tuple[int, int, int]:
        return self.lo


def point_in_box_union(p: RationalPoint3, boxes: Sequence[Box3]) -> bool:
    if not boxes:
        raise EmptyBoxList("Point-in-union test needs at least one box")
    return any(box.contains(p) for box in boxes)
