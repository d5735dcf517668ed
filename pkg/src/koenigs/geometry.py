"""Compact subsets of the plane built from exact-distance primitives.

A :class:`CompactSet` is a finite union of closed discs, segments, circular
arcs, and finite point sets.  Distance queries are exact per primitive and
take the minimum over the union, which is what the walk-on-spheres sampler
and the greedy capacity estimators rely on.  Sets made only of points (or
radius-zero discs) are flagged polar; anything with positive length or area
is non-polar.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * math.pi


def _as_complex_array(z) -> np.ndarray:
    return np.asarray(z, dtype=np.complex128)


def _require_finite(value: complex, name: str) -> None:
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"{name} must have finite coordinates, got {value}")


@dataclass(frozen=True)
class ClosedDisc:
    center: complex
    radius: float

    def __post_init__(self):
        _require_finite(complex(self.center), "center")
        if not (self.radius >= 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"disc radius must be finite and >= 0, got {self.radius}")

    def distance(self, z) -> np.ndarray:
        return np.maximum(np.abs(_as_complex_array(z) - self.center) - self.radius, 0.0)

    def nearest_point(self, z: complex) -> complex:
        d = abs(z - self.center)
        if d <= self.radius or d == 0.0:
            return z if d <= self.radius else self.center
        return self.center + (z - self.center) * (self.radius / d)

    def max_abs_from(self, origin: complex = 0j) -> float:
        return abs(self.center - origin) + self.radius

    def translate(self, c: complex) -> "ClosedDisc":
        return ClosedDisc(self.center + c, self.radius)

    @property
    def point_like(self) -> bool:
        return self.radius == 0.0

    def sample(self, n: int) -> np.ndarray:
        if self.radius == 0.0 or n <= 1:
            return np.array([self.center], dtype=np.complex128)
        n_boundary = max(8, int(round(0.75 * n)))
        angles = TWO_PI * np.arange(n_boundary) / n_boundary
        pts = [self.center + self.radius * np.exp(1j * angles)]
        n_rings = n - n_boundary
        if n_rings > 0:
            fractions = (0.25, 0.5, 0.75)
            weights = np.array(fractions) / sum(fractions)
            counts = np.maximum((weights * n_rings).astype(int), 1)
            counts[-1] += max(n_rings - int(counts.sum()), 0)
            for frac, cnt in zip(fractions, counts):
                # half-step offset keeps ring nodes off the boundary nodes
                ring_angles = TWO_PI * (np.arange(cnt) + 0.5) / cnt
                pts.append(self.center + frac * self.radius * np.exp(1j * ring_angles))
        return np.concatenate(pts)

    def to_dict(self) -> dict:
        return {"kind": "disc", "center": [self.center.real, self.center.imag],
                "radius": self.radius}


@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex

    def __post_init__(self):
        _require_finite(complex(self.a), "a")
        _require_finite(complex(self.b), "b")

    def distance(self, z) -> np.ndarray:
        z = _as_complex_array(z)
        ab = self.b - self.a
        denom = abs(ab) ** 2
        if denom == 0.0:
            return np.abs(z - self.a)
        t = np.clip(((z - self.a) * np.conj(ab)).real / denom, 0.0, 1.0)
        return np.abs(z - (self.a + t * ab))

    def nearest_point(self, z: complex) -> complex:
        ab = self.b - self.a
        denom = abs(ab) ** 2
        if denom == 0.0:
            return self.a
        t = min(max((((z - self.a) * ab.conjugate()).real) / denom, 0.0), 1.0)
        return self.a + t * ab

    def max_abs_from(self, origin: complex = 0j) -> float:
        return max(abs(self.a - origin), abs(self.b - origin))

    def translate(self, c: complex) -> "Segment":
        return Segment(self.a + c, self.b + c)

    @property
    def point_like(self) -> bool:
        return self.a == self.b

    def sample(self, n: int) -> np.ndarray:
        if self.point_like or n <= 1:
            return np.array([self.a], dtype=np.complex128)
        t = np.linspace(0.0, 1.0, n)
        return self.a + t * (self.b - self.a)

    def to_dict(self) -> dict:
        return {"kind": "segment", "a": [self.a.real, self.a.imag],
                "b": [self.b.real, self.b.imag]}


@dataclass(frozen=True)
class Arc:
    """Closed arc {center + radius e^{i t}, t in [angle0, angle1]}, angle1 - angle0 <= 2 pi."""

    center: complex
    radius: float
    angle0: float
    angle1: float

    def __post_init__(self):
        _require_finite(complex(self.center), "center")
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"arc radius must be finite and > 0, got {self.radius}")
        if not self.angle1 >= self.angle0:
            raise ValueError("arc needs angle1 >= angle0")
        if self.angle1 - self.angle0 > TWO_PI + 1e-12:
            raise ValueError("arc spans more than a full turn")

    @property
    def full_circle(self) -> bool:
        return self.angle1 - self.angle0 >= TWO_PI - 1e-15

    def distance(self, z) -> np.ndarray:
        z = _as_complex_array(z)
        w = z - self.center
        radial = np.abs(np.abs(w) - self.radius)
        if self.full_circle:
            return radial
        phi = np.angle(w)
        delta = np.mod(phi - self.angle0, TWO_PI)
        on_arc = delta <= (self.angle1 - self.angle0)
        e0 = self.center + self.radius * cmath.exp(1j * self.angle0)
        e1 = self.center + self.radius * cmath.exp(1j * self.angle1)
        d_end = np.minimum(np.abs(z - e0), np.abs(z - e1))
        return np.where(on_arc, radial, d_end)

    def nearest_point(self, z: complex) -> complex:
        w = z - self.center
        if self.full_circle or w == 0:
            if w == 0:
                return self.center + self.radius * cmath.exp(1j * self.angle0)
            return self.center + self.radius * w / abs(w)
        phi = cmath.phase(w)
        delta = (phi - self.angle0) % TWO_PI
        if delta <= self.angle1 - self.angle0:
            return self.center + self.radius * w / abs(w)
        e0 = self.center + self.radius * cmath.exp(1j * self.angle0)
        e1 = self.center + self.radius * cmath.exp(1j * self.angle1)
        return e0 if abs(z - e0) <= abs(z - e1) else e1

    def max_abs_from(self, origin: complex = 0j) -> float:
        c = self.center - origin
        candidates = [abs(c + self.radius * cmath.exp(1j * self.angle0)),
                      abs(c + self.radius * cmath.exp(1j * self.angle1))]
        if c == 0:
            candidates.append(self.radius)
        else:
            far = cmath.phase(c)
            delta = (far - self.angle0) % TWO_PI
            if self.full_circle or delta <= self.angle1 - self.angle0:
                candidates.append(abs(c) + self.radius)
        return max(candidates)

    def translate(self, c: complex) -> "Arc":
        return Arc(self.center + c, self.radius, self.angle0, self.angle1)

    @property
    def point_like(self) -> bool:
        return False

    def sample(self, n: int) -> np.ndarray:
        n = max(n, 2)
        if self.full_circle:
            t = self.angle0 + TWO_PI * np.arange(n) / n
        else:
            t = np.linspace(self.angle0, self.angle1, n)
        return self.center + self.radius * np.exp(1j * t)

    def to_dict(self) -> dict:
        return {"kind": "arc", "center": [self.center.real, self.center.imag],
                "radius": self.radius, "angles": [self.angle0, self.angle1]}


@dataclass(frozen=True)
class FinitePoints:
    points: tuple

    def __post_init__(self):
        if len(self.points) == 0:
            raise ValueError("empty set")
        pts = tuple(complex(p) for p in self.points)
        for p in pts:
            _require_finite(p, "point")
        object.__setattr__(self, "points", pts)

    @cached_property
    def _array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=np.complex128)

    def distance(self, z) -> np.ndarray:
        z = _as_complex_array(z)
        return np.min(np.abs(z[..., None] - self._array), axis=-1)

    def nearest_point(self, z: complex) -> complex:
        d = np.abs(self._array - z)
        return complex(self._array[int(np.argmin(d))])

    def max_abs_from(self, origin: complex = 0j) -> float:
        return float(np.max(np.abs(self._array - origin)))

    def translate(self, c: complex) -> "FinitePoints":
        return FinitePoints(tuple(p + c for p in self.points))

    @property
    def point_like(self) -> bool:
        return True

    def sample(self, n: int) -> np.ndarray:
        return self._array.copy()

    def to_dict(self) -> dict:
        return {"kind": "points", "points": [[p.real, p.imag] for p in self.points]}


Primitive = ClosedDisc | Segment | Arc | FinitePoints


def primitive_from_dict(d: dict) -> Primitive:
    kind = d["kind"]
    if kind == "disc":
        return ClosedDisc(complex(*d["center"]), float(d["radius"]))
    if kind == "segment":
        return Segment(complex(*d["a"]), complex(*d["b"]))
    if kind == "arc":
        return Arc(complex(*d["center"]), float(d["radius"]), *map(float, d["angles"]))
    if kind == "points":
        return FinitePoints(tuple(complex(*p) for p in d["points"]))
    raise ValueError(f"unknown primitive kind {kind!r}")


@dataclass(frozen=True)
class CompactSet:
    """Finite union of primitives with exact distance queries."""

    primitives: tuple

    def __post_init__(self):
        prims = tuple(self.primitives)
        if len(prims) == 0:
            raise ValueError("empty set")
        object.__setattr__(self, "primitives", prims)

    def distance(self, z) -> np.ndarray:
        d = self.primitives[0].distance(z)
        for prim in self.primitives[1:]:
            d = np.minimum(d, prim.distance(z))
        return d

    def query(self, z: complex) -> tuple[float, bool]:
        """Exact distance to the union and membership; distance 0 iff inside."""
        d = float(self.distance(np.asarray(complex(z))))
        return d, d == 0.0

    def nearest_point(self, z: complex) -> complex:
        best, best_d = None, math.inf
        for prim in self.primitives:
            q = prim.nearest_point(z)
            d = abs(z - q)
            if d < best_d:
                best, best_d = q, d
        return best

    @property
    def is_polar(self) -> bool:
        return all(p.point_like for p in self.primitives)

    def bounding_radius(self, origin: complex = 0j) -> float:
        return max(p.max_abs_from(origin) for p in self.primitives)

    def translate(self, c: complex) -> "CompactSet":
        return CompactSet(tuple(p.translate(c) for p in self.primitives))

    def sample(self, per_primitive: int = 256) -> np.ndarray:
        """Deterministic sampling grid: boundary-plus-rings on discs, uniform
        by arclength on segments and arcs."""
        return np.concatenate([p.sample(per_primitive) for p in self.primitives])

    def to_dict(self) -> dict:
        return {"primitives": [p.to_dict() for p in self.primitives]}

    @staticmethod
    def from_dict(d: dict) -> "CompactSet":
        return CompactSet(tuple(primitive_from_dict(p) for p in d["primitives"]))


def query(compact: CompactSet, z: complex) -> tuple[float, bool]:
    return compact.query(z)


def normalize_to_quarter_disc(compact: CompactSet, tol: float = 1e-9):
    """Translate the set so it sits inside the closed disc D(0, 1/4).

    Returns ``(translated_set, shift)`` with ``translated = compact + shift``.
    Raises if no translation can fit the set in the quarter disc.
    """
    lo_re = hi_re = lo_im = hi_im = None
    for p in compact.primitives:
        # coarse bounding box from the primitive's own extremes
        r = p.max_abs_from(0j)
        samples = p.sample(64)
        lo_re = min(samples.real.min(), lo_re) if lo_re is not None else samples.real.min()
        hi_re = max(samples.real.max(), hi_re) if hi_re is not None else samples.real.max()
        lo_im = min(samples.imag.min(), lo_im) if lo_im is not None else samples.imag.min()
        hi_im = max(samples.imag.max(), hi_im) if hi_im is not None else samples.imag.max()
        del r
    center = complex((lo_re + hi_re) / 2.0, (lo_im + hi_im) / 2.0)
    shifted = compact.translate(-center)
    if shifted.bounding_radius(0j) > 0.25 + tol:
        raise ValueError("E out of normalization range")
    return shifted, -center


def build_kn(base: CompactSet, n: int) -> CompactSet:
    """Union of the n integer translates base+1, ..., base+n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if base.bounding_radius(0j) > 0.25 + 1e-9:
        raise ValueError("E out of normalization range")
    prims = []
    for j in range(1, n + 1):
        prims.extend(p.translate(complex(j)) for p in base.primitives)
    return CompactSet(tuple(prims))
