"""Parametric planar domains and their certified boundary partitions.

Each family admits a closed-form determination of the connected component of
the base point inside ``D(0, R)``: convexity for half-planes and strips,
star-shapedness for sectors, a radial escape probe for complements of compact
sets, and gap/clearance rules for integer-translate and circle-slit
complements.  ``boundary_partition`` refuses radii at which the family rule is
not certified rather than guessing.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .geometry import (Arc, ClosedDisc, CompactSet, Segment, TWO_PI,
                       normalize_to_quarter_disc)


class CertificateError(ValueError):
    """Raised when the component rule is not certified at the given radius."""


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class HalfPlane:
    """{z : Re(z e^{-i angle}) > offset}."""

    angle: float = 0.0
    offset: float = -1.0

    def contains(self, z: complex) -> bool:
        return (z * cmath.exp(-1j * self.angle)).real > self.offset

    def to_dict(self) -> dict:
        return {"family": "half_plane", "angle": self.angle, "offset": self.offset}


@dataclass(frozen=True)
class Strip:
    """{z : |Im z| < height / 2}."""

    height: float

    def __post_init__(self):
        if not self.height > 0:
            raise ValueError("strip height must be positive")

    def contains(self, z: complex) -> bool:
        return abs(z.imag) < self.height / 2.0

    def to_dict(self) -> dict:
        return {"family": "strip", "height": self.height}


@dataclass(frozen=True)
class Sector:
    """{vertex + r e^{i phi} : r > 0, |phi - bisector| < theta/2}, theta in (0, 2 pi]."""

    theta: float
    vertex: complex = 0j
    bisector: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.theta <= TWO_PI):
            raise ValueError("sector opening must lie in (0, 2*pi]")

    def contains(self, z: complex) -> bool:
        w = z - self.vertex
        if w == 0:
            return False
        delta = (cmath.phase(w) - self.bisector + math.pi) % TWO_PI - math.pi
        return abs(delta) < self.theta / 2.0

    def to_dict(self) -> dict:
        return {"family": "sector", "theta": self.theta,
                "vertex": [self.vertex.real, self.vertex.imag],
                "bisector": self.bisector}


@dataclass(frozen=True)
class ComplementOfCompact:
    obstacle: CompactSet

    def contains(self, z: complex) -> bool:
        return not self.obstacle.query(z)[1]

    def to_dict(self) -> dict:
        return {"family": "complement_of_compact", "obstacle": self.obstacle.to_dict()}


@dataclass(frozen=True)
class TranslatedUnionComplement:
    """Complement of the union of integer translates ``base_set + shift + j``.

    ``base_set`` must fit in the closed quarter disc around 0 (the constructor
    applies and records the normalizing translation).  ``count`` of None means
    the unbounded union; radius-R queries only ever see the finite prefix
    j <= R + 1/4 - shift, which is what gets materialized.
    """

    base_set: CompactSet
    count: int | None = None
    shift: float = 0.0
    normalizing_shift: complex = field(default=0j)

    def __post_init__(self):
        normalized, applied = normalize_to_quarter_disc(self.base_set)
        object.__setattr__(self, "base_set", normalized)
        object.__setattr__(self, "normalizing_shift", applied)

    def translate_range(self, radius: float) -> tuple[int, int]:
        """Integer translate indices whose copies can intersect D(0, radius)."""
        hi = int(math.floor(radius + 0.25 - self.shift))
        if self.count is not None:
            hi = min(hi, self.count)
        return 1, max(hi, 0)

    def materialize(self, radius: float) -> CompactSet | None:
        lo, hi = self.translate_range(radius)
        if hi < lo:
            return None
        prims = []
        for j in range(lo, hi + 1):
            prims.extend(p.translate(complex(j + self.shift))
                         for p in self.base_set.primitives)
        return CompactSet(tuple(prims))

    def contains(self, z: complex) -> bool:
        obstacles = self.materialize(abs(z) + 1.0)
        if obstacles is None:
            return True
        return not obstacles.query(z)[1]

    def to_dict(self) -> dict:
        return {"family": "translated_union_complement",
                "base_set": self.base_set.to_dict(),
                "count": self.count, "shift": self.shift}


@dataclass(frozen=True)
class CircleSlitDomain:
    """Plane minus the circles C_{R_n} with an open gap around angle 0.

    The gap at level n has half-angle pi / R_n^(2 p); the remaining obstacle
    is stored as the single closed arc [delta_n, 2 pi - delta_n].
    """

    radii: tuple
    exponent: float

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if len(radii) == 0:
            raise ValueError("need at least one slit radius")
        if radii[0] <= 1.0:
            raise ValueError("slit radii must exceed 1")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("slit radii must be strictly increasing")
        if not self.exponent > 0:
            raise ValueError("exponent must be positive")
        object.__setattr__(self, "radii", radii)

    def gap_half_angle(self, level: int) -> float:
        return math.pi / self.radii[level] ** (2.0 * self.exponent)

    def obstacle(self, level: int) -> Arc:
        delta = self.gap_half_angle(level)
        return Arc(0j, self.radii[level], delta, TWO_PI - delta)

    def obstacles_within(self, radius: float) -> CompactSet | None:
        arcs = tuple(self.obstacle(i) for i, r in enumerate(self.radii) if r < radius)
        return CompactSet(arcs) if arcs else None

    def contains(self, z: complex) -> bool:
        obstacles = self.obstacles_within(abs(z) + 1.0)
        if obstacles is None:
            return True
        return not obstacles.query(z)[1]

    def to_dict(self) -> dict:
        return {"family": "circle_slit", "radii": list(self.radii),
                "exponent": self.exponent}


Family = (HalfPlane | Strip | Sector | ComplementOfCompact
          | TranslatedUnionComplement | CircleSlitDomain)


@dataclass(frozen=True)
class DomainSpec:
    family: Family
    base_point: complex = 0j

    def __post_init__(self):
        if not self.family.contains(self.base_point):
            raise ValueError(f"base point {self.base_point} is not in the domain")

    def contains(self, z: complex) -> bool:
        return self.family.contains(z)

    def to_dict(self) -> dict:
        d = self.family.to_dict()
        d["base_point"] = [self.base_point.real, self.base_point.imag]
        return d

    @staticmethod
    def from_dict(d: dict) -> "DomainSpec":
        d = dict(d)
        base = complex(*d.pop("base_point", (0.0, 0.0)))
        family_tag = d.pop("family")
        if family_tag == "half_plane":
            fam = HalfPlane(float(d["angle"]), float(d["offset"]))
        elif family_tag == "strip":
            fam = Strip(float(d["height"]))
        elif family_tag == "sector":
            fam = Sector(float(d["theta"]), complex(*d["vertex"]), float(d["bisector"]))
        elif family_tag == "complement_of_compact":
            fam = ComplementOfCompact(CompactSet.from_dict(d["obstacle"]))
        elif family_tag == "translated_union_complement":
            fam = TranslatedUnionComplement(CompactSet.from_dict(d["base_set"]),
                                            d.get("count"), float(d.get("shift", 0.0)))
        elif family_tag == "circle_slit":
            fam = CircleSlitDomain(tuple(d["radii"]), float(d["exponent"]))
        else:
            raise ValueError(f"unknown family {family_tag!r}")
        return DomainSpec(fam, base)


# ---------------------------------------------------------------------------
# inner boundary oracles


class GenericInner:
    """Inner boundary as a plain compact set; distance is the exact minimum."""

    def __init__(self, pieces: CompactSet | None):
        self._pieces = pieces

    @property
    def empty(self) -> bool:
        return self._pieces is None

    def pieces(self) -> CompactSet | None:
        return self._pieces

    def distance(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        if self._pieces is None:
            return np.full(z.shape, np.inf)
        return self._pieces.distance(z)


class IntegerTranslatesInner:
    """Distance oracle for unions of integer translates of one small set.

    Evaluates the base-set distance at the five nearest translates and caps
    the remainder with the lower bound ``hypot(a, Im z) - rad`` where ``a`` is
    the gap to the nearest skipped index.  The result equals the true distance
    whenever the true distance is below that bound, in particular inside the
    absorption shell, and is a valid lower bound otherwise (safe for
    walk-on-spheres jumps).
    """

    WINDOW = 2

    def __init__(self, base_set: CompactSet, t_lo: int, t_hi: int, shift: float):
        self.base_set = base_set
        self.t_lo = t_lo
        self.t_hi = t_hi
        self.shift = shift
        self.rad = base_set.bounding_radius(0j)

    @property
    def empty(self) -> bool:
        return self.t_hi < self.t_lo

    def pieces(self) -> CompactSet | None:
        if self.empty:
            return None
        prims = []
        for j in range(self.t_lo, self.t_hi + 1):
            prims.extend(p.translate(complex(j + self.shift))
                         for p in self.base_set.primitives)
        return CompactSet(tuple(prims))

    def distance(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        if self.empty:
            return np.full(z.shape, np.inf)
        x = z.real - self.shift
        j0 = np.clip(np.rint(x), self.t_lo, self.t_hi).astype(np.int64)
        d = np.full(z.shape, np.inf)
        for off in range(-self.WINDOW, self.WINDOW + 1):
            j = j0 + off
            valid = (j >= self.t_lo) & (j <= self.t_hi)
            if not valid.any():
                continue
            dj = self.base_set.distance(z - (j + self.shift))
            d = np.where(valid, np.minimum(d, dj), d)
        lo_skip = j0 - self.WINDOW - 1
        hi_skip = j0 + self.WINDOW + 1
        a = np.full(z.shape, np.inf)
        has_lo = lo_skip >= self.t_lo
        has_hi = hi_skip <= self.t_hi
        a = np.where(has_lo, np.abs(x - lo_skip), a)
        a = np.where(has_hi, np.minimum(a, np.abs(x - hi_skip)), a)
        skipped_bound = np.where(np.isfinite(a),
                                 np.hypot(a, z.imag) - self.rad, np.inf)
        return np.minimum(d, np.maximum(skipped_bound, 0.0))


# ---------------------------------------------------------------------------
# boundary partitions


@dataclass(frozen=True)
class BoundaryPartition:
    """Boundary of the base point's component of (domain intersect D(0, R)).

    ``outer_arcs`` are angle intervals of the circle |z| = R forming the outer
    boundary piece; ``inner`` is a distance oracle over the boundary pieces of
    the domain itself inside the disc.  ``inner_scale`` is the characteristic
    size of the inner pieces: absorption shells scale with it rather than with
    R, so small obstacles keep small shells inside huge truncation discs.
    """

    radius: float
    outer_arcs: tuple
    inner: GenericInner | IntegerTranslatesInner
    certificate: str
    base_point: complex = 0j
    inner_scale: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.inner_scale is None:
            object.__setattr__(self, "inner_scale", self.radius)

    def inner_distance(self, z) -> np.ndarray:
        return self.inner.distance(z)

    def inner_pieces(self) -> CompactSet | None:
        return self.inner.pieces()

    def on_outer(self, z: complex, tol: float = 1e-9) -> bool:
        phi = cmath.phase(z) % TWO_PI
        for a0, a1 in self.outer_arcs:
            delta = (phi - a0) % TWO_PI
            if delta <= (a1 - a0) + tol or delta >= TWO_PI - tol:
                return True
        return False


def _ray_circle_hit(vertex: complex, direction: float, radius: float) -> complex:
    beta = (vertex.conjugate() * cmath.exp(1j * direction)).real
    disc = beta * beta + radius * radius - abs(vertex) ** 2
    t = -beta + math.sqrt(disc)
    return vertex + t * cmath.exp(1j * direction)


def _probe_escape(obstacle: CompactSet, start: complex, out_to: float) -> float | None:
    """Direction of a radial path from ``start`` staying clear of the obstacle."""
    for k in range(720):
        phi = TWO_PI * k / 720.0
        t = np.linspace(0.0, 1.0, 257)
        path = start + t * out_to * cmath.exp(1j * phi)
        clearance = float(np.min(obstacle.distance(path)))
        # sample spacing bounds the path deviation between nodes
        spacing = out_to / 256.0
        if clearance > spacing:
            return phi
    return None


def boundary_partition(domain: DomainSpec, radius: float) -> BoundaryPartition:
    """Split the boundary of the base component at radius R into outer and
    inner pieces, with a text certificate naming the rule used."""
    if radius <= 0 or not math.isfinite(radius):
        raise CertificateError("component rule not certified at this radius")
    fam = domain.family
    b = domain.base_point
    if abs(b) >= radius:
        raise CertificateError("component rule not certified at this radius")

    if isinstance(fam, HalfPlane):
        if radius < 2.0 * abs(fam.offset):
            raise CertificateError("component rule not certified at this radius")
        # intersection of two convex sets; chord endpoints on the circle
        s = math.sqrt(radius ** 2 - fam.offset ** 2)
        rot = cmath.exp(1j * fam.angle)
        e_plus = (fam.offset + 1j * s) * rot
        e_minus = (fam.offset - 1j * s) * rot
        beta = math.acos(fam.offset / radius)
        a0 = (fam.angle - beta) % TWO_PI
        outer = ((a0, a0 + 2.0 * beta),)
        inner = GenericInner(CompactSet((Segment(e_minus, e_plus),)))
        cert = f"half-plane: convex intersection, certified for R >= 2|offset| ({radius:g})"
        return BoundaryPartition(radius, outer, inner, cert, b)

    if isinstance(fam, Strip):
        if radius < 0.55 * fam.height:
            raise CertificateError("component rule not certified at this radius")
        h = fam.height / 2.0
        a = math.asin(h / radius)
        x = math.sqrt(radius ** 2 - h ** 2)
        outer = (((-a) % TWO_PI, (-a) % TWO_PI + 2 * a),
                 (math.pi - a, math.pi + a))
        inner = GenericInner(CompactSet((Segment(complex(-x, h), complex(x, h)),
                                         Segment(complex(-x, -h), complex(x, -h)))))
        cert = f"strip: convex intersection, certified for R >= 0.55 height ({radius:g})"
        return BoundaryPartition(radius, outer, inner, cert, b)

    if isinstance(fam, Sector):
        if radius < 2.0 * abs(fam.vertex) or not abs(fam.vertex) < radius:
            raise CertificateError("component rule not certified at this radius")
        lo_dir = fam.bisector - fam.theta / 2.0
        hi_dir = fam.bisector + fam.theta / 2.0
        hit_lo = _ray_circle_hit(fam.vertex, lo_dir, radius)
        hit_hi = _ray_circle_hit(fam.vertex, hi_dir, radius)
        segs = [Segment(fam.vertex, hit_lo)]
        if fam.theta < TWO_PI:
            segs.append(Segment(fam.vertex, hit_hi))
        phi_lo = cmath.phase(hit_lo) % TWO_PI
        phi_hi = cmath.phase(hit_hi) % TWO_PI
        if fam.theta >= TWO_PI - 1e-15:
            outer = ((phi_lo, phi_lo + TWO_PI),)
        else:
            span = (phi_hi - phi_lo) % TWO_PI
            mid = phi_lo + span / 2.0
            if fam.contains(radius * cmath.exp(1j * mid)):
                outer = ((phi_lo, phi_lo + span),)
            else:
                outer = ((phi_hi, phi_hi + (TWO_PI - span)),)
        inner = GenericInner(CompactSet(tuple(segs)))
        cert = f"sector: star-shaped about vertex, certified for R >= 2|vertex| ({radius:g})"
        return BoundaryPartition(radius, outer, inner, cert, b)

    if isinstance(fam, ComplementOfCompact):
        rho = fam.obstacle.bounding_radius(0j)
        if radius < 1.25 * rho + 1e-12:
            raise CertificateError("component rule not certified at this radius")
        phi = _probe_escape(fam.obstacle, b, rho + abs(b) + 1.0)
        if phi is None:
            raise CertificateError("component rule not certified at this radius")
        outer = ((0.0, TWO_PI),)
        inner = GenericInner(fam.obstacle)
        cert = (f"complement: radial escape probe at angle {phi:.4f} reaches the "
                f"clear annulus {rho:g} < |z| < {radius:g}; outer circle is whole")
        return BoundaryPartition(radius, outer, inner, cert, b,
                                 inner_scale=max(rho, 1e-6))

    if isinstance(fam, TranslatedUnionComplement):
        lo, hi = fam.translate_range(radius)
        nearest_int = round(radius - fam.shift)
        clearance = abs((radius - fam.shift) - nearest_int) - 0.25
        if lo <= nearest_int <= hi and clearance < 0.05:
            raise CertificateError("component rule not certified at this radius")
        inner = IntegerTranslatesInner(fam.base_set, lo, hi, fam.shift)
        outer = ((0.0, TWO_PI),)
        cert = ("translated union: obstacles inside disjoint quarter-discs at "
                f"integers {lo}..{hi} (+{fam.shift:g}); circle |z|={radius:g} "
                "clears every obstacle, complement of disjoint islands is connected")
        return BoundaryPartition(radius, outer, inner, cert, b, inner_scale=1.0)

    if isinstance(fam, CircleSlitDomain):
        for r_n in fam.radii:
            if abs(radius - r_n) < 0.01 * r_n:
                raise CertificateError("component rule not certified at this radius")
        obstacles = fam.obstacles_within(radius)
        inner = GenericInner(obstacles)
        outer = ((0.0, TWO_PI),)
        cert = ("circle-slit: each obstacle circle keeps an open gap, annular "
                f"regions below |z|={radius:g} are chained through the gaps")
        scale = fam.radii[0] if obstacles is not None else radius
        return BoundaryPartition(radius, outer, inner, cert, b,
                                 inner_scale=scale)

    raise TypeError(f"unsupported family {type(fam).__name__}")
