"""Walk-on-spheres estimation of harmonic measure.

Walks jump to a uniform point on the largest disc around the current position
that stays inside the truncated domain, and absorb once within an epsilon
shell of a boundary piece.  Every walk's randomness is a pure function of
``(seed, stream, walk index, step)``, so estimates are deterministic
reductions independent of batching.

Scans over a radius grid run as a splitting relay: walks that reach the
circle at one level are resampled as starting points for the next, and the
level estimates multiply.  This reaches exit probabilities far below 1/samples
(deep tails decay polynomially in R) at fixed cost per level.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .domains import BoundaryPartition, DomainSpec, boundary_partition
from .randomness import choice_indices, uniforms

_STREAM_WALK = 1 << 20
_STREAM_RESAMPLE = 1 << 21


class ZeroHitError(RuntimeError):
    """No walk reached the outer circle: increase samples or reduce R."""


@dataclass(frozen=True)
class WosConfig:
    samples: int = 100_000
    epsilon: float | None = None      # absolute shell; None resolves to 1e-6 * R
    max_steps: int = 100_000
    seed: int = 0
    outer_clip: float = 1e6           # free-space recurrence cap (diagnostics only)

    def __post_init__(self):
        if self.samples < 1 or self.max_steps < 1:
            raise ValueError("samples and max_steps must be >= 1")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    def resolve_epsilon(self, radius: float) -> float:
        eps = self.epsilon if self.epsilon is not None else 1e-6 * radius
        if not eps < 1e-2 * radius:
            raise ValueError("epsilon must be below 1e-2 of the domain scale")
        return eps


@dataclass(frozen=True)
class HarmonicMeasureEstimate:
    mean: float
    ci95: float
    samples_used: int
    truncated_walks: int
    stage_hits: tuple = ()

    def __post_init__(self):
        if not (-1e-9 <= self.mean <= 1.0 + 1e-9):
            raise ValueError("estimate must lie in [0, 1]")


@dataclass(frozen=True)
class WalkResult:
    label: str                 # "outer" | "inner"
    exit_point: complex
    steps: int
    truncated: bool = False


def _run_batch(partition: BoundaryPartition, starts: np.ndarray, epsilon: float,
               max_steps: int, seed: int, stream: int, walk_ids: np.ndarray,
               direction_phase: complex = 1.0):
    """Advance all walks to absorption; returns (labels, positions, steps, truncated).

    labels: 0 = outer circle, 1 = inner piece, -1 = truncated.  The outer
    shell is ``epsilon``; the inner shell is epsilon scaled down to the size
    of the inner pieces (a fixed shell around a small obstacle inside a huge
    truncation disc would inflate its hitting probability).  Ties go inner.
    """
    n = starts.size
    z = starts.astype(np.complex128).copy()
    labels = np.full(n, -1, dtype=np.int8)
    steps = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    radius = partition.radius
    eps_in = epsilon * min(partition.inner_scale / radius, 1.0)
    for t in range(max_steps + 1):
        za = z[active]
        d_out = radius - np.abs(za)
        d_in = partition.inner_distance(za)
        hit_in = d_in < eps_in
        hit = hit_in | (d_out < epsilon)
        if hit.any():
            done = active[hit]
            labels[done] = np.where(hit_in[hit], 1, 0)
            steps[done] = t
            keep = ~hit
            active = active[keep]
            za = za[keep]
            d_out = d_out[keep]
            d_in = d_in[keep]
        if active.size == 0 or t == max_steps:
            break
        d = np.minimum(d_out, d_in)
        u = uniforms(seed, stream, walk_ids[active], t)
        z[active] = za + d * direction_phase * np.exp(2j * np.pi * u)
    truncated = labels < 0
    steps[truncated] = max_steps
    return labels, z, steps, truncated


def wos_exit(partition: BoundaryPartition, start: complex, config: WosConfig,
             walk_index: int) -> WalkResult:
    """Run one walk; deterministic given (seed, walk_index)."""
    epsilon = config.resolve_epsilon(partition.radius)
    start = complex(start)
    d0 = min(partition.radius - abs(start),
             float(partition.inner_distance(np.asarray(start))))
    if not d0 > epsilon:
        raise ValueError("start must be strictly inside the truncated domain")
    labels, pos, steps, truncated = _run_batch(
        partition, np.array([start]), epsilon, config.max_steps,
        config.seed, _STREAM_WALK, np.array([walk_index], dtype=np.uint64))
    if truncated[0]:
        return WalkResult("truncated", complex(pos[0]), int(steps[0]), True)
    z = complex(pos[0])
    if labels[0] == 0:
        exit_point = z * (partition.radius / abs(z))
        return WalkResult("outer", exit_point, int(steps[0]))
    pieces = partition.inner_pieces()
    return WalkResult("inner", pieces.nearest_point(z), int(steps[0]))


def run_partition_walks(partition: BoundaryPartition, start: complex,
                        config: WosConfig, stream: int = _STREAM_WALK,
                        direction_phase: complex = 1.0):
    """All walks from one start point; returns (labels, positions, steps, truncated)."""
    epsilon = config.resolve_epsilon(partition.radius)
    starts = np.full(config.samples, complex(start), dtype=np.complex128)
    walk_ids = np.arange(config.samples, dtype=np.uint64)
    return _run_batch(partition, starts, epsilon, config.max_steps,
                      config.seed, stream, walk_ids, direction_phase)


def estimate_exit_probability(partition: BoundaryPartition, start: complex,
                              config: WosConfig) -> HarmonicMeasureEstimate:
    """Fraction of walks from ``start`` absorbed on the outer circle."""
    labels, _, _, truncated = run_partition_walks(partition, start, config)
    n_trunc = int(truncated.sum())
    n_valid = config.samples - n_trunc
    if n_valid == 0:
        raise ZeroHitError("all walks truncated; increase max_steps")
    hits = int((labels == 0).sum())
    mean = hits / n_valid
    ci = 1.96 * math.sqrt(mean * (1.0 - mean) / n_valid)
    return HarmonicMeasureEstimate(mean, ci, config.samples, n_trunc, (hits,))


def harmonic_measure(domain: DomainSpec, radius: float,
                     config: WosConfig) -> HarmonicMeasureEstimate:
    """Harmonic measure at the base point of the outer boundary piece of the
    base component of (domain intersect D(0, radius))."""
    partition = boundary_partition(domain, radius)
    return estimate_exit_probability(partition, domain.base_point, config)


def omega_scan(domain: DomainSpec, r_grid, config: WosConfig) -> list[dict]:
    """Relay estimates of the outer-exit probability at each grid radius.

    Walks surviving to one circle are resampled as starts for the next level;
    the estimate at grid radius R_k is the product of per-level survival
    fractions, which is non-increasing in k by construction.  Levels share the
    base seed and draw from per-level offset streams.
    """
    radii = [float(r) for r in r_grid]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radius grid must be strictly increasing")
    partitions = [boundary_partition(domain, r) for r in radii]
    n = config.samples
    starts = np.full(n, complex(domain.base_point), dtype=np.complex128)
    walk_ids = np.arange(n, dtype=np.uint64)
    log_product = 0.0
    var_accum = 0.0
    total_trunc = 0
    hits_per_stage: list[int] = []
    rows: list[dict] = []
    for level, partition in enumerate(partitions):
        epsilon = config.resolve_epsilon(partition.radius)
        labels, pos, _, truncated = _run_batch(
            partition, starts, epsilon, config.max_steps, config.seed,
            _STREAM_WALK + level, walk_ids)
        n_trunc = int(truncated.sum())
        n_valid = n - n_trunc
        outer = labels == 0
        hits = int(outer.sum())
        if hits == 0:
            raise ZeroHitError(
                f"no walk reached |z| = {partition.radius:g}; "
                "increase samples or reduce R")
        total_trunc += n_trunc
        frac = hits / n_valid
        log_product += math.log(frac)
        var_accum += (1.0 - frac) / (frac * n_valid)
        mean = math.exp(log_product)
        ci = 1.96 * mean * math.sqrt(var_accum)
        hits_per_stage.append(hits)
        rows.append({
            "R": partition.radius,
            "mean": mean,
            "ci95": ci,
            "truncated": total_trunc,
            "stage_hits": hits,
            "estimate": HarmonicMeasureEstimate(mean, ci, n, total_trunc,
                                                tuple(hits_per_stage)),
        })
        if level + 1 < len(partitions):
            exits = pos[outer]
            idx = choice_indices(config.seed, _STREAM_RESAMPLE + level,
                                 walk_ids, 0, exits.size)
            starts = exits[idx]
    return rows


# ---------------------------------------------------------------------------
# closed-form oracles


def annulus_outer_probability(r_inner: float, r_outer: float, start_abs: float) -> float:
    """Probability of exiting the annulus {r_inner < |z| < r_outer} through
    the outer circle from |z| = start_abs."""
    if not (0 < r_inner < start_abs < r_outer):
        raise ValueError("need r_inner < |start| < r_outer")
    return math.log(start_abs / r_inner) / math.log(r_outer / r_inner)


def halfplane_disc_outer_probability(offset: float, radius: float,
                                     z0: complex = 0j, angle: float = 0.0) -> float:
    """Harmonic measure of the circular arc of the lens
    {Re(z e^{-i angle}) > offset} intersect D(0, radius), at z0.

    A Moebius map sending the two boundary intersection points to 0 and
    infinity straightens the lens into a wedge, where the measure of one side
    is the angular coordinate.
    """
    z0 = complex(z0)
    rot = cmath.exp(1j * angle)
    w0 = z0 / rot
    if not (abs(z0) < radius and w0.real > offset):
        raise ValueError("z0 must lie inside the lens")
    s = math.sqrt(radius ** 2 - offset ** 2)
    a = complex(offset, s)
    b = complex(offset, -s)

    def moebius(z: complex) -> complex:
        return (z - a) / (z - b)

    chord_point = complex(offset, 0.0)
    arc_point = complex(radius, 0.0)
    psi_chord = cmath.phase(moebius(chord_point))
    psi_arc = cmath.phase(moebius(arc_point))
    u0 = cmath.phase(moebius(w0))
    d_arc = (psi_arc - psi_chord) % (2.0 * math.pi)
    d_u = (u0 - psi_chord) % (2.0 * math.pi)
    if d_u <= d_arc:
        return d_u / d_arc
    return (2.0 * math.pi - d_u) / (2.0 * math.pi - d_arc)
