"""Discrete measures, logarithmic potentials, and the interval arcsine law.

The equilibrium measure of [0, n] has density 1 / (pi sqrt(t (n - t))).
Integrating it over the unit cells [j-1, j] gives the cell masses used to
spread a small set's equilibrium measure along its integer translates; their
closed form is validated against adaptive quadrature in the test suite before
anything else relies on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import CompactSet


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability measure made of weighted point masses.

    Duplicate support points are merged by adding weights; weights must be
    positive and sum to 1 within 1e-12.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128).ravel()
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if pts.shape != w.shape:
            raise ValueError("points and weights must have equal length")
        if pts.size == 0:
            raise ValueError("measure needs at least one atom")
        if np.any(~np.isfinite(w)) or np.any(w <= 0.0):
            raise ValueError("weights must be positive and finite")
        uniq, inverse = np.unique(pts, return_inverse=True)
        if uniq.size != pts.size:
            merged = np.zeros(uniq.size)
            np.add.at(merged, inverse, w)
            pts, w = uniq, merged
        total = float(w.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {total!r}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return int(self.points.size)

    def translate(self, c: complex) -> "DiscreteMeasure":
        return DiscreteMeasure(self.points + c, self.weights.copy())

    def scale(self, s: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.points * s, self.weights.copy())

    def to_dict(self) -> dict:
        return {"atoms": [{"re": p.real, "im": p.imag, "w": float(w)}
                          for p, w in zip(self.points, self.weights)]}

    @staticmethod
    def from_dict(d: dict) -> "DiscreteMeasure":
        atoms = d["atoms"]
        pts = np.array([complex(a["re"], a["im"]) for a in atoms])
        w = np.array([a["w"] for a in atoms])
        return DiscreteMeasure(pts, w)


def interval_equilibrium_density(n: float, t) -> np.ndarray | float:
    """Arcsine density on [0, n]: 1/(pi sqrt(t(n-t))) inside, 0 outside,
    +inf at the endpoints."""
    if not n > 0:
        raise ValueError("interval length must be positive")
    t_arr = np.asarray(t, dtype=np.float64)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    out = np.zeros_like(t_arr)
    interior = (t_arr > 0.0) & (t_arr < n)
    out[interior] = 1.0 / (math.pi * np.sqrt(t_arr[interior] * (n - t_arr[interior])))
    out[(t_arr == 0.0) | (t_arr == n)] = np.inf
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class AlphaCoefficients:
    """Cell masses of the arcsine measure on [0, n] over [j-1, j], j = 1..n."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.size != self.n:
            raise ValueError("need exactly n values")
        object.__setattr__(self, "values", v)

    def inverse_gap_sums(self) -> np.ndarray:
        """S(k) = sum_{j != k} values[j] / |j - k| for k = 1..n, via convolution."""
        n = self.n
        kernel = np.zeros(2 * n - 1)
        d = np.arange(1, n)
        kernel[n - 1 + d] = 1.0 / d
        kernel[n - 1 - d] = 1.0 / d
        return np.convolve(self.values, kernel, mode="valid")


def alpha_coefficients(n: int) -> AlphaCoefficients:
    """Closed form via the antiderivative (2/pi) arcsin(sqrt(t/n)).

    The second half is mirrored from the first, which keeps the j <-> n+1-j
    symmetry exact and avoids the arcsin precision loss near 1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    half = (n + 1) // 2
    j = np.arange(0, half + 1, dtype=np.float64)
    cuts = (2.0 / math.pi) * np.arcsin(np.sqrt(np.minimum(j / n, 1.0)))
    first = np.diff(cuts)
    values = np.empty(n)
    values[:half] = first[:half]
    values[n - half:] = first[:half][::-1]
    if n % 2 == 1:
        # middle cell from total mass keeps the sum at exactly 1
        values[half - 1] = 1.0 - 2.0 * float(np.sum(first[:half - 1]))
    return AlphaCoefficients(n, values)


def potential(measure: DiscreteMeasure, z) -> np.ndarray | float:
    """Logarithmic potential sum_i w_i log|z - p_i|; -inf at the atoms."""
    z_arr = np.asarray(z, dtype=np.complex128)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    with np.errstate(divide="ignore"):
        vals = np.log(np.abs(z_arr[:, None] - measure.points[None, :]))
    out = vals @ measure.weights
    return float(out[0]) if scalar else out


def smoothed_potential(measure: DiscreteMeasure, z, floors: np.ndarray) -> np.ndarray:
    """Potential with each atom smeared on a circle of radius floors[i].

    Equals the atomic potential outside the smear circles and stays finite
    inside; used by the diagnostics that sample near the support.
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    d = np.abs(z_arr[:, None] - measure.points[None, :])
    vals = np.log(np.maximum(d, floors[None, :]))
    return vals @ measure.weights


def energy(measure: DiscreteMeasure) -> float:
    """Off-diagonal discrete energy sum_{i != j} w_i w_j log|p_i - p_j|."""
    if measure.size < 2:
        raise ValueError("energy needs at least 2 atoms")
    diff = np.abs(measure.points[:, None] - measure.points[None, :])
    off = ~np.eye(measure.size, dtype=bool)
    if np.any(diff[off] == 0.0):
        raise ValueError("degenerate support")
    logd = np.zeros_like(diff)
    logd[off] = np.log(diff[off])
    return float(measure.weights @ logd @ measure.weights)


def sigma_measure(nu: DiscreteMeasure, n: int) -> DiscreteMeasure:
    """Cell-weighted spread of ``nu`` along the translates +1..+n.

    Requires the support of ``nu`` inside the closed quarter disc; the result
    is the probability measure with mass alpha_j on the copy nu + j.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if float(np.max(np.abs(nu.points))) > 0.25 + 1e-9:
        raise ValueError("support must lie in the closed disc D(0, 1/4)")
    alphas = alpha_coefficients(n).values
    pts = (nu.points[None, :] + np.arange(1, n + 1)[:, None]).ravel()
    w = (alphas[:, None] * nu.weights[None, :]).ravel()
    return DiscreteMeasure(pts, w)


# ---------------------------------------------------------------------------
# potential diagnostics for spread measures


def _atom_floors(nu: DiscreteMeasure, scale: float = 1e-4) -> np.ndarray:
    """Per-atom smear radii: a small fraction of the nearest-atom spacing."""
    if nu.size == 1:
        return np.array([scale])
    d = np.abs(nu.points[:, None] - nu.points[None, :])
    np.fill_diagonal(d, np.inf)
    return scale * d.min(axis=1)


class SpreadPotential:
    """Efficient evaluator of the potential of ``sigma_measure(nu, n)``.

    Uses p_sigma(z) = sum_j alpha_j p_nu(z - j) and caches p_nu on translated
    copies of a fixed local grid, which turns dense evaluation over all n
    translates into one table plus weighted shifts.
    """

    def __init__(self, nu: DiscreteMeasure, n: int):
        self.nu = nu
        self.n = n
        self.alphas = alpha_coefficients(n).values
        self.floors = _atom_floors(nu)

    def at(self, z) -> np.ndarray:
        z_arr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        out = np.zeros(z_arr.shape, dtype=np.float64)
        chunk = max(1, int(2_000_000 // max(self.nu.size, 1)))
        for start in range(0, z_arr.size, chunk):
            zs = z_arr[start:start + chunk]
            acc = np.zeros(zs.shape)
            for j in range(1, self.n + 1):
                acc += self.alphas[j - 1] * smoothed_potential(
                    self.nu, zs - j, self.floors)
            out[start:start + chunk] = acc
        return out

    def on_local_grid(self, local: np.ndarray) -> np.ndarray:
        """Values at every point ``local[u] + k`` for k = 1..n, shape (n, len(local)).

        local + k - j runs over local + d for d in 1-n .. n-1, so p_nu is
        tabulated once per offset d and combined with the cell weights.
        """
        n = self.n
        offsets = np.arange(1 - n, n)
        table = np.empty((offsets.size, local.size))
        for idx, d in enumerate(offsets):
            table[idx] = smoothed_potential(self.nu, local + d, self.floors)
        result = np.empty((n, local.size))
        for k in range(1, n + 1):
            rows = (k - np.arange(1, n + 1)) + (n - 1)
            result[k - 1] = self.alphas @ table[rows]
        return result


def _equilibrium_of(compact: CompactSet, grid_size: int = 512) -> DiscreteMeasure:
    from .capacity import capacity_estimate_energy  # deferred: avoids cycle
    if compact.is_polar:
        raise ValueError("equilibrium measure undefined")
    return capacity_estimate_energy(compact, grid_size).measure


def sigma_potential_report(compact: CompactSet, n: int,
                           per_primitive: int = 384,
                           nu: DiscreteMeasure | None = None) -> dict:
    """How flat the spread potential is: max |p - log(n/4)| on the base set
    and min p over the translate union."""
    if compact.is_polar:
        raise ValueError("equilibrium measure undefined")
    if nu is None:
        nu = _equilibrium_of(compact)
    spread = SpreadPotential(nu, n)
    target = math.log(n / 4.0)
    base_grid = compact.sample(per_primitive)
    dev = spread.at(base_grid) - target
    local = np.concatenate([nu.points, compact.sample(per_primitive)])
    on_union = spread.on_local_grid(local)
    return {
        "n": n,
        "max_dev_on_E": float(np.max(np.abs(dev))),
        "min_on_Kn": float(np.min(on_union)),
        "log_n_over_4": target,
    }


def gamma_diagnostic(compact: CompactSet, m: int, z_list,
                     per_primitive: int = 384,
                     nu: DiscreteMeasure | None = None) -> dict:
    """Normalized spread potential gamma = p - min(p on the translate union).

    The minimum is sampled at the atom locations plus a dense grid on every
    translate; gamma is nonnegative up to the sampling gap.
    """
    if compact.is_polar:
        raise ValueError("equilibrium measure undefined")
    if nu is None:
        nu = _equilibrium_of(compact)
    spread = SpreadPotential(nu, m)
    local = np.concatenate([nu.points, compact.sample(per_primitive)])
    lambda_m = float(np.min(spread.on_local_grid(local)))
    z_arr = np.atleast_1d(np.asarray(z_list, dtype=np.complex128))
    gamma = spread.at(z_arr) - lambda_m
    return {"lambda_m": lambda_m, "gamma_values": gamma}
