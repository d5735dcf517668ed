"""Logarithmic capacity: closed forms, greedy Leja products, and energy
maximization over the weight simplex.

Two independent estimators cross-validate each other.  The Leja route is the
scaled geometric mean of pairwise distances of greedily chosen points; the
energy route maximizes the exact logarithmic energy of grid measures whose
atoms are smeared on tiny disjoint circles (the smearing supplies the
self-energy term that makes the problem concave and keeps mass from
collapsing onto a vertex of the simplex).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ClosedDisc, CompactSet, FinitePoints, Segment
from .measures import DiscreteMeasure, energy, smoothed_potential


class NonConvergenceError(RuntimeError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class CapacityEstimate:
    value: float
    method: str
    points_used: int
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.value >= 0.0:
            raise ValueError("capacity must be nonnegative")


def capacity_closed_form(shape: str, **params) -> CapacityEstimate:
    """Closed forms: interval -> L/4, disc -> r, finite point set -> 0."""
    if shape == "interval":
        length = float(params["length"])
        if length < 0:
            raise ValueError("length must be >= 0")
        return CapacityEstimate(length / 4.0, "closed_form", 0, {"shape": shape})
    if shape == "disc":
        radius = float(params["radius"])
        if radius < 0:
            raise ValueError("radius must be >= 0")
        return CapacityEstimate(radius, "closed_form", 0, {"shape": shape})
    if shape == "points":
        return CapacityEstimate(0.0, "closed_form", 0, {"shape": shape, "polar": True})
    raise ValueError(f"no closed form for shape {shape!r}")


# ---------------------------------------------------------------------------
# Leja points


def _diameter_pair(candidates: np.ndarray) -> tuple[int, int]:
    """Indices of a farthest pair; ties resolve to the smallest index pair."""
    n = candidates.size
    if n <= 600:
        hull_idx = np.arange(n)
    else:
        from scipy.spatial import ConvexHull, QhullError
        pts = np.column_stack([candidates.real, candidates.imag])
        try:
            hull_idx = np.sort(ConvexHull(pts).vertices)
        except QhullError:
            # collinear input: extremes along the principal direction suffice
            centered = pts - pts.mean(axis=0)
            direction = centered[np.argmax(np.abs(centered).sum(axis=1))]
            proj = centered @ direction
            hull_idx = np.sort(np.unique([int(np.argmin(proj)), int(np.argmax(proj))]))
    sub = candidates[hull_idx]
    dist = np.abs(sub[:, None] - sub[None, :])
    flat = int(np.argmax(dist))
    i, j = np.unravel_index(flat, dist.shape)
    a, b = int(hull_idx[i]), int(hull_idx[j])
    return (a, b) if a < b else (b, a)


def leja_points(compact: CompactSet, count: int, candidate_grid=None,
                per_primitive: int = 256) -> tuple[np.ndarray, np.ndarray]:
    """Greedy product-maximizing points from a candidate grid.

    Returns ``(points, pair_log_sums)`` where ``pair_log_sums[k]`` is the sum
    of log-distances over all pairs among the first k+1 points.  The first two
    points realize the grid diameter; each later point maximizes the product
    of distances to those already chosen, ties broken by smallest grid index.
    """
    if compact.is_polar:
        raise ValueError("polar set: transfinite diameter is zero")
    if count < 2:
        raise ValueError("need k >= 2")
    if candidate_grid is None:
        per = max(per_primitive, math.ceil(10 * count / len(compact.primitives)))
        candidate_grid = compact.sample(per)
    candidates = np.asarray(candidate_grid, dtype=np.complex128)
    if candidates.size < 10 * count:
        raise ValueError("candidate grid must have at least 10 k points")
    i0, i1 = _diameter_pair(candidates)
    chosen = [candidates[i0], candidates[i1]]
    pair_sums = [math.log(abs(candidates[i1] - candidates[i0]))]
    with np.errstate(divide="ignore"):
        gains = (np.log(np.abs(candidates - chosen[0]))
                 + np.log(np.abs(candidates - chosen[1])))
    for _ in range(count - 2):
        nxt = int(np.argmax(gains))
        pair_sums.append(pair_sums[-1] + float(gains[nxt]))
        z = candidates[nxt]
        chosen.append(z)
        with np.errstate(divide="ignore"):
            gains += np.log(np.abs(candidates - z))
    return np.asarray(chosen), np.asarray(pair_sums)


def capacity_estimate_leja(compact: CompactSet, count: int, candidate_grid=None,
                           per_primitive: int = 256) -> CapacityEstimate:
    """Scaled geometric mean of pairwise distances over Leja points.

    value = (prod_{i<j} |z_i - z_j|)^(2 / (k (k-1))); the diagnostics carry the
    whole d_k sequence for intermediate k.
    """
    points, pair_sums = leja_points(compact, count, candidate_grid, per_primitive)
    ks = np.arange(2, count + 1)
    d_seq = np.exp(2.0 * pair_sums / (ks * (ks - 1)))
    return CapacityEstimate(float(d_seq[-1]), "leja", count,
                            {"d_k": d_seq.tolist(),
                             "points": points})


# ---------------------------------------------------------------------------
# energy maximization over the simplex


_SMEAR_SCALE = 0.08


def _smear_radii(points: np.ndarray) -> np.ndarray:
    """Disjoint self-interaction radii as a fraction of the local spacing.

    The fraction trades a slight capacity underestimate (smaller circles carry
    more negative self-energy) against keeping the smeared tube set close to
    the original set, so the optimal energy never exceeds the true one by more
    than the Frostman tolerance."""
    d = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(d, np.inf)
    spacing = d.min(axis=1)
    return np.minimum(_SMEAR_SCALE * spacing, 0.499 * spacing)


def _kkt_solve(matrix: np.ndarray, support: np.ndarray) -> tuple[np.ndarray, float]:
    m = support.size
    kkt = np.empty((m + 1, m + 1))
    kkt[:m, :m] = 2.0 * matrix[np.ix_(support, support)]
    kkt[:m, m] = 1.0
    kkt[m, :m] = 1.0
    kkt[m, m] = 0.0
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError:
        sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    return sol[:m], float(sol[m])


def _projected_gradient_norm(w: np.ndarray, grad: np.ndarray) -> float:
    """Norm of w - proj_simplex(w + grad); zero exactly at a KKT point."""
    stepped = w + grad
    u = np.sort(stepped)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u - css / np.arange(1, u.size + 1) > 0)[0][-1]
    tau = css[rho] / (rho + 1.0)
    projected = np.maximum(stepped - tau, 0.0)
    return float(np.linalg.norm(w - projected))


def capacity_estimate_energy(compact: CompactSet, grid_size: int = 512,
                             candidate_grid=None, tol: float = 1e-8,
                             max_iter: int = 10_000):
    """Maximize the energy of smeared grid measures over the weight simplex.

    The optimum is found by an active-set iteration on the KKT system (each
    step solves the equality-constrained Newton system on the current
    support), which drives the projected-gradient norm to machine zero.
    Returns an object with ``estimate`` (value = exp of the off-diagonal
    energy of the solution measure) and ``measure`` (weights below 1e-9
    pruned, then renormalized).
    """
    if compact.is_polar:
        raise ValueError("polar set: equilibrium measure undefined")
    if grid_size < 16:
        raise ValueError("grid size must be at least 16")
    if candidate_grid is None:
        per = max(16, grid_size // len(compact.primitives))
        candidate_grid = compact.sample(per)
    points = np.unique(np.asarray(candidate_grid, dtype=np.complex128))
    m = points.size
    radii = _smear_radii(points)
    dist = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(dist, 1.0)
    matrix = np.log(dist)
    np.fill_diagonal(matrix, np.log(radii))

    support = np.arange(m)
    w_full = np.full(m, 1.0 / m)
    history = []
    add_tol = 1e-9
    for iteration in range(max_iter):
        w_s, mu = _kkt_solve(matrix, support)
        if not np.all(np.isfinite(w_s)):
            w_s, mu = _kkt_solve(matrix + 1e-12 * np.eye(m), support)
        if np.any(w_s < -1e-12):
            keep = w_s > 1e-14
            if keep.sum() == w_s.size:
                keep[int(np.argmin(w_s))] = False
            if keep.sum() < 2:
                keep = np.argsort(w_s) >= w_s.size - 2
            support = support[keep]
            history.append(("drop", int(support.size)))
            continue
        w_full = np.zeros(m)
        w_full[support] = np.maximum(w_s, 0.0)
        grad = 2.0 * (matrix @ w_full)
        off = np.setdiff1d(np.arange(m), support, assume_unique=False)
        violations = grad[off] - mu if off.size else np.array([])
        threshold = add_tol * max(1.0, abs(mu))
        if violations.size and violations.max() > threshold:
            worst = off[np.argsort(violations)[-8:]]
            support = np.sort(np.concatenate([support, worst]))
            history.append(("add", int(support.size)))
            # loosening the tolerance on re-adds breaks degenerate cycling
            add_tol *= 1.5
            continue
        break
    else:
        raise NonConvergenceError(
            "active-set iteration did not converge",
            {"iterations": max_iter, "support": int(support.size),
             "history_tail": history[-10:]})

    grad = 2.0 * (matrix @ w_full)
    pg_norm = _projected_gradient_norm(w_full, grad)

    keep = w_full > 1e-9
    weights = w_full[keep] / w_full[keep].sum()
    measure = DiscreteMeasure(points[keep], weights)
    # the maximized objective is the exact energy of the circle-smeared
    # measure; the bare off-diagonal sum of the atoms overstates it by the
    # dropped self-energy, so the smeared value is the capacity estimate
    smeared_energy = float(w_full @ (matrix @ w_full))
    value = math.exp(smeared_energy)
    estimate = CapacityEstimate(value, "energy", int(keep.sum()),
                                {"pg_norm": pg_norm,
                                 "smeared_energy": smeared_energy,
                                 "offdiag_energy": energy(measure),
                                 "active_set_steps": iteration + 1,
                                 "grid_size": m})
    return EnergySolveResult(estimate, measure, radii[keep])


@dataclass(frozen=True)
class EnergySolveResult:
    estimate: CapacityEstimate
    measure: DiscreteMeasure
    smear_radii: np.ndarray

    def frostman_gap(self, z) -> np.ndarray:
        """p(z) - I over the given points, in the smeared model that defines
        the maximized energy; nonnegative up to solver tolerance."""
        p = smoothed_potential(self.measure, z, self.smear_radii)
        return p - self.estimate.diagnostics["smeared_energy"]


# ---------------------------------------------------------------------------
# translated-union capacity experiment


def kn_capacity_experiment(base: CompactSet, n_list, per_component: int = 256,
                           k_cap: int = 2048) -> list[dict]:
    """Capacity of the n-translate union against the length-n interval.

    Emits one row per n with the estimate, the interval value n/4, their
    ratio, and the sqrt(n)-scaled log error.  Polar bases short-circuit to
    zero capacity with a flag (no asymptotic claim is made for them).
    """
    from .geometry import build_kn
    if base.bounding_radius(0j) > 0.25 + 1e-9:
        raise ValueError("E out of normalization range")
    rows = []
    for n in sorted(int(n) for n in n_list):
        cap_interval = n / 4.0
        if base.is_polar:
            rows.append({"n": n, "cap_kn": 0.0, "cap_interval": cap_interval,
                         "ratio": 0.0, "scaled_error": math.inf,
                         "flag": "polar input"})
            continue
        union = build_kn(base, n)
        k = min(8 * n, k_cap)
        per = max(per_component, math.ceil(10 * k / len(union.primitives)))
        est = capacity_estimate_leja(union, k, per_primitive=per)
        ratio = est.value / cap_interval
        scaled = math.sqrt(n) * abs(math.log(est.value) - math.log(cap_interval))
        rows.append({"n": n, "cap_kn": est.value, "cap_interval": cap_interval,
                     "ratio": ratio, "scaled_error": scaled, "flag": ""})
    return rows
