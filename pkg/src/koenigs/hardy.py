"""Hardy numbers of planar domains and of explicit disc maps.

The estimator fits the decay exponent of the outer harmonic measure: the
Hardy number of a domain containing its base point is the liminf of
``-log w(R) / log R``, where ``w(R)`` is the harmonic measure at the base
point of the outer circle piece of the radius-R truncation.  At finite R only
a slope over the largest-radius window is observable, so results carry the
fit window, the residual dispersion, and a verdict instead of a bare number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import (CircleSlitDomain, DomainSpec, TranslatedUnionComplement)
from .geometry import CompactSet
from .wos import WosConfig, omega_scan


@dataclass(frozen=True)
class HardyEstimate:
    slope: float
    per_point: tuple              # rows: {R, neg_log_omega, log_R, stage_hits, ci95}
    fit_window: tuple             # (start, stop) indices into per_point
    dispersion: float             # max |fit residual| over the window
    verdict: str                  # "finite" | "unbounded_trend" | "zero_trend"
    window_slopes: tuple = ()

    @property
    def value(self) -> float | None:
        return self.slope if self.verdict == "finite" else None


def hardy_closed_form(family: str, theta: float | None = None) -> float:
    """Half-plane -> 1, strip -> +inf, sector of opening theta -> pi/theta."""
    if family == "half_plane":
        return 1.0
    if family == "strip":
        return math.inf
    if family == "sector":
        if theta is None or not (0.0 < theta <= 2.0 * math.pi):
            raise ValueError("sector opening must lie in (0, 2*pi]")
        return math.pi / theta
    raise ValueError(f"no closed form for family {family!r}")


def _fit_slope(log_r: np.ndarray, neg_log_w: np.ndarray) -> tuple[float, float]:
    coeffs = np.polyfit(log_r, neg_log_w, 1)
    resid = neg_log_w - np.polyval(coeffs, log_r)
    return float(coeffs[0]), float(np.max(np.abs(resid)))


def hardy_estimate(domain: DomainSpec, r_grid, config: WosConfig,
                   fit_window: tuple[int, int] | None = None,
                   min_stage_hits: int = 50) -> HardyEstimate:
    """Slope of -log w against log R over the top half of the grid.

    The verdict is ``unbounded_trend`` when the slope keeps growing across
    three nested suffix windows, ``zero_trend`` when the last-window slope is
    below 0.05, and ``finite`` otherwise.
    """
    rows = omega_scan(domain, r_grid, config)
    for row in rows:
        if row["stage_hits"] < min_stage_hits:
            raise ValueError(
                f"only {row['stage_hits']} hits at R = {row['R']:g}; "
                "increase samples or reduce R")
    log_r = np.array([math.log(row["R"]) for row in rows])
    neg_log_w = np.array([-math.log(row["mean"]) for row in rows])
    count = len(rows)
    if fit_window is None:
        fit_window = (count // 2, count)
    lo, hi = fit_window
    if hi - lo < 2:
        raise ValueError("fit window needs at least two grid points")
    slope, dispersion = _fit_slope(log_r[lo:hi], neg_log_w[lo:hi])

    suffix_starts = [s for s in (count // 2, count // 2 + 1, count // 2 + 2)
                     if count - s >= 2]
    window_slopes = tuple(_fit_slope(log_r[s:], neg_log_w[s:])[0]
                          for s in suffix_starts)
    last_slope = window_slopes[-1] if window_slopes else slope
    if last_slope < 0.05:
        verdict = "zero_trend"
    elif (len(window_slopes) == 3
          and window_slopes[0] < window_slopes[1] < window_slopes[2]
          and window_slopes[2] > 1.05 * window_slopes[0]):
        verdict = "unbounded_trend"
    else:
        verdict = "finite"
    per_point = tuple({"R": row["R"], "neg_log_omega": float(nl),
                       "log_R": float(lr), "stage_hits": row["stage_hits"],
                       "ci95": row["ci95"], "mean": row["mean"]}
                      for row, nl, lr in zip(rows, neg_log_w, log_r))
    return HardyEstimate(slope, per_point, (lo, hi), dispersion, verdict,
                         window_slopes)


# ---------------------------------------------------------------------------
# prescribed-decay circle-slit construction


@dataclass(frozen=True)
class PrescribedDomainResult:
    p: float
    radii: tuple
    root_residuals: tuple
    domain: DomainSpec
    diagnostics: dict = field(default_factory=dict)


def _relay_radii(target: float, obstacle_radii, start: float = 3.0) -> list[float]:
    """Geometric relay ladder up to ``target``, nudged off obstacle circles."""
    factor = math.sqrt(10.0)
    ladder = [target]
    while ladder[-1] / factor > start:
        ladder.append(ladder[-1] / factor)
    ladder = sorted(ladder)
    adjusted: list[float] = []
    for r in ladder:
        for r_n in obstacle_radii:
            while abs(r - r_n) < 0.02 * r_n:
                r *= 1.05
        if r < target * (1.0 - 1e-12) and (not adjusted or r > adjusted[-1] * 1.01):
            adjusted.append(r)
    adjusted.append(target)
    return adjusted


def _omega_at(radius: float, radii: tuple, p: float, config: WosConfig) -> float:
    domain = DomainSpec(CircleSlitDomain(tuple(radii), p))
    ladder = _relay_radii(radius, radii)
    rows = omega_scan(domain, ladder, config)
    return rows[-1]["mean"]


def construct_prescribed_domain(p: float, levels: int, config: WosConfig,
                                root_tol: float = 0.01,
                                radius_cap: float = 1e14) -> PrescribedDomainResult:
    """Grow the circle-slit radii so the outer harmonic measure at each new
    radius equals R^(-p).

    Starts from R_1 = 2 and finds each next radius by bracketed bisection of
    f(R) = w_hat(R) - R^(-p), with common random numbers across bisection
    iterates (same seed and per-level streams, so f is a deterministic
    function of R).  f < 0 up to the square of the previous radius and
    eventually positive because the truncated complement is bounded, so the
    bracket exists; the growth R_{N+1} >= R_N^2 follows.
    """
    if not p > 0:
        raise ValueError("p must be positive")
    if levels < 1:
        raise ValueError("need at least one level")
    radii = [2.0]
    residuals: list[float] = []
    trace: list[dict] = []
    while len(radii) < levels:
        current = tuple(radii)
        r_last = radii[-1]

        def f(radius: float) -> float:
            return _omega_at(radius, current, p, config) - radius ** (-p)

        near = f(1.3 * r_last)
        if near >= 0:
            raise RuntimeError(f"expected negative gap just above R_{len(radii)}")
        lo, f_lo = 1.3 * r_last, near
        cand = r_last * r_last
        while True:
            f_cand = f(cand)
            trace.append({"R": cand, "f": f_cand})
            if f_cand > 0:
                hi, f_hi = cand, f_cand
                break
            lo, f_lo = cand, f_cand
            cand *= 2.0
            if cand > radius_cap:
                raise RuntimeError(
                    f"no sign change below radius cap {radius_cap:g}; "
                    f"scan trace: {trace}")
        while hi / lo - 1.0 > root_tol:
            mid = math.sqrt(lo * hi)
            f_mid = f(mid)
            if f_mid > 0:
                hi, f_hi = mid, f_mid
            else:
                lo, f_lo = mid, f_mid
        root = math.sqrt(lo * hi)
        residuals.append(abs(f(root)))
        radii.append(root)
    domain = DomainSpec(CircleSlitDomain(tuple(radii), p))
    return PrescribedDomainResult(p, tuple(radii), tuple(residuals), domain,
                                  {"bracket_trace_len": len(trace),
                                   "root_tol": root_tol})


# ---------------------------------------------------------------------------
# lower-bound experiment for integer-translate complements


def default_geometric_grid(r_max: float = 1.0e4, points: int = 7,
                           half_integer: bool = False) -> list[float]:
    """Geometric grid from 10 to r_max; optionally snapped to half-integers
    (integer-translate obstacles need circle clearance)."""
    grid = np.geomspace(10.0, r_max, points)
    if half_integer:
        grid = np.floor(grid) + 0.5
    return [float(g) for g in grid]


def koenigs_lower_bound_experiment(base: CompactSet, config: WosConfig,
                                   r_grid=None) -> dict:
    """Hardy-number estimate for the complement of the integer translates of
    a small compact set.

    The obstacles sit at base+2, base+3, ... and the walks start at 0, which
    is the base point -1 of the unshifted translate union moved by the affine
    shift +1 (the Hardy number is affine-invariant; the shift is recorded).
    """
    if base.is_polar:
        raise ValueError(
            "polar base set: the complement is non-regular and its Hardy "
            "number is zero; experiment skipped")
    family = TranslatedUnionComplement(base, count=None, shift=1.0)
    domain = DomainSpec(family, base_point=0j)
    if r_grid is None:
        r_grid = default_geometric_grid(half_integer=True)
    estimate = hardy_estimate(domain, r_grid, config)
    return {
        "estimate": estimate,
        "domain": domain,
        "affine_shift": 1.0,
        "base_point_unshifted": -1.0,
        "normalizing_shift": family.normalizing_shift,
    }


# ---------------------------------------------------------------------------
# Hardy numbers of explicit maps via integral means


def hardy_of_map_integral_means(map_spec: str, p_grid, r_grid=None,
                                n_angles: int = 4096, theta: float | None = None,
                                lam: float = math.e) -> dict:
    """Growth of the p-th integral means of an explicit disc map.

    For each p the means M_p(r) over circles r -> 1 are classified as bounded
    when the last two dyadic steps agree within 5 percent, else unbounded
    (with the fitted growth rate of log M_p in -log(1-r)).  Returns the
    largest grid p classified bounded and the full growth table.
    """
    from . import dynamics

    if map_spec == "constant_zero":
        def func(z):
            return np.zeros_like(z)
    elif map_spec == "sector_power":
        if theta is None:
            raise ValueError("sector_power needs theta")
        model = dynamics.sector_model(theta)
        func = model.sigma
    elif map_spec == "cayley_half_plane":
        func = dynamics.halfplane_model().sigma
    elif map_spec == "strip_log":
        func = dynamics.strip_model(lam).sigma
    else:
        raise ValueError(f"unknown map spec {map_spec!r}")

    if r_grid is None:
        r_grid = [1.0 - 2.0 ** (-k) for k in range(4, 17)]
    r_grid = sorted(float(r) for r in r_grid)
    if not all(0.0 < r < 1.0 for r in r_grid):
        raise ValueError("r grid must lie in (0, 1)")

    p_values = sorted(float(p) for p in p_grid)
    if not all(p > 0 for p in p_values):
        raise ValueError("p grid must be positive")
    log_means = np.empty((len(p_values), len(r_grid)))
    for j, r in enumerate(r_grid):
        # the circle must be sampled finer than the boundary singularities it
        # approaches, else the means saturate at the grid resolution
        n_here = max(n_angles, 8 * int(2.0 ** math.ceil(math.log2(1.0 / (1.0 - r)))))
        angles = 2.0 * np.pi * (np.arange(n_here) + 0.5) / n_here
        boundary = np.exp(1j * angles)
        vals = np.abs(func(r * boundary))
        with np.errstate(divide="ignore"):
            log_abs = np.where(vals > 0.0, np.log(vals), -np.inf)
        for i, p in enumerate(p_values):
            scaled = p * log_abs
            peak = float(np.max(scaled))
            if peak == -math.inf:
                log_means[i, j] = -math.inf
                continue
            log_means[i, j] = peak + math.log(
                float(np.mean(np.exp(scaled - peak))))

    table = []
    finite_p = None
    x = -np.log1p(-np.asarray(r_grid))
    for i, p in enumerate(p_values):
        lm = log_means[i]
        note = ""
        if not np.all(np.isfinite(lm)):
            bounded = bool(np.all(lm == -math.inf))
            growth_rate = 0.0 if bounded else math.inf
            note = "non-finite means" if not bounded else "identically zero"
        elif lm[-1] > 700.0:
            bounded = False
            growth_rate = float(np.polyfit(x[-4:], lm[-4:], 1)[0])
            note = "overflow-scale growth"
        else:
            last_two = abs(lm[-1] - lm[-2])
            bounded = last_two < math.log(1.05)
            growth_rate = float(np.polyfit(x[-4:], lm[-4:], 1)[0])
        if bounded:
            finite_p = p
        table.append({"p": p, "bounded": bounded, "growth_rate": growth_rate,
                      "log_means": lm.tolist(), "note": note})
    return {"finite_p": finite_p, "table": table,
            "r_grid": list(r_grid), "map": map_spec}
