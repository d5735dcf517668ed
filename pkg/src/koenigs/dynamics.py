"""Non-elliptic self-maps of the unit disc from explicit linearizing maps.

Each model carries a conformal map sigma from the disc onto a translation-
invariant domain (horizontal strip, upper half-plane, or symmetric sector)
together with its inverse; the self-map is phi = sigma^{-1}(sigma + 1), so
sigma solves the linearizing functional equation sigma(phi(z)) = sigma(z) + 1
exactly.  Orbit diagnostics classify the map as hyperbolic or parabolic (of
positive or zero hyperbolic step) from the boundary-approach ratios and the
pseudo-hyperbolic step sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_ONE_INSIDE = math.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class KoenigsModel:
    """Explicit linearizing map with its inverse and base-space metadata."""

    kind: str                  # "strip" | "half_plane" | "sector"
    parameter: float           # lambda for strips, theta for sectors, nan else
    sigma: callable
    sigma_inverse: callable
    base_space: str
    recorded_translation: complex  # sigma(0); models differ from the
                                   # Re sigma(0) = 0 normalization by this shift


def strip_model(lam: float) -> KoenigsModel:
    """Disc onto the strip {0 < Im w < pi / log lam}; phi is hyperbolic with
    boundary derivative 1/lam."""
    if not lam > 1.0:
        raise ValueError("strip parameter must exceed 1")
    log_lam = math.log(lam)

    def sigma(z):
        z = np.asarray(z, dtype=np.complex128)
        return (np.log((1.0 + z) / (1.0 - z)) + 0.5j * math.pi) / log_lam

    def sigma_inverse(w):
        w = np.asarray(w, dtype=np.complex128)
        return np.tanh(0.5 * (w * log_lam - 0.5j * math.pi))

    return KoenigsModel("strip", lam, sigma, sigma_inverse,
                        f"strip 0 < Im w < {math.pi / log_lam:.6g}",
                        complex(0.0, 0.5 * math.pi / log_lam))


def halfplane_model() -> KoenigsModel:
    """Cayley map onto the upper half-plane; phi is the parabolic automorphism
    conjugate to w -> w + 1."""

    def sigma(z):
        z = np.asarray(z, dtype=np.complex128)
        return 1j * (1.0 + z) / (1.0 - z)

    def sigma_inverse(w):
        w = np.asarray(w, dtype=np.complex128)
        return (w - 1j) / (w + 1j)

    return KoenigsModel("half_plane", math.nan, sigma, sigma_inverse,
                        "upper half-plane", 1j)


def sector_model(theta: float) -> KoenigsModel:
    """Disc onto the sector {|arg w| < theta/2}, theta in (0, pi]; principal
    branch, positive on (-1, 1); phi is parabolic of positive step."""
    if not (0.0 < theta <= math.pi):
        raise ValueError("sector opening must lie in (0, pi]")
    power = theta / math.pi

    def sigma(z):
        z = np.asarray(z, dtype=np.complex128)
        return ((1.0 + z) / (1.0 - z)) ** power

    def sigma_inverse(w):
        w = np.asarray(w, dtype=np.complex128)
        u = w ** (1.0 / power)
        return (u - 1.0) / (u + 1.0)

    return KoenigsModel("sector", theta, sigma, sigma_inverse,
                        f"sector |arg w| < {theta / 2:.6g}", 1.0 + 0j)


def model_self_map(model: KoenigsModel):
    """phi(z) = sigma^{-1}(sigma(z) + 1), with saturation guards.

    Orbits reach the unit circle within double precision after finitely many
    steps; once sigma overflows the point is held fixed (it has numerically
    reached the boundary attractor).
    """

    def phi(z):
        z = np.asarray(z, dtype=np.complex128)
        with np.errstate(all="ignore"):
            out = model.sigma_inverse(model.sigma(z) + 1.0)
        bad = ~np.isfinite(out)
        if bad.any():
            out = np.where(bad, z, out)
        mag = np.abs(out)
        outside = mag >= 1.0
        if outside.any():
            out = np.where(outside, out * (_ONE_INSIDE / np.maximum(mag, 1.0)), out)
        return out if out.ndim else complex(out)

    return phi


def pseudo_hyperbolic_distance(a, b):
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    num = np.abs(a - b)
    den = np.abs(1.0 - np.conj(b) * a)
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(num == 0.0, 0.0, num / den)
    return rho if rho.ndim else float(rho)


@dataclass(frozen=True)
class OrbitReport:
    points: np.ndarray                  # z0, phi(z0), ..., phi_n(z0)
    pseudo_hyperbolic_steps: np.ndarray
    dw_estimate: complex
    derivative_estimate: float
    diagnostics: dict = field(default_factory=dict)


def iterate_orbit(phi, z0: complex, n: int) -> OrbitReport:
    """Forward orbit with boundary-approach and step diagnostics.

    The derivative estimate is the tail average of the contraction ratios
    (1 - |z_{k+1}|) / (1 - |z_k|), taken over the window where 1 - |z| is
    still resolvable in double precision.
    """
    if not abs(z0) < 1.0:
        raise ValueError("z0 must lie in the open unit disc")
    points = np.empty(n + 1, dtype=np.complex128)
    points[0] = z0
    for k in range(n):
        points[k + 1] = phi(points[k])
    rho = pseudo_hyperbolic_distance(points[:-1], points[1:])
    gaps = 1.0 - np.abs(points)
    valid = np.nonzero(gaps > 1e-13)[0]
    ratios = gaps[1:] / np.maximum(gaps[:-1], 1e-300)
    usable = valid[valid < n]
    if usable.size >= 4:
        tail = usable[-max(4, usable.size // 4):]
        derivative = float(np.clip(np.mean(ratios[tail]), 0.0, 1.0))
    else:
        derivative = 1.0
    z_last = points[-1]
    dw = z_last / abs(z_last) if abs(z_last) > 0 else complex(1.0)
    return OrbitReport(points, rho, complex(dw), derivative,
                       {"valid_window": int(usable.size),
                        "saturated": bool(usable.size < n)})


def classify_orbit(report: OrbitReport) -> dict:
    """Hyperbolic / parabolic-positive-step / parabolic-zero-step from orbit data.

    Hyperbolic when the tail contraction ratio sits below 1 by more than ten
    times its dispersion; otherwise parabolic, with the step sign read off the
    trend of the pseudo-hyperbolic step sizes (decaying to zero versus bounded
    away from it).
    """
    points = report.points
    n = points.size - 1
    gaps = 1.0 - np.abs(points)
    valid = np.nonzero(gaps > 1e-13)[0]
    usable = valid[valid < n]
    if usable.size < 8:
        return {"kind": "inconclusive",
                "note": "orbit saturated before a usable tail formed"}
    ratios = (gaps[1:] / np.maximum(gaps[:-1], 1e-300))[usable]
    tail_idx = usable[-max(6, ratios.size // 2):]
    tail = ratios[-tail_idx.size:]
    # parabolic ratios drift to 1 like 1 - c/k, so the constant-vs-drift call
    # is made on the extrapolated limit of a fit against 1/k, not the mean
    design = np.column_stack([np.ones(tail.size), 1.0 / (tail_idx + 1.0)])
    coeffs, *_ = np.linalg.lstsq(design, tail, rcond=None)
    limit = float(coeffs[0])
    resid = float(np.std(tail - design @ coeffs))
    tail_mean = float(np.mean(tail))
    notes = {"tail_mean": tail_mean, "tail_limit": limit,
             "tail_dispersion": resid, "tail_length": int(tail.size)}
    if limit < 1.0 - max(10.0 * resid, 0.005):
        return {"kind": "hyperbolic",
                "derivative": float(np.clip(limit, 0.0, 1.0)), **notes}
    rho = report.pseudo_hyperbolic_steps[usable]
    positive = rho > 0
    if not positive.any():
        return {"kind": "parabolic_zero_step", "rho_trend_slope": -math.inf, **notes}
    ks = usable[positive].astype(float) + 1.0
    log_rho = np.log(rho[positive])
    slope = float(np.polyfit(np.log(ks), log_rho, 1)[0]) if ks.size >= 4 else 0.0
    decayed = rho[positive][-1] < 0.5 * rho[positive][0]
    if slope < -0.5 and decayed:
        return {"kind": "parabolic_zero_step", "rho_trend_slope": slope, **notes}
    return {"kind": "parabolic_positive_step", "rho_trend_slope": slope, **notes}


def classify(phi, z0: complex, n_iter: int) -> dict:
    """Run an orbit and classify it; n_iter of at least 100 recommended."""
    if n_iter < 100:
        raise ValueError("need n_iter >= 100")
    return classify_orbit(iterate_orbit(phi, z0, n_iter))


def abel_residual(model: KoenigsModel, z) -> np.ndarray:
    """|sigma(phi(z)) - sigma(z) - 1| over the given points."""
    phi = model_self_map(model)
    z = np.asarray(z, dtype=np.complex128)
    return np.abs(model.sigma(phi(z)) - model.sigma(z) - 1.0)
