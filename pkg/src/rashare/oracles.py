"""Independent brute-force and numeric references used by tests and validation.

Nothing here shares code paths with the optimizers it checks: the beamformer
oracle searches a power split numerically, the pointing oracle enumerates a
dense angle grid, and the calculus oracles use finite differences and sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import Scenario, st_channel_vector
from .driver import sample_cap_pointing
from .geometry import orientation_to_pointing
from .pointing import build_cosine_cache, leakage_grad

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class GridSpec:
    """Angular resolution of the exhaustive pointing search, radians."""

    zenith_step: float
    azimuth_step: float

    def __post_init__(self):
        if self.zenith_step <= 0.0 or self.azimuth_step <= 0.0:
            raise ValueError("grid resolutions must be positive")

    @classmethod
    def for_elements(cls, n: int) -> "GridSpec":
        # 1 deg x 2 deg resolves the narrow beam for a single element; the
        # two-element joint grid needs a coarser 4 deg x 8 deg to stay desk-scale.
        if n <= 1:
            return cls(math.radians(1.0), math.radians(2.0))
        return cls(math.radians(4.0), math.radians(8.0))


def angle_grid_pointings(max_zenith: float, grid: GridSpec) -> np.ndarray:
    """All unit boresights on the zenith/azimuth grid inside the cone, (G, 3)."""
    zeniths = np.arange(0.0, max_zenith + 1e-12, grid.zenith_step)
    azimuths = np.arange(0.0, 2.0 * math.pi - 1e-12, grid.azimuth_step)
    pts = [orientation_to_pointing((z, a)) for z in zeniths for a in azimuths]
    return np.unique(np.round(np.array(pts), 15), axis=0)


def grid_search_pointing(w, sc: Scenario, grid: GridSpec | None = None):
    """Exhaustive search of the signal power over gridded feasible pointings.

    Supports one or two elements (the joint grid grows exponentially).  Grid
    points whose exact interference exceeds the cap are discarded.  Returns the
    best pointing (N, 3) and its exact signal power; raises if no grid point is
    feasible.
    """
    n = sc.n_elements
    if n > 2:
        raise ValueError("the exhaustive oracle is limited to at most two elements")
    if grid is None:
        grid = GridSpec.for_elements(n)
    w = np.asarray(w, dtype=complex)
    pts = angle_grid_pointings(sc.max_zenith, grid)

    # Per-element partial sums of w^H h over every candidate boresight.
    sig = np.empty((n, len(pts)), dtype=complex)
    leak = np.empty((n, len(pts)), dtype=complex)
    for j, f in enumerate(pts):
        pointing = np.tile(f, (n, 1))
        h_ss = st_channel_vector(pointing, sc.sr_position, sc)
        h_sp = st_channel_vector(pointing, sc.pr_position, sc)
        sig[:, j] = np.conj(w) * h_ss
        leak[:, j] = np.conj(w) * h_sp

    cap = sc.interference_cap
    if n == 1:
        power = np.abs(sig[0]) ** 2
        feasible = np.abs(leak[0]) ** 2 <= cap
        if not feasible.any():
            raise ValueError("no feasible grid point under the interference cap")
        power = np.where(feasible, power, -1.0)
        best = int(np.argmax(power))
        return pts[best][None, :], float(power[best])

    total_sig = sig[0][:, None] + sig[1][None, :]
    total_leak = leak[0][:, None] + leak[1][None, :]
    power = np.abs(total_sig) ** 2
    feasible = np.abs(total_leak) ** 2 <= cap
    if not feasible.any():
        raise ValueError("no feasible grid point under the interference cap")
    power = np.where(feasible, power, -1.0)
    best = int(np.argmax(power))
    i, j = divmod(best, len(pts))
    return np.vstack([pts[i], pts[j]]), float(power.ravel()[best])


def numeric_beamformer_p2(h_ss, h_sp, max_power: float, cap: float, tol: float = 1e-10):
    """Numeric reference for the beamformer: golden-section over the power split.

    The optimum lies in span{h_ss, h_sp}; with the relative phase fixed by
    coherent alignment the only free parameter is the fraction of amplitude on
    the leakage-aligned direction, capped by the interference constraint.
    Returns (w, objective).
    """
    h_ss = np.asarray(h_ss, dtype=complex)
    h_sp = np.asarray(h_sp, dtype=complex)
    if float(np.linalg.norm(h_ss)) == 0.0:
        raise ValueError("signal channel is zero")
    norm_sp = float(np.linalg.norm(h_sp))
    if norm_sp == 0.0:
        w = math.sqrt(max_power) * h_ss / np.linalg.norm(h_ss)
        return w, abs(np.vdot(w, h_ss)) ** 2

    hat_sp = h_sp / norm_sp
    phase = np.angle(np.vdot(h_ss, hat_sp))
    aligned = np.exp(-1j * phase) * hat_sp
    residual = h_ss - np.vdot(hat_sp, h_ss) * hat_sp
    res_norm = float(np.linalg.norm(residual))
    rho_cap = min(1.0, math.sqrt(cap / (max_power * norm_sp**2)))

    if res_norm < 1e-14 * float(np.linalg.norm(h_ss)):
        w = math.sqrt(max_power) * rho_cap * aligned
        return w, abs(np.vdot(w, h_ss)) ** 2
    perp = residual / res_norm

    def weights(rho):
        return math.sqrt(max_power) * (rho * aligned + math.sqrt(max(0.0, 1.0 - rho * rho)) * perp)

    def objective(rho):
        return abs(np.vdot(weights(rho), h_ss)) ** 2

    lo, hi = 0.0, rho_cap
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = objective(x1), objective(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = objective(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = objective(x1)
    best = max(((objective(r), r) for r in (lo, 0.5 * (lo + hi), hi, rho_cap, 0.0)), key=lambda t: t[0])
    return weights(best[1]), best[0]


def finite_diff_grad(fn, x, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a scalar function of a flat vector."""
    x = np.asarray(x, dtype=float).ravel()
    grad = np.empty_like(x)
    for k in range(x.size):
        step = np.zeros_like(x)
        step[k] = h
        grad[k] = (fn(x + step) - fn(x - step)) / (2.0 * h)
    return grad


def finite_diff_hessian(fn, x, h: float = 1e-4) -> np.ndarray:
    """Central second differences of a scalar function, shape (d, d)."""
    x = np.asarray(x, dtype=float).ravel()
    d = x.size
    hess = np.empty((d, d))
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h
        for j in range(i, d):
            ej = np.zeros(d)
            ej[j] = h
            val = (fn(x + ei + ej) - fn(x + ei - ej) - fn(x - ei + ej) + fn(x - ei - ej)) / (4.0 * h * h)
            hess[i, j] = hess[j, i] = val
    return hess


def empirical_lipschitz(w, sc: Scenario, samples: int, seed: int, kappa: float = 1e-6) -> float:
    """Max gradient-difference ratio of the leakage over sampled feasible pairs."""
    if samples < 2:
        raise ValueError("need at least two samples")
    rng = np.random.default_rng(seed)
    n = sc.n_elements
    worst = 0.0
    for _ in range(samples):
        x = sample_cap_pointing(rng, n, sc.max_zenith)
        y = sample_cap_pointing(rng, n, sc.max_zenith)
        gx = leakage_grad(build_cosine_cache(x, w, sc, kappa))
        gy = leakage_grad(build_cosine_cache(y, w, sc, kappa))
        dist = float(np.linalg.norm(y.ravel() - x.ravel()))
        if dist == 0.0:
            continue
        worst = max(worst, float(np.linalg.norm(gy - gx)) / dist)
    return worst
