"""Boresight-dependent signal and leakage objectives and their calculus.

For a fixed beam vector w the received signal power at the SR and the leakage
power at the PR reduce to |sum_n coef_n * cos_n^p|^2 where cos_n is the
projection of boresight n onto the element-to-target direction and coef_n
collects the conjugate beam weight, the aperture/path amplitude and the LoS
phase.  Negative projections are clamped at zero (the element radiates nothing
backward) and a small constant kappa keeps the powered cosine away from zero so
gradients stay defined.

Everything here works on the stacked boresight vector of length 3N; pointing
matrices are (N, 3) arrays with one unit row per element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import Scenario, element_paths

DEFAULT_KAPPA = 1e-6


@dataclass(frozen=True, eq=False)
class CosineCache:
    """Quantities shared by objective/gradient/Hessian evaluations at one pointing."""

    pointing: np.ndarray  # (N, 3) anchor boresights
    directivity: float
    kappa: float
    u_sr: np.ndarray  # (N, 3) element -> SR unit directions
    u_pr: np.ndarray
    cos_sr: np.ndarray  # raw projections f_n . u_n
    cos_pr: np.ndarray
    reg_sr: np.ndarray  # max(cos, 0) + kappa
    reg_pr: np.ndarray
    clamped_sr: np.ndarray  # bool, True where cos < 0
    clamped_pr: np.ndarray
    coef_sr: np.ndarray  # complex: conj(w_n) * amplitude * LoS phase
    coef_pr: np.ndarray


def build_cosine_cache(pointing: np.ndarray, w: np.ndarray, sc: Scenario, kappa: float = DEFAULT_KAPPA) -> CosineCache:
    """Evaluate all cached quantities at the given pointing and beam vector."""
    pointing = np.asarray(pointing, dtype=float)
    w = np.asarray(w, dtype=complex)
    pat = sc.pattern
    d_sr, u_sr = element_paths(sc, sc.sr_position)
    d_pr, u_pr = element_paths(sc, sc.pr_position)
    cos_sr = np.einsum("ij,ij->i", pointing, u_sr)
    cos_pr = np.einsum("ij,ij->i", pointing, u_pr)

    def coef(dists):
        amp = np.sqrt(pat.area * pat.boresight_gain / (4.0 * math.pi * dists**2))
        return np.conj(w) * amp * np.exp(-2j * math.pi * dists / pat.wavelength)

    return CosineCache(
        pointing=pointing,
        directivity=pat.directivity,
        kappa=kappa,
        u_sr=u_sr,
        u_pr=u_pr,
        cos_sr=cos_sr,
        cos_pr=cos_pr,
        reg_sr=np.maximum(cos_sr, 0.0) + kappa,
        reg_pr=np.maximum(cos_pr, 0.0) + kappa,
        clamped_sr=cos_sr < 0.0,
        clamped_pr=cos_pr < 0.0,
        coef_sr=coef(d_sr),
        coef_pr=coef(d_pr),
    )


def _power(coef, reg, p):
    return abs(np.sum(coef * reg**p)) ** 2


def _grad(coef, reg, clamped, u, p):
    total = np.sum(coef * reg**p)
    scale = 2.0 * p * reg ** (p - 1.0) * np.real(np.conj(total) * coef)
    scale = np.where(clamped, 0.0, scale)
    return (scale[:, None] * u).ravel()


def signal_power(cache: CosineCache) -> float:
    """Regularized received signal power |sum coef_sr * reg_sr^p|^2."""
    return _power(cache.coef_sr, cache.reg_sr, cache.directivity)


def leakage_power(cache: CosineCache) -> float:
    """Regularized leakage power at the PR, mirroring signal_power."""
    return _power(cache.coef_pr, cache.reg_pr, cache.directivity)


def signal_grad(cache: CosineCache) -> np.ndarray:
    """Gradient of signal_power w.r.t. the stacked boresights, length 3N.

    Clamped blocks (raw cosine < 0) contribute a zero gradient block, matching
    the flat backward hemisphere of the element pattern.
    """
    return _grad(cache.coef_sr, cache.reg_sr, cache.clamped_sr, cache.u_sr, cache.directivity)


def leakage_grad(cache: CosineCache) -> np.ndarray:
    """Gradient of leakage_power w.r.t. the stacked boresights, length 3N."""
    return _grad(cache.coef_pr, cache.reg_pr, cache.clamped_pr, cache.u_pr, cache.directivity)


def leakage_hessian(cache: CosineCache) -> np.ndarray:
    """Analytic Hessian of leakage_power, shape (3N, 3N).

    Off-diagonal blocks are rank-one couplings of the per-element first-order
    terms; diagonal blocks add the curvature of the powered cosine.  Clamped
    blocks are zero, consistent with the zero-gradient convention.
    """
    p = cache.directivity
    reg = cache.reg_pr
    coef = cache.coef_pr
    u = cache.u_pr
    active = ~cache.clamped_pr
    first = np.where(active, p * reg ** (p - 1.0), 0.0) * coef  # complex per element
    total = np.sum(coef * reg**p)
    n = reg.size

    pair = 2.0 * np.real(np.outer(first, np.conj(first)))  # (N, N)
    hess = np.einsum("mn,mi,nj->minj", pair, u, u)
    curve = 2.0 * np.real(np.conj(total) * coef) * p * (p - 1.0) * reg ** (p - 2.0)
    curve = np.where(active, curve, 0.0)
    idx = np.arange(n)
    hess[idx, :, idx, :] += curve[:, None, None] * np.einsum("ni,nj->nij", u, u)
    return hess.reshape(3 * n, 3 * n)


def lipschitz_bound(cache: CosineCache) -> float:
    """Upper bound on the spectral norm of the leakage Hessian over the feasible set.

    L = 2 p (p + |p-1|) * max_n|coef_n| * sum_n|coef_n| scaled by (1+kappa)^(2(p-1))
    for p >= 1 and kappa^(p-2) for 0 < p < 1.  Rejects p = 0, where the leakage
    is constant in the boresights and the pointing step is skipped entirely.
    """
    p = cache.directivity
    if p == 0.0:
        raise ValueError("leakage is constant for an isotropic pattern (p = 0)")
    mags = np.abs(cache.coef_pr)
    c_max = float(mags.max())
    c_sum = float(mags.sum())
    if p >= 1.0:
        scale = (1.0 + cache.kappa) ** (2.0 * (p - 1.0))
    else:
        scale = cache.kappa ** (p - 2.0)
    return 2.0 * p * (p + abs(p - 1.0)) * c_max * c_sum * scale


def linearized_signal(pvec: np.ndarray, anchor: np.ndarray, cache: CosineCache) -> float:
    """First-order model of signal_power around the anchor; exact at the anchor."""
    _check_anchor(anchor, cache)
    return signal_power(cache) + float(signal_grad(cache) @ (np.asarray(pvec) - np.asarray(anchor)))


def quadratic_leakage_bound(pvec: np.ndarray, anchor: np.ndarray, cache: CosineCache, lipschitz: float | None = None) -> float:
    """Descent-lemma upper bound on leakage_power; tight at the anchor.

    Requires lipschitz >= lipschitz_bound(cache); defaults to that bound.
    """
    _check_anchor(anchor, cache)
    bound = lipschitz_bound(cache)
    if lipschitz is None:
        lipschitz = bound
    elif lipschitz < bound * (1.0 - 1e-12):
        raise ValueError("curvature constant below the Lipschitz bound breaks the upper bound")
    diff = np.asarray(pvec, dtype=float) - np.asarray(anchor, dtype=float)
    return leakage_power(cache) + float(leakage_grad(cache) @ diff) + 0.5 * lipschitz * float(diff @ diff)


def _check_anchor(anchor, cache):
    anchor = np.asarray(anchor, dtype=float)
    if anchor.size != cache.pointing.size or not np.allclose(anchor.ravel(), cache.pointing.ravel(), atol=1e-12):
        raise ValueError("cache was built at a different anchor pointing")


# ---------------------------------------------------------------------------
# Successive convex approximation over the boresights


class InfeasibleStartError(ValueError):
    """The starting pointing violates the interference cap for the given beam."""


@dataclass(frozen=True)
class SCAStep:
    """Record of one inner iteration: regularized and physical objective values."""

    signal_reg: float
    signal_phys: float
    leakage_reg: float
    interference_phys: float
    step_norm: float
    accepted: bool


def _physical_powers(pointing, w, sc):
    from .channel import st_channel_vector

    w = np.asarray(w, dtype=complex)
    h_ss = st_channel_vector(pointing, sc.sr_position, sc)
    h_sp = st_channel_vector(pointing, sc.pr_position, sc)
    return abs(np.vdot(w, h_ss)) ** 2, abs(np.vdot(w, h_sp)) ** 2


def _curvature_estimate(cache, bound):
    """Local curvature seed for the trust ball: twice the anchor Hessian norm.

    Clipped to (0, bound]; the worst-case bound stays the backtracking ceiling.
    """
    local = 2.0 * float(np.linalg.norm(leakage_hessian(cache), 2))
    return min(bound, max(local, 1e-4 * bound))


def sca_pointing_opt(w, pointing0, sc: Scenario, cfg=None, cap: float | None = None):
    """Ascend the signal power over the boresights under the interference cap.

    Each iteration linearizes the signal power, replaces the leakage constraint
    by its quadratic-bound ball, solves the resulting convex program,
    renormalizes every boresight to unit length, and accepts the candidate only
    if both the regularized and the exact (channel-level) objectives did not
    degrade and the exact interference stays within `cap`.  This makes
    monotonicity and feasibility hold by construction rather than up to
    regularization error.

    The ball's curvature constant starts at a local Hessian estimate and
    backtracks toward the worst-case Lipschitz bound whenever a candidate fails
    the acceptance gates; with the worst-case constant the regularized leakage
    cannot be rejected, so backtracking always terminates.

    Returns the final (N, 3) pointing and the per-iteration history.
    """
    from .config import AlgoConfig
    from .subproblem import SubproblemSpec, ball_from_u_tilde, solve_subproblem

    if cfg is None:
        cfg = AlgoConfig()
    pointing0 = np.asarray(pointing0, dtype=float)
    if sc.pattern.directivity == 0.0:
        return pointing0.copy(), []  # pattern is orientation-independent
    if cap is None:
        cap = sc.interference_cap * (1.0 - cfg.it_margin)
    cap_reg = cap * (1.0 + cfg.reg_cap_slack)
    z0 = math.cos(sc.max_zenith)
    floor = 1.0 - cfg.trust_delta

    norms = np.linalg.norm(pointing0, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-6) or np.any(pointing0[:, 2] < z0 - 1e-9):
        raise InfeasibleStartError("starting boresights must be unit vectors inside the zenith cone")
    cur = pointing0 / norms[:, None]
    cur_sig_phys, cur_int_phys = _physical_powers(cur, w, sc)
    if cur_int_phys > cap * (1.0 + 1e-9):
        raise InfeasibleStartError("starting pointing already exceeds the interference cap")
    cache = build_cosine_cache(cur, w, sc, cfg.kappa)
    cur_sig_reg = signal_power(cache)

    ceiling = lipschitz_bound(cache) * cfg.lipschitz_scale
    lip = _curvature_estimate(cache, ceiling) if cfg.adaptive_curvature else ceiling

    history: list[SCAStep] = []
    for _ in range(cfg.sca_max_iter):
        grad = signal_grad(cache)
        if float(np.linalg.norm(grad)) == 0.0:
            break
        u_val = min(leakage_power(cache), cap_reg)
        grad_u = leakage_grad(cache)

        accepted = False
        cand = cand_cache = None
        cand_sig_reg = cand_leak_reg = cand_sig_phys = cand_int_phys = 0.0
        while True:
            center, radius = ball_from_u_tilde(cur.ravel(), grad_u, u_val, lip, cap_reg)
            spec = SubproblemSpec(grad, center, radius, cur, z0, floor)
            raw, _info = solve_subproblem(spec, cfg.subproblem_tol, cfg.subproblem_budget)
            cand = raw.reshape(-1, 3)
            cand = cand / np.linalg.norm(cand, axis=1)[:, None]

            cand_cache = build_cosine_cache(cand, w, sc, cfg.kappa)
            cand_sig_reg = signal_power(cand_cache)
            cand_leak_reg = leakage_power(cand_cache)
            cand_sig_phys, cand_int_phys = _physical_powers(cand, w, sc)
            accepted = (
                cand_sig_reg >= cur_sig_reg * (1.0 - 1e-12)
                and cand_sig_phys >= cur_sig_phys
                and cand_leak_reg <= cap_reg
                and cand_int_phys <= cap * (1.0 + 1e-12)
            )
            if accepted or lip >= ceiling:
                break
            lip = min(ceiling, 4.0 * lip)  # shrink the ball and retry

        step_norm = float(np.linalg.norm(cand - cur))
        history.append(
            SCAStep(cand_sig_reg, cand_sig_phys, cand_leak_reg, cand_int_phys, step_norm, accepted)
        )
        if not accepted:
            break
        gain = cand_sig_phys - cur_sig_phys
        cur, cache = cand, cand_cache
        cur_sig_reg, cur_sig_phys = cand_sig_reg, cand_sig_phys
        if cfg.adaptive_curvature:
            lip = _curvature_estimate(cache, ceiling)
        if gain <= cfg.sca_rel_tol * max(cur_sig_phys, 1e-300):
            break
    return cur, history
