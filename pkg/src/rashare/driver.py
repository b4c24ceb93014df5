"""Alternating optimization of the beam vector and the boresight matrix.

Each outer iteration recomputes the closed-form beamformer for the current
pointing and then improves the pointing by the inner SCA loop; the received
SINR is non-decreasing across iterations because the beam step is exactly
optimal for a feasible set containing the previous beam and the pointing step
only accepts candidates that do not degrade the exact signal power.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .beamforming import interference_power, optimal_beamformer, sinr
from .channel import Scenario, GainPattern, fixed_pointing, pt_beamformer, pt_channels, st_channel_vector
from .config import AlgoConfig
from .pointing import sca_pointing_opt

SCHEMES = ("ra", "fixed", "random", "isotropic")


@dataclass
class AOTrace:
    """Per-outer-iteration record proving monotone convergence."""

    sinr: list = field(default_factory=list)
    signal: list = field(default_factory=list)  # |w^H h_ss|^2, exact channels
    leakage: list = field(default_factory=list)  # |w^H h_sp|^2, exact channels
    tx_power: list = field(default_factory=list)  # ||w||^2
    wall_s: list = field(default_factory=list)

    def append(self, gamma, signal, leakage, tx_power, wall_s):
        self.sinr.append(gamma)
        self.signal.append(signal)
        self.leakage.append(leakage)
        self.tx_power.append(tx_power)
        self.wall_s.append(wall_s)

    @property
    def iterations(self) -> int:
        return max(0, len(self.sinr) - 1)


def pt_interference(sc: Scenario) -> float:
    """Cross-link interference power |v^H h_ps|^2 received at the SR."""
    h_pp, h_ps = pt_channels(sc)
    v = pt_beamformer(h_pp, sc.pt_power)
    return abs(np.vdot(v, h_ps)) ** 2


def alternating_optimize(sc: Scenario, cfg: AlgoConfig | None = None):
    """Run the alternating algorithm from the reference pointing.

    Returns (w, pointing, trace).  The returned pair satisfies the power
    budget, the interference cap, unit boresights, and the zenith cone; the
    trace's SINR sequence is non-decreasing by construction.

    The beam step saturates the cap exactly, which would leave the pointing
    step no room inside its quadratic-bound ball.  Each outer iteration
    therefore first tries the pointing step against an exploratory beam whose
    own leakage is held at `deep_factor` of the cap (freeing ball slack), and
    keeps that candidate only if re-optimizing the beam afterwards does not
    lose SINR; otherwise it falls back to the plain step, whose gates make the
    SINR non-decreasing unconditionally.
    """
    if cfg is None:
        cfg = AlgoConfig()
    cap = sc.interference_cap * (1.0 - cfg.it_margin)
    cross = pt_interference(sc)
    denom = cross + sc.noise_power

    pointing = fixed_pointing(sc)
    t0 = time.perf_counter()

    def beam_for(pointing, beam_cap=cap):
        h_ss = st_channel_vector(pointing, sc.sr_position, sc)
        h_sp = st_channel_vector(pointing, sc.pr_position, sc)
        return optimal_beamformer(h_ss, h_sp, sc.max_power, beam_cap), h_ss, h_sp

    def record(w, h_ss, h_sp):
        gamma = abs(np.vdot(w, h_ss)) ** 2 / denom
        trace.append(
            gamma,
            abs(np.vdot(w, h_ss)) ** 2,
            interference_power(w, h_sp),
            float(np.linalg.norm(w)) ** 2,
            time.perf_counter() - t0,
        )
        return gamma

    trace = AOTrace()
    w, h_ss, h_sp = beam_for(pointing)
    gamma = record(w, h_ss, h_sp)

    if sc.pattern.directivity == 0.0:
        # Orientation-independent pattern: one beam step, no pointing step.
        trace.append(gamma, trace.signal[-1], trace.leakage[-1], trace.tx_power[-1], time.perf_counter() - t0)
        return w, pointing, trace

    prev_gamma = gamma
    for _ in range(cfg.max_outer):
        w, h_ss, h_sp = beam_for(pointing)
        gamma_base = abs(np.vdot(w, h_ss)) ** 2 / denom

        accepted = None
        if cfg.deep_factor < 1.0:
            w_deep, _, _ = beam_for(pointing, beam_cap=cap * cfg.deep_factor)
            cand_pointing, _ = sca_pointing_opt(w_deep, pointing, sc, cfg, cap=cap)
            w_cand, h_ss_c, h_sp_c = beam_for(cand_pointing)
            gamma_cand = abs(np.vdot(w_cand, h_ss_c)) ** 2 / denom
            if gamma_cand >= gamma_base:
                accepted = (cand_pointing, w_cand, h_ss_c, h_sp_c)
        if accepted is None:
            # Plain step: gates inside the SCA keep the signal power and the
            # cap feasibility for this very beam, so SINR cannot decrease.
            cand_pointing, _ = sca_pointing_opt(w, pointing, sc, cfg, cap=cap)
            h_ss_c = st_channel_vector(cand_pointing, sc.sr_position, sc)
            h_sp_c = st_channel_vector(cand_pointing, sc.pr_position, sc)
            accepted = (cand_pointing, w, h_ss_c, h_sp_c)

        pointing, w, h_ss, h_sp = accepted
        gamma = record(w, h_ss, h_sp)
        if abs(gamma - prev_gamma) <= cfg.epsilon * prev_gamma:
            break
        prev_gamma = gamma
    return w, pointing, trace


def sample_cap_pointing(rng: np.random.Generator, n: int, max_zenith: float) -> np.ndarray:
    """Draw n boresights area-uniformly over the zenith-capped spherical cap."""
    cos_z = rng.uniform(math.cos(max_zenith), 1.0, size=n)
    azimuth = rng.uniform(0.0, 2.0 * math.pi, size=n)
    sin_z = np.sqrt(1.0 - cos_z**2)
    return np.column_stack([sin_z * np.cos(azimuth), sin_z * np.sin(azimuth), cos_z])


@dataclass
class SchemeResult:
    scheme: str
    sinr: float  # linear
    interference: float  # watts at the PR (mean over draws for "random")
    tx_power: float  # ||w||^2 watts
    iterations: int
    wall_s: float
    w: np.ndarray | None = None
    pointing: np.ndarray | None = None
    trace: AOTrace | None = None


def evaluate_scheme(sc: Scenario, scheme: str, cfg: AlgoConfig | None = None) -> SchemeResult:
    """Evaluate one transmission scheme on a scenario.

    All schemes use the optimal beamformer; "ra" additionally optimizes the
    boresights, "random" averages over seeded boresight draws inside the
    rotation range, and "isotropic" swaps in the unit-gain pattern.
    """
    if cfg is None:
        cfg = AlgoConfig()
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    t0 = time.perf_counter()

    if scheme == "ra":
        w, pointing, trace = alternating_optimize(sc, cfg)
        cross = pt_interference(sc)
        return SchemeResult(
            scheme,
            trace.sinr[-1],
            trace.leakage[-1],
            trace.tx_power[-1],
            trace.iterations,
            time.perf_counter() - t0,
            w=w,
            pointing=pointing,
            trace=trace,
        )

    if scheme == "isotropic":
        sc = sc.with_pattern(GainPattern.isotropic(sc.pattern.wavelength, sc.pattern.area))

    denom = pt_interference(sc) + sc.noise_power

    def one(pointing):
        h_ss = st_channel_vector(pointing, sc.sr_position, sc)
        if float(np.linalg.norm(h_ss)) == 0.0:
            # every boresight turned away from the SR: no service, no leakage
            return np.zeros(sc.n_elements, dtype=complex), 0.0, 0.0
        h_sp = st_channel_vector(pointing, sc.pr_position, sc)
        w = optimal_beamformer(h_ss, h_sp, sc.max_power, sc.interference_cap)
        return w, abs(np.vdot(w, h_ss)) ** 2 / denom, interference_power(w, h_sp)

    if scheme in ("fixed", "isotropic"):
        w, gamma, leak = one(fixed_pointing(sc))
        return SchemeResult(
            scheme, gamma, leak, float(np.linalg.norm(w)) ** 2, 0, time.perf_counter() - t0,
            w=w, pointing=fixed_pointing(sc),
        )

    # random-orientation benchmark: seeded draws, linear average of the SINR
    rng = np.random.default_rng([cfg.seed, 0x52414E44])
    gammas, leaks, powers = [], [], []
    first = None
    for _ in range(cfg.random_draws):
        pointing = sample_cap_pointing(rng, sc.n_elements, sc.max_zenith)
        w, gamma, leak = one(pointing)
        if first is None:
            first = (w, pointing)
        gammas.append(gamma)
        leaks.append(leak)
        powers.append(float(np.linalg.norm(w)) ** 2)
    return SchemeResult(
        "random",
        float(np.mean(gammas)),
        float(np.mean(leaks)),
        float(np.mean(powers)),
        0,
        time.perf_counter() - t0,
        w=first[0],
        pointing=first[1],
    )
