"""Closed-form transmit beamformer under a power budget and an interference cap.

The beamformer maximizes received signal power |w^H h_ss|^2 subject to
||w||^2 <= max_power and |w^H h_sp|^2 <= cap.  With single-antenna receivers
the optimum lies in span{h_ss, h_sp} and splits between the cap-aligned
direction and the orthogonal residual of h_ss.
"""

from __future__ import annotations

import math

import numpy as np

from .channel import DegenerateChannelError

# Orthogonal residual below this fraction of ||h_ss|| is treated as parallel channels.
_PARALLEL_TOL = 1e-12


def optimal_beamformer(h_ss, h_sp, max_power: float, cap: float) -> np.ndarray:
    """Optimal transmit weights for given signal/leakage channels.

    When maximum-ratio transmission already respects the interference cap
    (|h_sp^H h_ss|^2 / ||h_ss||^2 <= cap / max_power) it is returned directly;
    otherwise the output combines the phase-aligned leakage direction at power
    proportion rho^2 = cap / (max_power ||h_sp||^2) with the normalized
    component of h_ss orthogonal to h_sp, and meets the cap with equality.
    """
    if max_power <= 0.0 or cap <= 0.0:
        raise ValueError("power budget and interference cap must be positive")
    h_ss = np.asarray(h_ss, dtype=complex)
    h_sp = np.asarray(h_sp, dtype=complex)
    norm_ss = float(np.linalg.norm(h_ss))
    if norm_ss == 0.0:
        raise DegenerateChannelError("signal channel is zero; beamforming undefined")

    inner = np.vdot(h_sp, h_ss)  # h_sp^H h_ss
    if abs(inner) ** 2 / norm_ss**2 <= cap / max_power:
        return math.sqrt(max_power) * h_ss / norm_ss

    norm_sp = float(np.linalg.norm(h_sp))
    if norm_sp == 0.0:  # unreachable: a zero h_sp satisfies the MRT branch
        raise DegenerateChannelError("leakage channel is zero but cap is binding")
    hat_sp = h_sp / norm_sp
    rho = math.sqrt(cap / (max_power * norm_sp**2))
    # Phase-align the cap direction so its contribution adds coherently.
    phase = np.angle(np.vdot(h_ss, hat_sp))  # angle of h_ss^H hat_sp
    aligned_sp = np.exp(-1j * phase) * hat_sp

    residual = h_ss - np.vdot(hat_sp, h_ss) * hat_sp
    res_norm = float(np.linalg.norm(residual))
    if res_norm < _PARALLEL_TOL * norm_ss:
        # Parallel channels: all usable power rides the single shared direction.
        return math.sqrt(max_power) * min(1.0, rho) * aligned_sp
    perp = residual / res_norm
    return math.sqrt(max_power) * (rho * aligned_sp + math.sqrt(1.0 - rho**2) * perp)


def sinr(w, h_ss, v, h_ps, noise_power: float) -> float:
    """Received SINR: |w^H h_ss|^2 / (|v^H h_ps|^2 + noise_power)."""
    if noise_power <= 0.0:
        raise ValueError("noise power must be positive")
    signal = abs(np.vdot(np.asarray(w, dtype=complex), np.asarray(h_ss, dtype=complex))) ** 2
    cross = abs(np.vdot(np.asarray(v, dtype=complex), np.asarray(h_ps, dtype=complex))) ** 2
    return signal / (cross + noise_power)


def interference_power(w, h_sp) -> float:
    """Power leaked onto the protected link: |w^H h_sp|^2, watts."""
    return abs(np.vdot(np.asarray(w, dtype=complex), np.asarray(h_sp, dtype=complex))) ** 2
