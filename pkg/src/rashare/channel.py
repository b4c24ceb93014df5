"""Directional element gain pattern and near-field line-of-sight channels.

Each rotatable element has power pattern G(eps) = g0 * cos(eps)^(2p) on the
front hemisphere (eps < pi/2) and 0 behind, where eps is the angle between the
boresight and the signal direction.  With g0 = 2(2p + 1) the pattern integrates
to 4*pi over the sphere (power conservation).  The channel from an element to a
point target at distance d is sqrt(S * G / (4 pi d^2)) * exp(-j 2 pi d / lambda).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Tuple

import numpy as np

from .geometry import E3, ArrayGeometry, factor_antennas, linear_array


class DegenerateChannelError(ValueError):
    """Raised when a channel vector required to be nonzero vanishes."""


@dataclass(frozen=True)
class GainPattern:
    """Element power pattern: directivity exponent, boresight gain, aperture, wavelength.

    The boresight gain must satisfy g0 = 2(2p + 1); the single allowed
    exception is the isotropic override (g0 = 1, p = 0).
    """

    directivity: float  # exponent p >= 0
    boresight_gain: float  # g0
    area: float  # element aperture S, m^2
    wavelength: float  # m

    def __post_init__(self):
        if self.directivity < 0.0:
            raise ValueError("directivity exponent must be >= 0")
        if self.area <= 0.0 or self.wavelength <= 0.0:
            raise ValueError("element area and wavelength must be positive")
        conserving = 2.0 * (2.0 * self.directivity + 1.0)
        isotropic = self.directivity == 0.0 and self.boresight_gain == 1.0
        if not isotropic and abs(self.boresight_gain - conserving) > 1e-9 * conserving:
            raise ValueError(
                "boresight gain must equal 2(2p+1); only the isotropic override (g0=1, p=0) deviates"
            )

    @classmethod
    def directional(cls, directivity: float, wavelength: float, area: float | None = None):
        """Power-conserving pattern g0 = 2(2p+1); aperture defaults to a half-wave square."""
        if area is None:
            area = wavelength**2 / 4.0
        return cls(directivity, 2.0 * (2.0 * directivity + 1.0), area, wavelength)

    @classmethod
    def isotropic(cls, wavelength: float, area: float | None = None):
        """Unit-gain override used by the isotropic benchmark scheme."""
        if area is None:
            area = wavelength**2 / 4.0
        return cls(0.0, 1.0, area, wavelength)


def directional_gain(f, u, pattern: GainPattern) -> float:
    """Element power gain toward direction u for boresight f (both unit vectors).

    Returns g0 * (f.u)^(2p) when f.u > 0 and 0 otherwise.
    """
    f = np.asarray(f, dtype=float)
    u = np.asarray(u, dtype=float)
    for name, v in (("boresight", f), ("direction", u)):
        if abs(np.linalg.norm(v) - 1.0) > 1e-9:
            raise ValueError(f"{name} vector must have unit norm")
    c = float(f @ u)
    if c <= 0.0:
        return 0.0
    return pattern.boresight_gain * c ** (2.0 * pattern.directivity)


def channel_coeff(f, element_pos, target, pattern: GainPattern) -> complex:
    """Complex amplitude gain from one element to a point target.

    Magnitude sqrt(S * G / (4 pi d^2)), phase -2 pi d / lambda; zero when the
    target lies outside the element's front hemisphere.
    """
    element_pos = np.asarray(element_pos, dtype=float)
    target = np.asarray(target, dtype=float)
    diff = target - element_pos
    d = float(np.linalg.norm(diff))
    if d < 1e-12:
        raise ValueError("target coincides with the element position")
    gain = directional_gain(f, diff / d, pattern)
    amp = math.sqrt(pattern.area * gain / (4.0 * math.pi * d * d))
    return amp * np.exp(-2j * math.pi * d / pattern.wavelength)


@dataclass(frozen=True, eq=False)
class Scenario:
    """Full physical setup of one spectrum-sharing instance.

    All powers are in watts and angles in radians.  `interference_cap` is the
    maximum interference power the secondary transmitter may impose at the
    primary receiver; `max_zenith` caps each boresight's tilt from +z.
    """

    st_array: ArrayGeometry
    pt_array: ArrayGeometry
    sr_position: np.ndarray
    pr_position: np.ndarray
    pattern: GainPattern
    max_power: float
    pt_power: float
    noise_power: float
    interference_cap: float
    max_zenith: float
    sr_angle: float = 0.0  # placement angle of the SR in the x-z plane

    def __post_init__(self):
        for name in ("max_power", "pt_power", "noise_power", "interference_cap"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive (watts)")
        if not (0.0 < self.max_zenith <= math.pi / 2.0):
            raise ValueError("max_zenith must lie in (0, pi/2]")
        for who, point in (("SR", self.sr_position), ("PR", self.pr_position)):
            dists = np.linalg.norm(self.st_array.positions - np.asarray(point), axis=1)
            if float(dists.min()) < 1e-9:
                raise ValueError(f"{who} coincides with an array element")

    @property
    def n_elements(self) -> int:
        return self.st_array.size

    def with_pattern(self, pattern: GainPattern) -> "Scenario":
        return replace(self, pattern=pattern)


def fixed_pointing(sc: Scenario) -> np.ndarray:
    """Reference pointing matrix: every boresight along the array normal +z."""
    return np.tile(E3, (sc.n_elements, 1))


def element_paths(sc: Scenario, target) -> Tuple[np.ndarray, np.ndarray]:
    """Per-element distances (N,) and unit directions (N, 3) toward `target`."""
    diff = np.asarray(target, dtype=float) - sc.st_array.positions
    dists = np.linalg.norm(diff, axis=1)
    return dists, diff / dists[:, None]


def st_channel_vector(pointing: np.ndarray, target, sc: Scenario) -> np.ndarray:
    """Channel vector from the rotatable array to a point target.

    `pointing` holds one unit boresight per row, shape (N, 3).  Entry n is
    channel_coeff for element n; entries vanish where the target falls behind
    the element's boresight hemisphere.
    """
    pat = sc.pattern
    dists, units = element_paths(sc, target)
    c = np.einsum("ij,ij->i", np.asarray(pointing, dtype=float), units)
    cpos = np.where(c > 0.0, c, 0.0)
    gain = np.where(c > 0.0, pat.boresight_gain * cpos ** (2.0 * pat.directivity), 0.0)
    amp = np.sqrt(pat.area * gain / (4.0 * math.pi * dists**2))
    return amp * np.exp(-2j * math.pi * dists / pat.wavelength)


def pt_channels(sc: Scenario) -> Tuple[np.ndarray, np.ndarray]:
    """LoS channels from the fixed-antenna transmitter to the PR and the SR.

    Elements are isotropic unit-gain, so each entry is the free-space Friis
    amplitude lambda/(4 pi d) with phase -2 pi d / lambda.
    """
    lam = sc.pattern.wavelength

    def vec(target):
        d = np.linalg.norm(np.asarray(target, dtype=float) - sc.pt_array.positions, axis=1)
        return lam / (4.0 * math.pi * d) * np.exp(-2j * math.pi * d / lam)

    return vec(sc.pr_position), vec(sc.sr_position)


def pt_beamformer(h_pp: np.ndarray, pt_power: float) -> np.ndarray:
    """Maximum-ratio transmission toward the PR with exact power pt_power."""
    h_pp = np.asarray(h_pp, dtype=complex)
    norm = float(np.linalg.norm(h_pp))
    if norm == 0.0:
        raise DegenerateChannelError("PT->PR channel is zero; MRT undefined")
    return math.sqrt(pt_power) * h_pp / norm


def default_scenario(
    n: int = 4,
    m: int = 4,
    wavelength: float = 0.125,
    spacing: float | None = None,
    area: float | None = None,
    directivity: float = 4.0,
    sr_range: float = 50.0,
    sr_angle: float = math.pi / 3.0,
    pr_position=(-30.0, 0.0, 30.0),
    pt_position=(-55.0, 0.0, 0.0),
    max_power_dbm: float = 23.0,
    pt_power_dbm: float = 23.0,
    noise_dbm: float = -80.0,
    cap_dbm: float = -80.0,
    max_zenith: float = math.pi / 3.0,
) -> Scenario:
    """Build the standard evaluation scenario (all arguments overridable)."""
    if spacing is None:
        spacing = wavelength / 2.0
    nx, ny = factor_antennas(n)
    st = ArrayGeometry(nx=nx, ny=ny, spacing=spacing)
    pt = linear_array(m, wavelength / 2.0, np.asarray(pt_position, dtype=float))
    sr = np.array([sr_range * math.cos(sr_angle), 0.0, sr_range * math.sin(sr_angle)])
    return Scenario(
        st_array=st,
        pt_array=pt,
        sr_position=sr,
        pr_position=np.asarray(pr_position, dtype=float),
        pattern=GainPattern.directional(directivity, wavelength, area),
        max_power=dbm_to_watts(max_power_dbm),
        pt_power=dbm_to_watts(pt_power_dbm),
        noise_power=dbm_to_watts(noise_dbm),
        interference_cap=dbm_to_watts(cap_dbm),
        max_zenith=max_zenith,
        sr_angle=sr_angle,
    )


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0.0:
        return float("-inf")
    return 10.0 * math.log10(watts) + 30.0
