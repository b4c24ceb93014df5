"""3D geometry for rotatable-antenna arrays: element grids, boresight angles,
and unit direction vectors.

Conventions: positions are in meters, angles in radians.  A boresight is a
unit vector in R^3; the array plane is z = 0 and the array normal is +z.
Element index n runs row-major with x fastest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

E3 = np.array([0.0, 0.0, 1.0])


class Orientation(NamedTuple):
    """Boresight rotation: zenith angle from +z, azimuth from +x in the x-y plane."""

    zenith: float
    azimuth: float


def orientation_to_pointing(orientation) -> np.ndarray:
    """Unit pointing vector (sin z cos a, sin z sin a, cos z) for the given angles."""
    zenith, azimuth = orientation
    sz = math.sin(zenith)
    return np.array([sz * math.cos(azimuth), sz * math.sin(azimuth), math.cos(zenith)])


def pointing_to_orientation(f) -> Orientation:
    """Invert orientation_to_pointing on the upper hemisphere.

    The azimuth of the degenerate pointing (0, 0, 1) is defined as 0.
    Raises ValueError for non-unit input or a back-hemisphere (f_z < 0) pointing.
    """
    f = np.asarray(f, dtype=float)
    norm = float(np.linalg.norm(f))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"pointing vector must have unit norm, got {norm!r}")
    if f[2] < 0.0:
        raise ValueError("back-hemisphere pointing (f_z < 0) has no valid zenith angle")
    zenith = math.acos(min(1.0, max(-1.0, float(f[2]))))
    if math.hypot(float(f[0]), float(f[1])) < 1e-12:
        return Orientation(zenith, 0.0)
    azimuth = math.atan2(float(f[1]), float(f[0])) % (2.0 * math.pi)
    return Orientation(zenith, azimuth)


def upa_positions(nx: int, ny: int, spacing: float) -> np.ndarray:
    """Element positions of an nx-by-ny planar grid centered at the origin.

    Returns an (nx*ny, 3) array on the z = 0 plane, pitch `spacing` along x and
    y, ordered row-major with x fastest.
    """
    if nx < 1 or ny < 1:
        raise ValueError("grid dimensions must be positive")
    if spacing <= 0.0:
        raise ValueError("element spacing must be positive")
    xs = (np.arange(nx) - (nx - 1) / 2.0) * spacing
    ys = (np.arange(ny) - (ny - 1) / 2.0) * spacing
    gx, gy = np.meshgrid(xs, ys)  # rows vary y, columns vary x
    pos = np.column_stack([gx.ravel(), gy.ravel(), np.zeros(nx * ny)])
    return pos


def unit_direction(target, source) -> np.ndarray:
    """Unit vector from `source` toward `target`; raises on coincident points."""
    diff = np.asarray(target, dtype=float) - np.asarray(source, dtype=float)
    dist = float(np.linalg.norm(diff))
    if dist < 1e-12:
        raise ValueError("cannot form a direction between coincident points")
    return diff / dist


def factor_antennas(n: int) -> tuple[int, int]:
    """Split a total element count into (nx, ny) with ny the largest divisor <= sqrt(n).

    Non-square counts elongate along x.  A y-elongated pair would sit mirror
    symmetric about the x-z plane that carries every link target, making the
    signal and leakage channels exactly parallel and beamforming degenerate.
    """
    if n < 1:
        raise ValueError("element count must be positive")
    ny = 1
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            ny = d
    return n // ny, ny


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """A planar antenna array: grid shape, pitch, and element positions.

    Positions may be offset by `center` (used for the fixed-antenna transmitter);
    the grid itself is always centered on `center`.
    """

    nx: int
    ny: int
    spacing: float
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    positions: np.ndarray = field(init=False)

    def __post_init__(self):
        pos = upa_positions(self.nx, self.ny, self.spacing) + np.asarray(self.center, dtype=float)
        object.__setattr__(self, "positions", pos)

    @property
    def size(self) -> int:
        return self.nx * self.ny


def linear_array(m: int, spacing: float, center) -> ArrayGeometry:
    """Uniform linear array along the x-axis centered at `center`."""
    return ArrayGeometry(nx=m, ny=1, spacing=spacing, center=np.asarray(center, dtype=float))
