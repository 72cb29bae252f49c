"""Half-wavelength ULA steering vectors, angular derivatives, and grids.

Angles are radians everywhere inside the library; degrees appear only at the
CLI/config boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HALF_PI = np.pi / 2.0


def steering(L: int, theta: float) -> np.ndarray:
    """Steering vector of an L-element half-wavelength ULA at azimuth theta.

    Entry m is exp(j*pi*m*sin(theta)), m = 0..L-1, so entry 0 is always 1 and
    every entry has unit modulus.
    """
    if L < 1:
        raise ValueError(f"array size must be positive, got {L}")
    if not np.isfinite(theta):
        raise ValueError("angle must be finite")
    m = np.arange(L)
    return np.exp(1j * np.pi * m * np.sin(theta))


def steering_derivative(L: int, theta: float) -> np.ndarray:
    """Element-wise derivative of ``steering`` with respect to the angle."""
    if L < 1:
        raise ValueError(f"array size must be positive, got {L}")
    if not np.isfinite(theta):
        raise ValueError("angle must be finite")
    m = np.arange(L)
    return 1j * np.pi * m * np.cos(theta) * np.exp(1j * np.pi * m * np.sin(theta))


def atan2_angle(p) -> float:
    """Azimuth of a 2-D point seen from the origin: atan2(p_y, p_x)."""
    p = np.asarray(p, float)
    if p.shape != (2,):
        raise ValueError("expected a 2-vector")
    if p[0] == 0.0 and p[1] == 0.0:
        raise ValueError("angle undefined at the origin")
    return float(np.arctan2(p[1], p[0]))


@dataclass(frozen=True)
class AngleGrid:
    """Uniform grid of azimuth angles in radians, endpoints included."""

    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("grid needs at least one point")
        if self.count > 1 and not self.stop > self.start:
            raise ValueError("stop must exceed start")

    @property
    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        return np.linspace(self.start, self.stop, self.count)

    @classmethod
    def from_degrees(cls, start_deg: float, stop_deg: float, step_deg: float) -> "AngleGrid":
        count = int(round((stop_deg - start_deg) / step_deg)) + 1
        return cls(np.deg2rad(start_deg), np.deg2rad(stop_deg), count)
