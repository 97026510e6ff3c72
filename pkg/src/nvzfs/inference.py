"""Parameter extraction from simulated resonance sweeps.

The resonance position of a sweep dip carries the target parameter:
the quadrupole constant through qbar = 2 Omega* (under the zero-asymmetry
assumption) and the proton-pair distance through g12 = (4/3) Omega* with
g12 proportional to 1/d^3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import DIPOLAR_PREFACTOR
from .errors import NoResonanceError
from .spectroscopy import SweepTrace

# Interpreting a single resonance with the zero-asymmetry assumption
# overestimates the quadrupole constant by at most this factor minus one
# (asymmetry at its physical maximum of 1).
ETA_MAX_ERROR_FACTOR = 2.0 / np.sqrt(3.0)


@dataclass(frozen=True)
class DipEstimate:
    """Located sweep minimum: position, depth, half-depth width."""

    omega_star: float   # MHz
    depth: float
    width: float        # MHz
    refine_method: str = "parabolic"

    def __post_init__(self):
        if not 0.0 <= self.depth <= 1.0:
            raise ValueError(f"dip depth {self.depth} outside [0, 1]")


@dataclass(frozen=True)
class QbarEstimate:
    """Quadrupole constant recovered under the zero-asymmetry assumption."""

    qbar_hat: float  # MHz
    eta_assumed: float = 0.0
    relative_error_bound: float = ETA_MAX_ERROR_FACTOR - 1.0

    def __post_init__(self):
        if self.qbar_hat <= 0:
            raise ValueError("qbar_hat must be positive")
        if not 0.0 <= self.relative_error_bound <= 0.2:
            raise ValueError("relative error bound outside [0, 0.2]")


def locate_dip(sweep: SweepTrace) -> DipEstimate:
    """Locate the sweep minimum with a parabola through the three lowest samples.

    The width is read off at half depth by linear interpolation on both sides.
    A sweep whose minimum sits on the boundary carries no resonance and is
    rejected.
    """
    omega = sweep.rabi_values
    signal = sweep.signal
    if omega.size < 3:
        raise NoResonanceError("sweep too short to contain an interior minimum")
    i = int(np.argmin(signal))
    if i == 0 or i == omega.size - 1:
        raise NoResonanceError("no interior minimum: sweep is monotone over the grid")

    # Parabola through (i-1, i, i+1); these are the three lowest samples of a
    # smooth dip.
    y0, y1, y2 = signal[i - 1], signal[i], signal[i + 1]
    curvature = y0 - 2.0 * y1 + y2
    if curvature <= 0:
        raise NoResonanceError("dip neighborhood is not convex")
    shift = 0.5 * (y0 - y2) / curvature
    step = omega[i + 1] - omega[i]
    omega_star = float(omega[i] + shift * step)
    s_min = float(y1 - 0.25 * (y0 - y2) * shift)

    baseline = float(np.max(signal))
    depth = baseline - s_min
    level = s_min + depth / 2.0

    def crossing(indices) -> float | None:
        for k in indices:
            lo, hi = sorted((signal[k], signal[k + 1]))
            if lo <= level <= hi and signal[k] != signal[k + 1]:
                frac = (level - signal[k]) / (signal[k + 1] - signal[k])
                return float(omega[k] + frac * (omega[k + 1] - omega[k]))
        return None

    left = crossing(range(i - 1, -1, -1))
    right = crossing(range(i, omega.size - 1))
    width = (right - left) if (left is not None and right is not None) else float("nan")

    if not (omega.min() <= omega_star <= omega.max()):
        raise NoResonanceError("refined minimum escaped the swept range")
    return DipEstimate(omega_star=omega_star, depth=depth, width=width)


def estimate_qbar(dip: DipEstimate) -> QbarEstimate:
    """Invert the matching condition at zero asymmetry: qbar = 2 Omega*.

    A target with asymmetry up to 1 analyzed this way overestimates qbar by
    up to 2/sqrt(3) - 1, about 15.5 percent.
    """
    return QbarEstimate(qbar_hat=2.0 * dip.omega_star)


def estimate_distance(dip: DipEstimate, gamma_n: float) -> float:
    """Recover the internuclear distance from a pair-resonance dip.

    g12 = (4/3) Omega* and g12 = 2 * prefactor * gamma_n^2 / d^3, so
    d = (2 * prefactor * gamma_n^2 / g12)^(1/3) in nm.
    """
    if dip.omega_star <= 0:
        raise ValueError("dip frequency must be positive")
    g12 = (4.0 / 3.0) * dip.omega_star
    return float((2.0 * DIPOLAR_PREFACTOR * gamma_n**2 / g12) ** (1.0 / 3.0))
