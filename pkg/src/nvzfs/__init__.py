"""Zero-field magnetic resonance spectroscopy with an NV-center sensor.

Simulates the driven NV triplet coupled to nearby nuclear targets (a
spin-3/2 quadrupolar nucleus or the proton pair of a water molecule),
evaluates the closed-form dressed-state resonance results against exact
numerics, and recovers target parameters from simulated resonance sweeps.
"""

__version__ = "0.1.0"

from .hamiltonians import (
    DipolarCoupling,
    DriveSpec,
    GeometrySpec,
    QuadrupoleSpec,
    WaterSpec,
)
from .propagator import EigenSystem, EvolutionConfig, TimeTrace
from .spectroscopy import BoronSystem, SweepTrace, WaterSystem
from .spincore import DensityMatrix, Operator, SpinOperators, spin_operators

__all__ = [
    "__version__",
    "BoronSystem",
    "DensityMatrix",
    "DipolarCoupling",
    "DriveSpec",
    "EigenSystem",
    "EvolutionConfig",
    "GeometrySpec",
    "Operator",
    "QuadrupoleSpec",
    "SpinOperators",
    "SweepTrace",
    "TimeTrace",
    "WaterSpec",
    "WaterSystem",
    "spin_operators",
]
