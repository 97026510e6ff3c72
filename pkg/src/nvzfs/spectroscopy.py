"""Closed-form eigensystems, resonance matching, and the signal experiments.

The measured signal S is the population of the dressed NV state |+> after
evolving the joint dressed-frame system from |+><+| (x) Id/d.  The resonant
drive amplitude that exchanges polarization with the target follows from
matching the dressed splitting to the target transition:

* spin-3/2 quadrupole target:  Omega = sqrt(3) sqrt(3 + eta^2) qbar / 6,
* proton pair:                 Omega = (3/4) g12.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import singledispatch
from typing import Callable

import numpy as np

from .constants import TWO_PI
from .hamiltonians import (
    DipolarCoupling,
    QuadrupoleSpec,
    WaterSpec,
    boron_dressed_h,
    water_dressed_h,
)
from .propagator import EigenSystem, TimeTrace, evolve, population_trace
from .spincore import DensityMatrix, Operator, expectation

# Below this asymmetry the closed-form eigenvector coefficients degenerate to
# a 0/0 and the limiting basis vectors are used instead.
ETA_LIMIT = 1e-6


@dataclass(frozen=True)
class BoronSystem:
    """Quadrupolar spin-3/2 target with its NV coupling components."""

    quad: QuadrupoleSpec
    coupling: DipolarCoupling

    def __post_init__(self):
        self.coupling.check_against_scale(self.quad.qbar, "quadrupole constant")


@dataclass(frozen=True)
class WaterSystem:
    """Proton-pair target (couplings carried by the WaterSpec)."""

    spec: WaterSpec

    def __post_init__(self):
        for c in self.spec.couplings:
            c.check_against_scale(self.spec.g12, "pair coupling")


@dataclass(frozen=True)
class SweepTrace:
    """Signal versus drive amplitude at fixed evolution time."""

    rabi_values: np.ndarray       # MHz
    signal: np.ndarray
    t_fixed: float                # us
    resonance_prediction: float   # MHz
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        rabi = np.asarray(self.rabi_values, dtype=float)
        sig = np.asarray(self.signal, dtype=float)
        if rabi.shape != sig.shape:
            raise ValueError("rabi grid and signal must have equal length")
        if sig.size and (sig.min() < -1e-6 or sig.max() > 1.0 + 1e-6):
            raise ValueError(
                f"signal leaves [0, 1]: range [{sig.min():.3e}, {sig.max():.3e}]"
            )
        object.__setattr__(self, "rabi_values", rabi)
        object.__setattr__(self, "signal", sig)

    @property
    def grid_step(self) -> float:
        return float(np.median(np.diff(self.rabi_values)))


def boron_eigensystem_analytic(q: QuadrupoleSpec) -> EigenSystem:
    """Closed-form spin-3/2 quadrupole eigensystem.

    States mix |+3/2> with |-1/2> and |-3/2> with |+1/2> through
    a = (sqrt3 + sqrt(3 + eta^2))/eta and b = (sqrt3 - sqrt(3 + eta^2))/eta;
    energies come in two degenerate pairs
        (15 +/- 4 sqrt3 sqrt(3 + eta^2)) qbar / 48.
    These energies sit a constant qbar*5/16 above the direct spectrum of the
    quadrupole matrix; only differences are physical.

    For eta below ETA_LIMIT the limiting eigenvectors
    {|3/2>, |-3/2>, |-1/2>, |1/2>} are used with the same energy formulas.
    """
    eta, qbar = q.eta, q.qbar
    root = np.sqrt(3.0 + eta**2)
    upper = (15.0 + 4.0 * np.sqrt(3.0) * root) * qbar / 48.0
    lower = (15.0 - 4.0 * np.sqrt(3.0) * root) * qbar / 48.0

    # Basis order (3/2, 1/2, -1/2, -3/2).
    def ket(index: int) -> np.ndarray:
        v = np.zeros(4, dtype=complex)
        v[index] = 1.0
        return v

    if eta < ETA_LIMIT:
        psi1, psi2 = ket(0), ket(3)
        psi3, psi4 = ket(2), ket(1)
    else:
        a = (np.sqrt(3.0) + root) / eta
        # rationalized form of (sqrt3 - root)/eta; avoids cancellation at small eta
        b = -eta / (np.sqrt(3.0) + root)
        psi1 = (a * ket(0) + ket(2)) / np.sqrt(1.0 + a**2)
        psi2 = (ket(3) - b * ket(1)) / np.sqrt(1.0 + b**2)
        psi3 = (b * ket(0) + ket(2)) / np.sqrt(1.0 + b**2)
        psi4 = (ket(3) - a * ket(1)) / np.sqrt(1.0 + a**2)

    # Ascending energy order: the lower doublet (psi3, psi4) first.
    states = np.column_stack([psi3, psi4, psi1, psi2])
    energies = np.array([lower, lower, upper, upper])
    labels = ("psi3", "psi4", "psi1", "psi2")
    return EigenSystem(energies=energies, states=states, labels=labels, provenance="analytic")


_PAIR_STATES = {
    # Product basis order: (uu, ud, du, dd).
    "triplet0": np.array([0.0, 1.0, 1.0, 0.0]) / np.sqrt(2.0),
    "singlet": np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2.0),
    "upup": np.array([1.0, 0.0, 0.0, 0.0]),
    "downdown": np.array([0.0, 0.0, 0.0, 1.0]),
}


def water_eigensystem_zero(w: WaterSpec) -> EigenSystem:
    """Zero-field proton-pair eigensystem: {+g/2, 0, -g/4, -g/4}."""
    g = w.g12
    entries = [
        ("downdown", -g / 4.0),
        ("upup", -g / 4.0),
        ("singlet", 0.0),
        ("triplet0", g / 2.0),
    ]
    states = np.column_stack([_PAIR_STATES[name] for name, _ in entries]).astype(complex)
    return EigenSystem(
        energies=np.array([e for _, e in entries]),
        states=states,
        labels=tuple(name for name, _ in entries),
        provenance="analytic",
    )


def water_eigensystem_bias(w: WaterSpec) -> EigenSystem:
    """Bias-field proton-pair eigensystem; energies depend on the pair angle.

    With gp = (g12/2)(1 - 3 cos^2 theta):
        triplet0: -gp/2, singlet: 0, downdown: -w_n + gp/4, upup: +w_n + gp/4.
    """
    if w.larmor is None or w.theta is None:
        raise ValueError("bias-field variant requires larmor and theta")
    gp = w.g12_bias
    entries = [
        ("triplet0", -gp / 2.0),
        ("singlet", 0.0),
        ("downdown", -w.larmor + gp / 4.0),
        ("upup", w.larmor + gp / 4.0),
    ]
    entries.sort(key=lambda item: item[1])
    states = np.column_stack([_PAIR_STATES[name] for name, _ in entries]).astype(complex)
    return EigenSystem(
        energies=np.array([e for _, e in entries]),
        states=states,
        labels=tuple(name for name, _ in entries),
        provenance="analytic",
    )


@singledispatch
def hh_condition(system) -> float:
    """Drive amplitude (MHz) matching the dressed splitting to the target gap."""
    raise TypeError(f"no matching condition for {type(system).__name__}")


@hh_condition.register
def _(system: QuadrupoleSpec) -> float:
    return float(np.sqrt(3.0) * np.sqrt(3.0 + system.eta**2) * system.qbar / 6.0)


@hh_condition.register
def _(system: WaterSpec) -> float:
    return 0.75 * system.g12


@hh_condition.register
def _(system: BoronSystem) -> float:
    return hh_condition(system.quad)


@hh_condition.register
def _(system: WaterSystem) -> float:
    return hh_condition(system.spec)


def _sin2_over_z(z: float, u: float) -> float:
    """sin^2(sqrt(z) u) / z continued analytically through z <= 0."""
    w = z * u * u
    if abs(w) < 1e-9:
        return u * u * (1.0 - w / 3.0 + 2.0 * w * w / 45.0)
    if z > 0:
        return float(np.sin(np.sqrt(z) * u) ** 2 / z)
    return float(np.sinh(np.sqrt(-z) * u) ** 2 / -z)


def analytic_signal_boron(
    rabi: float, q: QuadrupoleSpec, c: DipolarCoupling, t: float
) -> float:
    """Closed-form dressed-population signal for the quadrupole target.

    S = 1 - [3 ax^2 / (6 ax^2 + 8 dW^2)] sin^2( sqrt(3/4 ax^2 - dW^2) t / 2 )
    with dW = Omega - matching amplitude, all rates angular.  The square root
    turns imaginary for |dW| > (sqrt3/2) ax; the expression is continued
    through the entire function sin^2(sqrt(z) u)/z, but values in that regime
    are not trustworthy (see `analytic_boron_validity`) and the numeric
    signal is authoritative there.
    """
    ax = TWO_PI * c.a_x
    dw = TWO_PI * (rabi - hh_condition(q))
    denom = 6.0 * ax**2 + 8.0 * dw**2
    if denom == 0.0:
        return 1.0
    z = 0.75 * ax**2 - dw**2
    return 1.0 - (3.0 * ax**2 / denom) * z * _sin2_over_z(z, t / 2.0)


def analytic_boron_validity(rabi: float, q: QuadrupoleSpec, c: DipolarCoupling) -> bool:
    """Whether the closed-form signal is inside its oscillatory validity range."""
    return abs(rabi - hh_condition(q)) <= np.sqrt(3.0) / 2.0 * abs(c.a_x)


def analytic_signal_water(rabi: float, w: WaterSpec, t: float) -> float:
    """Closed-form dressed-population signal for the proton pair.

    S = 3/4 + 1/4 [ 1 - (ax^2 / (ax^2 + dW^2)) sin^2( sqrt(ax^2 + dW^2) t / 2 ) ]
    with dW = Omega - (3/4) g12, rates angular.
    """
    ax = TWO_PI * w.couplings[0].a_x
    dw = TWO_PI * (rabi - hh_condition(w))
    rate2 = ax**2 + dw**2
    if rate2 == 0.0:
        return 1.0
    osc = np.sin(np.sqrt(rate2) * t / 2.0) ** 2
    return float(0.75 + 0.25 * (1.0 - (ax**2 / rate2) * osc))


def dressed_hamiltonian(system, rabi: float) -> Operator:
    if isinstance(system, BoronSystem):
        return boron_dressed_h(rabi, system.quad, system.coupling)
    if isinstance(system, WaterSystem):
        return water_dressed_h(rabi, system.spec)
    raise TypeError(f"no dressed Hamiltonian for {type(system).__name__}")


def dressed_initial_state(basis: tuple[str, ...]) -> DensityMatrix:
    """|+><+| on the dressed NV doublet, maximally mixed target."""
    nuclear_dim = len(basis) // 2
    nv = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    return DensityMatrix(np.kron(nv, np.eye(nuclear_dim) / nuclear_dim), basis)


def dressed_plus_projector(basis: tuple[str, ...]) -> Operator:
    nuclear_dim = len(basis) // 2
    nv = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    return Operator(np.kron(nv, np.eye(nuclear_dim)), basis)


def numeric_signal(system, rabi: float, t: float) -> float:
    """Dressed |+> population after exact evolution from |+><+| (x) Id/d."""
    h = dressed_hamiltonian(system, rabi)
    rho_t = evolve(dressed_initial_state(h.basis), h, t)
    return expectation(rho_t, dressed_plus_projector(h.basis))


def time_scan(
    system, rabi: float, t_grid: np.ndarray, metadata: dict | None = None
) -> TimeTrace:
    """Numeric signal versus time at fixed drive amplitude."""
    h = dressed_hamiltonian(system, rabi)
    meta = {"rabi_MHz": rabi, **(metadata or {})}
    return population_trace(
        dressed_initial_state(h.basis),
        h,
        dressed_plus_projector(h.basis),
        np.asarray(t_grid, dtype=float),
        meta,
    )


def rabi_sweep(
    system,
    rabi_grid: np.ndarray,
    t_fixed: float,
    jobs: int = 1,
    noise: Callable[[float, float], float] | None = None,
    metadata: dict | None = None,
) -> SweepTrace:
    """Numeric signal over a drive-amplitude grid at fixed evolution time.

    Grid points are independent; with jobs > 1 they are evaluated by a
    thread pool whose output ordering always matches the input grid.  The
    optional `noise` callback perturbs each point (omega, signal) -> signal.
    """
    grid = np.asarray(rabi_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty drive-amplitude grid")

    def point(omega: float) -> float:
        s = numeric_signal(system, omega, t_fixed)
        return noise(omega, s) if noise is not None else s

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            signal = np.array(list(pool.map(point, grid)))
    else:
        signal = np.array([point(om) for om in grid])

    return SweepTrace(
        rabi_values=grid,
        signal=signal,
        t_fixed=t_fixed,
        resonance_prediction=hh_condition(system),
        metadata=dict(metadata or {}),
    )


def default_rabi_grid(system, points: int = 201, halfwidth_factor: float = 3.0) -> np.ndarray:
    """Grid of `points` drive amplitudes spanning +/- halfwidth_factor dip widths.

    The dip width is of the order of the transverse coupling a_x.
    """
    center = hh_condition(system)
    if isinstance(system, BoronSystem):
        width = abs(system.coupling.a_x)
    elif isinstance(system, WaterSystem):
        width = abs(system.spec.couplings[0].a_x)
    else:
        raise TypeError(f"no default grid for {type(system).__name__}")
    span = halfwidth_factor * width
    return np.linspace(center - span, center + span, points)
