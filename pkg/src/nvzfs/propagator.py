"""Exact numerical time evolution for small dense spin systems.

Time-independent Hamiltonians are exponentiated through their Hermitian
eigendecomposition; time-dependent ones are stepped with midpoint-evaluated
piecewise-constant propagators (second order in dt).  Dimensions in this
package never exceed 12, so everything is dense.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .constants import STEP_PHASE_HARD, STEP_PHASE_SOFT, TWO_PI
from .errors import (
    DimensionMismatchError,
    NumericalInvariantError,
    StepTooCoarseError,
)
from .spincore import DensityMatrix, Operator, expectation

# Batched eigendecompositions are chunked to keep the step-matrix workspace
# below a few tens of MB.
_CHUNK = 4096


@dataclass(frozen=True)
class EvolutionConfig:
    """Stepping parameters for time-dependent evolution."""

    dt: float                      # us
    t_max: float                   # us
    samples: int = 0               # recorded points for traces (0 = final only)
    method: str = "stepped_midpoint"

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")
        if self.method not in ("exact_diagonalization", "stepped_midpoint"):
            raise ValueError(f"unknown method {self.method!r}")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_max / self.dt)))


@dataclass(frozen=True)
class TimeTrace:
    """Sampled population signal S(t) with a parameter snapshot."""

    times: np.ndarray   # us
    values: np.ndarray  # dimensionless, within [0, 1]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape:
            raise ValueError("times and values must have equal length")
        if values.size and (values.min() < -1e-6 or values.max() > 1.0 + 1e-6):
            raise NumericalInvariantError(
                f"signal leaves [0, 1]: range [{values.min():.3e}, {values.max():.3e}]"
            )
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (ordinary MHz, ascending) and labelled eigenvectors."""

    energies: np.ndarray
    states: np.ndarray          # states[:, k] belongs to energies[k]
    labels: tuple[str, ...]
    provenance: str             # "analytic" or "numeric"

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=float)
        states = np.asarray(self.states, dtype=complex)
        if states.shape != (energies.size, energies.size):
            raise ValueError("states must be a square matrix of column vectors")
        gram = states.conj().T @ states
        if np.max(np.abs(gram - np.eye(energies.size))) > 1e-10:
            raise ValueError("eigenvectors are not orthonormal to 1e-10")
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "labels", tuple(self.labels))

    def gaps(self) -> np.ndarray:
        return np.diff(self.energies)


def eig_hermitian(h: Operator, labels: tuple[str, ...] | None = None) -> EigenSystem:
    """Eigendecomposition of a Hermitian operator.

    Energies are returned as ordinary frequencies (matrix entries are angular,
    so eigenvalues are divided by 2*pi).  Reconstruction is verified to
    1e-10 relative to the largest matrix entry.
    """
    h.require_hermitian()
    evals, evecs = np.linalg.eigh(h.mat)
    scale = max(np.max(np.abs(h.mat)), 1.0)
    recon = evecs @ np.diag(evals) @ evecs.conj().T
    if np.max(np.abs(recon - h.mat)) > 1e-10 * scale:
        raise NumericalInvariantError("eigendecomposition failed to reconstruct input")
    if labels is None:
        labels = tuple(f"E{k}" for k in range(evals.size))
    return EigenSystem(
        energies=evals / TWO_PI, states=evecs, labels=labels, provenance="numeric"
    )


def _propagator_from_eigh(evals: np.ndarray, evecs: np.ndarray, t: float) -> np.ndarray:
    phases = np.exp(-1j * evals * t)
    return (evecs * phases) @ evecs.conj().T


def evolve(rho0: DensityMatrix, h: Operator, t: float) -> DensityMatrix:
    """Evolve a state under a time-independent Hamiltonian: U rho U^dag."""
    if rho0.dim != h.dim:
        raise DimensionMismatchError(f"dimension mismatch: {rho0.dim} vs {h.dim}")
    h.require_hermitian()
    evals, evecs = np.linalg.eigh(h.mat)
    u = _propagator_from_eigh(evals, evecs, t)
    return DensityMatrix(u @ rho0.mat @ u.conj().T, rho0.basis)


def _spectral_radius(mat: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvalsh(mat))))


def _check_step_size(h_of_t: Callable[[float], Operator], cfg: EvolutionConfig):
    # Probe the spectral radius at a few times; the drive only modulates
    # bounded off-diagonal terms, so this is a faithful f_max estimate.
    radius = max(
        _spectral_radius(h_of_t(t).mat) for t in (0.0, 0.5 * cfg.t_max, cfg.t_max)
    )
    phase = cfg.dt * radius  # dt * 2pi f_max, since entries are angular
    if phase > STEP_PHASE_HARD:
        raise StepTooCoarseError(
            f"dt*2pi*f_max = {phase:.3g} rad exceeds the hard limit {STEP_PHASE_HARD}"
        )
    if phase > STEP_PHASE_SOFT:
        warnings.warn(
            f"dt*2pi*f_max = {phase:.3g} rad exceeds {STEP_PHASE_SOFT}; "
            "stepping error may be significant"
        )


def _iter_step_unitaries(h_of_t, cfg: EvolutionConfig, dim: int):
    """Yield (step_index, U_step) for midpoint-evaluated step propagators."""
    n = cfg.n_steps
    dt = cfg.t_max / n
    done = 0
    while done < n:
        count = min(_CHUNK, n - done)
        mids = (done + np.arange(count) + 0.5) * dt
        hams = np.empty((count, dim, dim), dtype=complex)
        for k, tm in enumerate(mids):
            hams[k] = h_of_t(tm).mat
        evals, evecs = np.linalg.eigh(hams)
        phases = np.exp(-1j * evals * dt)
        steps = np.einsum("nij,nj,nkj->nik", evecs, phases, evecs.conj())
        for k in range(count):
            yield done + k, steps[k]
        done += count


def propagate_unitary(
    h_of_t: Callable[[float], Operator], cfg: EvolutionConfig
) -> Operator:
    """Accumulated midpoint propagator U(t_max) for a time-dependent Hamiltonian.

    Unitarity drift is checked to 1e-8.
    """
    _check_step_size(h_of_t, cfg)
    probe = h_of_t(0.0)
    u = np.eye(probe.dim, dtype=complex)
    for _, step in _iter_step_unitaries(h_of_t, cfg, probe.dim):
        u = step @ u
    _require_unitary(u)
    return Operator(u, probe.basis)


def evolve_time_dependent(
    rho0: DensityMatrix, h_of_t: Callable[[float], Operator], cfg: EvolutionConfig
) -> DensityMatrix:
    """Evolve under a time-dependent Hamiltonian with midpoint stepping."""
    u = propagate_unitary(h_of_t, cfg).mat
    return DensityMatrix(u @ rho0.mat @ u.conj().T, rho0.basis)


def _require_unitary(u: np.ndarray, tol: float = 1e-8):
    drift = np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])))
    if drift > tol:
        raise NumericalInvariantError(f"propagator unitarity drift {drift:.3e} exceeds {tol}")


def stepped_trace(
    rho0: DensityMatrix,
    h_of_t: Callable[[float], Operator],
    cfg: EvolutionConfig,
    observables: Mapping[str, Operator],
    metadata: dict | None = None,
) -> dict[str, TimeTrace]:
    """Record observable expectations along a midpoint-stepped evolution.

    Sampling happens at `cfg.samples` evenly spaced step boundaries
    (including t=0 and t=t_max).
    """
    _check_step_size(h_of_t, cfg)
    n = cfg.n_steps
    dt = cfg.t_max / n
    n_samples = max(2, cfg.samples)
    sample_steps = np.unique(np.round(np.linspace(0, n, n_samples)).astype(int))

    dim = rho0.dim
    u = np.eye(dim, dtype=complex)
    names = list(observables)
    times: list[float] = []
    records: dict[str, list[float]] = {name: [] for name in names}

    def record(step_index: int):
        rho_t = DensityMatrix(u @ rho0.mat @ u.conj().T, rho0.basis)
        rho_t.validate(herm_tol=1e-8, trace_tol=1e-8, positivity_tol=1e-8)
        times.append(step_index * dt)
        for name in names:
            records[name].append(expectation(rho_t, observables[name], imag_tol=1e-8))

    cursor = set(sample_steps.tolist())
    if 0 in cursor:
        record(0)
    for idx, step in _iter_step_unitaries(h_of_t, cfg, dim):
        u = step @ u
        if (idx + 1) in cursor:
            record(idx + 1)
    _require_unitary(u)

    meta = dict(metadata or {})
    meta.setdefault("dt_us", dt)
    t_arr = np.asarray(times)
    return {
        name: TimeTrace(times=t_arr, values=np.asarray(records[name]), metadata=meta)
        for name in names
    }


def population_trace(
    rho0: DensityMatrix,
    h: Operator,
    projector: Operator,
    times: np.ndarray,
    metadata: dict | None = None,
) -> TimeTrace:
    """Population of a Hermitian idempotent projector under exact evolution."""
    projector.require_hermitian()
    if np.max(np.abs(projector.mat @ projector.mat - projector.mat)) > 1e-10:
        raise ValueError("projector must be idempotent")
    h.require_hermitian()
    if rho0.dim != h.dim or h.dim != projector.dim:
        raise DimensionMismatchError("state, Hamiltonian and projector dimensions differ")
    evals, evecs = np.linalg.eigh(h.mat)
    values = []
    for t in np.asarray(times, dtype=float):
        u = _propagator_from_eigh(evals, evecs, t)
        rho_t = DensityMatrix(u @ rho0.mat @ u.conj().T, rho0.basis)
        rho_t.validate(herm_tol=1e-8, trace_tol=1e-8, positivity_tol=1e-8)
        values.append(expectation(rho_t, projector, imag_tol=1e-8))
    return TimeTrace(
        times=np.asarray(times, dtype=float),
        values=np.asarray(values),
        metadata=dict(metadata or {}),
    )
