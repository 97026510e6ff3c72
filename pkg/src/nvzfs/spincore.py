"""Operator algebra foundation: spin matrices, tensor embedding, expectations.

Operators are dense complex matrices wrapped together with an ordered basis
label tuple.  The basis is ordered by decreasing magnetic quantum number
everywhere; the NV triplet basis is ("+1", "0", "-1").
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .constants import (
    DENSITY_POSITIVITY_TOL,
    DENSITY_TRACE_TOL,
    HERM_TOL,
    UNITARY_TOL,
)
from .errors import DimensionMismatchError, NonHermitianError, NumericalInvariantError

NV_BASIS = ("+1", "0", "-1")
DRESSED_BASIS = ("+", "-")


def spin_basis_labels(j: float) -> tuple[str, ...]:
    """Basis labels for spin j, ordered by decreasing m."""
    dim = _dim_for_spin(j)
    labels = []
    for k in range(dim):
        m = Fraction(int(round(2 * j)) - 2 * k, 2)
        if m.denominator == 1:
            labels.append(f"{int(m):+d}" if m != 0 else "0")
        else:
            labels.append(f"{m.numerator:+d}/{m.denominator}")
    return tuple(labels)


def _dim_for_spin(j: float) -> int:
    twice = 2 * j
    if j < 0 or abs(twice - round(twice)) > 1e-12:
        raise ValueError(f"spin quantum number must be a non-negative half-integer, got {j}")
    return int(round(twice)) + 1


@dataclass(frozen=True)
class Operator:
    """Dense complex square matrix with basis metadata.

    `frame` tags Hamiltonians with the reference frame they are written in:
    one of "lab", "interaction_rwa", "dressed", or None for plain operators.
    """

    mat: np.ndarray
    basis: tuple[str, ...]
    frame: str | None = None

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatchError(f"operator matrix must be square, got shape {mat.shape}")
        if len(self.basis) != mat.shape[0]:
            raise DimensionMismatchError(
                f"basis has {len(self.basis)} labels for dimension {mat.shape[0]}"
            )
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "basis", tuple(self.basis))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def dagger(self) -> "Operator":
        return Operator(self.mat.conj().T, self.basis, self.frame)

    def is_hermitian(self, tol: float = HERM_TOL) -> bool:
        return bool(np.max(np.abs(self.mat - self.mat.conj().T)) <= tol)

    def require_hermitian(self, tol: float = HERM_TOL) -> "Operator":
        if not self.is_hermitian(tol):
            dev = np.max(np.abs(self.mat - self.mat.conj().T))
            raise NonHermitianError(f"matrix deviates from Hermiticity by {dev:.3e}")
        return self

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        probe = self.mat @ self.mat.conj().T - np.eye(self.dim)
        return bool(np.max(np.abs(probe)) <= tol)

    def _check_same_space(self, other: "Operator"):
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        frame = self.frame if self.frame == other.frame else None
        return Operator(self.mat + other.mat, self.basis, frame)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        frame = self.frame if self.frame == other.frame else None
        return Operator(self.mat - other.mat, self.basis, frame)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.mat * scalar, self.basis, self.frame)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(-self.mat, self.basis, self.frame)

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.mat @ other.mat, self.basis)

    def with_frame(self, frame: str | None) -> "Operator":
        return Operator(self.mat, self.basis, frame)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state on a labelled basis."""

    mat: np.ndarray
    basis: tuple[str, ...]

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatchError(f"density matrix must be square, got shape {mat.shape}")
        if len(self.basis) != mat.shape[0]:
            raise DimensionMismatchError(
                f"basis has {len(self.basis)} labels for dimension {mat.shape[0]}"
            )
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "basis", tuple(self.basis))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def validate(
        self,
        herm_tol: float = HERM_TOL,
        trace_tol: float = DENSITY_TRACE_TOL,
        positivity_tol: float = DENSITY_POSITIVITY_TOL,
    ) -> "DensityMatrix":
        dev = np.max(np.abs(self.mat - self.mat.conj().T))
        if dev > herm_tol:
            raise NonHermitianError(f"density matrix deviates from Hermiticity by {dev:.3e}")
        tr = np.trace(self.mat)
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"density matrix trace {tr} is not 1 within {trace_tol}")
        lowest = np.linalg.eigvalsh(self.mat)[0]
        if lowest < -positivity_tol:
            raise ValueError(f"density matrix has eigenvalue {lowest:.3e} below tolerance")
        return self

    @classmethod
    def from_state_vector(cls, vec: np.ndarray, basis: tuple[str, ...]) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), basis)

    @classmethod
    def maximally_mixed(cls, basis: tuple[str, ...]) -> "DensityMatrix":
        d = len(basis)
        return cls(np.eye(d, dtype=complex) / d, basis)


@dataclass(frozen=True)
class SpinOperators:
    """Cartesian spin matrices and the Casimir operator for one spin."""

    j: float
    sx: Operator
    sy: Operator
    sz: Operator
    s2: Operator = field(repr=False)

    @property
    def dim(self) -> int:
        return self.sx.dim

    @property
    def identity(self) -> Operator:
        return Operator(np.eye(self.dim), self.sx.basis)


def spin_operators(j: float) -> SpinOperators:
    """Angular-momentum matrices for spin quantum number j.

    Parameters
    ----------
    j : float
        Non-negative half-integer (1/2, 1, 3/2, ...).

    Returns
    -------
    SpinOperators
        sx, sy, sz and s2 = sx^2 + sy^2 + sz^2 = j(j+1) * identity, in the
        basis ordered by decreasing m.
    """
    dim = _dim_for_spin(j)
    labels = spin_basis_labels(j)
    ms = j - np.arange(dim)
    sz = np.diag(ms).astype(complex)
    raise_op = np.zeros((dim, dim), dtype=complex)
    for col in range(1, dim):
        m = ms[col]
        raise_op[col - 1, col] = np.sqrt(j * (j + 1) - m * (m + 1))
    sx = (raise_op + raise_op.conj().T) / 2
    sy = (raise_op - raise_op.conj().T) / 2j
    s2 = sx @ sx + sy @ sy + sz @ sz
    return SpinOperators(
        j=j,
        sx=Operator(sx, labels),
        sy=Operator(sy, labels),
        sz=Operator(sz, labels),
        s2=Operator(s2, labels),
    )


def identity(basis: tuple[str, ...]) -> Operator:
    return Operator(np.eye(len(basis)), basis)


def combine_labels(a: tuple[str, ...], b: tuple[str, ...]) -> tuple[str, ...]:
    return tuple(f"{la}*{lb}" for la in a for lb in b)


def kron(a: Operator, b: Operator) -> Operator:
    """Tensor product; basis labels are concatenated pairwise."""
    frame = a.frame if a.frame == b.frame else None
    return Operator(np.kron(a.mat, b.mat), combine_labels(a.basis, b.basis), frame)


def embed(op: Operator, slot: int, dims: list[int]) -> Operator:
    """Embed `op` at position `slot` of a tensor-product space, identity elsewhere."""
    if not 0 <= slot < len(dims):
        raise IndexError(f"slot {slot} outside {len(dims)} factors")
    if dims[slot] != op.dim:
        raise DimensionMismatchError(
            f"operator dimension {op.dim} does not match dims[{slot}]={dims[slot]}"
        )
    out = None
    for k, d in enumerate(dims):
        factor = op if k == slot else Operator(np.eye(d), tuple(str(i) for i in range(d)))
        out = factor if out is None else kron(out, factor)
    return out


def expectation(rho: DensityMatrix, obs: Operator, imag_tol: float = 1e-10) -> float:
    """Re tr(rho . obs) for a Hermitian observable.

    The imaginary residue of the trace must stay below `imag_tol`.
    """
    if rho.dim != obs.dim:
        raise DimensionMismatchError(f"dimension mismatch: {rho.dim} vs {obs.dim}")
    obs.require_hermitian()
    value = np.trace(rho.mat @ obs.mat)
    if abs(value.imag) > imag_tol:
        raise NumericalInvariantError(f"expectation has imaginary residue {value.imag:.3e}")
    return float(value.real)
