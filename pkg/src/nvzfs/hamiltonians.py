"""Hamiltonian builders for the NV sensor and its nuclear targets.

All frequency-valued inputs are ordinary frequencies in MHz and time is in
microseconds; the factor 2*pi enters exactly once, at matrix assembly, so the
returned matrices hold angular frequencies in rad/us.

Covered systems:

* NV triplet under linearly or circularly polarized microwave drive, in the
  lab frame and in the resonant rotating frame,
* spin-3/2 quadrupole target (boron-11) coupled to the NV by the secular
  dipole-dipole interaction, in the lab frame and in the dressed frame,
* proton pair of a water molecule, with and without a bias field, and its
  dressed-frame coupling to the NV.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .constants import (
    DIPOLAR_PREFACTOR,
    GAMMA_E,
    GAMMA_H1,
    NV_ZFS,
    TWO_PI,
    pair_coupling,
)
from .spincore import (
    DRESSED_BASIS,
    NV_BASIS,
    Operator,
    SpinOperators,
    combine_labels,
    identity,
    kron,
    spin_basis_labels,
    spin_operators,
)

LINEAR = "linear"
SIGMA_PLUS = "sigma_plus"
SIGMA_MINUS = "sigma_minus"

FRAME_LAB = "lab"
FRAME_RWA = "interaction_rwa"
FRAME_DRESSED = "dressed"

MIN_NV_DISTANCE_NM = 0.1
MIN_PAIR_DISTANCE_NM = 0.05

# Pseudosecular coupling should stay well below the target's internal scale;
# presets are checked at this ratio and warned about beyond it.
COUPLING_RATIO_WARN = 0.05


@dataclass(frozen=True)
class DriveSpec:
    """Microwave drive: polarization, Rabi amplitude, carrier, phase."""

    polarization: str
    rabi: float          # ordinary MHz
    carrier: float = NV_ZFS  # ordinary MHz
    phase: float = 0.0   # rad

    def __post_init__(self):
        if self.polarization not in (LINEAR, SIGMA_PLUS, SIGMA_MINUS):
            raise ValueError(f"unknown polarization {self.polarization!r}")
        if self.rabi < 0:
            raise ValueError("rabi must be non-negative")
        if self.carrier <= 0:
            raise ValueError("carrier must be positive")


@dataclass(frozen=True)
class QuadrupoleSpec:
    """Spin-3/2 quadrupole interaction: coupling constant and asymmetry."""

    qbar: float  # ordinary MHz
    eta: float = 0.0
    spin: float = 1.5

    def __post_init__(self):
        if self.qbar <= 0:
            raise ValueError("qbar must be positive")
        if self.eta < 0:
            raise ValueError("eta must be non-negative")
        if self.eta > 1:
            warnings.warn(f"asymmetry eta={self.eta} above 1 is outside the usual range")
        if abs(self.spin - 1.5) > 1e-12:
            raise ValueError("only spin 3/2 targets are supported")


@dataclass(frozen=True)
class GeometrySpec:
    """Relative NV-target geometry and the two gyromagnetic ratios."""

    r_vec: tuple[float, float, float]  # nm, from NV to target spin
    gamma_n: float                     # MHz/T
    gamma_e: float = GAMMA_E           # MHz/T

    def __post_init__(self):
        r = float(np.linalg.norm(self.r_vec))
        if r <= MIN_NV_DISTANCE_NM:
            raise ValueError(f"|r_vec| = {r:.3g} nm is below the {MIN_NV_DISTANCE_NM} nm minimum")

    @property
    def r(self) -> float:
        return float(np.linalg.norm(self.r_vec))

    @property
    def unit(self) -> np.ndarray:
        v = np.asarray(self.r_vec, dtype=float)
        return v / np.linalg.norm(v)

    @property
    def g(self) -> float:
        """Point-dipole coupling strength, ordinary MHz."""
        return DIPOLAR_PREFACTOR * self.gamma_e * self.gamma_n / self.r**3


@dataclass(frozen=True)
class DipolarCoupling:
    """Transverse and axial NV-nucleus coupling components, ordinary MHz."""

    a_x: float
    a_z: float

    def __post_init__(self):
        if not (np.isfinite(self.a_x) and np.isfinite(self.a_z)):
            raise ValueError("coupling components must be finite")

    def check_against_scale(self, scale: float, name: str = "target gap"):
        if scale > 0 and abs(self.a_z) / scale >= COUPLING_RATIO_WARN:
            warnings.warn(
                f"pseudosecular coupling a_z={self.a_z} MHz is not small against "
                f"{name} {scale} MHz (ratio {abs(self.a_z) / scale:.3g})"
            )


@dataclass(frozen=True)
class WaterSpec:
    """Proton pair of a water molecule and its couplings to the NV."""

    d: float  # internuclear distance, nm
    couplings: tuple[DipolarCoupling, DipolarCoupling] = (
        DipolarCoupling(0.63e-3, 0.0),
        DipolarCoupling(0.63e-3, 0.0),
    )
    larmor: float | None = None  # ordinary MHz; bias-field variant only
    theta: float | None = None   # rad; bias-field variant only

    def __post_init__(self):
        if self.d <= MIN_PAIR_DISTANCE_NM:
            raise ValueError(f"d = {self.d} nm is below the {MIN_PAIR_DISTANCE_NM} nm minimum")

    @property
    def g12(self) -> float:
        """Pair coupling constant, ordinary MHz."""
        return pair_coupling(GAMMA_H1, self.d)

    @property
    def g12_bias(self) -> float:
        """Orientation-weighted pair coupling (g12/2)(1 - 3 cos^2 theta), MHz."""
        if self.theta is None:
            raise ValueError("theta is required for the bias-field variant")
        return 0.5 * self.g12 * (1.0 - 3.0 * np.cos(self.theta) ** 2)


# Module-level operator sets; cheap to build and convenient for tests.
NV = spin_operators(1.0)
SPIN_32 = spin_operators(1.5)
SPIN_12 = spin_operators(0.5)

NUC_BASIS = spin_basis_labels(1.5)
PAIR_BASIS = combine_labels(spin_basis_labels(0.5), spin_basis_labels(0.5))


def _drive_quadratures(drive: DriveSpec, t: float) -> tuple[float, float]:
    angle = TWO_PI * drive.carrier * t + drive.phase
    return float(np.cos(angle)), float(np.sin(angle))


def nv_lab_linear(
    D: float, drive: DriveSpec, t: float, delta: float = 0.0
) -> Operator:
    """Lab-frame NV Hamiltonian under a linearly polarized drive.

    H = 2pi [ D Sz^2 + delta Sz + sqrt(2) Omega cos(2pi w t + phase) Sx ].
    `delta` is an optional axial bias term, zero at zero field.
    """
    if drive.polarization != LINEAR:
        raise ValueError(f"linear drive required, got {drive.polarization!r}")
    cos, _ = _drive_quadratures(drive, t)
    h = (
        D * (NV.sz @ NV.sz).mat
        + delta * NV.sz.mat
        + np.sqrt(2.0) * drive.rabi * cos * NV.sx.mat
    )
    return Operator(TWO_PI * h, NV_BASIS, FRAME_LAB)


def nv_lab_circular(D: float, drive: DriveSpec, t: float) -> Operator:
    """Lab-frame NV Hamiltonian under a circularly polarized drive.

    H = 2pi [ D Sz^2 + (Omega/sqrt2) cos(2pi w t) Sx +/- (Omega/sqrt2) sin(2pi w t) Sy ],
    with + for sigma_plus and - for sigma_minus.
    """
    if drive.polarization == LINEAR:
        raise ValueError("circular drive required, got linear polarization")
    sign = 1.0 if drive.polarization == SIGMA_PLUS else -1.0
    cos, sin = _drive_quadratures(drive, t)
    amp = drive.rabi / np.sqrt(2.0)
    h = D * (NV.sz @ NV.sz).mat + amp * (cos * NV.sx.mat + sign * sin * NV.sy.mat)
    return Operator(TWO_PI * h, NV_BASIS, FRAME_LAB)


def nv_rwa(drive: DriveSpec, D: float = NV_ZFS) -> Operator:
    """Resonant rotating-frame NV Hamiltonian after dropping counter-rotating terms.

    Requires carrier == D; a detuned rotating frame is intentionally not
    supported.  Linear polarization couples |0> to the symmetric combination
    (|+1> + |-1>)/sqrt2 with amplitude Omega/sqrt2; sigma_plus (sigma_minus)
    couples |0> only to |+1> (|-1>) with amplitude Omega/2.
    """
    if abs(drive.carrier - D) > 1e-9 * max(D, 1.0):
        raise ValueError(
            f"rotating-frame builder requires carrier = D (got {drive.carrier} vs {D})"
        )
    h = np.zeros((3, 3), dtype=complex)
    if drive.polarization == LINEAR:
        amp = drive.rabi / np.sqrt(2.0)
        bright = np.array([1.0, 0.0, 1.0]) / np.sqrt(2.0)
        ket0 = np.array([0.0, 1.0, 0.0])
        h = amp * (np.outer(ket0, bright) + np.outer(bright, ket0))
    else:
        target = 0 if drive.polarization == SIGMA_PLUS else 2
        h[1, target] = drive.rabi / 2.0
        h[target, 1] = drive.rabi / 2.0
    return Operator(TWO_PI * h, NV_BASIS, FRAME_RWA)


def hyperfine_from_geometry(geom: GeometrySpec) -> DipolarCoupling:
    """Reduce the secular dipole-dipole interaction to (a_x, a_z).

    The nuclear frame is rotated about z so the transverse coupling lies
    along the nuclear x axis:
        a_z = -g (3 ez^2 - 1),   a_x = -3 g ez sqrt(ex^2 + ey^2).
    """
    ex, ey, ez = geom.unit
    g = geom.g
    a_z = -g * (3.0 * ez**2 - 1.0)
    a_x = -3.0 * g * ez * np.hypot(ex, ey)
    return DipolarCoupling(a_x=float(a_x), a_z=float(a_z))


def dipolar_secular(
    geom: GeometrySpec, target: SpinOperators
) -> tuple[Operator, DipolarCoupling]:
    """Secular NV-nucleus dipole-dipole interaction on the joint space.

    Returns the operator
        -2pi g Sz (x) { 3 ez (ex Ix + ey Iy) + (3 ez^2 - 1) Iz }
    together with the (a_x, a_z) reduction produced by
    `hyperfine_from_geometry`; the two are unitarily equivalent under a
    nuclear z-rotation.
    """
    ex, ey, ez = geom.unit
    g = geom.g
    nuclear = 3.0 * ez * (ex * target.sx.mat + ey * target.sy.mat) + (
        3.0 * ez**2 - 1.0
    ) * target.sz.mat
    mat = -TWO_PI * g * np.kron(NV.sz.mat, nuclear)
    op = Operator(mat, combine_labels(NV_BASIS, target.sx.basis), FRAME_LAB)
    return op, hyperfine_from_geometry(geom)


def quadrupole_h(q: QuadrupoleSpec) -> Operator:
    """Spin-3/2 quadrupole Hamiltonian, (2pi)(qbar/12)[3 Iz^2 - I^2 + eta (Ix^2 - Iy^2)]."""
    ix, iy, iz = SPIN_32.sx.mat, SPIN_32.sy.mat, SPIN_32.sz.mat
    body = 3.0 * iz @ iz - SPIN_32.s2.mat + q.eta * (ix @ ix - iy @ iy)
    return Operator(TWO_PI * (q.qbar / 12.0) * body, NUC_BASIS, FRAME_LAB)


def coupling_term(c: DipolarCoupling, target: SpinOperators) -> Operator:
    """NV-nucleus coupling 2pi Sz (x) (a_x Ix + a_z Iz) on the joint space."""
    nuclear = c.a_x * target.sx.mat + c.a_z * target.sz.mat
    mat = TWO_PI * np.kron(NV.sz.mat, nuclear)
    return Operator(mat, combine_labels(NV_BASIS, target.sx.basis), FRAME_LAB)


def boron_full_h(
    D: float, drive: DriveSpec, q: QuadrupoleSpec, c: DipolarCoupling, t: float
) -> Operator:
    """Full lab-frame NV + spin-3/2 Hamiltonian under sigma_plus drive (12-dim)."""
    if drive.polarization != SIGMA_PLUS:
        raise ValueError("the driven boron system uses a sigma_plus drive")
    nv_part = kron(nv_lab_circular(D, drive, t), identity(NUC_BASIS))
    quad_part = kron(identity(NV_BASIS), quadrupole_h(q))
    return (nv_part + quad_part + coupling_term(c, SPIN_32)).with_frame(FRAME_LAB)


def _sigma_ops() -> tuple[np.ndarray, np.ndarray]:
    """Dressed-state sigma_x, sigma_z (half-Pauli convention) on {|+>, |->}."""
    return SPIN_12.sx.mat, SPIN_12.sz.mat


def boron_dressed_h(rabi: float, q: QuadrupoleSpec, c: DipolarCoupling) -> Operator:
    """Dressed-frame NV + spin-3/2 Hamiltonian on {|+>, |->} (x) spin-3/2.

    H = 2pi [ Omega sz + quadrupole - (a_z/2) Iz + sx (a_x Ix + a_z Iz) ],
    with sx, sz the half-Pauli dressed operators and |+-> = (|+1> +- |0>)/sqrt2.
    This compact model drops the nuclear-only (a_x/2) Ix term that the exact
    frame reduction produces; see `boron_dressed_exact`.
    """
    sx, sz = _sigma_ops()
    ix, iz = SPIN_32.sx.mat, SPIN_32.sz.mat
    e2, e4 = np.eye(2), np.eye(4)
    quad = quadrupole_h(q).mat / TWO_PI
    h = (
        rabi * np.kron(sz, e4)
        + np.kron(e2, quad)
        - (c.a_z / 2.0) * np.kron(e2, iz)
        + np.kron(sx, c.a_x * ix + c.a_z * iz)
    )
    return Operator(TWO_PI * h, combine_labels(DRESSED_BASIS, NUC_BASIS), FRAME_DRESSED)


def boron_dressed_exact(rabi: float, q: QuadrupoleSpec, c: DipolarCoupling) -> Operator:
    """Exact restriction of the resonant rotating frame to the driven subspace.

    On span{|+1>, |0>} the NV Sz operator equals sx + 1/2, so the coupling
    becomes sx (a_x Ix + a_z Iz) + (a_x/2) Ix + (a_z/2) Iz.  Used to quantify
    the error of the compact `boron_dressed_h` model.
    """
    sx, sz = _sigma_ops()
    ix, iz = SPIN_32.sx.mat, SPIN_32.sz.mat
    e2 = np.eye(2)
    quad = quadrupole_h(q).mat / TWO_PI
    nuclear = c.a_x * ix + c.a_z * iz
    h = (
        rabi * np.kron(sz, np.eye(4))
        + np.kron(e2, quad)
        + np.kron(sx, nuclear)
        + 0.5 * np.kron(e2, nuclear)
    )
    return Operator(TWO_PI * h, combine_labels(DRESSED_BASIS, NUC_BASIS), FRAME_DRESSED)


def _pair_ops() -> tuple[list[np.ndarray], list[np.ndarray]]:
    j = SPIN_12
    e2 = np.eye(2)
    first = [np.kron(j.sx.mat, e2), np.kron(j.sy.mat, e2), np.kron(j.sz.mat, e2)]
    second = [np.kron(e2, j.sx.mat), np.kron(e2, j.sy.mat), np.kron(e2, j.sz.mat)]
    return first, second


def water_bias_h(w: WaterSpec) -> Operator:
    """Proton-pair Hamiltonian under a bias field along z.

    H = 2pi [ w_n (I1z + I2z) + g' ( I1z I2z - (I1x I2x + I1y I2y)/2 ) ],
    with g' = (g12/2)(1 - 3 cos^2 theta).
    """
    if w.larmor is None or w.theta is None:
        raise ValueError("bias-field variant requires larmor and theta")
    i1, i2 = _pair_ops()
    gp = w.g12_bias
    h = w.larmor * (i1[2] + i2[2]) + gp * (
        i1[2] @ i2[2] - 0.5 * (i1[0] @ i2[0] + i1[1] @ i2[1])
    )
    return Operator(TWO_PI * h, PAIR_BASIS, FRAME_LAB)


def water_zero_h(w: WaterSpec, axis: tuple[float, float, float] = (0.0, 0.0, 1.0)) -> Operator:
    """Zero-field proton-pair Hamiltonian, orientation-free form.

    H = 2pi (g12/2) [ I1.I2 - 3 (n.I1)(n.I2) ] with n the internuclear axis.
    The spectrum {+g12/2, 0, -g12/4, -g12/4} does not depend on n.
    """
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    i1, i2 = _pair_ops()
    dot = sum(i1[k] @ i2[k] for k in range(3))
    proj1 = sum(n[k] * i1[k] for k in range(3))
    proj2 = sum(n[k] * i2[k] for k in range(3))
    h = (w.g12 / 2.0) * (dot - 3.0 * proj1 @ proj2)
    return Operator(TWO_PI * h, PAIR_BASIS, FRAME_LAB)


def water_dressed_h(rabi: float, w: WaterSpec) -> Operator:
    """Dressed-frame NV + proton-pair Hamiltonian on {|+>, |->} (x) pair space.

    H = 2pi [ Omega sz + H_pair + sum_i ( sx (a_x Ii_x + a_z Ii_z) - (a_z/2) Ii_z ) ],
    the pair analog of `boron_dressed_h` (same compact-model convention).
    """
    sx, sz = _sigma_ops()
    e2 = np.eye(2)
    pair = water_zero_h(w).mat / TWO_PI
    h = rabi * np.kron(sz, np.eye(4)) + np.kron(e2, pair)
    for ops, c in zip(_pair_ops(), w.couplings):
        h += np.kron(sx, c.a_x * ops[0] + c.a_z * ops[2]) - (c.a_z / 2.0) * np.kron(
            e2, ops[2]
        )
    return Operator(TWO_PI * h, combine_labels(DRESSED_BASIS, PAIR_BASIS), FRAME_DRESSED)


def water_dressed_exact(rabi: float, w: WaterSpec) -> Operator:
    """Exact-restriction counterpart of `water_dressed_h` (Sz -> sx + 1/2)."""
    sx, sz = _sigma_ops()
    e2 = np.eye(2)
    pair = water_zero_h(w).mat / TWO_PI
    h = rabi * np.kron(sz, np.eye(4)) + np.kron(e2, pair)
    for ops, c in zip(_pair_ops(), w.couplings):
        nuclear = c.a_x * ops[0] + c.a_z * ops[2]
        h += np.kron(sx, nuclear) + 0.5 * np.kron(e2, nuclear)
    return Operator(TWO_PI * h, combine_labels(DRESSED_BASIS, PAIR_BASIS), FRAME_DRESSED)
