"""Physical constants and numerical tolerances.

Unit conventions used throughout the package:

* every user-facing frequency is an ordinary frequency in MHz,
* time is in microseconds,
* Hamiltonian matrix entries are angular frequencies in rad/us, i.e. the
  factor 2*pi is applied exactly once, when a matrix is assembled.
"""

import math

TWO_PI = 2.0 * math.pi

# CODATA values (SI).
MU_0 = 1.25663706212e-6  # vacuum permeability, T m / A
HBAR = 1.054571817e-34   # reduced Planck constant, J s

# Gyromagnetic ratios as ordinary frequencies, MHz per tesla.
GAMMA_E = 28024.95   # NV electron spin
GAMMA_H1 = 42.577    # proton
GAMMA_B11 = 13.66    # boron-11

# Dipole-dipole prefactor: with gamma values in MHz/T and a separation in nm,
#   coupling [MHz] = DIPOLAR_PREFACTOR * gamma_1 * gamma_2 / r**3.
# Derivation: mu0 hbar g1_ang g2_ang / (4 pi r^3) converted from angular rad/s
# to ordinary MHz, with g_ang = 2 pi * 1e6 * gamma.  The net factor is
# (mu0 / 4 pi) * h * 1e33 for r in nm.
DIPOLAR_PREFACTOR = (MU_0 / (4.0 * math.pi)) * (TWO_PI * HBAR) * 1e33

# NV ground-state zero-field splitting, ordinary MHz.
NV_ZFS = 2870.0

# Tolerances for matrix structure checks (absolute, per entry).
HERM_TOL = 1e-12
UNITARY_TOL = 1e-10

# Density-matrix hygiene: trace/Hermiticity to 1e-12 at construction,
# eigenvalues allowed down to -1e-10.
DENSITY_TRACE_TOL = 1e-12
DENSITY_POSITIVITY_TOL = 1e-10

# Time stepping: warn when dt * (2 pi f_max) exceeds SOFT, refuse at HARD.
STEP_PHASE_SOFT = 0.1
STEP_PHASE_HARD = 0.5


def nv_nucleus_coupling(gamma_n: float, r_nm: float) -> float:
    """Point-dipole NV-nucleus coupling strength, ordinary MHz."""
    return DIPOLAR_PREFACTOR * GAMMA_E * gamma_n / r_nm**3


def pair_coupling(gamma_n: float, d_nm: float) -> float:
    """Like-spin pair coupling constant, ordinary MHz.

    Defined with twice the point-dipole prefactor so that the zero-field
    pair spectrum reads {+g/2, 0, -g/4, -g/4}.
    """
    return 2.0 * DIPOLAR_PREFACTOR * gamma_n**2 / d_nm**3
