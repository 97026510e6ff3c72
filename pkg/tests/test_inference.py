import numpy as np
import pytest

from nvzfs.constants import GAMMA_H1
from nvzfs.errors import NoResonanceError
from nvzfs.hamiltonians import DipolarCoupling, QuadrupoleSpec, WaterSpec
from nvzfs.inference import (
    DipEstimate,
    ETA_MAX_ERROR_FACTOR,
    estimate_distance,
    estimate_qbar,
    locate_dip,
)
from nvzfs.spectroscopy import (
    BoronSystem,
    SweepTrace,
    WaterSystem,
    default_rabi_grid,
    hh_condition,
    rabi_sweep,
)

QBAR = 2.9921


def synthetic_sweep(omega, signal, t_fixed=750.0, prediction=1.5):
    return SweepTrace(
        rabi_values=np.asarray(omega, dtype=float),
        signal=np.asarray(signal, dtype=float),
        t_fixed=t_fixed,
        resonance_prediction=prediction,
    )


def boron_sweep(eta=0.0, points=201, t_fixed=750.0, jobs=1):
    system = BoronSystem(
        QuadrupoleSpec(qbar=QBAR, eta=eta), DipolarCoupling(0.66e-3, 0.0)
    )
    grid = default_rabi_grid(system, points=points)
    return rabi_sweep(system, grid, t_fixed=t_fixed, jobs=jobs)


class TestLocateDip:
    def test_perfect_parabola_vertex(self):
        omega = np.linspace(1.0, 2.0, 21)
        vertex = 1.4637
        signal = 0.4 + 0.8 * (omega - vertex) ** 2
        dip = locate_dip(synthetic_sweep(omega, signal))
        assert dip.omega_star == pytest.approx(vertex, abs=1e-12)

    def test_monotone_sweep_raises(self):
        omega = np.linspace(1.0, 2.0, 11)
        with pytest.raises(NoResonanceError):
            locate_dip(synthetic_sweep(omega, np.linspace(1.0, 0.5, 11)))

    def test_too_short_sweep_raises(self):
        with pytest.raises(NoResonanceError):
            locate_dip(synthetic_sweep([1.0, 2.0], [1.0, 0.5]))

    def test_boron_dip_position(self):
        sweep = boron_sweep()
        dip = locate_dip(sweep)
        assert abs(dip.omega_star - 1.49605) < 0.5 * sweep.grid_step

    def test_water_dip_position(self):
        system = WaterSystem(
            WaterSpec(d=0.15, couplings=(DipolarCoupling(0.63e-3, 0.0),) * 2)
        )
        sweep = rabi_sweep(system, default_rabi_grid(system), t_fixed=800.0)
        dip = locate_dip(sweep)
        assert abs(dip.omega_star - hh_condition(system)) < 0.5 * sweep.grid_step

    def test_width_is_half_depth_crossing_distance(self):
        omega = np.linspace(-1.0, 1.0, 401)
        signal = 1.0 - 0.4 / (1.0 + (omega / 0.1) ** 2)  # lorentzian dip
        dip = locate_dip(synthetic_sweep(omega, signal))
        assert dip.width == pytest.approx(0.2, rel=1e-2)  # fwhm of unit-width lorentzian

    def test_depth_within_bounds(self):
        sweep = boron_sweep(points=101)
        dip = locate_dip(sweep)
        assert 0.0 <= dip.depth <= 1.0


class TestEstimateQbar:
    def test_exact_round_trip_at_zero_asymmetry(self):
        est = estimate_qbar(locate_dip(boron_sweep()))
        assert est.qbar_hat == pytest.approx(QBAR, rel=1e-4)
        assert est.eta_assumed == 0.0

    def test_error_bound_value(self):
        est = estimate_qbar(DipEstimate(omega_star=1.5, depth=0.5, width=1e-3))
        assert est.relative_error_bound == pytest.approx(2.0 / np.sqrt(3.0) - 1.0)
        assert est.relative_error_bound == pytest.approx(0.1547, abs=5e-5)

    def test_scale_equivariance(self):
        base = estimate_qbar(DipEstimate(omega_star=1.5, depth=0.5, width=1e-3))
        scaled = estimate_qbar(DipEstimate(omega_star=3.0, depth=0.5, width=1e-3))
        assert scaled.qbar_hat == pytest.approx(2.0 * base.qbar_hat)

    def test_misassumption_errors_monotone_and_bounded(self):
        errors = []
        for eta in (0.0, 0.25, 0.5, 0.75, 1.0):
            dip = locate_dip(boron_sweep(eta=eta, points=101))
            est = estimate_qbar(dip)
            errors.append(est.qbar_hat / QBAR - 1.0)
        assert all(b >= a - 1e-9 for a, b in zip(errors, errors[1:]))
        assert errors[-1] <= 0.16
        assert errors[-1] == pytest.approx(ETA_MAX_ERROR_FACTOR - 1.0, abs=1e-3)

    def test_known_eta_error_factors(self):
        # analyzing an eta=0.5 target with the zero-asymmetry inversion
        dip = locate_dip(boron_sweep(eta=0.5, points=101))
        est = estimate_qbar(dip)
        assert est.qbar_hat / QBAR == pytest.approx(np.sqrt(3.25 / 3.0), rel=1e-4)


class TestEstimateDistance:
    def test_round_trip(self):
        system = WaterSystem(
            WaterSpec(d=0.15, couplings=(DipolarCoupling(0.63e-3, 0.0),) * 2)
        )
        sweep = rabi_sweep(system, default_rabi_grid(system), t_fixed=800.0)
        d_hat = estimate_distance(locate_dip(sweep), GAMMA_H1)
        assert d_hat == pytest.approx(0.15, rel=1e-2)

    def test_cube_root_law(self):
        dip = DipEstimate(omega_star=0.05, depth=0.25, width=1e-3)
        doubled = DipEstimate(omega_star=0.10, depth=0.25, width=1e-3)
        ratio = estimate_distance(doubled, GAMMA_H1) / estimate_distance(dip, GAMMA_H1)
        assert ratio == pytest.approx(2.0 ** (-1.0 / 3.0))

    def test_g12_halves_when_distance_grows_by_cube_root_two(self):
        w1 = WaterSpec(d=0.15)
        w2 = WaterSpec(d=0.15 * 2.0 ** (1.0 / 3.0))
        assert w2.g12 == pytest.approx(w1.g12 / 2.0)

    def test_rejects_nonpositive_frequency(self):
        with pytest.raises(ValueError):
            estimate_distance(DipEstimate(omega_star=-0.1, depth=0.2, width=1e-3), GAMMA_H1)


class TestValidation:
    def test_depth_bounds_enforced(self):
        with pytest.raises(ValueError):
            DipEstimate(omega_star=1.0, depth=1.4, width=0.1)

    def test_qbar_positive(self):
        from nvzfs.inference import QbarEstimate

        with pytest.raises(ValueError):
            QbarEstimate(qbar_hat=-1.0)
