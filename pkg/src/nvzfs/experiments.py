"""Experiment presets, configuration parsing, and deterministic CSV emission.

Configuration files are flat key-value text, one dotted key per line:

    preset = boron_nqr
    boron.eta = 0,0.5,1
    sweep.points = 201

Running a preset produces CSV files plus a manifest; outputs are built
entirely in memory and are byte-identical for identical configurations
(no timestamps, no randomness).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import __version__
from .constants import (
    DIPOLAR_PREFACTOR,
    GAMMA_B11,
    GAMMA_E,
    GAMMA_H1,
    NV_ZFS,
)
from .errors import ConfigError
from .hamiltonians import (
    SIGMA_PLUS,
    DipolarCoupling,
    DriveSpec,
    QuadrupoleSpec,
    WaterSpec,
    nv_lab_circular,
    quadrupole_h,
    water_zero_h,
)
from .inference import estimate_distance, estimate_qbar, locate_dip
from .propagator import EvolutionConfig, eig_hermitian, stepped_trace
from .spectroscopy import (
    BoronSystem,
    WaterSystem,
    boron_eigensystem_analytic,
    default_rabi_grid,
    hh_condition,
    rabi_sweep,
    time_scan,
    water_eigensystem_bias,
    water_eigensystem_zero,
)
from .spincore import DensityMatrix, NV_BASIS, Operator

EMIT_CHOICES = ("time_trace", "sweep", "eigensystem", "estimate")


def _fmt(value: float) -> str:
    return f"{value:.17g}"


# ---------------------------------------------------------------------------
# Configuration schema


@dataclass(frozen=True)
class KeySpec:
    parse: Callable[[str], object]
    description: str


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ValueError(f"expected a number, got {text!r}") from exc


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ValueError(f"expected an integer, got {text!r}") from exc


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(_parse_float(part.strip()) for part in text.split(",") if part.strip())


def _parse_emit(text: str) -> tuple[str, ...]:
    items = tuple(part.strip() for part in text.split(",") if part.strip())
    for item in items:
        if item not in EMIT_CHOICES:
            raise ValueError(f"unknown emit category {item!r}; choices: {EMIT_CHOICES}")
    return items


KEY_SCHEMA: dict[str, KeySpec] = {
    "preset": KeySpec(str, "experiment preset name"),
    "out": KeySpec(str, "output directory (CLI may override)"),
    "emit": KeySpec(_parse_emit, "outputs to produce (comma-separated)"),
    "nv.zfs": KeySpec(_parse_float, "NV zero-field splitting, MHz"),
    "drive.rabi": KeySpec(_parse_float, "drive amplitude for the lab-frame check, MHz"),
    "boron.qbar": KeySpec(_parse_float, "quadrupole constant, MHz"),
    "boron.eta": KeySpec(_parse_float_list, "asymmetry values (comma-separated)"),
    "boron.a_x": KeySpec(_parse_float, "transverse NV coupling, MHz"),
    "boron.a_z": KeySpec(_parse_float, "axial NV coupling, MHz"),
    "water.d": KeySpec(_parse_float, "proton-proton distance, nm"),
    "water.a_x": KeySpec(_parse_float, "transverse NV coupling per proton, MHz"),
    "water.a_z": KeySpec(_parse_float, "axial NV coupling per proton, MHz"),
    "water.larmor": KeySpec(_parse_float, "proton Larmor frequency for the bias table, MHz"),
    "water.theta_points": KeySpec(_parse_int, "angle grid size for the bias table"),
    "sweep.points": KeySpec(_parse_int, "drive-amplitude grid size"),
    "sweep.halfwidth_factor": KeySpec(_parse_float, "grid half-span in dip widths"),
    "trace.t_max": KeySpec(_parse_float, "time-trace span, us"),
    "trace.samples": KeySpec(_parse_int, "time-trace sample count"),
    "run.t_fixed": KeySpec(_parse_float, "sweep evolution time, us"),
    "lab.dt": KeySpec(_parse_float, "lab-frame step, us"),
    "lab.t_max": KeySpec(_parse_float, "lab-frame window, us"),
    "lab.samples": KeySpec(_parse_int, "lab-frame sample count"),
}

PRESET_DEFAULTS: dict[str, dict[str, str]] = {
    "boron_nqr": {
        "emit": "time_trace,sweep",
        "boron.qbar": "2.9921",
        "boron.eta": "0,0.5,1",
        "boron.a_x": "6.6e-4",
        "boron.a_z": "0",
        "run.t_fixed": "750",
        "trace.t_max": "1000",
        "trace.samples": "501",
        "sweep.points": "201",
        "sweep.halfwidth_factor": "3",
        "out": "out",
    },
    "water_pair": {
        "emit": "time_trace,sweep",
        "water.d": "0.15",
        "water.a_x": "6.3e-4",
        "water.a_z": "0",
        "run.t_fixed": "800",
        "trace.t_max": "1600",
        "trace.samples": "501",
        "sweep.points": "201",
        "sweep.halfwidth_factor": "3",
        "out": "out",
    },
    "polarization_check": {
        "emit": "time_trace",
        "nv.zfs": "2870",
        "drive.rabi": "5",
        "lab.dt": "2e-6",
        "lab.t_max": "1",
        "lab.samples": "501",
        "out": "out",
    },
    "conventional_bias_comparison": {
        "emit": "eigensystem",
        "water.d": "0.15",
        "water.larmor": "0.2",
        "water.theta_points": "91",
        "out": "out",
    },
}

PRESET_DESCRIPTIONS = {
    "boron_nqr": "quadrupole resonance of a spin-3/2 target: signal traces, "
    "drive sweep, eigensystem and constant recovery",
    "water_pair": "proton-pair resonance of a water molecule: signal traces, "
    "drive sweep and distance recovery",
    "polarization_check": "lab-frame circular-drive selectivity: populations and "
    "leakage of the undriven NV state",
    "conventional_bias_comparison": "proton-pair spectrum under a bias field versus "
    "zero field, as a function of pair orientation",
}

# Keys that have an effect, per preset (everything else is rejected).
PRESET_KEYS: dict[str, set[str]] = {
    "boron_nqr": {
        "preset", "out", "emit", "boron.qbar", "boron.eta", "boron.a_x", "boron.a_z",
        "run.t_fixed", "trace.t_max", "trace.samples", "sweep.points",
        "sweep.halfwidth_factor",
    },
    "water_pair": {
        "preset", "out", "emit", "water.d", "water.a_x", "water.a_z",
        "run.t_fixed", "trace.t_max", "trace.samples", "sweep.points",
        "sweep.halfwidth_factor",
    },
    "polarization_check": {
        "preset", "out", "emit", "nv.zfs", "drive.rabi", "lab.dt", "lab.t_max",
        "lab.samples",
    },
    "conventional_bias_comparison": {
        "preset", "out", "emit", "water.d", "water.larmor", "water.theta_points",
    },
}

EMIT_FILES: dict[str, dict[str, str]] = {
    "boron_nqr": {
        "time_trace": "fig2b.csv",
        "sweep": "fig2c.csv",
        "eigensystem": "eigensystem.csv",
        "estimate": "estimate.csv",
    },
    "water_pair": {
        "time_trace": "fig3b.csv",
        "sweep": "fig3c.csv",
        "eigensystem": "eigensystem.csv",
        "estimate": "estimate.csv",
    },
    "polarization_check": {"time_trace": "leakage.csv"},
    "conventional_bias_comparison": {"eigensystem": "bias_comparison.csv"},
}

CSV_SCHEMA_VERSION = "v1"


@dataclass(frozen=True)
class ResolvedParameter:
    key: str
    value: str
    source: str  # "default" or "override"


@dataclass(frozen=True)
class CheckResult:
    name: str
    level: str  # "ok", "warning", "error"
    message: str


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str
    values: dict[str, object]
    parameters: tuple[ResolvedParameter, ...]

    @property
    def output_dir(self) -> str:
        return str(self.values["out"])

    @property
    def emit(self) -> tuple[str, ...]:
        return tuple(self.values["emit"])


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    parameters: tuple[ResolvedParameter, ...]
    checks: tuple[CheckResult, ...]


@dataclass(frozen=True)
class ExperimentResult:
    preset: str
    files: dict[str, str]
    parameters: tuple[ResolvedParameter, ...]


def parse_config_text(text: str) -> dict[str, str]:
    """Parse flat key-value lines; '#' starts a comment."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}", field=key)
        raw[key] = value
    return raw


def resolve_config(text: str) -> ExperimentConfig:
    """Resolve defaults and overrides into a typed configuration.

    Raises ConfigError (naming the offending field) for unknown keys, type
    errors, or hard range violations.
    """
    raw = parse_config_text(text)
    preset = raw.get("preset")
    if preset is None:
        raise ConfigError("missing required key 'preset'", field="preset")
    if preset not in PRESET_DEFAULTS:
        raise ConfigError(
            f"unknown preset {preset!r}; choices: {sorted(PRESET_DEFAULTS)}", field="preset"
        )

    allowed = PRESET_KEYS[preset]
    merged: dict[str, tuple[str, str]] = {
        key: (value, "default") for key, value in PRESET_DEFAULTS[preset].items()
    }
    for key, value in raw.items():
        if key == "preset":
            continue
        if key not in KEY_SCHEMA:
            raise ConfigError(f"unknown configuration key {key!r}", field=key)
        if key not in allowed:
            raise ConfigError(
                f"key {key!r} has no effect for preset {preset!r}", field=key
            )
        merged[key] = (value, "override")

    values: dict[str, object] = {"preset": preset}
    parameters = [ResolvedParameter("preset", preset, "override" if "preset" in raw else "default")]
    for key in sorted(merged):
        text_value, source = merged[key]
        try:
            values[key] = KEY_SCHEMA[key].parse(text_value)
        except ValueError as exc:
            raise ConfigError(f"invalid value for {key}: {exc}", field=key) from exc
        parameters.append(ResolvedParameter(key, text_value, source))

    _hard_checks(preset, values)
    return ExperimentConfig(preset=preset, values=values, parameters=tuple(parameters))


def _hard_checks(preset: str, values: dict[str, object]):
    def positive(key: str):
        if key in values and not values[key] > 0:
            raise ConfigError(f"{key} must be positive, got {values[key]}", field=key)

    for key in ("boron.qbar", "run.t_fixed", "trace.t_max", "water.larmor",
                "lab.dt", "lab.t_max", "nv.zfs", "sweep.halfwidth_factor"):
        positive(key)
    if "water.d" in values and not values["water.d"] > 0.05:
        raise ConfigError(
            f"water.d must exceed 0.05 nm, got {values['water.d']}", field="water.d"
        )
    if "boron.eta" in values:
        if any(eta < 0 for eta in values["boron.eta"]):
            raise ConfigError("boron.eta values must be non-negative", field="boron.eta")
        if not values["boron.eta"]:
            raise ConfigError("boron.eta must list at least one value", field="boron.eta")
    if "drive.rabi" in values and values["drive.rabi"] < 0:
        raise ConfigError("drive.rabi must be non-negative", field="drive.rabi")
    for key in ("sweep.points", "trace.samples", "lab.samples", "water.theta_points"):
        if key in values and values[key] < 3:
            raise ConfigError(f"{key} must be at least 3, got {values[key]}", field=key)


def soft_checks(config: ExperimentConfig) -> list[CheckResult]:
    """Non-fatal invariant checks reported by `validate`."""
    checks: list[CheckResult] = []
    v = config.values

    def ok(name: str, message: str):
        checks.append(CheckResult(name, "ok", message))

    def warn(name: str, message: str):
        checks.append(CheckResult(name, "warning", message))

    if config.preset == "boron_nqr":
        qbar = v["boron.qbar"]
        for eta in v["boron.eta"]:
            if eta > 1:
                warn("eta_range", f"eta={eta} above 1 is outside the usual range")
        ratio = abs(v["boron.a_z"]) / qbar
        if ratio >= 0.05:
            warn(
                "pseudosecular_ratio",
                f"pseudosecular coupling not << quadrupole constant (|a_z|/qbar = {ratio:.3g})",
            )
        else:
            ok("pseudosecular_ratio", f"|a_z|/qbar = {ratio:.3g} < 0.05")
        ok("resonance_window", "sweep grid is centered on the predicted resonance")
    elif config.preset == "water_pair":
        g12 = WaterSpec(d=v["water.d"]).g12
        ratio = abs(v["water.a_z"]) / g12
        if ratio >= 0.05:
            warn(
                "pseudosecular_ratio",
                f"pseudosecular coupling not << pair coupling (|a_z|/g12 = {ratio:.3g})",
            )
        else:
            ok("pseudosecular_ratio", f"|a_z|/g12 = {ratio:.3g} < 0.05")
    elif config.preset == "polarization_check":
        phase = v["lab.dt"] * 2 * np.pi * v["nv.zfs"]
        if phase > 0.1:
            warn("step_resolution", f"lab.dt*2pi*f = {phase:.3g} rad exceeds 0.1")
        else:
            ok("step_resolution", f"lab.dt*2pi*f = {phase:.3g} rad")
    return checks


def validate_config(text: str) -> ValidationReport:
    """Resolve a configuration and report every parameter and check.

    Never computes dynamics.  Hard errors appear as error-level checks
    rather than exceptions.
    """
    try:
        config = resolve_config(text)
    except ConfigError as exc:
        return ValidationReport(
            ok=False,
            parameters=(),
            checks=(CheckResult(exc.field or "config", "error", str(exc)),),
        )
    checks = soft_checks(config)
    return ValidationReport(ok=True, parameters=config.parameters, checks=tuple(checks))


# ---------------------------------------------------------------------------
# Execution


def _csv(columns: list[tuple[str, np.ndarray]]) -> str:
    header = ",".join(name for name, _ in columns)
    length = len(columns[0][1])
    rows = [header]
    for i in range(length):
        rows.append(",".join(_fmt(float(col[i])) for _, col in columns))
    return "\n".join(rows) + "\n"


def _manifest(config: ExperimentConfig, extra: dict[str, str], files: dict[str, str]) -> str:
    lines = [f"artifact.version = {__version__}", f"preset = {config.preset}"]
    for param in config.parameters:
        if param.key == "preset":
            continue
        lines.append(f"{param.key} = {param.value}  # {param.source}")
    lines.append(f"constants.gamma_e_MHz_per_T = {_fmt(GAMMA_E)}")
    lines.append(f"constants.gamma_h1_MHz_per_T = {_fmt(GAMMA_H1)}")
    lines.append(f"constants.gamma_b11_MHz_per_T = {_fmt(GAMMA_B11)}")
    lines.append(f"constants.dipolar_prefactor_MHz_nm3 = {_fmt(DIPOLAR_PREFACTOR)}")
    lines.append(f"constants.nv_zfs_MHz = {_fmt(NV_ZFS)}")
    for key in sorted(extra):
        lines.append(f"{key} = {extra[key]}")
    for name in sorted(files):
        lines.append(f"schema.{name} = {name.rsplit('.', 1)[0]}.{CSV_SCHEMA_VERSION}")
    return "\n".join(lines) + "\n"


def _eta_tag(eta: float) -> str:
    text = f"{eta:g}"
    return text


def _run_boron(config: ExperimentConfig, jobs: int) -> tuple[dict[str, str], dict[str, str]]:
    v = config.values
    etas = v["boron.eta"]
    coupling = DipolarCoupling(a_x=v["boron.a_x"], a_z=v["boron.a_z"])
    systems = {
        eta: BoronSystem(QuadrupoleSpec(qbar=v["boron.qbar"], eta=eta), coupling)
        for eta in etas
    }
    files: dict[str, str] = {}
    extra: dict[str, str] = {}
    want = set(config.emit)

    sweeps = {}
    if want & {"sweep", "estimate"}:
        for eta, system in systems.items():
            grid = default_rabi_grid(
                system, points=v["sweep.points"], halfwidth_factor=v["sweep.halfwidth_factor"]
            )
            sweeps[eta] = rabi_sweep(system, grid, t_fixed=v["run.t_fixed"], jobs=jobs)

    if "time_trace" in want:
        t_grid = np.linspace(0.0, v["trace.t_max"], v["trace.samples"])
        columns = [("t_us", t_grid)]
        for eta, system in systems.items():
            trace = time_scan(system, hh_condition(system), t_grid)
            columns.append((f"S_eta{_eta_tag(eta)}", trace.values))
        files[EMIT_FILES["boron_nqr"]["time_trace"]] = _csv(columns)

    if "sweep" in want:
        columns = []
        for eta in etas:
            sweep = sweeps[eta]
            tag = _eta_tag(eta)
            columns.append((f"omega_MHz_eta{tag}", sweep.rabi_values))
            columns.append((f"S_eta{tag}", sweep.signal))
            extra[f"result.resonance_prediction_eta{tag}_MHz"] = _fmt(
                sweep.resonance_prediction
            )
        files[EMIT_FILES["boron_nqr"]["sweep"]] = _csv(columns)

    if "eigensystem" in want:
        rows_eta, rows_label, rows_analytic, rows_numeric = [], [], [], []
        for eta, system in systems.items():
            analytic = boron_eigensystem_analytic(system.quad)
            numeric = eig_hermitian(quadrupole_h(system.quad))
            for k, label in enumerate(analytic.labels):
                rows_eta.append(eta)
                rows_label.append(label)
                rows_analytic.append(analytic.energies[k])
                rows_numeric.append(numeric.energies[k])
        files[EMIT_FILES["boron_nqr"]["eigensystem"]] = _csv_with_labels(
            [
                ("eta", np.array(rows_eta)),
                ("state", rows_label),
                ("energy_analytic_MHz", np.array(rows_analytic)),
                ("energy_numeric_MHz", np.array(rows_numeric)),
            ]
        )

    if "estimate" in want:
        cols = {name: [] for name in (
            "eta", "omega_star_MHz", "depth", "width_MHz", "qbar_hat_MHz",
            "qbar_true_MHz", "relative_error", "error_bound")}
        for eta in etas:
            dip = locate_dip(sweeps[eta])
            est = estimate_qbar(dip)
            cols["eta"].append(eta)
            cols["omega_star_MHz"].append(dip.omega_star)
            cols["depth"].append(dip.depth)
            cols["width_MHz"].append(dip.width)
            cols["qbar_hat_MHz"].append(est.qbar_hat)
            cols["qbar_true_MHz"].append(v["boron.qbar"])
            cols["relative_error"].append(est.qbar_hat / v["boron.qbar"] - 1.0)
            cols["error_bound"].append(est.relative_error_bound)
        files[EMIT_FILES["boron_nqr"]["estimate"]] = _csv(
            [(name, np.array(data)) for name, data in cols.items()]
        )
    return files, extra


def _run_water(config: ExperimentConfig, jobs: int) -> tuple[dict[str, str], dict[str, str]]:
    v = config.values
    coupling = DipolarCoupling(a_x=v["water.a_x"], a_z=v["water.a_z"])
    spec = WaterSpec(d=v["water.d"], couplings=(coupling, coupling))
    system = WaterSystem(spec)
    files: dict[str, str] = {}
    extra: dict[str, str] = {"result.g12_MHz": _fmt(spec.g12)}
    want = set(config.emit)

    sweep = None
    if want & {"sweep", "estimate"}:
        grid = default_rabi_grid(
            system, points=v["sweep.points"], halfwidth_factor=v["sweep.halfwidth_factor"]
        )
        sweep = rabi_sweep(system, grid, t_fixed=v["run.t_fixed"], jobs=jobs)
        extra["result.resonance_prediction_MHz"] = _fmt(sweep.resonance_prediction)

    if "time_trace" in want:
        t_grid = np.linspace(0.0, v["trace.t_max"], v["trace.samples"])
        trace = time_scan(system, hh_condition(system), t_grid)
        files[EMIT_FILES["water_pair"]["time_trace"]] = _csv(
            [("t_us", t_grid), ("S", trace.values)]
        )

    if "sweep" in want:
        files[EMIT_FILES["water_pair"]["sweep"]] = _csv(
            [("omega_MHz", sweep.rabi_values), ("S", sweep.signal)]
        )

    if "eigensystem" in want:
        analytic = water_eigensystem_zero(spec)
        numeric = eig_hermitian(water_zero_h(spec))
        files[EMIT_FILES["water_pair"]["eigensystem"]] = _csv_with_labels(
            [
                ("state", list(analytic.labels)),
                ("energy_analytic_MHz", analytic.energies),
                ("energy_numeric_MHz", numeric.energies),
            ]
        )

    if "estimate" in want:
        dip = locate_dip(sweep)
        d_hat = estimate_distance(dip, GAMMA_H1)
        files[EMIT_FILES["water_pair"]["estimate"]] = _csv(
            [
                ("omega_star_MHz", np.array([dip.omega_star])),
                ("depth", np.array([dip.depth])),
                ("width_MHz", np.array([dip.width])),
                ("g12_hat_MHz", np.array([(4.0 / 3.0) * dip.omega_star])),
                ("d_hat_nm", np.array([d_hat])),
                ("d_true_nm", np.array([v["water.d"]])),
            ]
        )
    return files, extra


def oscillation_period(times: np.ndarray, values: np.ndarray, level: float = 0.5) -> float:
    """Mean spacing of interior maxima above `level`, refined parabolically."""
    peaks = []
    for k in range(1, len(values) - 1):
        if values[k] >= values[k - 1] and values[k] > values[k + 1] and values[k] > level:
            denom = values[k - 1] - 2.0 * values[k] + values[k + 1]
            shift = 0.5 * (values[k - 1] - values[k + 1]) / denom if denom != 0 else 0.0
            peaks.append(times[k] + shift * (times[k + 1] - times[k]))
    if len(peaks) < 2:
        return float("nan")
    return float((peaks[-1] - peaks[0]) / (len(peaks) - 1))


def _run_polarization(config: ExperimentConfig, jobs: int) -> tuple[dict[str, str], dict[str, str]]:
    v = config.values
    drive = DriveSpec(polarization=SIGMA_PLUS, rabi=v["drive.rabi"], carrier=v["nv.zfs"])
    cfg = EvolutionConfig(dt=v["lab.dt"], t_max=v["lab.t_max"], samples=v["lab.samples"])
    rho0 = DensityMatrix.from_state_vector(np.array([0.0, 1.0, 0.0]), NV_BASIS)

    def projector(index: int) -> Operator:
        mat = np.zeros((3, 3), dtype=complex)
        mat[index, index] = 1.0
        return Operator(mat, NV_BASIS)

    observables = {
        "pop_plus1": projector(0),
        "pop_0": projector(1),
        "pop_minus1": projector(2),
    }
    traces = stepped_trace(
        rho0, lambda t: nv_lab_circular(v["nv.zfs"], drive, t), cfg, observables
    )
    times = traces["pop_0"].times
    files = {
        EMIT_FILES["polarization_check"]["time_trace"]: _csv(
            [
                ("t_us", times),
                ("pop_plus1", traces["pop_plus1"].values),
                ("pop_0", traces["pop_0"].values),
                ("pop_minus1", traces["pop_minus1"].values),
            ]
        )
    }
    period = oscillation_period(times, traces["pop_plus1"].values)
    extra = {
        "result.max_minus1_population": _fmt(float(np.max(traces["pop_minus1"].values))),
        "result.rabi_period_us": _fmt(period),
        "result.rabi_period_expected_us": _fmt(1.0 / v["drive.rabi"]),
    }
    return files, extra


def _run_bias_comparison(config: ExperimentConfig, jobs: int) -> tuple[dict[str, str], dict[str, str]]:
    v = config.values
    thetas = np.linspace(0.0, np.pi / 2.0, v["water.theta_points"])
    zero = water_eigensystem_zero(WaterSpec(d=v["water.d"]))
    zero_map = dict(zip(zero.labels, zero.energies))
    label_order = ("triplet0", "singlet", "downdown", "upup")
    columns: dict[str, list[float]] = {f"E_{name}_MHz": [] for name in label_order}
    for theta in thetas:
        spec = WaterSpec(d=v["water.d"], larmor=v["water.larmor"], theta=float(theta))
        system = water_eigensystem_bias(spec)
        by_label = dict(zip(system.labels, system.energies))
        for name in label_order:
            columns[f"E_{name}_MHz"].append(by_label[name])
    cols = [("theta_rad", thetas)]
    cols += [(name, np.array(data)) for name, data in columns.items()]
    cols += [
        (f"zero_{name}_MHz", np.full(thetas.shape, zero_map[name])) for name in label_order
    ]
    files = {EMIT_FILES["conventional_bias_comparison"]["eigensystem"]: _csv(cols)}
    return files, {}


_RUNNERS = {
    "boron_nqr": _run_boron,
    "water_pair": _run_water,
    "polarization_check": _run_polarization,
    "conventional_bias_comparison": _run_bias_comparison,
}


def _csv_with_labels(columns: list[tuple[str, object]]) -> str:
    """CSV writer allowing string-valued columns (state labels)."""
    header = ",".join(name for name, _ in columns)
    length = len(columns[0][1])
    rows = [header]
    for i in range(length):
        cells = []
        for _, col in columns:
            value = col[i]
            cells.append(value if isinstance(value, str) else _fmt(float(value)))
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


def execute(config: ExperimentConfig, jobs: int | None = None) -> ExperimentResult:
    """Run a resolved configuration and return all output files in memory."""
    jobs = jobs if jobs and jobs > 0 else (os.cpu_count() or 1)
    files, extra = _RUNNERS[config.preset](config, jobs)
    files["manifest.txt"] = _manifest(config, extra, files)
    return ExperimentResult(preset=config.preset, files=files, parameters=config.parameters)


def run_config_text(text: str, jobs: int | None = None) -> ExperimentResult:
    return execute(resolve_config(text), jobs=jobs)
