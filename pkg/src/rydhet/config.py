"""JSON run configuration.

Frequencies are written in MHz (fields ending ``_mhz``) and mean 2*pi*MHz
angular quantities; :meth:`RunConfig.atom_system` and :meth:`RunConfig.drive`
are the only places they are converted to rad/s.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from typing import Any

from .model import (
    CS_D2_DIPOLE,
    CS_MASS,
    TWO_PI,
    AtomSystem,
    DetectionMode,
    DriveConfig,
    ReadoutConfig,
    optimal_local_rabi,
    transit_rate,
)
from .susceptibility import Axis

MHZ = TWO_PI * 1e6

CHI0_CONVENTIONS = {"absorptive": 1.0, "inverted": -1.0}
SWEEP_METHODS = ("closed_form", "numeric")
OUTPUT_FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass
class AtomSpec:
    gamma2_mhz: float = 5.2
    gamma3_mhz: float = 0.0039
    gamma4_mhz: float = 0.0017
    gamma_c_mhz: float = 0.0
    gamma_t_mhz: float = 0.0
    beam_waist_mm: float | None = None
    mu12_coulomb_m: float = CS_D2_DIPOLE
    n_eff_cm3: float = 1e8
    lambda_p_nm: float = 852.35
    cell_length_cm: float = 1.0
    mass_kg: float = CS_MASS
    temperature_k: float = 300.0


@dataclass
class DriveSpec:
    omega_p_mhz: float = 5.7
    omega_c_mhz: float = 0.97
    #: None selects the sensitivity-optimal local field for the given lasers.
    omega_L_mhz: float | None = None
    omega_s_mhz: float = 0.001
    delta_p_mhz: float = 0.0
    delta_c_mhz: float = 0.0
    delta_L_mhz: float = 0.0
    delta_beat_hz: float = 0.0
    phi_s_rad: float = 0.0


@dataclass
class ReadoutSpec:
    input_power_w: float = 1.0
    detection_mode: str = "general"
    chi0_convention: str = "absorptive"


@dataclass
class SweepSpec:
    axis: str = "delta_L"
    lo_mhz: float = -50.0
    hi_mhz: float = 50.0
    n: int = 1001
    method: str = "closed_form"
    omega_L_series_mhz: list | None = None


@dataclass
class OptimizeSpec:
    window_mhz: list = field(default_factory=lambda: [-50.0, 50.0])
    coarse_n: int = 2001
    refine_iters: int = 60
    gamma_t_mhz: list | None = None


@dataclass
class OutputSpec:
    format: str = "csv"
    path: str | None = None


_SECTIONS = {
    "atom": AtomSpec,
    "drive": DriveSpec,
    "readout": ReadoutSpec,
    "sweep": SweepSpec,
    "optimize": OptimizeSpec,
    "outputs": OutputSpec,
}


def _number(section: str, name: str, value, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{name}: expected a number, got {value!r}")
    if integer:
        if int(value) != value:
            raise ConfigError(f"{section}.{name}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _parse_section(name: str, cls, data) -> Any:
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{name}: expected an object")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"{name}.{unknown[0]}: unknown field")
    defaults = cls()
    values = {}
    for key, f in known.items():
        raw = data.get(key, getattr(defaults, key))
        nullable = "None" in f.type
        if raw is None and nullable:
            values[key] = None
        elif f.type.startswith("str"):
            if not isinstance(raw, str):
                raise ConfigError(f"{name}.{key}: expected a string, got {raw!r}")
            values[key] = raw
        elif f.type.startswith("list"):
            if not isinstance(raw, list):
                raise ConfigError(f"{name}.{key}: expected a list of numbers")
            values[key] = [_number(name, key, v) for v in raw]
        else:
            values[key] = _number(name, key, raw, integer=f.type == "int")
    return cls(**values)


@dataclass
class RunConfig:
    description: str = ""
    atom: AtomSpec = field(default_factory=AtomSpec)
    drive: DriveSpec = field(default_factory=DriveSpec)
    readout: ReadoutSpec = field(default_factory=ReadoutSpec)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    optimize: OptimizeSpec = field(default_factory=OptimizeSpec)
    outputs: OutputSpec = field(default_factory=OutputSpec)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config: expected a JSON object")
        unknown = sorted(set(data) - set(_SECTIONS) - {"description"})
        if unknown:
            raise ConfigError(f"{unknown[0]}: unknown section")
        description = data.get("description", "")
        if not isinstance(description, str):
            raise ConfigError("description: expected a string")
        sections = {name: _parse_section(name, spec, data.get(name))
                    for name, spec in _SECTIONS.items()}
        config = cls(description=description, **sections)
        config.validate()
        return config

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config: invalid JSON ({exc})") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]

    def validate(self) -> None:
        """Build every physical object once so bad values surface as ConfigError."""
        self.atom_system()
        self.drive_config()
        self.readout_config()
        if self.sweep.axis not in {a.value for a in Axis}:
            raise ConfigError(f"sweep.axis: must be one of {[a.value for a in Axis]}")
        if self.sweep.method not in SWEEP_METHODS:
            raise ConfigError(f"sweep.method: must be one of {list(SWEEP_METHODS)}")
        if self.sweep.axis == Axis.TRANSIT_RATE.value and self.sweep.method != "numeric":
            raise ConfigError("sweep.method: the gamma_t axis requires the numeric method")
        if self.sweep.n < 1:
            raise ConfigError("sweep.n: must be >= 1")
        if self.sweep.hi_mhz < self.sweep.lo_mhz:
            raise ConfigError("sweep.hi_mhz: must be >= sweep.lo_mhz")
        if self.sweep.axis == Axis.TRANSIT_RATE.value and self.sweep.lo_mhz < 0:
            raise ConfigError("sweep.lo_mhz: transit rates must be >= 0")
        for value in self.sweep.omega_L_series_mhz or []:
            if value <= 0:
                raise ConfigError("sweep.omega_L_series_mhz: values must be > 0")
        window = self.optimize.window_mhz
        if len(window) != 2 or window[1] <= window[0]:
            raise ConfigError("optimize.window_mhz: expected [lo, hi] with lo < hi")
        if self.optimize.coarse_n < 3:
            raise ConfigError("optimize.coarse_n: must be >= 3")
        if self.optimize.refine_iters < 0:
            raise ConfigError("optimize.refine_iters: must be >= 0")
        if any(g < 0 for g in self.optimize.gamma_t_mhz or []):
            raise ConfigError("optimize.gamma_t_mhz: values must be >= 0")
        if self.outputs.format not in OUTPUT_FORMATS:
            raise ConfigError(f"outputs.format: must be one of {list(OUTPUT_FORMATS)}")

    def atom_system(self) -> AtomSystem:
        a = self.atom
        try:
            gamma_t = a.gamma_t_mhz * MHZ
            if a.beam_waist_mm is not None:
                gamma_t = transit_rate(a.beam_waist_mm * 1e-3, a.mass_kg, a.temperature_k)
            return AtomSystem(
                gamma2=a.gamma2_mhz * MHZ, gamma3=a.gamma3_mhz * MHZ, gamma4=a.gamma4_mhz * MHZ,
                gamma_c=a.gamma_c_mhz * MHZ, gamma_t=gamma_t, mu12=a.mu12_coulomb_m,
                n_eff=a.n_eff_cm3 * 1e6, lambda_p=a.lambda_p_nm * 1e-9,
                cell_length=a.cell_length_cm * 1e-2, mass=a.mass_kg, temperature=a.temperature_k,
            )
        except ValueError as exc:
            raise ConfigError(f"atom: {exc}") from exc

    def drive_config(self, omega_L_mhz: float | None = None) -> DriveConfig:
        d = self.drive
        try:
            omega_L_mhz = d.omega_L_mhz if omega_L_mhz is None else omega_L_mhz
            if omega_L_mhz is None:
                omega_L = optimal_local_rabi(d.omega_p_mhz * MHZ, d.omega_c_mhz * MHZ,
                                             self.atom.gamma2_mhz * MHZ)
            else:
                omega_L = omega_L_mhz * MHZ
            return DriveConfig(
                omega_p=d.omega_p_mhz * MHZ, omega_c=d.omega_c_mhz * MHZ, omega_L=omega_L,
                omega_s=d.omega_s_mhz * MHZ, delta_p=d.delta_p_mhz * MHZ,
                delta_c=d.delta_c_mhz * MHZ, delta_L=d.delta_L_mhz * MHZ,
                delta_beat=d.delta_beat_hz, phi_s=d.phi_s_rad,
            )
        except ValueError as exc:
            raise ConfigError(f"drive: {exc}") from exc

    def readout_config(self) -> ReadoutConfig:
        r = self.readout
        try:
            mode = DetectionMode(r.detection_mode)
        except ValueError:
            raise ConfigError(
                f"readout.detection_mode: must be one of {[m.value for m in DetectionMode]}"
            ) from None
        if r.chi0_convention not in CHI0_CONVENTIONS:
            raise ConfigError(f"readout.chi0_convention: must be one of {list(CHI0_CONVENTIONS)}")
        try:
            return ReadoutConfig(r.input_power_w, mode, CHI0_CONVENTIONS[r.chi0_convention])
        except ValueError as exc:
            raise ConfigError(f"readout: {exc}") from exc
