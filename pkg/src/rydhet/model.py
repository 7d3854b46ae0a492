"""Physical constants, atom and drive parameter types, transit broadening.

All rates, Rabi frequencies and detunings are angular frequencies in rad/s.
Conversion from MHz happens once, in :mod:`rydhet.cli`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from enum import Enum

import scipy.constants as sc

TWO_PI = 2.0 * math.pi

#: Weak-signal cutoff: a drive is perturbative iff omega_s < omega_L / PERTURBATIVE_RATIO.
PERTURBATIVE_RATIO = 10.0

#: Cs 133 atomic mass, kg.
CS_MASS = 132.905451961 * sc.atomic_mass

#: Cs D2 cycling-transition dipole moment: reduced element 4.4837 e*a0 divided by sqrt(2), C*m.
CS_D2_DIPOLE = 4.4837 * sc.e * sc.physical_constants["Bohr radius"][0] / math.sqrt(2.0)

#: Cs D2 probe wavelength, m.
CS_D2_WAVELENGTH = 852.35e-9


def _check_finite(obj) -> None:
    for f in fields(obj):
        value = getattr(obj, f.name)
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError(f"{type(obj).__name__}.{f.name} must be finite, got {value!r}")


def _check_sign(obj, names, strict: bool) -> None:
    for name in names:
        value = getattr(obj, name)
        if strict and not value > 0:
            raise ValueError(f"{type(obj).__name__}.{name} must be > 0, got {value!r}")
        if not strict and not value >= 0:
            raise ValueError(f"{type(obj).__name__}.{name} must be >= 0, got {value!r}")


def _coerce_floats(obj) -> None:
    for f in fields(obj):
        value = getattr(obj, f.name)
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            object.__setattr__(obj, f.name, float(value))


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA constants used by the model (SI units)."""

    hbar: float = sc.hbar
    epsilon0: float = sc.epsilon_0
    kB: float = sc.k

    def __post_init__(self):
        _coerce_floats(self)
        _check_finite(self)
        _check_sign(self, ("hbar", "epsilon0", "kB"), strict=True)


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class AtomSystem:
    """Four-level atom plus vapor-cell geometry.

    Rates are in rad/s, ``mu12`` in C*m, ``n_eff`` in m^-3, lengths in m,
    ``mass`` in kg and ``temperature`` in K.
    """

    gamma2: float
    gamma3: float = 0.0
    gamma4: float = 0.0
    gamma_c: float = 0.0
    gamma_t: float = 0.0
    mu12: float = CS_D2_DIPOLE
    n_eff: float = 1e14
    lambda_p: float = CS_D2_WAVELENGTH
    cell_length: float = 0.01
    mass: float = CS_MASS
    temperature: float = 300.0

    def __post_init__(self):
        _coerce_floats(self)
        _check_finite(self)
        _check_sign(self, ("gamma2", "gamma3", "gamma4", "gamma_c", "gamma_t"), strict=False)
        _check_sign(
            self, ("mu12", "n_eff", "lambda_p", "cell_length", "mass", "temperature"), strict=True
        )

    @property
    def k(self) -> float:
        """Probe wavevector 2*pi/lambda_p, rad/m."""
        return TWO_PI / self.lambda_p

    def replace(self, **changes) -> "AtomSystem":
        return replace(self, **changes)

    def idealized(self) -> "AtomSystem":
        """Copy with gamma3, gamma4, gamma_c and gamma_t zeroed.

        This is the assumption set under which the closed-form steady states hold.
        """
        return replace(self, gamma3=0.0, gamma4=0.0, gamma_c=0.0, gamma_t=0.0)

    @classmethod
    def cesium(cls, **overrides) -> "AtomSystem":
        """Cs 6S1/2 -> 6P3/2 -> 47D5/2 -> 48P3/2 ladder in a room-temperature cell."""
        params = dict(
            gamma2=TWO_PI * 5.2e6,
            gamma3=TWO_PI * 3.9e3,
            gamma4=TWO_PI * 1.7e3,
            gamma_c=0.0,
            gamma_t=0.0,
        )
        params.update(overrides)
        return cls(**params)


@dataclass(frozen=True)
class DriveConfig:
    """Rabi frequencies and detunings (rad/s), beat frequency (Hz), phase (rad)."""

    omega_p: float
    omega_c: float
    omega_L: float
    omega_s: float = 0.0
    delta_p: float = 0.0
    delta_c: float = 0.0
    delta_L: float = 0.0
    delta_beat: float = 0.0
    phi_s: float = 0.0

    def __post_init__(self):
        _coerce_floats(self)
        _check_finite(self)
        _check_sign(self, ("omega_p", "omega_c", "omega_L"), strict=True)
        _check_sign(self, ("omega_s",), strict=False)

    @property
    def is_perturbative(self) -> bool:
        return self.omega_s < self.omega_L / PERTURBATIVE_RATIO

    def microwave_coupling(self, phase: float) -> complex:
        """Complex Rydberg-transition Rabi frequency omega_L + omega_s*exp(-i*phase)."""
        return self.omega_L + self.omega_s * complex(math.cos(phase), -math.sin(phase))

    def effective_rabi(self, phase: float) -> float:
        return abs(self.microwave_coupling(phase))

    def signal_phase(self, t: float) -> float:
        """Accumulated signal phase 2*pi*delta_beat*t + phi_s."""
        return TWO_PI * self.delta_beat * t + self.phi_s

    def replace(self, **changes) -> "DriveConfig":
        return replace(self, **changes)

    def on_resonance(self) -> "DriveConfig":
        return replace(self, delta_p=0.0, delta_c=0.0, delta_L=0.0)

    @classmethod
    def cesium(cls, omega_L: float | None = None, **overrides) -> "DriveConfig":
        """Probe/coupling strengths of the reference Cs experiment.

        ``omega_L`` defaults to the sensitivity-optimal local field.
        """
        omega_p = overrides.pop("omega_p", TWO_PI * 5.7e6)
        omega_c = overrides.pop("omega_c", TWO_PI * 0.97e6)
        if omega_L is None:
            omega_L = optimal_local_rabi(omega_p, omega_c, TWO_PI * 5.2e6)
        return cls(omega_p=omega_p, omega_c=omega_c, omega_L=omega_L, **overrides)


class DetectionMode(str, Enum):
    GENERAL = "general"
    HIGH_TRANSMITTANCE = "high_transmittance"


@dataclass(frozen=True)
class ReadoutConfig:
    """Probe input power and detection case.

    ``chi0_sign`` selects how the DC absorption enters the general-case
    conversion coefficient: +1 gives the physical attenuation exp(-kL*chi0),
    -1 inverts it, which is the convention needed to reproduce the published
    general-case gain figures.
    """

    input_power: float = 1.0
    detection_mode: DetectionMode = DetectionMode.GENERAL
    chi0_sign: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "detection_mode", DetectionMode(self.detection_mode))
        object.__setattr__(self, "input_power", float(self.input_power))
        object.__setattr__(self, "chi0_sign", float(self.chi0_sign))
        if not math.isfinite(self.input_power) or self.input_power <= 0:
            raise ValueError(f"ReadoutConfig.input_power must be > 0, got {self.input_power!r}")
        if self.chi0_sign not in (1.0, -1.0):
            raise ValueError(f"ReadoutConfig.chi0_sign must be +1 or -1, got {self.chi0_sign!r}")


def transit_rate(beam_waist: float, mass: float, temperature: float,
                 constants: PhysicalConstants = CODATA) -> float:
    """Transit relaxation rate (1/s) of atoms crossing a Gaussian beam.

    Mean thermal speed sqrt(8 kB T / (pi m)) divided by the beam's
    FWHM-equivalent width w*sqrt(2 ln 2), with ``beam_waist`` the 1/e^2 radius.
    """
    for name, value in (("beam_waist", beam_waist), ("mass", mass), ("temperature", temperature)):
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    mean_speed = math.sqrt(8.0 * constants.kB * temperature / (math.pi * mass))
    return mean_speed / (beam_waist * math.sqrt(2.0 * math.log(2.0)))


def optimal_local_rabi(omega_p: float, omega_c: float, gamma2: float) -> float:
    """Local microwave Rabi frequency that maximizes resonant heterodyne response."""
    for name, value in (("omega_p", omega_p), ("omega_c", omega_c), ("gamma2", gamma2)):
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    ratio = 2.0 * (omega_c**2 + omega_p**2) / (3.0 * (2.0 * omega_p**2 + gamma2**2))
    return omega_p * math.sqrt(ratio)
