"""Closed-form steady-state coherences and the (chi0, chi1) decomposition.

Sign conventions follow the Hamiltonian in :mod:`rydhet.liouvillian`
(level energies +Delta on the diagonal), so every closed form here agrees
with the numerical steady state including the sign of its real part.

``chi0`` is the DC part of Im(chi); ``chi1`` multiplies omega_s*cos(S) and
therefore has units of 1/(rad/s). All ``delta`` arguments accept arrays.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ContractViolation, NonPerturbativeWarning
from .liouvillian import steady_states
from .model import CODATA, AtomSystem, DriveConfig, PhysicalConstants

#: Phase samples per beat period for numerical harmonic extraction.
N_PHASE = 64

#: Second-harmonic / first-harmonic ratio above which a result is flagged non-perturbative.
HARMONIC_RATIO_LIMIT = 0.1


class Axis(str, Enum):
    LOCAL_MICROWAVE = "delta_L"
    PROBE_LASER = "delta_p"
    COUPLING_LASER = "delta_c"
    TRANSIT_RATE = "gamma_t"


@dataclass(frozen=True)
class DetuningScenario:
    """One active axis; all other detunings are zero."""

    which: Axis
    value: float

    def __post_init__(self):
        object.__setattr__(self, "which", Axis(self.which))
        if not np.isfinite(self.value):
            raise ValueError("scenario value must be finite")
        if self.which is Axis.TRANSIT_RATE and self.value < 0:
            raise ValueError("transit rate must be >= 0")

    def apply(self, atom: AtomSystem, drive: DriveConfig) -> tuple[AtomSystem, DriveConfig]:
        drive = drive.on_resonance()
        if self.which is Axis.TRANSIT_RATE:
            return atom.replace(gamma_t=float(self.value)), drive
        return atom, drive.replace(**{self.which.value: float(self.value)})


@dataclass(frozen=True)
class SusceptibilityDecomposition:
    """DC absorption ``chi0`` and signal-transfer coefficient ``chi1`` (s)."""

    chi0: np.ndarray | float
    chi1: np.ndarray | float
    perturbative: bool = True

    def __post_init__(self):
        if not (np.all(np.isfinite(self.chi0)) and np.all(np.isfinite(self.chi1))):
            raise ValueError("susceptibility decomposition must be finite")

    def imag_chi(self, omega_s, phase):
        """Im(chi) at signal amplitude omega_s and phase S; dimensionless."""
        return self.chi0 + self.chi1 * omega_s * np.cos(phase)


def susceptibility_prefactor(atom: AtomSystem, constants: PhysicalConstants = CODATA) -> float:
    """2 N mu12^2 / (hbar eps0), in rad/s."""
    return 2.0 * atom.n_eff * atom.mu12**2 / (constants.hbar * constants.epsilon0)


def chi_from_rho21(rho21, atom: AtomSystem, omega_p: float,
                   constants: PhysicalConstants = CODATA):
    """Linear susceptibility of the probe transition from the coherence rho21."""
    return -susceptibility_prefactor(atom, constants) / omega_p * np.asarray(rho21)


def _require_zero(**values) -> None:
    for name, value in values.items():
        if value != 0:
            raise ContractViolation(f"{name} must be zero for this closed form, got {value!r}")


def _check_perturbative(drive: DriveConfig) -> bool:
    if not drive.is_perturbative:
        warnings.warn(
            f"omega_s={drive.omega_s:.4g} is not small against omega_L={drive.omega_L:.4g}; "
            "first-order decomposition is unreliable",
            NonPerturbativeWarning,
            stacklevel=3,
        )
        return False
    return True


def _resonant_denominator(omega, op, oc, g2):
    return g2**2 * omega**2 + 2 * oc**2 * op**2 + 2 * op**4 + 2 * op**2 * omega**2


def rho21_resonant(atom: AtomSystem, drive: DriveConfig, phase: float = 0.0) -> complex:
    """Resonant steady-state coherence; transit and collision rates must vanish.

    gamma3 and gamma4 do not enter this expression.
    """
    _require_zero(delta_p=drive.delta_p, delta_c=drive.delta_c, delta_L=drive.delta_L,
                  gamma_t=atom.gamma_t, gamma_c=atom.gamma_c)
    omega = drive.effective_rabi(phase)
    op, oc, g2 = drive.omega_p, drive.omega_c, atom.gamma2
    return -1j * g2 * op * omega**2 / _resonant_denominator(omega, op, oc, g2)


def _require_ideal(atom: AtomSystem) -> None:
    _require_zero(gamma3=atom.gamma3, gamma4=atom.gamma4,
                  gamma_c=atom.gamma_c, gamma_t=atom.gamma_t)


# local microwave detuning -------------------------------------------------

def _local_denominator(delta, omega, op, oc, g2):
    s = op**2 + oc**2
    return g2**2 * omega**4 + 4 * delta**2 * s**2 + 2 * omega**2 * op**2 * (s + omega**2)


def rho21_local_detuned(atom: AtomSystem, drive: DriveConfig, delta_L, phase: float = 0.0):
    _require_zero(delta_p=drive.delta_p, delta_c=drive.delta_c)
    _require_ideal(atom)
    delta = np.asarray(delta_L, float)
    omega = drive.effective_rabi(phase)
    op, oc, g2 = drive.omega_p, drive.omega_c, atom.gamma2
    num = 1j * g2 * op * omega**4 + 2 * delta * op * omega**2 * oc**2
    return -num / _local_denominator(delta, omega, op, oc, g2)


def chi_decompose_local(atom: AtomSystem, drive: DriveConfig, delta_L,
                        constants: PhysicalConstants = CODATA) -> SusceptibilityDecomposition:
    _require_zero(delta_p=drive.delta_p, delta_c=drive.delta_c)
    _require_ideal(atom)
    ok = _check_perturbative(drive)
    delta = np.asarray(delta_L, float)
    k = susceptibility_prefactor(atom, constants)
    ol, op, oc, g2 = drive.omega_L, drive.omega_p, drive.omega_c, atom.gamma2
    s = op**2 + oc**2
    den = _local_denominator(delta, ol, op, oc, g2)
    chi0 = k * g2 * ol**4 / den
    chi1 = k * 4 * g2 * ol**3 * s * (ol**2 * op**2 + 4 * delta**2 * s) / den**2
    return SusceptibilityDecomposition(chi0, chi1, ok)


# probe detuning -----------------------------------------------------------

def probe_denominator(delta, omega, op, oc, g2):
    d2 = delta**2
    return (64 * d2**3
            + g2**2 * (omega**2 - 4 * d2) ** 2
            + 4 * d2 * ((omega**2 + oc**2) ** 2 + 2 * op**2 * (op**2 + oc**2 - 2 * omega**2))
            - 32 * d2**2 * (omega**2 + oc**2 - op**2)
            + 2 * op**2 * omega**2 * (op**2 + oc**2 + omega**2))


def probe_response_numerator(delta, omega, op, oc):
    """A_p: -(D_p^2 / 4 g2 op omega) times d/domega of the absorptive part."""
    d2 = delta**2
    s = op**2 + oc**2
    inner = (omega**2 * op**2 * s - 16 * d2**2 * oc**2
             + 4 * d2 * oc**2 * (oc**2 + omega**2) + 12 * d2 * op**2 * s)
    return (4 * d2 - omega**2) * inner


def rho21_probe_detuned(atom: AtomSystem, drive: DriveConfig, delta_p, phase: float = 0.0):
    _require_zero(delta_c=drive.delta_c, delta_L=drive.delta_L)
    _require_ideal(atom)
    delta = np.asarray(delta_p, float)
    omega = drive.effective_rabi(phase)
    op, oc, g2 = drive.omega_p, drive.omega_c, atom.gamma2
    q = 4 * delta**2 - omega**2
    num = op * q * (-1j * g2 * q - 2 * delta * (4 * delta**2 - oc**2 - omega**2))
    return num / probe_denominator(delta, omega, op, oc, g2)


def chi_decompose_probe(atom: AtomSystem, drive: DriveConfig, delta_p,
                        constants: PhysicalConstants = CODATA) -> SusceptibilityDecomposition:
    _require_zero(delta_c=drive.delta_c, delta_L=drive.delta_L)
    _require_ideal(atom)
    ok = _check_perturbative(drive)
    delta = np.asarray(delta_p, float)
    k = susceptibility_prefactor(atom, constants)
    ol, op, oc, g2 = drive.omega_L, drive.omega_p, drive.omega_c, atom.gamma2
    den = probe_denominator(delta, ol, op, oc, g2)
    chi0 = k * g2 * (4 * delta**2 - ol**2) ** 2 / den
    chi1 = -4 * k * g2 * ol * probe_response_numerator(delta, ol, op, oc) / den**2
    return SusceptibilityDecomposition(chi0, chi1, ok)


# coupling detuning --------------------------------------------------------

def coupling_denominator(delta, omega, op, oc, g2):
    d2 = delta**2
    return (32 * d2**2 * op**2
            + g2**2 * (omega**2 - 4 * d2) ** 2
            + 2 * op**2 * omega**2 * (op**2 + oc**2 + omega**2)
            + 4 * d2 * ((op**2 + oc**2) ** 2 + op**2 * (op**2 - 4 * omega**2)))


def coupling_response_numerator(delta, omega, op, oc):
    """A_c, the coupling-detuning analogue of :func:`probe_response_numerator`."""
    d2 = delta**2
    inner = omega**2 * op**2 * (op**2 + oc**2) + 4 * d2 * (oc**4 + 3 * oc**2 * op**2 + 3 * op**4)
    return (4 * d2 - omega**2) * inner


def rho21_coupling_detuned(atom: AtomSystem, drive: DriveConfig, delta_c, phase: float = 0.0):
    _require_zero(delta_p=drive.delta_p, delta_L=drive.delta_L)
    _require_ideal(atom)
    delta = np.asarray(delta_c, float)
    omega = drive.effective_rabi(phase)
    op, oc, g2 = drive.omega_p, drive.omega_c, atom.gamma2
    q = 4 * delta**2 - omega**2
    num = -1j * g2 * op * q**2 + 2 * op * oc**2 * delta * q
    return num / coupling_denominator(delta, omega, op, oc, g2)


def chi_decompose_coupling(atom: AtomSystem, drive: DriveConfig, delta_c,
                           constants: PhysicalConstants = CODATA) -> SusceptibilityDecomposition:
    _require_zero(delta_p=drive.delta_p, delta_L=drive.delta_L)
    _require_ideal(atom)
    ok = _check_perturbative(drive)
    delta = np.asarray(delta_c, float)
    k = susceptibility_prefactor(atom, constants)
    ol, op, oc, g2 = drive.omega_L, drive.omega_p, drive.omega_c, atom.gamma2
    den = coupling_denominator(delta, ol, op, oc, g2)
    chi0 = k * g2 * (4 * delta**2 - ol**2) ** 2 / den
    chi1 = -4 * k * g2 * ol * coupling_response_numerator(delta, ol, op, oc) / den**2
    return SusceptibilityDecomposition(chi0, chi1, ok)


CLOSED_FORMS = {
    Axis.LOCAL_MICROWAVE: (rho21_local_detuned, chi_decompose_local),
    Axis.PROBE_LASER: (rho21_probe_detuned, chi_decompose_probe),
    Axis.COUPLING_LASER: (rho21_coupling_detuned, chi_decompose_coupling),
}


def chi_decompose_closed(atom: AtomSystem, drive: DriveConfig, axis: Axis, delta,
                         constants: PhysicalConstants = CODATA) -> SusceptibilityDecomposition:
    """Dispatch to the closed-form decomposition for a detuning axis."""
    axis = Axis(axis)
    if axis not in CLOSED_FORMS:
        raise ContractViolation(f"no closed form exists for axis {axis.value}")
    return CLOSED_FORMS[axis][1](atom, drive.on_resonance(), delta, constants)


# numerical harmonic extraction --------------------------------------------

def chi_decompose_numeric(atom: AtomSystem, drive: DriveConfig, scenario: DetuningScenario,
                          n_phase: int = N_PHASE,
                          constants: PhysicalConstants = CODATA) -> SusceptibilityDecomposition:
    """Fourier-decompose Im(chi) over one beat period of frozen-phase steady states.

    Valid for any relaxation rates, including transit broadening. Raises a
    :class:`NonPerturbativeWarning` when the second harmonic exceeds
    ``HARMONIC_RATIO_LIMIT`` of the first.
    """
    atom, drive = scenario.apply(atom, drive)
    ok = _check_perturbative(drive)
    phases = 2 * np.pi * np.arange(n_phase) / n_phase
    rho21 = steady_states(atom, drive, phases)[:, 1, 0]
    im_chi = chi_from_rho21(rho21, atom, drive.omega_p, constants).imag
    chi0 = float(np.mean(im_chi))
    if drive.omega_s == 0.0:
        return SusceptibilityDecomposition(chi0, 0.0, ok)
    first = 2.0 / n_phase * float(np.dot(im_chi, np.cos(phases)))
    second = 2.0 / n_phase * float(np.dot(im_chi, np.cos(2 * phases)))
    # A first harmonic near a zero crossing is not by itself a sign of nonlinearity.
    scale = max(abs(first), drive.omega_s / drive.omega_L * abs(chi0))
    if abs(second) > HARMONIC_RATIO_LIMIT * scale:
        warnings.warn(
            f"second harmonic is {abs(second / first):.2%} of the first; "
            "signal is outside the linear-response regime",
            NonPerturbativeWarning,
            stacklevel=2,
        )
        ok = False
    return SusceptibilityDecomposition(chi0, first / drive.omega_s, ok)
