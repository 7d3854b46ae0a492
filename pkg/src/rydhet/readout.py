"""Transmitted probe power and weak-signal conversion coefficients."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NonphysicalRangeError, RegimeWarning
from .model import AtomSystem, DetectionMode, ReadoutConfig
from .susceptibility import SusceptibilityDecomposition

#: Largest optical depth we are willing to exponentiate.
MAX_EXPONENT = 700.0

#: Threshold used to decide that a "much less than one" assumption is violated.
SMALL_PARAMETER = 0.1

#: Decibel factor applied to conversion-coefficient ratios.
DB_FACTOR = 10.0


@dataclass(frozen=True)
class ReadoutResult:
    """DC power (W), conversion coefficients (W*s) and peak-to-peak power (W)."""

    p_dc: float
    kappa: float
    kappa_prime: float
    p_pp: float


def optical_depth_scale(atom: AtomSystem) -> float:
    """kL, the factor converting Im(chi) into an optical depth."""
    return atom.k * atom.cell_length


def _guarded_exp(exponent):
    if np.any(np.abs(exponent) > MAX_EXPONENT):
        raise NonphysicalRangeError(
            f"optical depth {np.max(np.abs(exponent)):.4g} exceeds {MAX_EXPONENT:g}; "
            "configuration is nonphysical"
        )
    return np.exp(exponent)


def transmitted_power(decomp: SusceptibilityDecomposition, atom: AtomSystem,
                      readout: ReadoutConfig, omega_s, phase):
    """Beer-Lambert transmission of the probe at signal phase ``phase``."""
    kl = optical_depth_scale(atom)
    return readout.input_power * _guarded_exp(-kl * decomp.imag_chi(omega_s, phase))


def dc_power(decomp: SusceptibilityDecomposition, atom: AtomSystem, readout: ReadoutConfig):
    return readout.input_power * _guarded_exp(-optical_depth_scale(atom) * np.asarray(decomp.chi0))


def _warn_if_large(values, label: str) -> None:
    worst = float(np.max(np.abs(values)))
    if worst > SMALL_PARAMETER:
        warnings.warn(f"{label} = {worst:.3g} is not << 1", RegimeWarning, stacklevel=3)


def conversion_general(decomp: SusceptibilityDecomposition, atom: AtomSystem,
                       readout: ReadoutConfig, omega_s: float | None = None):
    """-P_i exp(-sign*kL*chi0) kL chi1, with sign = ``readout.chi0_sign``."""
    kl = optical_depth_scale(atom)
    chi1 = np.asarray(decomp.chi1)
    if omega_s is not None:
        _warn_if_large(kl * chi1 * omega_s, "|kL chi1 omega_s|")
    attenuation = _guarded_exp(-readout.chi0_sign * kl * np.asarray(decomp.chi0))
    return -readout.input_power * attenuation * kl * chi1


def conversion_high_transmittance(decomp: SusceptibilityDecomposition, atom: AtomSystem,
                                  readout: ReadoutConfig):
    """-P_i kL chi1; assumes the medium is optically thin."""
    kl = optical_depth_scale(atom)
    _warn_if_large(kl * np.asarray(decomp.chi0), "|kL chi0|")
    return -readout.input_power * kl * np.asarray(decomp.chi1)


def conversion(decomp: SusceptibilityDecomposition, atom: AtomSystem, readout: ReadoutConfig,
               omega_s: float | None = None):
    """Conversion coefficient for the readout's detection mode."""
    if readout.detection_mode is DetectionMode.HIGH_TRANSMITTANCE:
        return conversion_high_transmittance(decomp, atom, readout)
    return conversion_general(decomp, atom, readout, omega_s)


def peak_to_peak(decomp: SusceptibilityDecomposition, atom: AtomSystem,
                 readout: ReadoutConfig, omega_s: float):
    """Exact peak-to-peak output swing over a beat period (no small-signal expansion)."""
    kl = optical_depth_scale(atom)
    x = kl * np.asarray(decomp.chi1) * omega_s
    swing = 2.0 * np.sinh(np.abs(x))
    if np.any(np.abs(x) > MAX_EXPONENT):
        raise NonphysicalRangeError("signal modulation depth too large to exponentiate")
    return _guarded_exp(-kl * np.asarray(decomp.chi0)) * readout.input_power * swing


def gain_db(kappa_at, kappa_ref):
    """Sensitivity gain of ``kappa_at`` over ``kappa_ref`` in dB."""
    ref = np.abs(np.asarray(kappa_ref, float))
    if np.any(ref == 0):
        raise ValueError("reference conversion coefficient must be nonzero")
    return DB_FACTOR * np.log10(np.abs(np.asarray(kappa_at, float)) / ref)


def evaluate(decomp: SusceptibilityDecomposition, atom: AtomSystem, readout: ReadoutConfig,
             omega_s: float) -> ReadoutResult:
    """All readout observables for a scalar decomposition."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        kappa = conversion_general(decomp, atom, readout)
        kappa_prime = conversion_high_transmittance(decomp, atom, readout)
    return ReadoutResult(
        p_dc=float(dc_power(decomp, atom, readout)),
        kappa=float(kappa),
        kappa_prime=float(kappa_prime),
        p_pp=float(peak_to_peak(decomp, atom, readout, omega_s)),
    )


def phase_averaged_power(decomp: SusceptibilityDecomposition, atom: AtomSystem,
                         readout: ReadoutConfig, omega_s: float, n: int = 256) -> float:
    """Mean transmitted power over one beat period (trapezoid on a periodic grid)."""
    phases = 2 * math.pi * np.arange(n) / n
    return float(np.mean(transmitted_power(decomp, atom, readout, omega_s, phases)))
