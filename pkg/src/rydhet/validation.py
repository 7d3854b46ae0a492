"""Closed forms checked against the numerical Liouvillian oracle."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import optimize, susceptibility
from .errors import NonPerturbativeWarning
from .liouvillian import steady_state_rho21
from .model import TWO_PI, AtomSystem, DriveConfig, ReadoutConfig
from .readout import conversion_general, conversion_high_transmittance
from .susceptibility import Axis, DetuningScenario

RHO21_TOL = 1e-9
CHI_TOL = 5e-3
OPTIMUM_TOL = TWO_PI * 10e3
LIMIT_TOL = 1e-6

#: Relative errors are measured against max(|oracle|, FLOOR * max|oracle|) so
#: structural zeros of the coherence do not dominate.
FLOOR = 1e-6

WINDOW = (-TWO_PI * 50e6, TWO_PI * 50e6)
LOCAL_RABIS = TWO_PI * np.array([2e6, 4e6, 6e6])
CHI_OMEGA_S = TWO_PI * 100.0


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    location: float
    tolerance: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: max deviation {self.max_deviation:.3e} "
                f"(tolerance {self.tolerance:.1e}) at {self.location / TWO_PI / 1e6:+.6g} MHz")


def floored_relative_error(numerical, closed, floor: float = FLOOR) -> np.ndarray:
    numerical = np.asarray(numerical)
    scale = np.maximum(np.abs(numerical), floor * np.max(np.abs(numerical)))
    return np.abs(np.asarray(closed) - numerical) / scale


def _result(name, errors, xs, tol) -> CheckResult:
    errors = np.atleast_1d(errors)
    i = int(np.argmax(errors))
    worst = float(errors[i])
    return CheckResult(name, bool(worst <= tol), worst, float(np.atleast_1d(xs)[i]), tol)


def _check_resonant(atom, drive) -> CheckResult:
    drives = [drive.on_resonance().replace(omega_L=ol) for ol in LOCAL_RABIS]
    oracle = steady_state_rho21(atom, drives)
    closed = np.array([susceptibility.rho21_resonant(atom, d) for d in drives])
    return _result("rho21_resonant", floored_relative_error(oracle, closed), LOCAL_RABIS, RHO21_TOL)


def _check_detuned(atom, drive, axis, deltas) -> CheckResult:
    # Looked up at call time so a patched closed form is the one validated.
    name = {Axis.LOCAL_MICROWAVE: "rho21_local_detuned", Axis.PROBE_LASER: "rho21_probe_detuned",
            Axis.COUPLING_LASER: "rho21_coupling_detuned"}[axis]
    closed_form = getattr(susceptibility, name)
    base = drive.on_resonance()
    drives = [base.replace(**{axis.value: float(x)}) for x in deltas]
    oracle = steady_state_rho21(atom, drives)
    closed = np.asarray(closed_form(atom, base, deltas))
    return _result(name, floored_relative_error(oracle, closed), deltas, RHO21_TOL)


def _check_decomposition(atom, drive, axis, deltas) -> CheckResult:
    name = {Axis.LOCAL_MICROWAVE: "chi_decompose_local", Axis.PROBE_LASER: "chi_decompose_probe",
            Axis.COUPLING_LASER: "chi_decompose_coupling"}[axis]
    probe = drive.on_resonance().replace(omega_s=CHI_OMEGA_S)
    closed = getattr(susceptibility, name)(atom, probe, deltas)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonPerturbativeWarning)
        numeric = [susceptibility.chi_decompose_numeric(atom, probe, DetuningScenario(axis, x))
                   for x in deltas]
    err0 = floored_relative_error([d.chi0 for d in numeric], closed.chi0, 1e-3)
    err1 = floored_relative_error([d.chi1 for d in numeric], closed.chi1, 1e-3)
    return _result(name, np.maximum(err0, err1), deltas, CHI_TOL)


def _check_optimum(atom, drive, readout, high_transmittance: bool) -> CheckResult:
    errors = []
    for ol in LOCAL_RABIS:
        d = drive.on_resonance().replace(omega_L=float(ol))
        if high_transmittance:
            closed = optimize.delta_L_star_star(atom, d)

            def objective(x, d=d):
                return conversion_high_transmittance(
                    susceptibility.chi_decompose_local(atom, d, x), atom, readout)
        else:
            closed = optimize.delta_L_star(atom, d, chi0_sign=readout.chi0_sign)

            def objective(x, d=d):
                return conversion_general(susceptibility.chi_decompose_local(atom, d, x), atom, readout)

        x, _ = optimize.grid_refine_argmax(objective, WINDOW, magnitude=True, vectorized=True)
        errors.append(abs(abs(x) - closed))
    name = "delta_L_star_star" if high_transmittance else "delta_L_star"
    return _result(name, np.array(errors), LOCAL_RABIS, OPTIMUM_TOL)


def _check_thin_limit(atom, drive) -> CheckResult:
    errors = []
    for ol in LOCAL_RABIS:
        d = drive.on_resonance().replace(omega_L=float(ol))
        thin = optimize.delta_L_star(atom, d, cell_length=atom.cell_length * 1e-9)
        ref = optimize.delta_L_star_star(atom, d)
        errors.append(abs(thin - ref) / ref)
    return _result("delta_L_star_thin_limit", np.array(errors), LOCAL_RABIS, LIMIT_TOL)


def run_validation(atom: AtomSystem | None = None, drive: DriveConfig | None = None,
                   readout: ReadoutConfig | None = None, n_grid: int = 101,
                   n_chi: int = 21) -> list[CheckResult]:
    """Run every closed-form-vs-oracle check; relaxation beyond gamma2 is dropped."""
    atom = (atom or AtomSystem.cesium()).idealized()
    drive = drive or DriveConfig.cesium()
    readout = readout or ReadoutConfig()
    grid = np.linspace(*WINDOW, n_grid)
    coarse = np.linspace(*WINDOW, n_chi)
    results = [_check_resonant(atom, drive)]
    for axis in (Axis.LOCAL_MICROWAVE, Axis.PROBE_LASER, Axis.COUPLING_LASER):
        results.append(_check_detuned(atom, drive, axis, grid))
    for axis in (Axis.LOCAL_MICROWAVE, Axis.PROBE_LASER, Axis.COUPLING_LASER):
        results.append(_check_decomposition(atom, drive, axis, coarse))
    results.append(_check_optimum(atom, drive, readout, high_transmittance=False))
    results.append(_check_optimum(atom, drive, readout, high_transmittance=True))
    results.append(_check_thin_limit(atom, drive))
    return results
