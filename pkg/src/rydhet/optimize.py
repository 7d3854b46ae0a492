"""Detuning operating points that maximize the conversion coefficient.

Problems:

* ``p1`` local-microwave detuning, general case (closed form + grid check)
* ``p2`` local-microwave detuning, high-transmittance case (closed form + grid check)
* ``p3`` probe-laser detuning, general case (grid search)
* ``p4`` coupling-laser detuning, general case (grid search)
* ``p5`` transit relaxation rate sweep, general case (numerical harmonics)

Conversion coefficients are even in each detuning, so closed-form optima
are reported as the positive root.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConsistencyError, ObjectiveError
from .model import CODATA, TWO_PI, AtomSystem, DriveConfig, PhysicalConstants, ReadoutConfig
from .readout import conversion_general, conversion_high_transmittance, gain_db
from .susceptibility import (
    Axis,
    DetuningScenario,
    chi_decompose_coupling,
    chi_decompose_local,
    chi_decompose_numeric,
    chi_decompose_probe,
    susceptibility_prefactor,
)

DEFAULT_WINDOW = (-TWO_PI * 50e6, TWO_PI * 50e6)
COARSE_N = 2001
REFINE_ITERS = 60

#: Transit rates scanned by p5 when none are given: 0 to 200 kHz in 10 kHz steps.
DEFAULT_TRANSIT_RATES = TWO_PI * 1e3 * np.arange(0, 201, 10)

#: Signal amplitude used for numerical harmonic extraction when the drive has none.
PROBE_OMEGA_S = TWO_PI * 100.0

#: Extra cross-check slack (fraction of the window) covering the flat-top resolution limit.
CROSS_CHECK_SLACK = 1e-7

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Method(str, Enum):
    CLOSED_FORM = "closed_form"
    GRID_REFINE = "grid_refine"
    SWEEP = "sweep"


def absorption_constant(atom: AtomSystem, cell_length: float | None = None,
                        constants: PhysicalConstants = CODATA) -> float:
    """Dimensionless optical-depth constant 2 k L N mu12^2 / (hbar eps0 gamma2)."""
    length = atom.cell_length if cell_length is None else cell_length
    return atom.k * length * susceptibility_prefactor(atom, constants) / atom.gamma2


def delta_L_star(atom: AtomSystem, drive: DriveConfig, cell_length: float | None = None,
                 chi0_sign: float = 1.0, constants: PhysicalConstants = CODATA) -> float:
    """Local-microwave detuning maximizing |kappa| in the general case.

    ``chi0_sign`` must match the readout convention used for kappa; with
    -1 the absorption constant enters with inverted sign.
    """
    op, oc, ol, g2 = drive.omega_p, drive.omega_c, drive.omega_L, atom.gamma2
    c = chi0_sign * absorption_constant(atom, cell_length, constants)
    u = op**2 * (op**2 + oc**2)
    v = ol**2 * (2 * op**2 + g2**2)
    a = c * g2**2 * ol**2
    radicand = (a - 2 * u + math.sqrt(4 * (u + v) ** 2 + a**2)) / 2
    return op**2 * ol / (2 * u) * math.sqrt(max(radicand, 0.0))


def delta_L_star_star(atom: AtomSystem, drive: DriveConfig) -> float:
    """Local-microwave detuning maximizing |chi1| (high-transmittance case)."""
    op, oc, ol, g2 = drive.omega_p, drive.omega_c, drive.omega_L, atom.gamma2
    return ol**2 / (2 * (op**2 + oc**2)) * math.sqrt(2 * op**2 + g2**2)


class Extremum(NamedTuple):
    x: float
    value: float
    bracket: float


class GridSearch(NamedTuple):
    maximum: Extremum
    minimum: Extremum
    best: Extremum


def golden_section_max(f: Callable[[float], float], a: float, b: float, iters: int) -> Extremum:
    """Golden-section search for a maximum of a unimodal ``f`` on [a, b]."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    if fc >= fd:
        return Extremum(c, fc, b - a)
    return Extremum(d, fd, b - a)


def _checked(objective, x):
    value = float(objective(x))
    if not math.isfinite(value):
        raise ObjectiveError(f"objective is {value} at delta={x!r}", delta=x)
    return value


def _refine(objective, grid, values, index, sign, refine_iters) -> Extremum:
    lo = grid[max(index - 1, 0)]
    hi = grid[min(index + 1, len(grid) - 1)]
    if hi == lo:
        return Extremum(float(lo), float(values[index]), 0.0)
    inner = golden_section_max(lambda x: sign * _checked(objective, x), lo, hi, refine_iters)
    best = Extremum(inner.x, sign * inner.value, inner.bracket)
    if sign * values[index] > sign * best.value:
        best = Extremum(float(grid[index]), float(values[index]), inner.bracket)
    return best


def grid_refine_extrema(objective: Callable, window, coarse_n: int = COARSE_N,
                        refine_iters: int = REFINE_ITERS, magnitude: bool = False,
                        vectorized: bool = False) -> GridSearch:
    """Coarse scan then golden-section refinement of both signed extrema.

    ``best`` is the refined maximum, or with ``magnitude=True`` whichever
    signed extremum has the larger absolute value.
    """
    lo, hi = float(window[0]), float(window[1])
    if not hi >= lo:
        raise ValueError(f"empty window [{lo}, {hi}]")
    grid = np.linspace(lo, hi, max(int(coarse_n), 1))
    if vectorized:
        values = np.asarray(objective(grid), float)
    else:
        values = np.array([float(objective(x)) for x in grid])
    bad = ~np.isfinite(values)
    if np.any(bad):
        x = float(grid[np.argmax(bad)])
        raise ObjectiveError(f"objective is not finite at delta={x!r}", delta=x)
    scalar = (lambda x: float(objective(np.asarray(x)))) if vectorized else objective
    top = _refine(scalar, grid, values, int(np.argmax(values)), 1.0, refine_iters)
    bottom = _refine(scalar, grid, values, int(np.argmin(values)), -1.0, refine_iters)
    best = top
    if magnitude and abs(bottom.value) > abs(top.value):
        best = bottom
    return GridSearch(top, bottom, best)


def grid_refine_argmax(objective: Callable, window, coarse_n: int = COARSE_N,
                       refine_iters: int = REFINE_ITERS, magnitude: bool = False,
                       vectorized: bool = False) -> tuple[float, float]:
    """(argmax, value at argmax) of ``objective`` over ``window``."""
    best = grid_refine_extrema(objective, window, coarse_n, refine_iters, magnitude, vectorized).best
    return best.x, best.value


@dataclass
class OptimizationReport:
    problem: str
    scenario: Axis
    optimum: float
    kappa_at_optimum: float
    kappa_at_zero: float
    gain_db: float
    method: Method
    grid: dict = field(default_factory=dict)
    extrema: list = field(default_factory=list)
    cross_check: dict | None = None
    curve: list | None = None

    def __post_init__(self):
        if self.gain_db < -1e-9:
            raise ConsistencyError(
                f"{self.problem}: optimum is worse than the resonant point ({self.gain_db:.3g} dB)"
            )

    def to_dict(self) -> dict:
        out = asdict(self)
        out["scenario"] = self.scenario.value
        out["method"] = self.method.value
        return out


def _kappa_objective(decompose, atom, drive, readout, constants):
    def kappa(delta):
        return conversion_general(decompose(atom, drive, delta, constants), atom, readout)
    return kappa


def _grid_meta(window, coarse_n, refine_iters) -> dict:
    return {"lo": float(window[0]), "hi": float(window[1]),
            "coarse_n": int(coarse_n), "refine_iters": int(refine_iters)}


def _cross_check(problem, closed, search: GridSearch, window) -> dict:
    numerical = abs(search.best.x)
    tolerance = search.best.bracket + CROSS_CHECK_SLACK * (window[1] - window[0])
    if abs(numerical - closed) > tolerance:
        raise ConsistencyError(
            f"{problem}: closed-form optimum {closed:.9g} rad/s disagrees with grid "
            f"optimum {numerical:.9g} rad/s (tolerance {tolerance:.3g})",
            closed_form=closed, numerical=numerical,
        )
    return {"closed_form": closed, "grid": numerical, "tolerance": tolerance}


def _local_problem(problem, objective, closed, window, coarse_n, refine_iters) -> OptimizationReport:
    search = grid_refine_extrema(objective, window, coarse_n, refine_iters,
                                 magnitude=True, vectorized=True)
    check = _cross_check(problem, closed, search, window)
    k_opt = float(objective(closed))
    k_zero = float(objective(0.0))
    return OptimizationReport(
        problem=problem, scenario=Axis.LOCAL_MICROWAVE, optimum=closed,
        kappa_at_optimum=k_opt, kappa_at_zero=k_zero, gain_db=float(gain_db(k_opt, k_zero)),
        method=Method.CLOSED_FORM, grid=_grid_meta(window, coarse_n, refine_iters),
        extrema=[{"delta": s * closed, "kappa": k_opt} for s in (-1.0, 1.0)],
        cross_check=check,
    )


def solve_p1(atom: AtomSystem, drive: DriveConfig, readout: ReadoutConfig,
             window=DEFAULT_WINDOW, coarse_n: int = COARSE_N, refine_iters: int = REFINE_ITERS,
             constants: PhysicalConstants = CODATA) -> OptimizationReport:
    atom, drive = atom.idealized(), drive.on_resonance()
    objective = _kappa_objective(chi_decompose_local, atom, drive, readout, constants)
    closed = delta_L_star(atom, drive, chi0_sign=readout.chi0_sign, constants=constants)
    return _local_problem("p1", objective, closed, window, coarse_n, refine_iters)


def solve_p2(atom: AtomSystem, drive: DriveConfig, readout: ReadoutConfig,
             window=DEFAULT_WINDOW, coarse_n: int = COARSE_N, refine_iters: int = REFINE_ITERS,
             constants: PhysicalConstants = CODATA) -> OptimizationReport:
    atom, drive = atom.idealized(), drive.on_resonance()

    def objective(delta):
        decomp = chi_decompose_local(atom, drive, delta, constants)
        return conversion_high_transmittance(decomp, atom, readout)

    closed = delta_L_star_star(atom, drive)
    return _local_problem("p2", objective, closed, window, coarse_n, refine_iters)


def _laser_problem(problem, axis, decompose, atom, drive, readout, window, coarse_n,
                   refine_iters, constants) -> OptimizationReport:
    atom, drive = atom.idealized(), drive.on_resonance()
    objective = _kappa_objective(decompose, atom, drive, readout, constants)
    search = grid_refine_extrema(objective, window, coarse_n, refine_iters,
                                 magnitude=True, vectorized=True)
    k_zero = float(objective(0.0))
    extrema = []
    for ext in (search.maximum, search.minimum):
        for x in sorted({ext.x, -ext.x}):
            if window[0] <= x <= window[1]:
                extrema.append({"delta": x, "kappa": float(objective(x))})
    return OptimizationReport(
        problem=problem, scenario=axis, optimum=search.best.x,
        kappa_at_optimum=search.best.value, kappa_at_zero=k_zero,
        gain_db=float(gain_db(search.best.value, k_zero)), method=Method.GRID_REFINE,
        grid=dict(_grid_meta(window, coarse_n, refine_iters), bracket=search.best.bracket),
        extrema=extrema,
    )


def solve_p3(atom: AtomSystem, drive: DriveConfig, readout: ReadoutConfig,
             window=DEFAULT_WINDOW, coarse_n: int = COARSE_N, refine_iters: int = REFINE_ITERS,
             constants: PhysicalConstants = CODATA) -> OptimizationReport:
    return _laser_problem("p3", Axis.PROBE_LASER, chi_decompose_probe, atom, drive, readout,
                          window, coarse_n, refine_iters, constants)


def solve_p4(atom: AtomSystem, drive: DriveConfig, readout: ReadoutConfig,
             window=DEFAULT_WINDOW, coarse_n: int = COARSE_N, refine_iters: int = REFINE_ITERS,
             constants: PhysicalConstants = CODATA) -> OptimizationReport:
    return _laser_problem("p4", Axis.COUPLING_LASER, chi_decompose_coupling, atom, drive, readout,
                          window, coarse_n, refine_iters, constants)


def transit_kappa(atom: AtomSystem, drive: DriveConfig, readout: ReadoutConfig, gamma_t: float,
                  constants: PhysicalConstants = CODATA) -> float:
    """General-case kappa at resonance with transit rate ``gamma_t`` (numerical harmonics)."""
    if drive.omega_s == 0.0:
        drive = drive.replace(omega_s=PROBE_OMEGA_S)
    decomp = chi_decompose_numeric(atom, drive, DetuningScenario(Axis.TRANSIT_RATE, gamma_t),
                                   constants=constants)
    return float(conversion_general(decomp, atom, readout))


def solve_p5(atom: AtomSystem, drive: DriveConfig, readout: ReadoutConfig, gammas=None,
             constants: PhysicalConstants = CODATA) -> OptimizationReport:
    """Sweep the transit rate; the resonant, transit-free point is the reference."""
    gammas = DEFAULT_TRANSIT_RATES if gammas is None else np.asarray(gammas, float)
    atom = atom.idealized()
    kappas = np.array([transit_kappa(atom, drive, readout, g, constants) for g in gammas])
    k_zero = transit_kappa(atom, drive, readout, 0.0, constants)
    best = int(np.argmax(np.abs(kappas)))
    gains = gain_db(kappas, k_zero)
    curve = [{"gamma_t": float(g), "kappa": float(k), "gain_db": float(db)}
             for g, k, db in zip(gammas, kappas, gains)]
    diffs = np.diff(np.abs(kappas))
    return OptimizationReport(
        problem="p5", scenario=Axis.TRANSIT_RATE, optimum=float(gammas[best]),
        kappa_at_optimum=float(kappas[best]), kappa_at_zero=k_zero,
        gain_db=float(gains[best]),
        method=Method.SWEEP,
        grid={"gamma_t": [float(g) for g in gammas], "strictly_decreasing": bool(np.all(diffs < 0))},
        curve=curve,
    )


SOLVERS = {"p1": solve_p1, "p2": solve_p2, "p3": solve_p3, "p4": solve_p4, "p5": solve_p5}

