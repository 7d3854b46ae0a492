"""Rotating-frame master equation of the four-level ladder.

Everything here works in units where hbar = 1: the Hamiltonian is returned
as H/hbar in rad/s. Density matrices are vectorized row-major
(``rho.ravel()``), so ``vec(A @ X @ B) == kron(A, B.T) @ vec(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError, NumericalError, SettlingTimeout
from .model import AtomSystem, DriveConfig

N_LEVELS = 4
DIM = N_LEVELS * N_LEVELS
_EYE = np.eye(N_LEVELS)
_DIAG_IDX = np.arange(N_LEVELS) * (N_LEVELS + 1)

#: Above this condition number the steady-state solve is rejected.
MAX_CONDITION = 1e12

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10


def _vindex(i: int, j: int) -> int:
    return N_LEVELS * i + j


@dataclass(frozen=True)
class DensityMatrix:
    """4x4 density matrix, levels ordered |1>..|4> as indices 0..3."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (N_LEVELS, N_LEVELS):
            raise ValueError(f"density matrix must be 4x4, got shape {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise ValueError("density matrix has non-finite entries")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def ground(cls) -> "DensityMatrix":
        rho = np.zeros((N_LEVELS, N_LEVELS), complex)
        rho[0, 0] = 1.0
        return cls(rho)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.rho))

    @property
    def populations(self) -> np.ndarray:
        return np.diag(self.rho).real.copy()

    @property
    def rho21(self) -> complex:
        """Probe coherence <2|rho|1>."""
        return complex(self.rho[1, 0])

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def violations(self, herm_tol: float = HERMITIAN_TOL, trace_tol: float = TRACE_TOL) -> list[str]:
        problems = []
        herm = self.hermiticity_error()
        if herm > herm_tol:
            problems.append(f"not Hermitian (max deviation {herm:.3g})")
        tr = self.trace
        if abs(tr - 1.0) > trace_tol:
            problems.append(f"trace {tr:.12g} != 1")
        diag = np.diag(self.rho)
        if np.max(np.abs(diag.imag)) > trace_tol:
            problems.append("complex population")
        if np.any(diag.real < -trace_tol) or np.any(diag.real > 1.0 + trace_tol):
            problems.append("population outside [0, 1]")
        return problems

    def is_valid(self, herm_tol: float = HERMITIAN_TOL, trace_tol: float = TRACE_TOL) -> bool:
        return not self.violations(herm_tol, trace_tol)


@dataclass(frozen=True)
class LiouvillianOperator:
    """Affine generator d vec(rho)/dt = superop @ vec(rho) + inhomogeneous."""

    superop: np.ndarray
    inhomogeneous: np.ndarray

    def apply(self, rho: np.ndarray) -> np.ndarray:
        vec = self.superop @ np.asarray(rho, complex).ravel() + self.inhomogeneous
        return vec.reshape(N_LEVELS, N_LEVELS)


def build_hamiltonian(drive: DriveConfig, phase: float = 0.0) -> np.ndarray:
    """Rotating-frame Hamiltonian H/hbar (rad/s) at signal phase ``phase``."""
    coupling = drive.microwave_coupling(phase)
    h = np.zeros((N_LEVELS, N_LEVELS), complex)
    h[1, 1] = drive.delta_p
    h[2, 2] = drive.delta_p + drive.delta_c
    h[3, 3] = drive.delta_p + drive.delta_c + drive.delta_L
    h[0, 1] = h[1, 0] = 0.5 * drive.omega_p
    h[1, 2] = h[2, 1] = 0.5 * drive.omega_c
    h[2, 3] = 0.5 * coupling
    h[3, 2] = np.conj(h[2, 3])
    return h


def build_relaxation(atom: AtomSystem) -> tuple[np.ndarray, Callable[[np.ndarray], np.ndarray]]:
    """Relaxation matrix and repopulation map.

    The repopulation map includes the constant ground-state refill at the
    transit rate, so ``repopulation(rho)`` is affine in ``rho``.
    """
    g = atom.gamma_t
    relax = np.diag([g, g + atom.gamma2, g + atom.gamma3 + atom.gamma_c, g + atom.gamma4])

    def repopulation(rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho)
        out = np.zeros((N_LEVELS, N_LEVELS), complex)
        out[0, 0] = g + atom.gamma2 * rho[1, 1] + atom.gamma4 * rho[3, 3]
        out[1, 1] = atom.gamma3 * rho[2, 2]
        return out

    return relax.astype(complex), repopulation


def _commutator_superop(h: np.ndarray) -> np.ndarray:
    return -1j * (np.kron(h, _EYE) - np.kron(_EYE, h.T))


def _dissipator(atom: AtomSystem) -> tuple[np.ndarray, np.ndarray]:
    relax, _ = build_relaxation(atom)
    sup = -0.5 * (np.kron(relax, _EYE) + np.kron(_EYE, relax.T))
    sup[_vindex(0, 0), _vindex(1, 1)] += atom.gamma2
    sup[_vindex(0, 0), _vindex(3, 3)] += atom.gamma4
    sup[_vindex(1, 1), _vindex(2, 2)] += atom.gamma3
    inhom = np.zeros(DIM, complex)
    inhom[_vindex(0, 0)] = atom.gamma_t
    return sup, inhom


def build_liouvillian(atom: AtomSystem, drive: DriveConfig, phase: float = 0.0) -> LiouvillianOperator:
    sup, inhom = _dissipator(atom)
    sup = sup + _commutator_superop(build_hamiltonian(drive, phase))
    return LiouvillianOperator(sup, inhom)


def _trace_constrained_system(superops: np.ndarray, inhom: np.ndarray):
    """Replace the rho11 equation with tr(rho) = 1.

    Any population that leaves the modeled decay paths (collisional loss from
    |3>) is thereby returned to the ground state in steady state.
    """
    scale = np.max(np.abs(superops), axis=(-2, -1))
    a = superops.copy()
    row = np.zeros(DIM)
    row[_DIAG_IDX] = 1.0
    a[..., 0, :] = scale[..., None] * row
    b = np.broadcast_to(-inhom, a.shape[:-1]).copy()
    b[..., 0] = scale
    return a, b


def _solve_steady(superops: np.ndarray, inhom: np.ndarray) -> np.ndarray:
    """Batched trace-constrained steady state; returns (..., 4, 4) arrays."""
    a, b = _trace_constrained_system(superops, inhom)
    cond = np.linalg.cond(a)
    worst = float(np.max(cond))
    if not np.isfinite(worst) or worst > MAX_CONDITION:
        raise NumericalError(
            f"steady-state system is singular or ill-conditioned (condition {worst:.3g}); "
            "the drive configuration is degenerate",
            condition=worst,
        )
    vec = np.linalg.solve(a, b[..., None])[..., 0]
    resid = np.einsum("...ij,...j->...i", superops, vec) + inhom
    resid[..., 0] = 0.0
    norm = np.linalg.norm(superops, axis=(-2, -1))
    bad = np.linalg.norm(resid, axis=-1) > 1e-10 * norm
    if np.any(bad):
        raise NumericalError("steady-state residual exceeds tolerance", condition=worst)
    rho = vec.reshape(vec.shape[:-1] + (N_LEVELS, N_LEVELS))
    return 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))


def steady_state(atom: AtomSystem, drive: DriveConfig, phase: float = 0.0) -> DensityMatrix:
    """Steady state with the Rydberg coupling frozen at signal phase ``phase``."""
    op = build_liouvillian(atom, drive, phase)
    return DensityMatrix(_solve_steady(op.superop, op.inhomogeneous))


def steady_states(atom: AtomSystem, drive: DriveConfig, phases) -> np.ndarray:
    """Vectorized :func:`steady_state` over an array of phases; returns (n, 4, 4)."""
    phases = np.atleast_1d(np.asarray(phases, float))
    sup, inhom = _dissipator(atom)
    ops = np.stack([sup + _commutator_superop(build_hamiltonian(drive, p)) for p in phases])
    return _solve_steady(ops, inhom)


def steady_state_rho21(atom: AtomSystem, drives) -> np.ndarray:
    """rho21 of the steady state for each drive in ``drives`` (phase 0)."""
    sup, inhom = _dissipator(atom)
    ops = np.stack([sup + _commutator_superop(build_hamiltonian(d)) for d in drives])
    return _solve_steady(ops, inhom)[:, 1, 0]


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    rhos: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self) -> Iterator[tuple[float, DensityMatrix]]:
        for t, rho in zip(self.times, self.rhos):
            yield float(t), DensityMatrix(rho)

    @property
    def final(self) -> DensityMatrix:
        return DensityMatrix(self.rhos[-1])


def _rhs_factory(atom: AtomSystem, drive: DriveConfig):
    """Right-hand side for vec(rho); time-independent when there is no beat."""
    if drive.omega_s == 0.0 or drive.delta_beat == 0.0:
        op = build_liouvillian(atom, drive, drive.phi_s)
        sup, inhom = op.superop, op.inhomogeneous
        return lambda t, y: sup @ y + inhom

    static = build_liouvillian(atom, drive.replace(omega_s=0.0))
    up = np.zeros((N_LEVELS, N_LEVELS), complex)
    up[2, 3] = 0.5 * drive.omega_s
    lower = up.conj().T
    sup_up = _commutator_superop(up)
    sup_down = _commutator_superop(lower)
    sup0, inhom = static.superop, static.inhomogeneous

    def rhs(t, y):
        rot = np.exp(-1j * drive.signal_phase(t))
        return sup0 @ y + inhom + rot * (sup_up @ y) + np.conj(rot) * (sup_down @ y)

    return rhs


def evolve(atom: AtomSystem, drive: DriveConfig, rho0: DensityMatrix, t_end: float,
           dt_max: float = np.inf, *, atol: float = 1e-10, rtol: float = 1e-8,
           t_eval=None, method: str = "DOP853") -> Trajectory:
    """Integrate the master equation from ``rho0`` over [0, t_end] seconds.

    The signal phase advances as 2*pi*delta_beat*t + phi_s. Trace is
    conserved exactly by the Runge-Kutta update when gamma_c = 0; collisional
    loss from |3> is not refilled during time evolution.
    """
    if not t_end > 0:
        raise ValueError(f"t_end must be > 0, got {t_end!r}")
    rhs = _rhs_factory(atom, drive)
    y0 = np.asarray(rho0.rho, complex).ravel()
    sol = solve_ivp(rhs, (0.0, t_end), y0, method=method, atol=atol, rtol=rtol,
                    max_step=dt_max, t_eval=t_eval)
    if sol.status != 0:
        last = float(sol.t[-1]) if sol.t.size else 0.0
        raise IntegrationError(f"integration failed at t={last:.6g} s: {sol.message}", last_time=last)
    rhos = sol.y.T.reshape(-1, N_LEVELS, N_LEVELS)
    return Trajectory(sol.t, rhos)


def relaxation_gap(atom: AtomSystem, drive: DriveConfig, phase: float = 0.0) -> float:
    """Slowest nonzero decay rate of the generator (1/s)."""
    op = build_liouvillian(atom, drive, phase)
    rates = np.sort(-np.linalg.eigvals(op.superop).real)
    nonzero = rates[rates > 1e-9 * rates[-1]]
    return float(nonzero[0])


def settling_time(atom: AtomSystem, drive: DriveConfig, epsilon: float,
                  horizon: float = 1e-3, *, atol: float = 1e-10, rtol: float = 1e-8) -> float:
    """First time the distance to steady state drops below ``epsilon`` of its start.

    Starts from the ground state; distance is the Frobenius norm.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon!r}")
    target = steady_state(atom, drive, drive.phi_s).rho.ravel()
    y0 = DensityMatrix.ground().rho.ravel().astype(complex)
    d0 = np.linalg.norm(y0 - target)
    if epsilon == 1.0 or d0 == 0.0:
        return 0.0
    rhs = _rhs_factory(atom, drive)

    def reached(t, y):
        return np.linalg.norm(y - target) - epsilon * d0

    reached.terminal = True
    reached.direction = -1
    sol = solve_ivp(rhs, (0.0, horizon), y0, method="DOP853", atol=atol, rtol=rtol, events=reached)
    if sol.status == -1:
        raise IntegrationError(f"integration failed: {sol.message}", last_time=float(sol.t[-1]))
    if not sol.t_events[0].size:
        raise SettlingTimeout(
            f"distance did not fall below {epsilon:g} of its initial value within {horizon:g} s",
            horizon=horizon,
        )
    return float(sol.t_events[0][0])
