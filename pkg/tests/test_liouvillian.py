import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from rydhet import AtomSystem, DensityMatrix, DriveConfig, NumericalError, SettlingTimeout
from rydhet.errors import IntegrationError
from rydhet.liouvillian import (
    build_hamiltonian,
    build_liouvillian,
    build_relaxation,
    evolve,
    relaxation_gap,
    settling_time,
    steady_state,
    steady_states,
)

from conftest import MHZ

rates = st.floats(0.0, 1.0)
rabi = st.floats(0.2, 10.0)
detuning = st.floats(-10.0, 10.0)


@st.composite
def configs(draw, collisions=True):
    atom = AtomSystem(
        gamma2=draw(st.floats(0.5, 10.0)) * MHZ,
        gamma3=draw(rates) * MHZ,
        gamma4=draw(rates) * MHZ,
        gamma_c=(draw(rates) * MHZ) if collisions else 0.0,
        gamma_t=draw(st.floats(0.0, 0.5)) * MHZ,
    )
    drive = DriveConfig(
        omega_p=draw(rabi) * MHZ, omega_c=draw(rabi) * MHZ, omega_L=draw(rabi) * MHZ,
        omega_s=draw(st.floats(0.0, 1.0)) * MHZ,
        delta_p=draw(detuning) * MHZ, delta_c=draw(detuning) * MHZ, delta_L=draw(detuning) * MHZ,
    )
    return atom, drive, draw(st.floats(0.0, 2 * np.pi))


def test_hamiltonian_layout():
    d = DriveConfig(omega_p=2.0, omega_c=4.0, omega_L=6.0, omega_s=1.0,
                    delta_p=1.0, delta_c=10.0, delta_L=100.0)
    h = build_hamiltonian(d, phase=np.pi / 2)
    assert np.allclose(np.diag(h).real, [0.0, 1.0, 11.0, 111.0])
    assert h[0, 1] == h[1, 0] == 1.0
    assert h[1, 2] == h[2, 1] == 2.0
    assert h[2, 3] == pytest.approx((6.0 - 1.0j) / 2)
    assert np.allclose(h, h.conj().T)


def test_relaxation_and_repopulation():
    atom = AtomSystem(gamma2=1.0, gamma3=2.0, gamma4=3.0, gamma_c=4.0, gamma_t=5.0)
    relax, repop = build_relaxation(atom)
    assert np.allclose(np.diag(relax).real, [5.0, 6.0, 11.0, 8.0])
    rho = np.diag([0.1, 0.2, 0.3, 0.4])
    lam = repop(rho)
    assert lam[0, 0] == pytest.approx(5.0 + 0.2 + 1.2)
    assert lam[1, 1] == pytest.approx(0.6)


def test_ground_state_density_matrix():
    g = DensityMatrix.ground()
    assert g.is_valid() and g.trace == 1.0
    assert np.array_equal(g.populations, [1, 0, 0, 0])
    with pytest.raises(ValueError):
        g.rho[0, 0] = 0.5


def test_density_matrix_violations():
    bad = DensityMatrix(np.diag([0.5, 0.6, 0.0, 0.0]))
    assert any("trace" in v for v in bad.violations())
    nonherm = np.zeros((4, 4), complex)
    nonherm[0, 0] = 1.0
    nonherm[1, 0] = 0.1
    assert any("Hermitian" in v for v in DensityMatrix(nonherm).violations())
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(3))


def test_liouvillian_preserves_trace_without_collisions():
    atom = AtomSystem.cesium(gamma_t=1e4)
    op = build_liouvillian(atom, DriveConfig.cesium(omega_L=4 * MHZ))
    rng = np.random.default_rng(3)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    assert abs(np.trace(op.apply(rho))) < 1e-6 * np.max(np.abs(op.superop))


@settings(max_examples=50, deadline=None, derandomize=True)
@given(configs())
def test_steady_state_matches_column_major_oracle(cfg):
    atom, drive, phase = cfg
    ours = steady_state(atom, drive, phase).rho
    h = oracles.hamiltonian(drive.omega_p, drive.omega_c, drive.omega_L, drive.delta_p,
                            drive.delta_c, drive.delta_L, drive.omega_s, phase)
    ref = oracles.steady(h, atom.gamma2, atom.gamma3, atom.gamma4, atom.gamma_c, atom.gamma_t)
    assert np.max(np.abs(ours - ref)) < 1e-10


def test_steady_states_batched_matches_single(cs_atom, drive4):
    d = drive4.replace(omega_s=0.3 * MHZ)
    phases = np.linspace(0, 2 * np.pi, 7)
    batch = steady_states(cs_atom, d, phases)
    for p, rho in zip(phases, batch):
        assert np.allclose(rho, steady_state(cs_atom, d, p).rho, atol=1e-14)


def test_frozen_resonant_coherence(cs_atom, drive4):
    # [DERIVED] column-major oracle, Cs rates including gamma3 and gamma4
    assert steady_state(cs_atom, drive4).rho21 == pytest.approx(-0.13408795005173105j, abs=1e-13)


def test_degenerate_configuration_raises():
    atom = AtomSystem(gamma2=0.0)
    with pytest.raises(NumericalError) as info:
        steady_state(atom, DriveConfig(omega_p=1.0, omega_c=1.0, omega_L=1.0))
    assert info.value.condition > 1e12


def test_evolve_ground_state_stays_put_without_drive_coupling():
    atom = AtomSystem.cesium()
    d = DriveConfig(omega_p=1e-3, omega_c=1.0, omega_L=1.0)
    traj = evolve(atom, d, DensityMatrix.ground(), 1e-6)
    assert traj.final.is_valid()
    assert traj.final.populations[0] == pytest.approx(1.0, abs=1e-9)
    assert len(traj) == len(list(traj))


def test_evolve_rejects_bad_horizon(cs_atom, drive4):
    with pytest.raises(ValueError):
        evolve(cs_atom, drive4, DensityMatrix.ground(), 0.0)


def test_evolve_integration_failure(cs_atom, drive4, monkeypatch):
    import types

    import rydhet.liouvillian as lv

    failed = types.SimpleNamespace(status=-1, t=np.array([0.0, 2e-7]), message="step size too small")
    monkeypatch.setattr(lv, "solve_ivp", lambda *a, **k: failed)
    with pytest.raises(IntegrationError) as info:
        evolve(cs_atom, drive4, DensityMatrix.ground(), 1e-6)
    assert info.value.last_time == 2e-7


def test_beat_evolution_tracks_quasi_static_state():
    # beat far slower than every relaxation rate: adiabatic following
    atom = AtomSystem(gamma2=5.2 * MHZ, gamma3=0.2 * MHZ, gamma4=0.2 * MHZ)
    d = DriveConfig(omega_p=5.7 * MHZ, omega_c=2.0 * MHZ, omega_L=4.0 * MHZ,
                    omega_s=0.4 * MHZ, delta_beat=100.0)
    t_end = 2.5e-3
    start = steady_state(atom, d, d.signal_phase(0.0))
    traj = evolve(atom, d, start, t_end, t_eval=[t_end])
    expected = steady_state(atom, d, d.signal_phase(t_end))
    assert np.max(np.abs(traj.final.rho - expected.rho)) < 1e-3


def test_relaxation_gap_positive(cs_atom, drive4):
    gap = relaxation_gap(cs_atom, drive4)
    assert 0 < gap < cs_atom.gamma2


def test_settling_time_is_first_crossing(cs_atom):
    d = DriveConfig.cesium()
    t = settling_time(cs_atom, d, 0.01)
    target = steady_state(cs_atom, d).rho
    d0 = np.linalg.norm(DensityMatrix.ground().rho - target)
    at = evolve(cs_atom, d, DensityMatrix.ground(), t, t_eval=[0.999 * t, t])
    dist = [np.linalg.norm(r - target) for r in at.rhos]
    assert dist[1] == pytest.approx(0.01 * d0, rel=1e-5)
    assert dist[0] > 0.01 * d0
    assert t == pytest.approx(8.013183367e-6, rel=1e-5)


def test_settling_time_edge_cases(cs_atom):
    d = DriveConfig.cesium()
    assert settling_time(cs_atom, d, 1.0) == 0.0
    with pytest.raises(ValueError):
        settling_time(cs_atom, d, 0.0)


def test_settling_timeout(cs_atom):
    with pytest.raises(SettlingTimeout) as info:
        settling_time(cs_atom, DriveConfig.cesium(), 1e-6, horizon=1e-7)
    assert info.value.horizon == 1e-7
