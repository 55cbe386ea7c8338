import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_graph
from qpe.graphcore import Graph, complete_graph, path_graph
from qpe.isingcf import IsingModel, PulseSchedule
from qpe.simulator import (
    State,
    apply_y_pulse,
    correlation_sim,
    energy_table,
    evolve_layers,
    expect_n,
    expect_nn,
    ising_phase,
    max_qubits,
    prepare_pulse_state,
    xy_subspace_evolve,
)
from qpe.walks import ResourceLimitError, cqrw1
from qpe.numerics import propagate, sym_eig


def random_state(rng, n):
    amp = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return State(n, amp / np.linalg.norm(amp))


def test_prepare_examples():
    theta = 0.41
    assert np.allclose(prepare_pulse_state(1, theta).amplitudes, [np.cos(theta), np.sin(theta)])
    s = prepare_pulse_state(4, 0.0).amplitudes
    assert s[0] == 1 and not s[1:].any()
    assert np.allclose(prepare_pulse_state(2, np.pi / 4).amplitudes, 0.5)


def test_prepare_amplitudes_follow_popcount():
    theta, n = 0.3, 5
    amp = prepare_pulse_state(n, theta).amplitudes
    for idx in range(1 << n):
        k = bin(idx).count("1")
        assert np.isclose(amp[idx], np.cos(theta) ** (n - k) * np.sin(theta) ** k)


@pytest.mark.parametrize("theta", [0.0, 0.3, 1.2, -0.8])
def test_pulse_convention_matches_preparation(theta):
    s = apply_y_pulse(State.vacuum(4), theta)
    assert np.allclose(s.amplitudes, prepare_pulse_state(4, theta).amplitudes, atol=1e-12)


def test_pulse_on_single_qubits():
    a = 0.7
    one = State(1, np.array([0, 1], dtype=complex))
    assert np.allclose(apply_y_pulse(one, a).amplitudes, [-np.sin(a), np.cos(a)])
    assert np.allclose(apply_y_pulse(State.vacuum(3), 0.0).amplitudes, State.vacuum(3).amplitudes)


@settings(deadline=None)
@given(st.integers(1, 6), st.floats(-3, 3), st.integers(0, 2**31 - 1))
def test_pulse_inverse_and_norm(n, angle, seed):
    s = random_state(np.random.default_rng(seed), n)
    out = apply_y_pulse(s, angle)
    assert abs(out.norm() - 1) < 1e-10
    assert np.allclose(apply_y_pulse(out, -angle).amplitudes, s.amplitudes, atol=1e-10)


def test_energy_table_examples():
    g = complete_graph(2)
    e = energy_table(IsingModel(np.array([1.0, 2.0]), np.array([[0, 3.0], [3.0, 0]])))
    assert e.tolist() == [0.0, 1.0, 2.0, 6.0]
    assert energy_table(IsingModel.uniform(Graph.empty(1))).tolist() == [0.0, 1.0]


def test_energy_table_brute_force(rng):
    g = random_graph(rng, 6)
    m = IsingModel(rng.normal(size=6), g.adjacency * 1.5)
    e = energy_table(m)
    for idx in range(64):
        b = (idx >> np.arange(6)) & 1
        assert np.isclose(e[idx], b @ np.triu(m.J) @ b + m.h @ b)


def test_ising_phase(rng):
    s = random_state(rng, 3)
    e = np.arange(8, dtype=float)
    assert np.allclose(ising_phase(s, e, 0.0).amplitudes, s.amplitudes)
    out = ising_phase(s, e, 1.3)
    assert np.allclose(np.abs(out.amplitudes), np.abs(s.amplitudes))
    single = ising_phase(State(1, np.array([1, 1]) / np.sqrt(2)), np.array([0.0, 1.0]), 0.5)
    assert np.allclose(single.amplitudes, np.array([1, np.exp(-0.5j)]) / np.sqrt(2))
    with pytest.raises(ValueError):
        ising_phase(s, np.zeros(4), 1.0)


def test_single_layer_identity_at_zero(rng):
    g = random_graph(rng, 5)
    for theta in (0.2, 0.9, 2.0):
        s = evolve_layers(g, IsingModel.uniform(g), PulseSchedule.single(theta, 0.0))
        assert np.allclose(s.amplitudes, State.vacuum(5).amplitudes, atol=1e-10)


@pytest.mark.parametrize("theta,t", [(0.5, 1.0), (1.0, 2.7)])
def test_single_qubit_layer(theta, t):
    g = Graph.empty(1)
    s = evolve_layers(g, IsingModel.uniform(g), PulseSchedule.single(theta, t))
    expected = 2 * np.sin(theta) ** 2 * np.cos(theta) ** 2 * (1 - np.cos(t))
    assert np.isclose(expect_n(s, 0), expected)


def test_generic_schedule_reduces_to_symmetric(rng):
    g = random_graph(rng, 4)
    m = IsingModel.uniform(g)
    a = evolve_layers(g, m, PulseSchedule((0.4, -0.4), (1.1,)))
    b = evolve_layers(g, m, PulseSchedule.single(0.4, 1.1))
    assert np.allclose(a.amplitudes, b.amplitudes)
    two = evolve_layers(g, m, PulseSchedule((0.4, 0.9), (1.1, 0.3)))
    assert abs(two.norm() - 1) < 1e-10


def test_expectations():
    vac = State.vacuum(3)
    assert expect_n(vac, 1) == 0 and expect_nn(vac, 0, 2) == 0
    uni = State(2, np.full(4, 0.5, dtype=complex))
    assert np.isclose(expect_n(uni, 0), 0.5) and np.isclose(expect_nn(uni, 0, 1), 0.25)
    assert expect_nn(uni, 1, 1) == expect_n(uni, 1)
    with pytest.raises(IndexError):
        expect_n(uni, 2)


def test_correlation_sim_zero_at_t0(rng):
    g = random_graph(rng, 5)
    c = correlation_sim(g, IsingModel.uniform(g), PulseSchedule.single(0.7, 0.0))
    assert np.allclose(c, 0, atol=1e-12)


def test_xy_subspace_single_particle_is_cqrw1(rng):
    g = random_graph(rng, 6)
    for i in range(6):
        init = np.zeros(6)
        init[i] = 1
        amp = xy_subspace_evolve(g, 1, init, 0.9)
        assert np.allclose(np.abs(amp) ** 2, cqrw1(g, [0.9])[0][:, i])


def test_xy_subspace_examples():
    k3 = complete_graph(3)
    init = np.array([1, 0, 0], dtype=complex)
    assert np.allclose(xy_subspace_evolve(k3, 2, init, 0.0), init)
    out = xy_subspace_evolve(k3, 2, init, 0.6)
    assert np.allclose(out, propagate(sym_eig(k3.adjacency), 0.6, init))
    assert abs(np.linalg.norm(out) - 1) < 1e-10
    with pytest.raises(ValueError):
        xy_subspace_evolve(k3, 2, np.ones(4), 0.1)


def test_qubit_guard(monkeypatch):
    assert max_qubits() == 24
    with pytest.raises(ResourceLimitError):
        prepare_pulse_state(25, 0.1)
    monkeypatch.setenv("QPE_MAX_QUBITS", "3")
    with pytest.raises(ResourceLimitError):
        evolve_layers(path_graph(4), IsingModel.uniform(path_graph(4)), PulseSchedule.single(0.1, 1.0))
    monkeypatch.setenv("QPE_MAX_QUBITS", "zero")
    with pytest.raises(ValueError):
        max_qubits()
