"""Exact statevector simulation of pulse / Ising-phase schedules.

Basis index bit ``v`` (little-endian) is the occupation of node ``v``.
The single-qubit pulse of angle ``a`` maps ``|0> -> cos a|0> + sin a|1>`` and
``|1> -> cos a|1> - sin a|0>``, so that a pulse applied to the vacuum
reproduces :func:`prepare_pulse_state`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import expm_multiply

from .graphcore import Graph
from .isingcf import IsingModel, PulseSchedule
from .numerics import propagate, sym_eig
from .walks import MAX_DENSE_OCCUPATION_STATES, ResourceLimitError, occupation_adjacency

DEFAULT_MAX_QUBITS = 24


def max_qubits() -> int:
    """Qubit guard; ``QPE_MAX_QUBITS`` overrides the default at the caller's risk."""
    raw = os.environ.get("QPE_MAX_QUBITS")
    if raw is None:
        return DEFAULT_MAX_QUBITS
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"QPE_MAX_QUBITS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError("QPE_MAX_QUBITS must be positive")
    return value


def _check_qubits(n: int) -> None:
    if n < 1:
        raise ValueError("need at least one qubit")
    limit = max_qubits()
    if n > limit:
        raise ResourceLimitError(f"{n} qubits exceed the simulator guard of {limit}")


@dataclass(frozen=True)
class State:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError(f"expected {1 << self.n_qubits} amplitudes, got {self.amplitudes.shape}")

    @classmethod
    def vacuum(cls, n: int) -> "State":
        _check_qubits(n)
        amp = np.zeros(1 << n, dtype=np.complex128)
        amp[0] = 1.0
        return cls(n, amp)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def prepare_pulse_state(n: int, theta: float) -> State:
    """``cos(theta)^(n - n_s) sin(theta)^n_s`` on every bitstring ``s``."""
    _check_qubits(n)
    c, s = np.cos(theta), np.sin(theta)
    amp = np.ones(1, dtype=np.complex128)
    for _ in range(n):
        amp = np.concatenate([amp * c, amp * s])
    return State(n, amp)


def energy_table(m: IsingModel) -> np.ndarray:
    """``E_s = sum_{u<v} J_uv s_u s_v + sum_v h_v s_v`` for every basis index."""
    n = m.n
    _check_qubits(n)
    e = np.zeros(1)
    for v in range(n):
        # coupling of the new bit v to the lower bits, built by doubling
        lin = np.zeros(1)
        for u in range(v):
            lin = np.concatenate([lin, lin + m.J[u, v]])
        e = np.concatenate([e, e + m.h[v] + lin])
    return e


def ising_phase(s: State, e: np.ndarray, t: float) -> State:
    if e.shape != s.amplitudes.shape:
        raise ValueError("energy table does not match the state dimension")
    return State(s.n_qubits, s.amplitudes * np.exp(-1j * e * t))


def apply_y_pulse(s: State, angle: float) -> State:
    """Rotate every qubit by ``[[cos a, -sin a], [sin a, cos a]]`` in the (|0>, |1>) basis."""
    n = s.n_qubits
    c, sn = np.cos(angle), np.sin(angle)
    rot = np.array([[c, -sn], [sn, c]])
    psi = s.amplitudes.reshape((2,) * n)
    # C-order reshape: axis n-1-v holds bit v
    for axis in range(n):
        psi = np.moveaxis(np.tensordot(rot, psi, axes=([1], [axis])), 0, axis)
    return State(n, np.ascontiguousarray(psi).reshape(-1))


def evolve_layers(g: Graph, m: IsingModel, sched: PulseSchedule) -> State:
    """Run a pulse schedule from the vacuum.

    Symmetric schedules (``len(theta) == p``) apply ``pulse(th_k), phases(t_k),
    pulse(-th_k)`` per layer, with ``-phi`` replacing the last closing angle when
    ``phi`` is set. Generic schedules (``len(theta) == p + 1``) apply
    ``pulse(th_0)`` and then ``phases(t_k), pulse(th_k)`` for ``k = 1..p``.
    """
    m.check(g)
    state = State.vacuum(g.n)
    e = energy_table(m)
    for angle_in, t, angle_out in sched.steps():
        if angle_in is not None:
            state = apply_y_pulse(state, angle_in)
        state = ising_phase(state, e, t)
        state = apply_y_pulse(state, angle_out)
    return state


def _bit(n_qubits: int, v: int) -> np.ndarray:
    if not 0 <= v < n_qubits:
        raise IndexError(f"node {v} out of range for {n_qubits} qubits")
    return ((np.arange(1 << n_qubits) >> v) & 1).astype(bool)


def expect_n(s: State, v: int) -> float:
    return float(s.probabilities()[_bit(s.n_qubits, v)].sum())


def expect_nn(s: State, u: int, v: int) -> float:
    mask = _bit(s.n_qubits, u) & _bit(s.n_qubits, v)
    return float(s.probabilities()[mask].sum())


def occupations(s: State) -> np.ndarray:
    """Vector of ``<n_v>`` for every node."""
    return np.array([expect_n(s, v) for v in range(s.n_qubits)])


def pair_occupations(s: State) -> np.ndarray:
    """Matrix of ``<n_u n_v>``; the diagonal holds ``<n_v>``."""
    n = s.n_qubits
    p = s.probabilities()
    out = np.zeros((n, n))
    chunk = 1 << 16
    for start in range(0, p.size, chunk):
        idx = np.arange(start, min(start + chunk, p.size))
        bits = ((idx[:, None] >> np.arange(n)) & 1).astype(np.float64)
        out += bits.T @ (p[idx, None] * bits)
    return out


def correlation_sim(g: Graph, m: IsingModel, sched: PulseSchedule) -> np.ndarray:
    """``<n_u n_v> - <n_u><n_v>`` on the evolved state."""
    s = evolve_layers(g, m, sched)
    nn = pair_occupations(s)
    occ = np.diagonal(nn).copy()
    c = nn - np.outer(occ, occ)
    return (c + c.T) / 2


def xy_subspace_evolve(g: Graph, k: int, init, t: float) -> np.ndarray:
    """Evolve a k-particle amplitude vector by the occupation-graph adjacency."""
    h, basis = occupation_adjacency(g, k)
    init = np.asarray(init, dtype=np.complex128)
    if init.shape != (len(basis),):
        raise ValueError(f"init must have length C({g.n},{k}) = {len(basis)}")
    if len(basis) > MAX_DENSE_OCCUPATION_STATES:
        return expm_multiply(-1j * t * h.astype(np.complex128), init)
    return propagate(sym_eig(h.toarray()), t, init)
