"""Closed-form observables of the single-layer pulse / Ising / inverse-pulse scheme.

The state is ``U = R(-theta) exp(-i H t) R(theta)`` applied to the vacuum, where
``R`` rotates every qubit (``|0> -> cos|0> + sin|1>``) and
``H = sum_{u<v} J_uv n_u n_v + sum_v h_v n_v``. With ``c = cos theta`` and
``s = sin theta`` define per node

    rho_v = exp(i h_v t) prod_{u != v} (c^2 + s^2 exp(i J_vu t))

which drives every formula below.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .graphcore import Graph

PAIR_TOL = 1e-9


@dataclass(frozen=True)
class IsingModel:
    h: np.ndarray
    J: np.ndarray

    def __post_init__(self) -> None:
        h = np.asarray(self.h, dtype=np.float64)
        J = np.asarray(self.J, dtype=np.float64)
        if h.ndim != 1 or J.shape != (h.size, h.size):
            raise ValueError(f"h of length {h.size} needs a matching square J, got {J.shape}")
        if not (np.isfinite(h).all() and np.isfinite(J).all()):
            raise ValueError("model has non-finite entries")
        if np.abs(J - J.T).max(initial=0.0) > 1e-12:
            raise ValueError("J must be symmetric")
        if np.diagonal(J).any():
            raise ValueError("J must have a zero diagonal")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "J", J)

    @property
    def n(self) -> int:
        return self.h.size

    @classmethod
    def uniform(cls, g: Graph, field_strength: float = 1.0) -> "IsingModel":
        """``h = field_strength`` on every node and ``J = A``."""
        return cls(np.full(g.n, float(field_strength)), g.adjacency.astype(np.float64))

    @classmethod
    def density(cls, g: Graph) -> "IsingModel":
        """Density-density interaction only: ``h = 0``, ``J = A``."""
        return cls.uniform(g, 0.0)

    def check(self, g: Graph) -> None:
        if self.n != g.n:
            raise ValueError(f"model has {self.n} nodes, graph has {g.n}")

    def permuted(self, perm: Sequence[int]) -> "IsingModel":
        perm = np.asarray(perm)
        h = np.empty_like(self.h)
        h[perm] = self.h
        J = np.empty_like(self.J)
        J[np.ix_(perm, perm)] = self.J
        return IsingModel(h, J)


@dataclass(frozen=True)
class PulseSchedule:
    """Mixing angles and Ising durations.

    ``len(theta) == p`` is the symmetric scheme (each layer closes with the
    inverse of its opening pulse, or with ``-phi`` on the last layer when
    ``phi`` is given); ``len(theta) == p + 1`` is a generic alternation
    starting and ending with a pulse.
    """

    theta: tuple[float, ...]
    times: tuple[float, ...]
    phi: Optional[float] = None

    def __post_init__(self) -> None:
        theta = tuple(float(x) for x in np.atleast_1d(self.theta))
        times = tuple(float(x) for x in np.atleast_1d(self.times))
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "times", times)
        if not times:
            raise ValueError("schedule needs at least one layer")
        if len(theta) not in (len(times), len(times) + 1):
            raise ValueError(f"{len(theta)} angles do not fit {len(times)} layers")
        if self.phi is not None and self.generic:
            raise ValueError("phi only applies to the symmetric scheme")
        if not np.isfinite(theta + times + ((self.phi,) if self.phi is not None else ())).all():
            raise ValueError("schedule values must be finite")

    @classmethod
    def single(cls, theta: float, t: float, phi: Optional[float] = None) -> "PulseSchedule":
        return cls((theta,), (t,), phi)

    @property
    def p(self) -> int:
        return len(self.times)

    @property
    def generic(self) -> bool:
        return len(self.theta) == len(self.times) + 1

    def steps(self) -> Iterator[tuple[Optional[float], float, float]]:
        """``(opening angle or None, duration, closing angle)`` per layer."""
        if self.generic:
            yield self.theta[0], self.times[0], self.theta[1]
            for k in range(1, self.p):
                yield None, self.times[k], self.theta[k + 1]
            return
        for k, (th, t) in enumerate(zip(self.theta, self.times)):
            closing = -th
            if k == self.p - 1 and self.phi is not None:
                closing = -self.phi
            yield th, t, closing

    def to_dict(self) -> dict:
        return {"theta": list(self.theta), "times": list(self.times), "phi": self.phi}


def _factors(m: IsingModel, theta: float, t: float) -> np.ndarray:
    """``F[v, u] = c^2 + s^2 exp(i J_vu t)`` with ``F[v, v] = 1``."""
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    f = c2 + s2 * np.exp(1j * m.J * t)
    np.fill_diagonal(f, 1.0)
    return f


def _rho(m: IsingModel, theta: float, t: float) -> np.ndarray:
    return np.exp(1j * m.h * t) * _factors(m, theta, t).prod(axis=1)


def total_occupation_density(g: Graph, theta: float, t: float) -> float:
    """Total occupation for ``h = 0, J = A``; depends on ``g`` only via its degree histogram."""
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    base = c2 + s2 * np.exp(1j * t)
    hist = Counter(g.degrees().tolist())
    total = sum(count * (1.0 - base ** kappa).real for kappa, count in hist.items())
    return float(2 * s2 * c2 * total)


def local_occupation(g: Graph, m: IsingModel, theta: float, t: float) -> np.ndarray:
    """``<n_v> = 2 s^2 c^2 Re(1 - rho_v)``."""
    m.check(g)
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    return 2 * s2 * c2 * (1.0 - _rho(m, theta, t).real)


def _pair_terms(m: IsingModel, theta: float, t: float):
    """Per-pair building blocks, as ``n x n`` complex matrices indexed ``[v1, v2]``.

    ``rt1[a, b] = exp(i h_a t) prod_{u != a, b} F[a, u]`` and
    ``pp[a, b] = prod_{u != a, b} (c^2 + s^2 exp(i (J_au + J_bu) t))``, similarly
    ``pm`` with ``J_au - J_bu``.
    """
    n = m.n
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    f = _factors(m, theta, t)
    rho = np.exp(1j * m.h * t) * f.prod(axis=1)
    excl = np.ones((n, n, n), dtype=bool)  # excl[a, b, u]: u not in {a, b}
    idx = np.arange(n)
    excl[idx, :, idx] = False
    excl[:, idx, idx] = False
    f3 = np.where(excl, f[:, None, :], 1.0)
    rt1 = np.exp(1j * m.h * t)[:, None] * f3.prod(axis=2)
    jsum = m.J[:, None, :] + m.J[None, :, :]
    jdiff = m.J[:, None, :] - m.J[None, :, :]
    pp = np.where(excl, c2 + s2 * np.exp(1j * jsum * t), 1.0).prod(axis=2)
    pm = np.where(excl, c2 + s2 * np.exp(1j * jdiff * t), 1.0).prod(axis=2)
    return rho, rt1, pp, pm


def _pair_occupation_matrix(m: IsingModel, theta: float, t: float) -> np.ndarray:
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    rho, rt1, pp, pm = _pair_terms(m, theta, t)
    h = m.h
    bond = 0.5 * (1.0 + np.exp(1j * m.J * t))
    val = (
        1.0
        - bond * (rt1 + rt1.T)
        + 0.5 * np.exp(1j * (h[:, None] + h[None, :] + m.J) * t) * pp
        + 0.5 * np.exp(1j * (h[:, None] - h[None, :]) * t) * pm
    )
    return 4 * s2 ** 2 * c2 ** 2 * val.real


def pair_occupation(g: Graph, m: IsingModel, theta: float, t: float, v1: int, v2: int) -> float:
    """``<n_v1 n_v2>`` for two distinct nodes."""
    m.check(g)
    if v1 == v2:
        raise ValueError("pair_occupation needs two distinct nodes")
    for v in (v1, v2):
        if not 0 <= v < g.n:
            raise IndexError(f"node {v} out of range")
    return float(_pair_occupation_matrix(m, theta, t)[v1, v2])


def correlation_closed_form(g: Graph, m: IsingModel, theta: float, t: float) -> np.ndarray:
    """Occupation covariance matrix; the diagonal is ``<n_v> - <n_v>^2``.

    Off-diagonal entries are assembled from differences such as
    ``rho_1 + rho_2 - (1 + e^{iJ_12 t})/2 (...)`` rather than by subtracting
    the two moments, which keeps them accurate when the covariance is small.
    """
    m.check(g)
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    rho, rt1, pp, pm = _pair_terms(m, theta, t)
    h = m.h
    bond = 0.5 * (1.0 + np.exp(1j * m.J * t))
    r1, r2 = rho[:, None], rho[None, :]
    val = (
        r1 + r2
        - bond * (rt1 + rt1.T)
        + 0.5 * (np.exp(1j * (h[:, None] + h[None, :] + m.J) * t) * pp - r1 * r2)
        + 0.5 * (np.exp(1j * (h[:, None] - h[None, :]) * t) * pm - r1 * np.conj(r2))
    )
    c = 4 * s2 ** 2 * c2 ** 2 * val.real
    occ = 2 * s2 * c2 * (1.0 - rho.real)
    c[np.diag_indices(g.n)] = occ - occ ** 2
    return (c + c.T) / 2


def local_occupation_two_angle(g: Graph, m: IsingModel, theta: float, phi: float, t: float) -> np.ndarray:
    """``<n_v>`` when the closing pulse uses angle ``phi`` instead of ``theta``.

    ``<n_v> = s_th^2 c_ph^2 + c_th^2 s_ph^2 - 2 s_th c_th s_ph c_ph Re(rho_v)``,
    which reduces to ``sin^2(theta - phi)`` at ``t = 0`` and to
    :func:`local_occupation` when ``phi == theta``.
    """
    m.check(g)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    rho = _rho(m, theta, t)
    return st ** 2 * cp ** 2 + ct ** 2 * sp ** 2 - 2 * st * ct * sp * cp * rho.real


def total_occupation_two_angle(g: Graph, theta: float, phi: float, t: float) -> float:
    """Total occupation for ``h = 0, J = A`` with distinct opening and closing angles."""
    return float(local_occupation_two_angle(g, IsingModel.density(g), theta, phi, t).sum())


@dataclass(frozen=True)
class TwoValueResult:
    ok: bool
    c_adj: float
    c_nonadj: float
    spread: float  # largest within-class max - min

    def __bool__(self) -> bool:
        return self.ok


def srg_two_value_decompose(c: np.ndarray, g: Graph, tol: float = PAIR_TOL) -> TwoValueResult:
    """Split off-diagonal entries of ``c`` into an edge value and a non-edge value.

    Succeeds when each class is constant to ``tol``; an empty class reports 0.
    """
    c = np.asarray(c, dtype=np.float64)
    if c.shape != (g.n, g.n):
        raise ValueError(f"matrix shape {c.shape} does not match n={g.n}")
    off = ~np.eye(g.n, dtype=bool)
    adj = g.adjacency.astype(bool)
    spreads, values = [], []
    for mask in (adj & off, ~adj & off):
        entries = c[mask]
        if entries.size == 0:
            spreads.append(0.0)
            values.append(0.0)
        else:
            spreads.append(float(entries.max() - entries.min()))
            values.append(float(entries.mean()))
    spread = max(spreads)
    return TwoValueResult(spread <= tol, values[0], values[1], spread)
