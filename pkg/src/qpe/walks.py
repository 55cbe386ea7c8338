"""Classical and quantum walk encodings on graphs.

Pair-indexed quantities (two-particle walks) are returned as symmetric
``n x n`` matrices with a zero diagonal so that every encoder yields a
``K x n x n`` tensor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .graphcore import Graph
from .numerics import projectors, propagate, propagator, sym_eig

MAX_OCCUPATION_STATES = 2_000_000
# dense occupation matrices above this size would not fit in memory
MAX_DENSE_OCCUPATION_STATES = 20_000


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured size guard."""


@dataclass(frozen=True)
class EncodingTensor:
    values: np.ndarray  # shape (K, n, n)
    label: str = ""

    def __post_init__(self) -> None:
        if self.values.ndim != 3 or self.values.shape[1] != self.values.shape[2]:
            raise ValueError(f"expected a K x n x n tensor, got {self.values.shape}")
        if not np.isfinite(self.values).all():
            raise ValueError("encoding has non-finite entries")

    @property
    def steps(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def __getitem__(self, k: int) -> np.ndarray:
        return self.values[k]


_VARIANTS = ("localized", "uniform_pairs", "uniform_edges", "all_localized")


@dataclass(frozen=True)
class InitSpec:
    """Initial state of a walk.

    ``all_localized`` is an ensemble: observables are averaged over every
    localized start. It is only meaningful for covariance encodings.
    """

    variant: str
    nodes: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown init variant {self.variant!r}; expected one of {_VARIANTS}")
        if self.variant == "localized":
            if len(self.nodes) not in (1, 2) or len(set(self.nodes)) != len(self.nodes):
                raise ValueError("localized init needs one node or two distinct nodes")
        elif self.nodes:
            raise ValueError(f"{self.variant} init takes no node indices")

    @classmethod
    def localized(cls, *nodes: int) -> "InitSpec":
        return cls("localized", tuple(int(v) for v in nodes))

    @classmethod
    def parse(cls, text: str) -> "InitSpec":
        """``uniform_edges``, ``uniform_pairs``, ``all_localized`` or ``localized:i,j``."""
        name, _, args = text.partition(":")
        nodes = tuple(int(x) for x in args.split(",") if x.strip()) if args else ()
        return cls(name.strip(), nodes)

    def __str__(self) -> str:
        if self.nodes:
            return f"{self.variant}:{','.join(map(str, self.nodes))}"
        return self.variant


UNIFORM_EDGES = InitSpec("uniform_edges")
ALL_LOCALIZED = InitSpec("all_localized")


def default_times(k: int) -> np.ndarray:
    """Deterministic grid ``t_j = j pi / K`` for ``j = 1..K``."""
    if k < 1:
        raise ValueError("need at least one time")
    return np.arange(1, k + 1) * np.pi / k


def random_times(k: int, seed: int) -> np.ndarray:
    """``K`` sorted times drawn uniformly from ``(0.1, pi]``."""
    rng = np.random.default_rng(seed)
    return np.sort(rng.uniform(0.1, np.pi, size=k))


def _random_walk_matrix(adj: np.ndarray) -> np.ndarray:
    adj = np.asarray(adj, dtype=np.float64)
    deg = adj.sum(axis=1)
    inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
    return inv[:, None] * adj


def rrwp(g: Graph, k: int) -> EncodingTensor:
    """Random-walk powers ``(D^-1 A)^j`` for ``j = 0..K-1``; isolated rows stay zero."""
    if k < 1:
        raise ValueError("K must be >= 1")
    m = _random_walk_matrix(g.adjacency)
    out = np.empty((k, g.n, g.n))
    out[0] = np.eye(g.n)
    for j in range(1, k):
        out[j] = out[j - 1] @ m
    return EncodingTensor(out, "rrwp")


def cqrw1(g: Graph, times: Sequence[float]) -> EncodingTensor:
    """Single-walker transition probabilities ``|<j| exp(-iAt) |i>|^2`` per time."""
    times = list(times)
    if not times:
        raise ValueError("times must be non-empty")
    d = sym_eig(g.adjacency)
    out = np.stack([np.abs(propagator(d, t)) ** 2 for t in times])
    return EncodingTensor(out, "cqrw1")


# -- occupation (k-particle) subspaces ----------------------------------------------


@dataclass(frozen=True)
class OccupationBasis:
    n: int
    k: int
    states: tuple[tuple[int, ...], ...]

    def index(self) -> dict[tuple[int, ...], int]:
        return {s: i for i, s in enumerate(self.states)}

    def __len__(self) -> int:
        return len(self.states)


def occupation_basis(n: int, k: int) -> OccupationBasis:
    if not 1 <= k <= 3:
        raise ValueError("particle number k must be 1, 2 or 3")
    if k > n:
        raise ValueError(f"k={k} exceeds node count {n}")
    size = comb(n, k)
    if size > MAX_OCCUPATION_STATES:
        raise ResourceLimitError(f"C({n},{k}) = {size} exceeds {MAX_OCCUPATION_STATES} occupation states")
    return OccupationBasis(n, k, tuple(itertools.combinations(range(n), k)))


def occupation_adjacency(g: Graph, k: int) -> tuple[sp.csr_matrix, OccupationBasis]:
    """Sparse XY hamiltonian restricted to ``k`` particles (hopping amplitude 1)."""
    basis = occupation_basis(g.n, k)
    index = basis.index()
    nbrs = [set(g.neighbors(v).tolist()) for v in range(g.n)]
    rows, cols = [], []
    for a, state in enumerate(basis.states):
        occupied = set(state)
        for v in state:
            for w in nbrs[v] - occupied:
                moved = tuple(sorted(occupied - {v} | {w}))
                rows.append(a)
                cols.append(index[moved])
    data = np.ones(len(rows), dtype=np.float64)
    h = sp.csr_matrix((data, (rows, cols)), shape=(len(basis), len(basis)))
    return h, basis


def occupation_graph(g: Graph, k: int) -> tuple[Graph, OccupationBasis]:
    """Graph on k-subsets; subsets are adjacent when one particle hops along an edge."""
    h, basis = occupation_adjacency(g, k)
    if len(basis) > MAX_DENSE_OCCUPATION_STATES:
        raise ResourceLimitError(
            f"{len(basis)} occupation states exceed the dense limit {MAX_DENSE_OCCUPATION_STATES}"
        )
    return Graph(h.toarray().astype(np.uint8)), basis


def _pair_vector(g: Graph, basis: OccupationBasis, init: InitSpec) -> np.ndarray:
    """Unnormalized non-negative weights of ``init`` on the pair basis."""
    if init.variant == "localized":
        if len(init.nodes) != 2:
            raise ValueError("two-particle walks need a localized init with two nodes")
        i, j = sorted(init.nodes)
        if not 0 <= i < j < g.n:
            raise ValueError(f"localized nodes {init.nodes} out of range for n={g.n}")
        v = np.zeros(len(basis))
        v[basis.index()[(i, j)]] = 1.0
        return v
    if init.variant == "uniform_pairs":
        return np.ones(len(basis))
    if init.variant == "uniform_edges":
        if g.num_edges == 0:
            raise ValueError("uniform_edges init needs at least one edge")
        return np.array([float(g.adjacency[i, j]) for i, j in basis.states])
    raise ValueError(f"init {init} is not a single state")


def _pairs_to_matrix(n: int, basis: OccupationBasis, values: np.ndarray) -> np.ndarray:
    out = np.zeros((n,) + values.shape[1:] + (n,)) if values.ndim > 1 else np.zeros((n, n))
    i, j = np.array(basis.states).T
    out[i, j] = values
    out[j, i] = values
    return out


def _two_particle_decomp(g: Graph):
    if g.n < 2:
        raise ValueError("two-particle walks need n >= 2")
    h, basis = occupation_adjacency(g, 2)
    if len(basis) > MAX_DENSE_OCCUPATION_STATES:
        raise ResourceLimitError(f"{len(basis)} pair states exceed the dense limit")
    return sym_eig(h.toarray()), basis


def cqrw2(g: Graph, times: Sequence[float], init: InitSpec = UNIFORM_EDGES) -> EncodingTensor:
    """Pair-outcome probabilities of a two-walker XY evolution, one slice per time."""
    times = list(times)
    if not times:
        raise ValueError("times must be non-empty")
    d, basis = _two_particle_decomp(g)
    psi = _pair_vector(g, basis, init)
    psi = psi / np.linalg.norm(psi)
    slices = []
    for t in times:
        amp = propagate(d, t, psi)
        slices.append(_pairs_to_matrix(g.n, basis, np.abs(amp) ** 2))
    return EncodingTensor(np.stack(slices), "cqrw2")


def qirw2(g: Graph, k: int, init: InitSpec = UNIFORM_EDGES) -> EncodingTensor:
    """Discrete two-walker encoding ``((D2)^-1 H2)^j psi`` for ``j = 0..K-1``.

    ``psi`` is the initial distribution normalized to unit sum.
    """
    if k < 1:
        raise ValueError("K must be >= 1")
    if g.n < 2:
        raise ValueError("two-particle walks need n >= 2")
    h, basis = occupation_adjacency(g, 2)
    psi = _pair_vector(g, basis, init)
    psi = psi / psi.sum()
    deg = np.asarray(h.sum(axis=1)).ravel()
    inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
    step = sp.diags(inv) @ h
    slices = [_pairs_to_matrix(g.n, basis, psi)]
    for _ in range(1, k):
        psi = step @ psi
        slices.append(_pairs_to_matrix(g.n, basis, psi))
    return EncodingTensor(np.stack(slices), "qirw2")


def _covariance_from_pair_probs(pair_probs: np.ndarray) -> np.ndarray:
    """Occupation covariance of a two-particle state from its pair-probability matrix."""
    occ = pair_probs.sum(axis=1)
    c = pair_probs - np.outer(occ, occ)
    c[np.diag_indices_from(c)] = occ - occ ** 2
    return c


def xy2_correlations(g: Graph, t: float = 1.0, init: InitSpec = UNIFORM_EDGES) -> np.ndarray:
    """Covariance ``<n_u n_v> - <n_u><n_v>`` after a two-walker XY evolution.

    With ``init = all_localized`` the covariance is averaged over the evolutions
    of every localized pair ``|ij>``; uniform initial states stay inside the
    span of the edge and non-edge indicators on strongly regular graphs and
    therefore carry no information beyond the SRG parameters.
    """
    d, basis = _two_particle_decomp(g)
    n = g.n
    if init.variant != "all_localized":
        psi = _pair_vector(g, basis, init)
        psi = psi / np.linalg.norm(psi)
        amp = propagator(d, t) @ psi
        return _covariance_from_pair_probs(_pairs_to_matrix(n, basis, np.abs(amp) ** 2))

    m = len(basis)
    probs = np.abs(propagator(d, t)) ** 2  # probs[a, b]: start b, outcome a
    i, j = np.array(basis.states).T
    incidence = np.zeros((n, m))
    incidence[i, np.arange(m)] = 1.0
    incidence[j, np.arange(m)] = 1.0
    occ = incidence @ probs  # occ[u, b] = <n_u> for start b
    mean_pairs = probs.mean(axis=1)
    c = _pairs_to_matrix(n, basis, mean_pairs) - occ @ occ.T / m
    mean_occ = occ.mean(axis=1)
    c[np.diag_indices(n)] = mean_occ - (occ ** 2).mean(axis=1)
    return c


def time_avg_transition(g: Graph) -> np.ndarray:
    """Long-time average of ``|<j| exp(-iAt) |i>|^2``: ``sum_lambda (P^lambda_ij)^2``."""
    ps = projectors(sym_eig(g.adjacency))
    return sum(p ** 2 for p in ps.projectors)


def localized_signature(g: Graph) -> np.ndarray:
    """Row ``i`` is the ascending-sorted row ``i`` of :func:`time_avg_transition`."""
    return np.sort(time_avg_transition(g), axis=1)


def signature_multiset(sig: np.ndarray, decimals: int = 9) -> list[tuple[float, ...]]:
    """Canonical, comparable form of a set of node signatures."""
    rounded = np.round(sig, decimals) + 0.0
    return sorted(tuple(row) for row in rounded.tolist())
