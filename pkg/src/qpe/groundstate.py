"""Ground states of the detuned Ising cost, their correlations, and ladder graphs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphcore import Graph
from .numerics import sym_eig
from .walks import ResourceLimitError

MAX_GROUND_NODES = 30


@dataclass(frozen=True)
class GroundStateManifold:
    """Minimizers of ``E(b) = sum_{(u,v) in E} b_u b_v - delta sum_v b_v``.

    ``configs`` holds one 0/1 row per ground configuration, rows in
    lexicographic order.
    """

    n: int
    delta: float
    configs: np.ndarray
    energy: float

    def __len__(self) -> int:
        return self.configs.shape[0]

    def bitstrings(self) -> list[str]:
        return ["".join(map(str, row)) for row in self.configs.tolist()]


def ising_energy(g: Graph, b, delta: float) -> float:
    b = np.asarray(b, dtype=np.int64)
    a = g.adjacency.astype(np.int64)
    return float(b @ a @ b) / 2 - delta * float(b.sum())


def _maximum_independent_sets(g: Graph) -> list[int]:
    """All maximum independent sets as bitmasks (branch and bound)."""
    n = g.n
    nbr = [sum(1 << u for u in g.neighbors(v).tolist()) for v in range(n)]
    best = [0]
    found: list[int] = []

    def grow(chosen: int, size: int, cand: int) -> None:
        if cand == 0:
            if size > best[0]:
                best[0] = size
                found.clear()
            if size == best[0]:
                found.append(chosen)
            return
        if size + bin(cand).count("1") < best[0]:
            return
        v = (cand & -cand).bit_length() - 1
        rest = cand & ~(1 << v)
        grow(chosen | (1 << v), size + 1, rest & ~nbr[v])
        grow(chosen, size, rest)

    grow(0, 0, (1 << n) - 1)
    return found


def ising_ground_manifold(g: Graph, delta: float = 0.5) -> GroundStateManifold:
    """For ``0 < delta < 1`` the ground configurations are the maximum independent sets."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if g.n > MAX_GROUND_NODES:
        raise ResourceLimitError(f"{g.n} nodes exceed the ground-state guard of {MAX_GROUND_NODES}")
    masks = _maximum_independent_sets(g)
    configs = np.array([[(mask >> v) & 1 for v in range(g.n)] for mask in masks], dtype=np.uint8)
    configs = configs[np.lexsort(configs.T[::-1])]
    configs.setflags(write=False)
    size = int(configs[0].sum())
    return GroundStateManifold(g.n, float(delta), configs, -delta * size)


def gs_correlation(m: GroundStateManifold) -> np.ndarray:
    """``<Z_i Z_j>`` on the uniform superposition of ground configurations (``z = 1 - 2b``)."""
    if len(m) == 0:
        raise ValueError("empty ground-state manifold")
    z = 1.0 - 2.0 * m.configs.astype(np.float64)
    return z.T @ z / len(m)


def gs_positional_encoding(c: np.ndarray, m: int) -> np.ndarray:
    """Top-``m`` eigenvectors of ``c`` (descending eigenvalue), first nonzero entry positive."""
    c = np.asarray(c, dtype=np.float64)
    n = c.shape[0]
    if not 1 <= m <= n:
        raise ValueError(f"m must be in [1, {n}], got {m}")
    d = sym_eig(c)
    vecs = np.array(d.eigenvectors[:, ::-1][:, :m])
    for j in range(m):
        nz = np.flatnonzero(np.abs(vecs[:, j]) > 1e-12)
        if nz.size and vecs[nz[0], j] < 0:
            vecs[:, j] = -vecs[:, j]
    return vecs


def ladder_graph(kind: int, length: int) -> Graph:
    """Ladder with rails ``0..R-1`` (top) and ``R..2R-1`` (bottom) and rungs ``(i, R+i)``.

    A crossing at segment ``i`` adds the diagonal ``(i, R+i+1)``; all crossings
    share this orientation.

    * kind 0: ``length`` rungs, no crossings (2 ground states).
    * kind 1: ``length >= 2`` rungs, crossings on segments ``0, 2, 4, ...``,
      i.e. separated by an odd number of rungs (1 ground state).
    * kind 2: odd ``length >= 7``; ``length - 2`` rungs with a crossing on the
      first and the last segment, each counted as one unit of length
      (``length`` ground states).
    """
    if kind == 0:
        if length < 1:
            raise ValueError("kind-0 ladder needs length >= 1")
        rungs, crossings = length, []
    elif kind == 1:
        if length < 2:
            raise ValueError("kind-1 ladder needs length >= 2")
        rungs, crossings = length, list(range(0, length - 1, 2))
    elif kind == 2:
        if length < 7 or length % 2 == 0:
            raise ValueError("kind-2 ladder needs an odd length >= 7")
        rungs = length - 2
        crossings = [0, rungs - 2]
    else:
        raise ValueError(f"ladder kind must be 0, 1 or 2, got {kind}")
    r = rungs
    edges = [(i, r + i) for i in range(r)]
    edges += [(i, i + 1) for i in range(r - 1)]
    edges += [(r + i, r + i + 1) for i in range(r - 1)]
    edges += [(i, r + i + 1) for i in crossings]
    return Graph.from_edges(2 * r, edges)
