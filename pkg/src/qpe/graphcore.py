"""Graph data model, graph6 text format, relabelling and strongly regular graphs."""

from __future__ import annotations

from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

# graph6 short form covers n <= 62, the 4-byte long form n <= 258047.
_SHORT_MAX = 62
_LONG_MAX = 258047


class Graph:
    """Undirected simple graph stored as a dense, read-only 0/1 adjacency matrix.

    Instances are immutable and hashable, so they can be shared freely between
    workers and used as dictionary keys.
    """

    __slots__ = ("_adj", "_hash")

    def __init__(self, adjacency) -> None:
        adj = np.array(adjacency, dtype=np.int64, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
            raise ValueError(f"adjacency must be a non-empty square matrix, got shape {adj.shape}")
        if not np.isin(adj, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        if not (adj == adj.T).all():
            raise ValueError("adjacency must be symmetric")
        if np.diagonal(adj).any():
            raise ValueError("adjacency must have a zero diagonal (no self-loops)")
        adj = adj.astype(np.uint8)
        adj.setflags(write=False)
        self._adj = adj
        self._hash = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = np.zeros((n, n), dtype=np.uint8)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            adj[u, v] = adj[v, u] = 1
        return cls(adj)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(np.zeros((n, n), dtype=np.uint8))

    @property
    def adjacency(self) -> np.ndarray:
        return self._adj

    @property
    def n(self) -> int:
        return self._adj.shape[0]

    def degrees(self) -> np.ndarray:
        return self._adj.sum(axis=1, dtype=np.int64)

    def neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(self._adj[v])

    def edges(self) -> list[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        us, vs = np.nonzero(np.triu(self._adj, 1))
        return list(zip(us.tolist(), vs.tolist()))

    @property
    def num_edges(self) -> int:
        return int(self._adj.sum()) // 2

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and bool((self._adj == other._adj).all())

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self._adj.tobytes()))
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges})"


class SrgParams(NamedTuple):
    """Parameters ``srg(nu, k, lam, mu)`` of a strongly regular graph."""

    nu: int
    k: int
    lam: int
    mu: int

    def feasible(self) -> bool:
        return self.k * (self.k - self.lam - 1) == (self.nu - self.k - 1) * self.mu


class Graph6Error(ValueError):
    """Malformed graph6 record; ``offset`` is the 0-based byte position."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (byte {offset})")
        self.offset = offset


def _decode_char(line: str, pos: int) -> int:
    value = ord(line[pos]) - 63
    if not 0 <= value <= 63:
        raise Graph6Error(f"character {line[pos]!r} outside graph6 range", pos)
    return value


def parse_graph6(line: str) -> Graph:
    """Decode one graph6 record (an optional ``>>graph6<<`` prefix is accepted)."""
    line = line.strip()
    start = 0
    if line.startswith(">>graph6<<"):
        start = len(">>graph6<<")
    if len(line) <= start:
        raise Graph6Error("empty record", start)
    pos = start
    first = _decode_char(line, pos)
    if first < 63:
        n = first
        pos += 1
    else:
        if len(line) > pos + 1 and line[pos + 1] == "~":
            raise Graph6Error(f"8-byte size header unsupported (n > {_LONG_MAX})", pos + 1)
        if len(line) < pos + 4:
            raise Graph6Error("truncated long-form size header", len(line))
        n = 0
        for i in range(1, 4):
            n = (n << 6) | _decode_char(line, pos + i)
        pos += 4
    if n < 1:
        raise Graph6Error("graph6 record encodes zero nodes", start)
    nbits = n * (n - 1) // 2
    nchars = (nbits + 5) // 6
    payload = line[pos:]
    if len(payload) < nchars:
        raise Graph6Error(f"truncated payload: expected {nchars} characters, got {len(payload)}", len(line))
    if len(payload) > nchars:
        raise Graph6Error("trailing characters after payload", pos + nchars)
    values = np.array([_decode_char(line, pos + i) for i in range(nchars)], dtype=np.uint8)
    bits = np.unpackbits(values[:, None], axis=1)[:, 2:].ravel()[:nbits]
    # column-major order over the upper triangle: (0,1), (0,2), (1,2), (0,3), ...
    cols = np.repeat(np.arange(n), np.arange(n))
    rows = np.concatenate([np.arange(j) for j in range(n)]) if n > 1 else np.zeros(0, dtype=np.int64)
    adj = np.zeros((n, n), dtype=np.uint8)
    adj[rows, cols] = bits
    adj |= adj.T
    return Graph(adj)


def write_graph6(g: Graph) -> str:
    n = g.n
    if n > _LONG_MAX:
        raise ValueError(f"graph6 writer supports n <= {_LONG_MAX}")
    if n <= _SHORT_MAX:
        header = chr(63 + n)
    else:
        header = "~" + "".join(chr(63 + ((n >> s) & 63)) for s in (12, 6, 0))
    rows, cols = np.triu_indices(n, 1)
    order = np.lexsort((rows, cols))
    bits = g.adjacency[rows[order], cols[order]].astype(np.uint8)
    pad = (-len(bits)) % 6
    bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)]).reshape(-1, 6)
    values = bits @ (1 << np.arange(5, -1, -1))
    return header + "".join(chr(63 + int(x)) for x in values)


def read_graph6_lines(lines: Iterable[str]) -> list[Graph]:
    return [parse_graph6(line) for line in lines if line.strip()]


def permute(g: Graph, perm: Sequence[int]) -> Graph:
    """Relabel node ``u`` as ``perm[u]``."""
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (g.n,):
        raise ValueError(f"permutation length {perm.size} does not match n={g.n}")
    if not np.array_equal(np.sort(perm), np.arange(g.n)):
        raise ValueError("perm is not a bijection on 0..n-1")
    adj = np.empty_like(g.adjacency)
    adj[np.ix_(perm, perm)] = g.adjacency
    return Graph(adj)


def permute_matrix(m: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Conjugate a node-pair matrix by the relabelling used in :func:`permute`."""
    perm = np.asarray(perm, dtype=np.int64)
    out = np.empty_like(m)
    out[np.ix_(perm, perm)] = m
    return out


def common_neighbors(g: Graph, u: int, v: int) -> int:
    if u == v:
        raise ValueError("common_neighbors needs two distinct nodes")
    return int(np.dot(g.adjacency[u].astype(np.int64), g.adjacency[v]))


def validate_srg(g: Graph) -> Optional[SrgParams]:
    """Return the SRG parameters of ``g``, or ``None`` if it is not strongly regular.

    Complete and edgeless graphs are rejected: one of lambda/mu has no witness.
    """
    if g.n < 2:
        return None
    a = g.adjacency.astype(np.int64)
    deg = a.sum(axis=1)
    if (deg != deg[0]).any():
        return None
    sq = a @ a
    off = ~np.eye(g.n, dtype=bool)
    adjacent = sq[(a == 1) & off]
    non_adjacent = sq[(a == 0) & off]
    if adjacent.size == 0 or non_adjacent.size == 0:
        return None
    if (adjacent != adjacent[0]).any() or (non_adjacent != non_adjacent[0]).any():
        return None
    return SrgParams(g.n, int(deg[0]), int(adjacent[0]), int(non_adjacent[0]))


def srg_power_coeffs(p: SrgParams, m: int) -> tuple[int, int, int]:
    """Integers ``(alpha, beta, gamma)`` with ``A^m = alpha I + beta J + gamma A``.

    Uses ``A^2 = kI + lam A + mu (J - I - A)`` and ``AJ = kJ``.
    """
    if m < 0:
        raise ValueError("exponent must be non-negative")
    if m == 0:
        return (1, 0, 0)
    alpha, beta, gamma = 0, 0, 1
    for _ in range(m - 1):
        alpha, beta, gamma = (
            gamma * (p.k - p.mu),
            beta * p.k + gamma * p.mu,
            alpha + gamma * (p.lam - p.mu),
        )
    return alpha, beta, gamma


# -- small named graphs used by tests and fixtures --------------------------------


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(np.ones((n, n), dtype=np.uint8) - np.eye(n, dtype=np.uint8))


def star_graph(leaves: int, center: int = 0) -> Graph:
    n = leaves + 1
    return Graph.from_edges(n, [(center, v) for v in range(n) if v != center])


def disjoint_union(*graphs: Graph) -> Graph:
    n = sum(g.n for g in graphs)
    adj = np.zeros((n, n), dtype=np.uint8)
    offset = 0
    for g in graphs:
        adj[offset:offset + g.n, offset:offset + g.n] = g.adjacency
        offset += g.n
    return Graph(adj)


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def rook_graph(m: int = 4) -> Graph:
    """Line graph of K_{m,m}: cells of an m x m board sharing a row or column."""
    cells = [(r, c) for r in range(m) for c in range(m)]
    edges = [
        (i, j)
        for i, (r, c) in enumerate(cells)
        for j, (s, d) in enumerate(cells)
        if i < j and (r == s or c == d)
    ]
    return Graph.from_edges(m * m, edges)


def shrikhande_graph() -> Graph:
    """Cayley graph of Z4 x Z4 with connection set {±(1,0), ±(0,1), ±(1,1)}."""
    steps = {(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)}
    cells = [(r, c) for r in range(4) for c in range(4)]
    edges = [
        (i, j)
        for i, (r, c) in enumerate(cells)
        for j, (s, d) in enumerate(cells)
        if i < j and ((s - r) % 4, (d - c) % 4) in steps
    ]
    return Graph.from_edges(16, edges)
