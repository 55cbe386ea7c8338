"""Build the vendored srg(25,12,5,6) and srg(26,10,3,4) fixture files.

One-time generator. The graphs are obtained from algebraic seeds (Paley(25),
Latin square graphs of order 5, disjointness graphs of Steiner triple systems
on 13 points), then closed under the
regular two-graph correspondence:

* an srg(26,10,3,4) switched to isolate a vertex and with that vertex removed
  is an srg(25,12,5,6);
* an srg(25,12,5,6) plus an isolated vertex, switched with respect to a
  10-set inducing a cubic subgraph whose outside vertices each see exactly
  6 of its members, is an srg(26,10,3,4).

Isomorphism classes are separated with nauty canonical labels (pynauty), which
is needed here only, never at runtime.  The known class counts are 15 and 10;
the script refuses to write anything else.

    python scripts/build_srg_fixtures.py
"""

from __future__ import annotations

import hashlib
import itertools
import sys
from pathlib import Path

import numpy as np
import pynauty

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from qpe.graphcore import Graph, validate_srg, write_graph6  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "src" / "qpe" / "data"
EXPECTED = {(25, 12, 5, 6): 15, (26, 10, 3, 4): 10}


def certificate(adj: np.ndarray) -> bytes:
    n = len(adj)
    g = pynauty.Graph(n, adjacency_dict={u: list(np.flatnonzero(adj[u])) for u in range(n)})
    return pynauty.certificate(g)


def paley25() -> np.ndarray:
    # GF(25) = GF(5)[x]/(x^2 - 2)
    elems = [(a, b) for a in range(5) for b in range(5)]
    squares = set()
    for a, b in elems:
        if (a, b) != (0, 0):
            squares.add(((a * a + 2 * b * b) % 5, (2 * a * b) % 5))
    adj = np.zeros((25, 25), dtype=np.uint8)
    for i, (a, b) in enumerate(elems):
        for j, (c, d) in enumerate(elems):
            if i != j and ((a - c) % 5, (b - d) % 5) in squares:
                adj[i, j] = 1
    return adj


def latin_square_graph(square: np.ndarray) -> np.ndarray:
    n = len(square)
    cells = [(r, c) for r in range(n) for c in range(n)]
    adj = np.zeros((n * n, n * n), dtype=np.uint8)
    for i, (r, c) in enumerate(cells):
        for j, (s, d) in enumerate(cells):
            if i != j and (r == s or c == d or square[r, c] == square[s, d]):
                adj[i, j] = 1
    return adj


def latin_squares_5():
    rows = list(itertools.permutations(range(5)))
    out = []

    def extend(partial):
        if len(partial) == 5:
            out.append(np.array(partial))
            return
        for row in rows:
            if all(row[c] != p[c] for p in partial for c in range(5)):
                extend(partial + [row])
                if len(out) > 400:
                    return

    extend([tuple(range(5))])
    return out


def steiner_triple_systems_13(limit: int, rng) -> list[list[tuple[int, int, int]]]:
    """Randomized backtracking over STS(13); both isomorphism classes show up quickly."""
    pairs = list(itertools.combinations(range(13), 2))
    out = []

    def rec(covered, blocks):
        if len(out) >= limit:
            return
        rest = [p for p in pairs if p not in covered]
        if not rest:
            out.append(list(blocks))
            return
        a, b = rest[0]
        cands = [
            c for c in range(13)
            if c not in (a, b)
            and tuple(sorted((a, c))) not in covered
            and tuple(sorted((b, c))) not in covered
        ]
        rng.shuffle(cands)
        for c in cands:
            block = tuple(sorted((a, b, c)))
            rec(covered | set(itertools.combinations(block, 2)), blocks + [block])
            if len(out) >= limit:
                return

    rec(frozenset(), [])
    return out


def disjoint_block_graph(blocks) -> np.ndarray:
    """Blocks adjacent when disjoint; for an STS(13) this is an srg(26,10,3,4)."""
    n = len(blocks)
    adj = np.zeros((n, n), dtype=np.uint8)
    for i in range(n):
        for j in range(n):
            if i != j and not set(blocks[i]) & set(blocks[j]):
                adj[i, j] = 1
    return adj


def descendants_of_26(adj26: np.ndarray):
    n = len(adj26)
    for v in range(n):
        s = adj26[v].astype(bool)
        sw = adj26.copy()
        outside = ~s
        sw[np.ix_(s, outside)] ^= 1
        sw[np.ix_(outside, s)] ^= 1
        keep = [u for u in range(n) if u != v]
        yield sw[np.ix_(keep, keep)]


def regular_lifts_of_25(adj25: np.ndarray):
    """10-sets S with cubic induced subgraph and 6 S-neighbours outside."""
    n = len(adj25)
    a = adj25.astype(np.int64)
    found = []

    def rec(v, chosen, inner):
        if len(chosen) == 10:
            mask = np.zeros(n, dtype=bool)
            mask[chosen] = True
            counts = a[:, mask].sum(axis=1)
            if (counts[mask] == 3).all() and (counts[~mask] == 6).all():
                found.append(mask)
            return
        if v == n or len(chosen) + (n - v) < 10:
            return
        deg_in = sum(a[v, u] for u in chosen)
        if deg_in <= 3 and all(inner[u] + a[u, v] <= 3 for u in chosen):
            for u in chosen:
                inner[u] += a[u, v]
            inner[v] = deg_in
            chosen.append(v)
            rec(v + 1, chosen, inner)
            chosen.pop()
            for u in chosen:
                inner[u] -= a[u, v]
        if sum(a[v, u] for u in chosen) <= 6:
            rec(v + 1, chosen, inner)

    rec(0, [], {u: 0 for u in range(n)})
    lifts = []
    for mask in found:
        m = np.concatenate([mask, [False]])
        sw = np.zeros((n + 1, n + 1), dtype=np.uint8)
        sw[:n, :n] = adj25
        sw[np.ix_(m, ~m)] ^= 1
        sw[np.ix_(~m, m)] ^= 1
        lifts.append(sw)
    return lifts


def main() -> int:
    rng = np.random.default_rng(20240611)
    classes = {key: {} for key in EXPECTED}

    def add(adj):
        params = validate_srg(Graph(adj))
        if params is None:
            return False
        key = (params.nu, params.k, params.lam, params.mu)
        if key not in classes:
            return False
        cert = certificate(adj)
        if cert in classes[key]:
            return False
        classes[key][cert] = adj.astype(np.uint8)
        return True

    add(paley25())
    for sq in latin_squares_5():
        add(latin_square_graph(sq))
    for blocks in steiner_triple_systems_13(200, rng):
        add(disjoint_block_graph(blocks))
    print("after seeds:", {k: len(v) for k, v in classes.items()})

    changed = True
    while changed:
        changed = False
        for adj in list(classes[(25, 12, 5, 6)].values()):
            changed |= add(1 - adj - np.eye(25, dtype=np.uint8))
            for lift in regular_lifts_of_25(adj):
                changed |= add(lift)
        for adj in list(classes[(26, 10, 3, 4)].values()):
            for d in descendants_of_26(adj):
                changed |= add(d)
        print("closure:", {k: len(v) for k, v in classes.items()})

    counts = {k: len(v) for k, v in classes.items()}
    if counts != EXPECTED:
        print("unexpected class counts", counts, file=sys.stderr)
        return 1
    for (nu, k, lam, mu), found in classes.items():
        lines = sorted(write_graph6(Graph(a)) for a in found.values())
        path = DATA / f"srg_{nu}_{k}_{lam}_{mu}.g6"
        text = "\n".join(lines) + "\n"
        path.write_text(text)
        print(path.name, len(lines), hashlib.sha256(text.encode()).hexdigest())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
