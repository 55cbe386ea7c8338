import itertools

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings

from conftest import graphs_with_perm, random_graph
from qpe.graphcore import Graph, complete_graph, cycle_graph, disjoint_union, path_graph, permute, permute_matrix
from qpe.harness import graph_distance, load_fixture
from qpe.walks import (
    EncodingTensor,
    InitSpec,
    ResourceLimitError,
    cqrw1,
    cqrw2,
    default_times,
    localized_signature,
    occupation_basis,
    occupation_graph,
    qirw2,
    random_times,
    rrwp,
    signature_multiset,
    time_avg_transition,
    xy2_correlations,
)


def full_xy_covariance(g, t, starts):
    """Independent oracle: hopping on all 2^n basis states, averaged over start states."""
    n = g.n
    dim = 1 << n
    h = np.zeros((dim, dim))
    for i, j in g.edges():
        for s in range(dim):
            if (s >> i) & 1 and not (s >> j) & 1:
                target = s ^ (1 << i) ^ (1 << j)
                h[target, s] = h[s, target] = 1.0
    u = scipy.linalg.expm(-1j * t * h)
    bits = ((np.arange(dim)[:, None] >> np.arange(n)) & 1).astype(float)
    cov = np.zeros((n, n))
    for psi in starts:
        p = np.abs(u @ psi) ** 2
        nn = bits.T @ (p[:, None] * bits)
        occ = np.diagonal(nn).copy()
        cov += nn - np.outer(occ, occ)
    return cov / len(starts)


def pair_state(n, pairs):
    psi = np.zeros(1 << n, dtype=complex)
    for i, j in pairs:
        psi[(1 << i) | (1 << j)] = 1.0
    return psi / np.linalg.norm(psi)


# -- rrwp -----------------------------------------------------------------------


def test_rrwp_edge_alternates():
    enc = rrwp(complete_graph(2), 3)
    assert enc.steps == 3 and enc.n == 2
    assert np.array_equal(enc[0], np.eye(2))
    assert np.array_equal(enc[1], [[0, 1], [1, 0]])
    assert np.array_equal(enc[2], np.eye(2))


def test_rrwp_triangle_second_step():
    s = rrwp(complete_graph(3), 3)[2]
    assert np.allclose(np.diagonal(s), 0.5)
    assert np.allclose(s[~np.eye(3, dtype=bool)], 0.25)


def test_rrwp_isolated_node_rows_vanish():
    enc = rrwp(Graph.empty(1), 2)
    assert enc[0].tolist() == [[1.0]]
    assert enc[1].tolist() == [[0.0]]
    with pytest.raises(ValueError):
        rrwp(path_graph(2), 0)


def test_rrwp_rows_are_distributions(rng):
    g = random_graph(rng, 9, 0.4)
    enc = rrwp(g, 6)
    deg = g.degrees()
    for k in range(1, 6):
        sums = enc[k].sum(axis=1)
        assert np.allclose(sums[deg > 0], 1, atol=1e-12)


def test_encoding_tensor_validation():
    with pytest.raises(ValueError):
        EncodingTensor(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        EncodingTensor(np.full((1, 2, 2), np.inf))


# -- single walker -----------------------------------------------------------------


@pytest.mark.parametrize("t", [0.0, 0.3, 1.7])
def test_cqrw1_two_level(t):
    s = cqrw1(complete_graph(2), [t])[0]
    c2, s2 = np.cos(t) ** 2, np.sin(t) ** 2
    assert np.allclose(s, [[c2, s2], [s2, c2]], atol=1e-14)


def test_cqrw1_trivial_cases(rng):
    assert cqrw1(Graph.empty(1), [2.5])[0].tolist() == [[1.0]]
    assert np.array_equal(cqrw1(random_graph(rng, 6), [0.0])[0], np.eye(6))
    with pytest.raises(ValueError):
        cqrw1(path_graph(3), [])


def test_cqrw1_doubly_stochastic(rng):
    g = random_graph(rng, 10, 0.3)
    for s in cqrw1(g, default_times(5)).values:
        assert np.allclose(s, s.T, atol=1e-12)
        assert np.allclose(s.sum(axis=0), 1, atol=1e-9)
        assert np.allclose(s.sum(axis=1), 1, atol=1e-9)


def test_time_grids():
    assert np.allclose(default_times(4), [np.pi / 4, np.pi / 2, 3 * np.pi / 4, np.pi])
    r = random_times(6, seed=7)
    assert np.array_equal(r, random_times(6, seed=7))
    assert np.all((r > 0.1) & (r <= np.pi)) and np.all(np.diff(r) >= 0)


# -- occupation graphs ---------------------------------------------------------------


def test_occupation_graph_examples():
    g, basis = occupation_graph(complete_graph(2), 2)
    assert basis.states == ((0, 1),) and g.num_edges == 0
    g, basis = occupation_graph(path_graph(3), 2)
    assert basis.states == ((0, 1), (0, 2), (1, 2))
    assert g.edges() == [(0, 1), (1, 2)]
    g, _ = occupation_graph(complete_graph(3), 2)
    assert g == complete_graph(3)


def brute_occupation(g, k):
    states = list(itertools.combinations(range(g.n), k))
    adj = np.zeros((len(states), len(states)), dtype=np.uint8)
    for a, s in enumerate(states):
        for b, r in enumerate(states):
            diff_s, diff_r = set(s) - set(r), set(r) - set(s)
            if len(diff_s) == 1 and g.adjacency[diff_s.pop(), diff_r.pop()]:
                adj[a, b] = 1
    return Graph(adj)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_occupation_graph_matches_brute_force(k, rng):
    for n in range(k, 9):
        g = random_graph(rng, n, 0.45)
        assert occupation_graph(g, k)[0] == brute_occupation(g, k)


def test_occupation_graph_single_particle_is_graph(rng):
    g = random_graph(rng, 8)
    assert occupation_graph(g, 1)[0] == g


def test_occupation_guards():
    with pytest.raises(ValueError):
        occupation_basis(5, 4)
    with pytest.raises(ValueError):
        occupation_basis(2, 3)
    with pytest.raises(ResourceLimitError):
        occupation_basis(240, 3)


# -- two walkers ---------------------------------------------------------------------


def test_init_spec_parse_and_validation():
    assert InitSpec.parse("localized:2,0") == InitSpec.localized(2, 0)
    assert str(InitSpec.parse("uniform_edges")) == "uniform_edges"
    for bad in ("localized:1,1", "uniform_pairs:1", "nope"):
        with pytest.raises(ValueError):
            InitSpec.parse(bad)


def test_cqrw2_frozen_pair():
    for t in (0.0, 1.3):
        s = cqrw2(complete_graph(2), [t], InitSpec.localized(0, 1))[0]
        assert np.allclose(s, [[0, 1], [1, 0]])


def test_cqrw2_indicator_at_zero(rng):
    s = cqrw2(random_graph(rng, 6), [0.0], InitSpec.localized(1, 4))[0]
    expected = np.zeros((6, 6))
    expected[1, 4] = expected[4, 1] = 1
    assert np.array_equal(s, expected)


@pytest.mark.parametrize("t", [0.4, 1.0, 2.9])
def test_cqrw2_path_closed_form(t):
    # occupation graph is the path 01 - 02 - 12; exp(-i P3 t) applied to the end state
    r = np.sqrt(2) * t
    amp = [(1 + np.cos(r)) / 2, -1j * np.sin(r) / np.sqrt(2), (np.cos(r) - 1) / 2]
    s = cqrw2(path_graph(3), [t], InitSpec.localized(0, 1))[0]
    assert np.allclose([s[0, 1], s[0, 2], s[1, 2]], np.abs(amp) ** 2, atol=1e-12)


def test_cqrw2_conserves_probability(rng):
    g = random_graph(rng, 8, 0.4)
    for init in (InitSpec("uniform_pairs"), InitSpec("uniform_edges"), InitSpec.localized(2, 5)):
        for s in cqrw2(g, default_times(4), init).values:
            assert abs(np.triu(s, 1).sum() - 1) < 1e-9
            assert np.allclose(s, s.T) and not np.diagonal(s).any()


def test_cqrw2_invalid_inits():
    with pytest.raises(ValueError):
        cqrw2(Graph.empty(3), [1.0], InitSpec("uniform_edges"))
    with pytest.raises(ValueError):
        cqrw2(path_graph(3), [1.0], InitSpec.localized(0, 7))
    with pytest.raises(ValueError):
        cqrw2(path_graph(3), [1.0], InitSpec.localized(0))
    with pytest.raises(ValueError):
        cqrw2(path_graph(3), [1.0], InitSpec("all_localized"))
    with pytest.raises(ValueError):
        cqrw2(Graph.empty(1), [1.0], InitSpec("uniform_pairs"))


def test_qirw2_examples():
    enc = qirw2(path_graph(3), 2, InitSpec("uniform_edges"))
    assert np.allclose(enc[0], [[0, 0.5, 0], [0.5, 0, 0.5], [0, 0.5, 0]])
    # D^-1 H = [[0,1,0],[.5,0,.5],[0,1,0]] on (01, 02, 12) maps (1/2, 0, 1/2) to (0, 1/2, 0)
    assert np.allclose(enc[1], [[0, 0, 0.5], [0, 0, 0], [0.5, 0, 0]])
    edge = qirw2(complete_graph(2), 4, InitSpec("uniform_edges"))
    assert np.allclose(edge[0], [[0, 1], [1, 0]])
    assert not edge.values[1:].any()


def test_qirw2_edge_slice(rng):
    g = random_graph(rng, 7, 0.5)
    s = qirw2(g, 1, InitSpec("uniform_edges"))[0]
    assert np.allclose(s, g.adjacency / g.num_edges)


# -- correlations --------------------------------------------------------------------


def test_xy2_edge_at_zero():
    c = xy2_correlations(complete_graph(2), 0.0, InitSpec("uniform_edges"))
    assert np.allclose(c, 0)


@pytest.mark.parametrize("g", [path_graph(3), cycle_graph(5), disjoint_union(path_graph(2), path_graph(3))])
def test_xy2_matches_full_statevector(g):
    c = xy2_correlations(g, 1.0, InitSpec("uniform_edges"))
    oracle = full_xy_covariance(g, 1.0, [pair_state(g.n, g.edges())])
    assert np.allclose(c, oracle, atol=1e-12)


def test_xy2_ensemble_matches_full_statevector(rng):
    g = random_graph(rng, 6, 0.5)
    starts = [pair_state(6, [p]) for p in itertools.combinations(range(6), 2)]
    c = xy2_correlations(g, 0.8, InitSpec("all_localized"))
    assert np.allclose(c, full_xy_covariance(g, 0.8, starts), atol=1e-12)


def test_xy2_uniform_states_blind_on_srgs():
    # uniform starts stay in span{edge indicator, non-edge indicator} of the pair space
    rook, shrikhande = load_fixture("srg16")
    for init in ("uniform_edges", "uniform_pairs"):
        c1 = xy2_correlations(rook, 1.0, InitSpec(init))
        c2 = xy2_correlations(shrikhande, 1.0, InitSpec(init))
        assert graph_distance(c1, c2) < 1e-8
    c1 = xy2_correlations(rook, 1.0, InitSpec("all_localized"))
    c2 = xy2_correlations(shrikhande, 1.0, InitSpec("all_localized"))
    assert graph_distance(c1, c2) > 1e-4


# -- long-time averages --------------------------------------------------------------


def test_time_avg_examples():
    assert time_avg_transition(Graph.empty(1)).tolist() == [[1.0]]
    assert np.allclose(time_avg_transition(complete_graph(2)), 0.5)
    k3 = time_avg_transition(complete_graph(3))
    assert np.allclose(np.diagonal(k3), 5 / 9) and np.allclose(k3[0, 1], 2 / 9)


def test_time_avg_rows(rng):
    p = time_avg_transition(random_graph(rng, 11, 0.3))
    assert np.allclose(p, p.T) and np.all(p >= -1e-15) and np.all(p <= 1 + 1e-12)
    assert np.allclose(p.sum(axis=1), 1, atol=1e-9)


def test_localized_signature():
    assert np.allclose(localized_signature(complete_graph(3)), [[2 / 9, 2 / 9, 5 / 9]] * 3)
    c6 = signature_multiset(localized_signature(cycle_graph(6)))
    two_k3 = signature_multiset(localized_signature(disjoint_union(complete_graph(3), complete_graph(3))))
    assert c6 != two_k3
    assert min(two_k3[0]) == 0.0


# -- equivariance --------------------------------------------------------------------


def _conj(values, perm):
    return np.stack([permute_matrix(s, perm) for s in np.atleast_3d(values).reshape(-1, *values.shape[-2:])])


ENCODERS = [
    ("rrwp", lambda g: rrwp(g, 4).values),
    ("cqrw1", lambda g: cqrw1(g, [0.3, 1.1]).values),
    ("cqrw2", lambda g: cqrw2(g, [0.7], InitSpec("uniform_pairs")).values),
    ("qirw2", lambda g: qirw2(g, 3, InitSpec("uniform_pairs")).values),
    ("xy2", lambda g: xy2_correlations(g, 1.0, InitSpec("uniform_pairs"))[None]),
    ("xy2-ensemble", lambda g: xy2_correlations(g, 1.0, InitSpec("all_localized"))[None]),
    ("time_avg", lambda g: time_avg_transition(g)[None]),
]


@pytest.mark.parametrize("name,enc", ENCODERS, ids=[e[0] for e in ENCODERS])
@settings(max_examples=50, deadline=None)
@given(gp=graphs_with_perm(2, 8))
def test_encoders_permutation_equivariant(name, enc, gp):
    g, perm = gp
    assert np.allclose(enc(permute(g, perm)), _conj(enc(g), perm), atol=1e-10)


def test_rrwp_sorted_slices_agree_on_srg_family():
    graphs = load_fixture("srg25")
    ref = [np.sort(s, axis=None) for s in rrwp(graphs[0], 9).values]
    for g in graphs[1:]:
        for k, s in enumerate(rrwp(g, 9).values):
            assert np.abs(np.sort(s, axis=None) - ref[k]).max() < 1e-9
