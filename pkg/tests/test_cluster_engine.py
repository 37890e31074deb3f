import itertools
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torushom.cluster_engine import (L_k, closure_and_codegrees, enumerate_clusters,
                                     enumerate_supports, polymer_weight_symbolic,
                                     taylor_expansion_check, truncation_error_heuristic, ursell)
from torushom.exp_poly import ExpPoly
from torushom.graph_model import (cayley_graph, complete_graph, dominant_patterns,
                                  hardcore_graph, sk_set)
from torushom.torus_oracle import (PolymerFamily, TorusSpec, brute_cluster_sum,
                                   connected_sets_upto, enumerate_polymers, polymer_weight,
                                   ursell_deletion_contraction)

from strategies import weighted_graphs

K3, K4, K5, HC = complete_graph(3), complete_graph(4), complete_graph(5), hardcore_graph(1)


def first(G):
    return dominant_patterns(G).patterns[0]


# Ursell function

def test_ursell_spot_values():
    assert ursell(1, []) == 1
    assert ursell(2, [(0, 1)]) == Fraction(-1, 2)
    assert ursell(3, [(0, 1), (1, 2), (0, 2)]) == Fraction(1, 3)
    assert ursell(3, [(0, 1), (1, 2)]) == Fraction(1, 6)
    assert ursell(3, [(0, 1)]) == 0


def _all_graphs(max_v):
    for nv in range(1, max_v + 1):
        pairs = list(itertools.combinations(range(nv), 2))
        for mask in range(1 << len(pairs)):
            yield nv, [p for i, p in enumerate(pairs) if mask >> i & 1]


def test_ursell_matches_deletion_contraction():
    for nv, edges in _all_graphs(5):
        assert ursell(nv, edges) == ursell_deletion_contraction(nv, edges), (nv, edges)


def test_ursell_tree_sign():
    # every tree on k vertices has phi = (-1)^(k-1) / k!
    star = [(0, i) for i in range(1, 5)]
    assert ursell(5, star) == Fraction(1, 120)


# supports and geometry

def test_support_counts():
    assert {a: len(v) for a, v in enumerate_supports(2, 2).items()} == {1: 1, 2: 1}
    assert {a: len(v) for a, v in enumerate_supports(4, 2).items()} == {1: 3, 2: 4}
    assert {a: len(v) for a, v in enumerate_supports(2, 1).items()} == {0: 1}


def test_codegree_one_pairs_on_long_cycles():
    S = [(0,), (2,)]
    closure, codeg = closure_and_codegrees(S, 16)
    assert (1,) in closure and codeg == {(0,): 1, (2,): 1}
    closure4, codeg4 = closure_and_codegrees(S, 4)
    assert codeg4 == {(0,): 2, (2,): 2}


def test_clusters_cover_support():
    S = frozenset({(0, 0), (1, 1)})
    for cl in enumerate_clusters(S, 3, 2):
        assert frozenset().union(*cl.parts) == S
        assert cl.size == 3


# symbolic weights agree with the oracle after embedding

def _embed(T, v):
    return T.index(tuple(v) + (0,) * (T.n - len(v)))


@pytest.mark.parametrize("m,G,jmax", [
    (2, K3, 3), (2, K5, 3), (2, HC, 3), (2, hardcore_graph(Fraction(1, 2)), 3),
    (2, cayley_graph(9, sk_set(2)), 2),
    (4, K3, 3), (4, HC, 3), (4, K5, 2),
    (6, K3, 2), (6, HC, 3),
])
def test_symbolic_weight_matches_oracle(m, G, jmax):
    for P in dominant_patterns(G).patterns[:2]:
        for j in range(1, jmax + 1):
            for a, supports in enumerate_supports(m, j).items():
                n = max(a, 1) + 1
                if m ** n > 1296:
                    continue
                T = TorusSpec(m, n)
                for S in supports[:10]:
                    mask = sum(1 << _embed(T, v) for v in S.vertices)
                    # the padded origin is an even vertex of T
                    sym = polymer_weight_symbolic(S.vertices, G, P, 0, m)
                    assert sym(n) == polymer_weight(T, G, P, mask), (m, j, sorted(S.vertices))


# L_k against an exact finite-torus cluster sum

@pytest.mark.parametrize("G,m,n,k", [
    (K3, 2, 3, 2), (K3, 2, 4, 3), (K4, 2, 3, 2), (K5, 2, 3, 2), (K5, 4, 2, 2),
    (HC, 2, 3, 2), (HC, 2, 3, 3), (HC, 4, 2, 2), (HC, 6, 1, 3), (HC, 16, 1, 2), (HC, 16, 2, 2),
    (hardcore_graph(2), 2, 3, 2), (cayley_graph(5, {1}), 2, 3, 2),
])
def test_Lk_matches_brute_cluster_sum(G, m, n, k):
    for P in dominant_patterns(G).patterns[:2]:
        assert L_k(G, P, m, k)(n) == brute_cluster_sum(TorusSpec(m, n), G, P, k)


def test_hardcore_long_cycle_L2():
    L2 = L_k(HC, first(HC), 16, 2)
    assert L2 == ExpPoly({(1, 2): Fraction(3, 2), (1, 1): -1, (1, 0): Fraction(-1, 4)})


@pytest.mark.parametrize("G", [K3, K4, K5, HC, hardcore_graph(Fraction(1, 2))])
@pytest.mark.parametrize("m", [2, 4])
def test_swap_symmetry(G, m):
    for P in dominant_patterns(G):
        for k in (1, 2):
            assert L_k(G, P, m, k) == L_k(G, P.swap(), m, k)


@settings(max_examples=15, deadline=None)
@given(weighted_graphs(max_q=3))
def test_L1_brute_random_graphs(G):
    T = TorusSpec(2, 3)
    for P in dominant_patterns(G):
        assert L_k(G, P, 2, 1)(3) == brute_cluster_sum(T, G, P, 1)


def test_k_limits():
    with pytest.raises(ValueError):
        L_k(K3, first(K3), 2, 7)
    with pytest.raises(ValueError):
        L_k(K3, first(K3), 3, 1)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        from torushom.cluster_engine import _check_k
        _check_k(5)
    assert w


def test_truncation_heuristic_shape():
    h = truncation_error_heuristic(K3, first(K3), 2, 3)
    assert h == ExpPoly.monomial(1, 4, Fraction(1, 4))


# Taylor test on polymer families with real structure

@pytest.mark.parametrize("G", [K3, HC])
def test_taylor_on_4x4_torus(G):
    T = TorusSpec(4, 2)
    F = enumerate_polymers(T, Fraction(1, 4))
    assert len(F) == 48
    rep = taylor_expansion_check(F, G, first(G), T, 4)
    assert rep.passed
    assert rep.log_side[1] != 0


@pytest.mark.parametrize("G", [K3, K4, HC])
def test_taylor_on_all_small_sets(G):
    T = TorusSpec(2, 3)
    F = PolymerFamily(T, Fraction(0), tuple(connected_sets_upto(T, 3)))
    for P in dominant_patterns(G).patterns[:2]:
        assert taylor_expansion_check(F, G, P, T, 3).passed
