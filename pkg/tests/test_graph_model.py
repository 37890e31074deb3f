import math
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from torushom.graph_model import (GraphFormatError, NoPatternError, NotDominantError, Pattern,
                                  WeightedGraph, cayley_graph, common_neighborhood,
                                  complete_graph, delta, dominant_patterns, dump_graph,
                                  hardcore_graph, is_dominant, load_graph, sk_set)

from strategies import weighted_graphs


def test_k5_patterns():
    D = dominant_patterns(complete_graph(5))
    assert D.eta == 6 and len(D) == 20
    assert {delta(complete_graph(5), P) for P in D} == {Fraction(2, 3)}


@pytest.mark.parametrize("q", range(3, 9))
def test_kq_pattern_count(q):
    a, b = (q + 1) // 2, q // 2
    D = dominant_patterns(complete_graph(q))
    assert D.eta == a * b
    assert len(D) == (1 + q % 2) * math.comb(q, b)


@pytest.mark.parametrize("x", [1, 2, Fraction(1, 2)])
def test_hardcore_patterns(x):
    G = hardcore_graph(x)
    D = dominant_patterns(G)
    assert D.eta == 1 + x
    assert set(D) == {Pattern(frozenset({1}), frozenset({0, 1})),
                      Pattern(frozenset({0, 1}), frozenset({1}))}
    for P in D:
        assert delta(G, P) == Fraction(1) / (1 + x)


def test_no_pattern():
    with pytest.raises(NoPatternError, match="no pattern exists"):
        dominant_patterns(WeightedGraph.from_edges(3, []))


def test_non_dominant_rejected():
    G = complete_graph(4)
    P = Pattern(frozenset({0}), frozenset({1}))
    assert not is_dominant(G, P)
    with pytest.raises(NotDominantError):
        delta(G, P)


def test_cayley_and_sk():
    assert sk_set(1) == {1} and sk_set(2) == {0, 2} and sk_set(3) == {1, 3}
    C5 = cayley_graph(5, {1})
    assert all(len(C5.adj[v]) == 2 for v in range(5))
    C9 = cayley_graph(9, sk_set(2))
    assert all(v in C9.adj[v] for v in range(9))


def test_parse_round_trip():
    text = "# comment\nq 2\nlambda 1 3/2\nedge 1 2\nedge 2 2  # loop\n"
    G = load_graph(text)
    assert G.activities == (Fraction(3, 2), Fraction(1))
    assert G.adjacent(1, 1) and not G.adjacent(0, 0)
    assert load_graph(dump_graph(G)) == G


@pytest.mark.parametrize("text,msg,line", [
    ("q 2\nedge 1 3\n", "vertex index out of range", 2),
    ("q 2\nlambda 1 -1/2\n", "non-positive activity", 2),
    ("q 2\nlambda 1 1/2\nlambda 1 1/3\n", "duplicate activity", 3),
    ("q 2\nfoo 1\n", "malformed line", 2),
    ("edge 1 2\n", "malformed line", 1),
])
def test_parse_errors_carry_line(text, msg, line):
    with pytest.raises(GraphFormatError, match=msg) as e:
        load_graph(text, source="g.graph")
    assert e.value.lineno == line
    assert str(e.value).startswith(f"g.graph:{line}:")


@given(weighted_graphs())
def test_dominant_patterns_are_closed(G):
    D = dominant_patterns(G)
    for P in D:
        assert common_neighborhood(G, P.A) == P.B
        assert common_neighborhood(G, P.B) == P.A
        assert G.weight(P.A) * G.weight(P.B) == D.eta
        assert P.swap() in D


@given(weighted_graphs())
def test_delta_below_one(G):
    for P in dominant_patterns(G):
        assert 0 <= delta(G, P) < 1


@given(weighted_graphs(), st.randoms())
def test_relabel_invariance(G, rnd):
    perm = list(range(G.q))
    rnd.shuffle(perm)
    H = G.relabel(perm)
    D, E = dominant_patterns(G), dominant_patterns(H)
    assert D.eta == E.eta
    moved = {Pattern(frozenset(perm[v] for v in P.A), frozenset(perm[v] for v in P.B)) for P in D}
    assert moved == set(E)
