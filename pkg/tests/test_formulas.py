import itertools
import math
from fractions import Fraction

import pytest

from torushom.cluster_engine import L_k
from torushom.exp_poly import ExpPoly
from torushom.formulas import (L1_closed, automorphisms, hardcore_L_forms, kbounded_asymptotic,
                               ln_leading, pattern_classes, qcolor_ck, qcolor_f, qcolor_L2,
                               qcolor_leading_base, qcolor_pattern_count, tree_aut_sum,
                               z_formula)
from torushom.graph_model import (NotDominantError, Pattern, cayley_graph, complete_graph,
                                  dominant_patterns, hardcore_graph)


def first(G):
    return dominant_patterns(G).patterns[0]


def test_L1_small_examples():
    assert L1_closed(complete_graph(3), first(complete_graph(3)), 2) == ExpPoly.const(1)
    assert L1_closed(complete_graph(4), first(complete_graph(4)), 2) == ExpPoly.const(1)
    assert L1_closed(complete_graph(8), first(complete_graph(8)), 2) == \
        ExpPoly.monomial(1, 0, Fraction(3, 2))


def test_L1_needs_dominant():
    with pytest.raises(NotDominantError):
        L1_closed(complete_graph(4), Pattern(frozenset({0}), frozenset({1})), 2)


def test_qcolor_f_values():
    assert qcolor_f(5) == ExpPoly([(Fraction(3, 4), 0, Fraction(4, 3)), (Fraction(1, 3), 0, 1)])
    assert qcolor_f(6) == ExpPoly.monomial(1, 0, Fraction(4, 3))
    assert qcolor_f(3) == ExpPoly.const(1)


def test_qcolor_L2_q4_and_q8():
    h = Fraction(1, 2)
    q4 = ExpPoly({(h, 1): Fraction(3, 2)}) + \
        ExpPoly({(h, 2): 1, (h, 1): -1, (h, 0): -2}).scale(Fraction(1, 4))
    assert qcolor_L2(4) == q4
    b = Fraction(9, 8)
    assert qcolor_L2(8).restrict_base(b) == \
        ExpPoly({(b, 2): 1, (b, 1): 41, (b, 0): -54}).scale(Fraction(1, 108))
    with pytest.raises(ValueError):
        qcolor_L2(3)


def test_tree_aut_sum_small():
    assert [tree_aut_sum(k) for k in (1, 2, 3, 4)] == [1, Fraction(1, 2), Fraction(1, 2), Fraction(2, 3)]


def _count_labelled_trees(k):
    pairs = list(itertools.combinations(range(k), 2))
    trees = 0
    for es in itertools.combinations(pairs, k - 1):
        parent = list(range(k))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for u, v in es:
            ru, rv = find(u), find(v)
            if ru == rv:
                ok = False
                break
            parent[ru] = rv
        trees += ok
    return trees


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_tree_aut_sum_by_enumeration(k):
    assert tree_aut_sum(k) == Fraction(_count_labelled_trees(k), math.factorial(k))


def test_ck_first_order():
    assert qcolor_ck(5, 2, 1) == Fraction(3, 4)
    assert qcolor_ck(4, 2, 1) == 1


@pytest.mark.parametrize("q", [4, 5, 6, 7, 8])
def test_engine_leading_coefficient_scaling(q):
    # engine n^2 coefficient at k = 2 is the c_k form divided by (ceil(q/2)-1)^2
    a = (q + 1) // 2
    G = complete_graph(q)
    got = L_k(G, first(G), 2, 2).coeff(2, qcolor_leading_base(q, 2, 2))
    assert got * (a - 1) ** 2 == qcolor_ck(q, 2, 2)


def test_hardcore_forms():
    L1, L2 = hardcore_L_forms(16)
    assert L1 == ExpPoly.monomial(Fraction(1, 2), 0, 4)
    assert L2 == ExpPoly({(1, 2): 4, (1, 1): -2})
    assert hardcore_L_forms(2)[0] == ExpPoly.const(Fraction(1, 2))
    assert hardcore_L_forms(4)[0] == ExpPoly.const(Fraction(1, 2))


@pytest.mark.parametrize("m", range(2, 17, 2))
def test_hardcore_L1_engine(m):
    G = hardcore_graph(1)
    assert L_k(G, first(G), m, 1) == hardcore_L_forms(m)[0]


def test_kbounded_asymptotic():
    a1, a2, a3 = (kbounded_asymptotic(k) for k in (1, 2, 3))
    assert (a1.prefactor, a1.lattice_base, a1.exponent) == (2, 2, ExpPoly.const(1))
    assert (a2.prefactor, a2.lattice_base, a2.exponent) == (1, 4, ExpPoly.const(1))
    assert (a3.prefactor, a3.lattice_base) == (2, 6)
    assert a3.exponent == ExpPoly.monomial(Fraction(1, 2), 0, Fraction(4, 3))


def test_automorphism_counts():
    assert len(list(automorphisms(complete_graph(4)))) == 24
    assert len(list(automorphisms(cayley_graph(5, {1})))) == 10
    assert len(list(automorphisms(hardcore_graph(1)))) == 1


@pytest.mark.parametrize("q", range(3, 9))
def test_pattern_classes_kq(q):
    G = complete_graph(q)
    classes = pattern_classes(G, dominant_patterns(G).patterns)
    assert len(classes) == 1
    assert len(classes[0]) == qcolor_pattern_count(q)


def test_z_formula_k3():
    zf = z_formula(complete_graph(3), 2, 2)
    assert zf.pattern_count == 6 and zf.eta == 2
    assert float(zf.ln_Z(10)) == pytest.approx(math.log(6) + 512 * math.log(2) + 1, abs=1e-12)


def test_z_formula_hardcore_composition():
    G = hardcore_graph(1)
    zf = z_formula(G, 2, 3)
    L2 = L_k(G, first(G), 2, 2)
    want = ln_leading(Fraction(2), 2, 2, 6, Fraction(1, 2) + L2(6))
    assert float(zf.ln_Z(6)) == pytest.approx(float(want), abs=1e-12)


def test_z_formula_json_shape():
    js = z_formula(complete_graph(5), 2, 2).to_json(n=4)
    assert set(js) == {"eta", "patterns", "exponent_terms", "ln_Z_at_n", "truncation_heuristic"}
    assert js["eta"] == "6/1" and js["patterns"] == 20


def test_z_formula_large_n_stays_finite():
    zf = z_formula(complete_graph(4), 2, 2)
    assert zf.ln_Z(40) > 2 ** 39
