"""Closed-form reference expressions and the truncated assembly of ln Z~."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .cluster_engine import L_k, truncation_error_heuristic
from .exp_poly import ExpPoly, eval_exact, to_json
from .graph_model import Pattern, WeightedGraph, delta, dominant_patterns, require_dominant


def _c(m: int) -> int:
    return 2 if m > 2 else 1


def _halves(q: int) -> tuple[int, int]:
    """(ceil(q/2), floor(q/2))."""
    return (q + 1) // 2, q // 2


def L1_closed(G: WeightedGraph, P: Pattern, m: int) -> ExpPoly:
    """The two-sum closed form for L_{A,B}(1), with d = c*n folded into the bases."""
    require_dominant(G, P)
    c = _c(m)
    lam_a, lam_b = G.weight(P.A), G.weight(P.B)
    out = ExpPoly()
    for v in range(G.q):
        if v not in P.A:
            ratio = G.weight(G.adj[v] & P.B) / lam_b
            out += ExpPoly.monomial(G.activities[v] / (2 * lam_a), 0, m * ratio ** c)
        if v not in P.B:
            ratio = G.weight(G.adj[v] & P.A) / lam_a
            out += ExpPoly.monomial(G.activities[v] / (2 * lam_b), 0, m * ratio ** c)
    return out


def qcolor_f(q: int, m: int = 2) -> ExpPoly:
    """f(n) for proper q-colourings of Q_n; base-0 terms vanish (q = 3)."""
    if q < 3:
        raise ValueError("q must be >= 3")
    if m != 2:
        raise ValueError("the q-colouring f(n) is stated for m = 2")
    a, b = _halves(q)
    return (ExpPoly.monomial(Fraction(a, 2 * b), 0, 2 - Fraction(2, a))
            + ExpPoly.monomial(Fraction(b, 2 * a), 0, 2 - Fraction(2, b)))


def qcolor_L2(q: int, m: int = 2) -> ExpPoly:
    """Second cluster term for K_q on Q_n, with the 2^n absorbed into each base."""
    if q < 4:
        raise ValueError("q must be >= 4")
    if m != 2:
        raise ValueError("the q-colouring L2 is stated for m = 2")
    a, b = _halves(q)
    ra, rb = 1 - Fraction(1, a), 1 - Fraction(1, b)
    quad_b = ExpPoly({(1, 2): 1, (1, 1): -1, (1, 0): -2 * (b - 1) ** 3})
    quad_a = ExpPoly({(1, 2): 1, (1, 1): -1, (1, 0): -2 * (a - 1) ** 3})
    cross = ExpPoly.monomial(Fraction(q - 1, 2 * (b - 1) * (a - 1)), 1, 2 * ra * rb)
    side_b = quad_b * ExpPoly.monomial(Fraction(b * b, 8 * a * a * (b - 1) ** 3), 0, 2 * rb * rb)
    side_a = quad_a * ExpPoly.monomial(Fraction(a * a, 8 * b * b * (a - 1) ** 3), 0, 2 * ra * ra)
    return cross + side_b + side_a


def tree_aut_sum(k: int) -> Fraction:
    """sum over labelled-isomorphism classes of trees on k vertices of 1/|Aut(T)|.

    Orbit-stabilizer turns this into (labelled trees)/k! = k^(k-2)/k!.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return Fraction(1)
    return Fraction(k ** (k - 2), math.factorial(k))


def qcolor_ck(q: int, m: int, k: int) -> Fraction:
    """Leading coefficient of n^(2k-2) (m (1-1/ceil(q/2))^(ck))^n in L_k for K_q."""
    if k < 1:
        raise ValueError("k must be >= 1")
    a, b = _halves(q)
    even = 1 if q % 2 == 0 else 0
    big = 1 + 3 * (1 if m > 2 else 0)
    pre = Fraction((1 + even) * big ** (k - 1), 2 ** k * (a - 1) ** (k - 1))
    return pre * Fraction(a ** k, b ** k) * tree_aut_sum(k)


def qcolor_leading_base(q: int, m: int, k: int) -> Fraction:
    a, _ = _halves(q)
    return m * (1 - Fraction(1, a)) ** (_c(m) * k)


def hardcore_L_forms(m: int) -> tuple[ExpPoly, ExpPoly]:
    """(L1, L2 leading) for the unit-fugacity hard-core model on Z_m^n.

    L2 leading is the displayed 2n(2n-1)(m/16)^n and is zero for m = 2.
    """
    if m < 2 or m % 2:
        raise ValueError("m must be even >= 2")
    c = _c(m)
    L1 = ExpPoly.monomial(Fraction(1, 2), 0, Fraction(m, 2 ** c))
    if m == 2:
        return L1, ExpPoly()
    L2 = ExpPoly({(Fraction(m, 16), 2): 4, (Fraction(m, 16), 1): -2})
    return L1, L2


@dataclass(frozen=True)
class KBoundedAsymptotic:
    """|B_k(n)| ~ prefactor * lattice_base^(2^(n-1)) * exp(exponent(n))."""

    k: int
    prefactor: int
    lattice_base: int
    exponent: ExpPoly

    def log_value(self, n: int) -> mpmath.mpf:
        with mpmath.workdps(40):
            e = eval_exact(self.exponent, n)
            return (mpmath.log(self.prefactor) + 2 ** (n - 1) * mpmath.log(self.lattice_base)
                    + mpmath.mpf(e.numerator) / e.denominator)


def kbounded_asymptotic(k: int) -> KBoundedAsymptotic:
    if k < 1:
        raise ValueError("k must be >= 1")
    half = Fraction(k, 2) + 1
    lo, hi = math.floor(half), math.ceil(half)
    pre = 2 if k % 2 else 1
    coeff = Fraction(2 if k % 2 == 0 else 1, lo)
    base = Fraction(2 * math.ceil(Fraction(k, 2)), hi)
    return KBoundedAsymptotic(k, pre, lo * hi, ExpPoly.monomial(coeff, 0, base))


# pattern symmetry

def automorphisms(G: WeightedGraph):
    """Activity-preserving automorphisms of G, by backtracking."""
    q = G.q
    img = [-1] * q
    used = [False] * q

    def rec(v):
        if v == q:
            yield tuple(img)
            return
        for w in range(q):
            if used[w] or G.activities[w] != G.activities[v]:
                continue
            if len(G.adj[w]) != len(G.adj[v]) or (v in G.adj[v]) != (w in G.adj[w]):
                continue
            if any((u in G.adj[v]) != (img[u] in G.adj[w]) for u in range(v)):
                continue
            img[v], used[w] = w, True
            yield from rec(v + 1)
            img[v], used[w] = -1, False

    yield from rec(0)


def pattern_classes(G: WeightedGraph, patterns) -> list[list[Pattern]]:
    """Orbits of the patterns under automorphisms of G and the (A,B) <-> (B,A) swap.

    The swap is a symmetry because a unit shift of the torus exchanges the
    two parity classes.
    """
    remaining = set(patterns)
    auts = list(automorphisms(G))
    classes = []
    for P in sorted(patterns):
        if P not in remaining:
            continue
        orbit = set()
        for g in auts:
            Q = Pattern(frozenset(g[v] for v in P.A), frozenset(g[v] for v in P.B))
            orbit.update((Q, Q.swap()))
        orbit &= remaining
        remaining -= orbit
        classes.append(sorted(orbit))
    return classes


@dataclass
class ZFormula:
    """eta^(m^n/2) * sum over patterns of exp(sum_{j<k_order} L_j)."""

    graph_name: str
    m: int
    k_order: int
    eta: Fraction
    classes: list[tuple[Pattern, int, ExpPoly]]  # representative, multiplicity, exponent
    heuristic: ExpPoly = field(default_factory=ExpPoly)

    @property
    def pattern_count(self) -> int:
        return sum(mult for _, mult, _ in self.classes)

    def ln_Z(self, n: int, dps: int = 30) -> mpmath.mpf:
        """ln Z~ at dimension n, in log space throughout."""
        with mpmath.workdps(dps + 10):
            half = mpmath.mpf(self.m) ** n / 2
            logs = []
            for _, mult, expo in self.classes:
                e = eval_exact(expo, n)
                logs.append(mpmath.log(mult) + mpmath.mpf(e.numerator) / e.denominator)
            top = max(logs)
            lse = top + mpmath.log(mpmath.fsum(mpmath.exp(x - top) for x in logs))
            eta = mpmath.mpf(self.eta.numerator) / self.eta.denominator
            return half * mpmath.log(eta) + lse

    def to_json(self, n: int | None = None, dps: int = 30) -> dict:
        out = {
            "eta": f"{self.eta.numerator}/{self.eta.denominator}",
            "patterns": self.pattern_count,
            "exponent_terms": [
                {"pattern": P.label(), "multiplicity": mult, "exponent": to_json(expo)}
                for P, mult, expo in self.classes
            ],
            "truncation_heuristic": to_json(self.heuristic),
        }
        if n is not None:
            out["ln_Z_at_n"] = mpmath.nstr(self.ln_Z(n, dps), dps)
        return out


def z_formula(G: WeightedGraph, m: int, k_order: int) -> ZFormula:
    """Truncated assembly using L_1..L_{k_order-1} per pattern symmetry class."""
    if k_order < 1:
        raise ValueError("k_order must be >= 1")
    D = dominant_patterns(G)
    classes = []
    worst = None
    for orbit in pattern_classes(G, D.patterns):
        rep = orbit[0]
        expo = ExpPoly()
        for j in range(1, k_order):
            expo += L_k(G, rep, m, j)
        classes.append((rep, len(orbit), expo))
        if worst is None or delta(G, rep) > delta(G, worst):
            worst = rep
    heuristic = truncation_error_heuristic(G, worst, m, k_order)
    return ZFormula(G.name, m, k_order, D.eta, classes, heuristic=heuristic)


def qcolor_pattern_count(q: int) -> int:
    return (1 + q % 2) * math.comb(q, q // 2)


def ln_leading(eta: Fraction, patterns: int, m: int, n: int, extra: Fraction = Fraction(0)) -> mpmath.mpf:
    """ln(patterns) + (m^n/2) ln eta + extra, for closed-form comparisons."""
    with mpmath.workdps(40):
        return (mpmath.log(patterns) + mpmath.mpf(m) ** n / 2 * mpmath.log(eta)
                + mpmath.mpf(extra.numerator) / extra.denominator)

