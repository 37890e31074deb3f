"""Symbolic cluster-expansion terms L_{A,B}(k) as exponential polynomials in n.

Clusters are enumerated around a root vertex inside a finite coordinate
window; every coordinate outside the window is implicitly 0. Polymer weights
come out as sums of beta * (alpha^c)^n with c = 1 + [m > 2], so each
cluster weight is an ExpPoly and the n-dependence is exact.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .exp_poly import ExpPoly, GradedSeries, binomial_poly, formal_log
from .graph_model import Pattern, WeightedGraph, delta, require_dominant
from .torus_oracle import PolymerFamily, TorusSpec, _bits, polymer_weights

EVEN_ROOT = 0
ODD_ROOT = 1
ROOT_PARITIES = (EVEN_ROOT, ODD_ROOT)

DEFAULT_MAX_K = 4
HARD_MAX_K = 6

LocalVertex = tuple[int, ...]


@dataclass(frozen=True)
class LocalSet:
    vertices: frozenset[LocalVertex]
    a: int

    @property
    def j(self) -> int:
        return len(self.vertices)

    @property
    def width(self) -> int:
        return len(next(iter(self.vertices)))


@dataclass(frozen=True)
class RootedCluster:
    support: LocalSet
    parts: tuple[frozenset[LocalVertex], ...]

    @property
    def size(self) -> int:
        return sum(len(g) for g in self.parts)


def _c(m: int) -> int:
    return 2 if m > 2 else 1


# local torus geometry

@lru_cache(maxsize=None)
def unit_steps(m: int, width: int) -> tuple[LocalVertex, ...]:
    out = set()
    for i in range(width):
        for s in (1, -1):
            v = [0] * width
            v[i] = s % m
            out.add(tuple(v))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def ball2_offsets(m: int, width: int) -> tuple[LocalVertex, ...]:
    """Nonzero offsets reachable in at most two steps."""
    steps = unit_steps(m, width)
    out = set(steps)
    for s in steps:
        for t in steps:
            out.add(_add(s, t, m))
    out.discard((0,) * width)
    return tuple(sorted(out))


def _add(u: LocalVertex, v: LocalVertex, m: int) -> LocalVertex:
    return tuple((x + y) % m for x, y in zip(u, v))


def neighbours(v: LocalVertex, m: int) -> set[LocalVertex]:
    return {_add(v, s, m) for s in unit_steps(m, len(v))}


def distance(u: LocalVertex, v: LocalVertex, m: int) -> int:
    return sum(min((x - y) % m, (y - x) % m) for x, y in zip(u, v))


def _pad(v: LocalVertex, width: int) -> LocalVertex:
    return v + (0,) * (width - len(v))


def active_coords(vertices: Iterable[LocalVertex]) -> frozenset[int]:
    return frozenset(i for v in vertices for i, x in enumerate(v) if x)


def parity_of(v: LocalVertex, root_parity: int) -> int:
    """1 if v lies in the odd class O given the root's class."""
    return (sum(v) + root_parity) % 2


def g2_connected(vertices: Sequence[LocalVertex], m: int) -> bool:
    vs = list(vertices)
    if not vs:
        return False
    seen = {vs[0]}
    stack = [vs[0]]
    while stack:
        u = stack.pop()
        for w in vs:
            if w not in seen and distance(u, w, m) <= 2:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vs)


def incompatible(g1: Iterable[LocalVertex], g2: Iterable[LocalVertex], m: int) -> bool:
    return any(distance(u, v, m) <= 2 for u in g1 for v in g2)


# supports

@lru_cache(maxsize=None)
def _window_sets(m: int, j: int, width: int) -> tuple[frozenset[LocalVertex], ...]:
    """G^2-connected sets of size j containing the root inside the window."""
    root = (0,) * width
    layer = {frozenset([root])}
    offsets = ball2_offsets(m, width)
    for _ in range(j - 1):
        nxt = set()
        for S in layer:
            for v in S:
                for off in offsets:
                    w = _add(v, off, m)
                    if w not in S:
                        nxt.add(S | {w})
        layer = nxt
    return tuple(sorted(layer, key=lambda s: sorted(s)))


def enumerate_supports(m: int, j: int, k: int | None = None) -> dict[int, list[LocalSet]]:
    """Supports of size j whose active coordinates are exactly {0..a-1}, grouped by a.

    Sets are generated in a window of 2(j-1) coordinates, which contains every
    such support (a G^2-connected j-set has at most 2(j-1) active coordinates).
    """
    if k is None:
        k = j
    if not 1 <= j <= k:
        raise ValueError("need 1 <= j <= k")
    width = max(2 * (j - 1), 1)
    out: dict[int, list[LocalSet]] = {}
    for S in _window_sets(m, j, width):
        act = active_coords(S)
        a = len(act)
        if act != frozenset(range(a)):
            continue
        trimmed = frozenset(v[:max(a, 1)] for v in S)
        out.setdefault(a, []).append(LocalSet(trimmed, a))
    return out


def closure_and_codegrees(S: Iterable[LocalVertex], m: int):
    """S-bar (S plus vertices with >= 2 neighbours in S) and |N(x) & S-bar| for x in S."""
    S = frozenset(S)
    count: dict[LocalVertex, int] = {}
    for v in S:
        for w in neighbours(v, m):
            if w not in S:
                count[w] = count.get(w, 0) + 1
    closure = set(S) | {w for w, c in count.items() if c >= 2}
    codeg = {x: len(neighbours(x, m) & closure) for x in S}
    return frozenset(closure), codeg


# polymer weights

def polymer_weight_symbolic(S: Iterable[LocalVertex], G: WeightedGraph, P: Pattern,
                            root_parity: int, m: int, check: bool = True) -> ExpPoly:
    """Weight of the polymer S as an ExpPoly in n.

    Each colouring f of S that disagrees with (A,B) everywhere contributes
    beta_f * (alpha_f^c)^n; the n-dependence comes from the d - d_Sbar(x)
    boundary vertices owned by a single x in S.
    """
    if check:
        require_dominant(G, P)
    S = sorted(frozenset(S))
    closure, codeg = closure_and_codegrees(S, m)
    lam = G.activities
    lam_a, lam_b = G.weight(P.A), G.weight(P.B)
    # O vertices agree in A, E vertices agree in B
    agree = {0: P.B, 1: P.A}
    lam_agree = {0: lam_b, 1: lam_a}
    par = {v: parity_of(v, root_parity) for v in closure}
    allc = frozenset(range(G.q))
    choices = [sorted(allc - agree[par[v]]) for v in S]
    idx = {v: i for i, v in enumerate(S)}
    s_edges = [(idx[u], idx[v]) for u, v in itertools.combinations(S, 2)
               if distance(u, v, m) == 1]
    outer = sorted(closure - set(S))
    outer_nbrs = [[idx[w] for w in neighbours(u, m) if w in idx] for u in outer]
    n_odd = sum(par[v] for v in closure)
    denom = lam_a ** n_odd * lam_b ** (len(closure) - n_odd)
    c = _c(m)

    acc: dict[tuple[Fraction, int], Fraction] = {}
    for f in itertools.product(*choices):
        if any(not G.adjacent(f[i], f[j]) for i, j in s_edges):
            continue
        beta = Fraction(1)
        for col in f:
            beta *= lam[col]
        dead = False
        for u, nbrs in zip(outer, outer_nbrs):
            avail = agree[par[u]]
            for i in nbrs:
                avail = avail & G.adj[f[i]]
            w = G.weight(avail)
            if w == 0:
                dead = True
                break
            beta *= w
        if dead:
            continue
        alpha = Fraction(1)
        for x in S:
            p = par[x]
            # a boundary vertex of x lies in the other class
            ratio = G.weight(agree[1 - p] & G.adj[f[idx[x]]]) / lam_agree[1 - p]
            if ratio == 0:
                dead = True
                break
            alpha *= ratio
            beta /= ratio ** codeg[x]
        if dead:
            continue
        key = (alpha ** c, 0)
        acc[key] = acc.get(key, Fraction(0)) + beta / denom
    return ExpPoly(acc)


# Ursell function

def _connected(nv: int, edges: Sequence[tuple[int, int]]) -> bool:
    if nv <= 1:
        return True
    parent = list(range(nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = nv
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps == 1


@lru_cache(maxsize=None)
def _ursell_cached(nv: int, edges: tuple[tuple[int, int], ...]) -> Fraction:
    total = 0
    for r in range(len(edges) + 1):
        for sub in itertools.combinations(edges, r):
            if _connected(nv, sub):
                total += (-1) ** r
    return Fraction(total, math.factorial(nv))


def ursell(nv: int, edges: Iterable[tuple[int, int]]) -> Fraction:
    """phi(F) = (1/|V|!) * sum over spanning connected edge sets of (-1)^|E|.

    Returns 0 for a disconnected graph.
    """
    es = tuple(sorted({(min(u, v), max(u, v)) for u, v in edges if u != v}))
    return _ursell_cached(nv, es)


# clusters

def _compositions(k: int):
    if k == 0:
        yield ()
        return
    for first in range(1, k + 1):
        for rest in _compositions(k - first):
            yield (first,) + rest


def incompatibility_edges(parts: Sequence[Iterable[LocalVertex]], m: int) -> list[tuple[int, int]]:
    return [(i, j) for i, j in itertools.combinations(range(len(parts)), 2)
            if incompatible(parts[i], parts[j], m)]


def enumerate_clusters(S: LocalSet | Iterable[LocalVertex], k: int, m: int) -> list[RootedCluster]:
    """Ordered tuples of G^2-connected subsets of S, sizes summing to k, covering S,
    with connected incompatibility graph."""
    if not isinstance(S, LocalSet):
        vs = frozenset(S)
        S = LocalSet(vs, len(active_coords(vs)))
    verts = sorted(S.vertices)
    if len(verts) > k:
        return []
    by_size: dict[int, list[frozenset]] = {}
    for r in range(1, len(verts) + 1):
        by_size[r] = [frozenset(c) for c in itertools.combinations(verts, r)
                      if g2_connected(c, m)]
    out = []
    full = S.vertices
    for comp in _compositions(k):
        if max(comp) > len(verts):
            continue
        for parts in itertools.product(*(by_size[r] for r in comp)):
            if frozenset().union(*parts) != full:
                continue
            if not _connected(len(parts), incompatibility_edges(parts, m)):
                continue
            out.append(RootedCluster(S, tuple(parts)))
    return out


def cluster_weight(cl: RootedCluster, G: WeightedGraph, P: Pattern, root_parity: int, m: int,
                   cache: dict | None = None) -> ExpPoly:
    phi = ursell(len(cl.parts), incompatibility_edges(cl.parts, m))
    if phi == 0:
        return ExpPoly()
    w = ExpPoly.const(phi)
    for g in cl.parts:
        key = (g, root_parity)
        if cache is not None and key in cache:
            wg = cache[key]
        else:
            wg = polymer_weight_symbolic(g, G, P, root_parity, m, check=False)
            if cache is not None:
                cache[key] = wg
        w = w * wg
        if w.is_zero():
            break
    return w


def _check_k(k: int):
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > HARD_MAX_K:
        raise ValueError(f"k={k} exceeds the hard cap {HARD_MAX_K}")
    if k > DEFAULT_MAX_K:
        warnings.warn(f"k={k}: cluster enumeration grows like exp(O(k log k))", stacklevel=3)


def L_k(G: WeightedGraph, P: Pattern, m: int, k: int) -> ExpPoly:
    """L_{A,B}(k): total weight of clusters of size k, as an exact ExpPoly in n.

    Summed over the two root classes with m^n/2 vertices each; a support with
    j vertices is seen from each of its j roots, hence the 1/j.
    """
    require_dominant(G, P)
    _check_k(k)
    if m < 2 or m % 2:
        raise ValueError("m must be even >= 2")
    cache: dict = {}
    total = ExpPoly()
    for j in range(1, k + 1):
        for a, supports in sorted(enumerate_supports(m, j, k).items()):
            inner = ExpPoly()
            for S in supports:
                clusters = enumerate_clusters(S, k, m)
                for rp in ROOT_PARITIES:
                    for cl in clusters:
                        inner = inner + cluster_weight(cl, G, P, rp, m, cache)
            if not inner.is_zero():
                total = total + binomial_poly(a) * inner.scale(Fraction(1, j))
    return total * ExpPoly.monomial(Fraction(1, 2), 0, m)


def truncation_error_heuristic(G: WeightedGraph, P: Pattern, m: int, k: int) -> ExpPoly:
    """HEURISTIC tail shape m^n (c n)^(2(k-1)) delta^(c k n) with unit constant."""
    dl = delta(G, P)
    c = _c(m)
    return ExpPoly.monomial(Fraction(c) ** (2 * (k - 1)), 2 * (k - 1), m * dl ** (c * k))


# Taylor-series check of the cluster expansion on a finite polymer family

@dataclass
class TaylorReport:
    order: int
    log_side: list[Fraction]
    cluster_side: list[Fraction]

    @property
    def passed(self) -> bool:
        return self.log_side == self.cluster_side


def graded_xi(F: PolymerFamily, weights: dict[int, Fraction], K: int) -> GradedSeries:
    """Xi with each polymer weight multiplied by eps^|gamma|, truncated at order K."""
    T = F.torus
    containing: dict[int, list[int]] = {v: [] for v in range(T.size)}
    for g in F.polymers:
        if bin(g).count("1") <= K:
            for v in _bits(g):
                containing[v].append(g)
    memo: dict[int, list[Fraction]] = {}

    def xi(R: int) -> list[Fraction]:
        if R == 0:
            return [Fraction(1)] + [Fraction(0)] * K
        if R in memo:
            return memo[R]
        v = (R & -R).bit_length() - 1
        total = list(xi(R & ~(1 << v)))
        for g in containing[v]:
            if g & ~R:
                continue
            s = bin(g).count("1")
            sub = xi(R & ~T.ball2(g))
            w = weights[g]
            for i in range(K + 1 - s):
                total[i + s] += w * sub[i]
        memo[R] = total
        return total

    return GradedSeries(xi((1 << T.size) - 1))


def cluster_sums(F: PolymerFamily, weights: dict[int, Fraction], K: int) -> list[Fraction]:
    """sum over ordered clusters of size k of phi(I) * prod w, for k = 0..K."""
    T = F.torus
    polys = [g for g in F.polymers if bin(g).count("1") <= K]
    size = {g: bin(g).count("1") for g in polys}
    out = [Fraction(0)] * (K + 1)

    def incompat(g, h):
        return bool(T.ball2(g) & h)

    def extend(tup, remaining):
        if tup:
            edges = [(i, j) for i, j in itertools.combinations(range(len(tup)), 2)
                     if incompat(tup[i], tup[j])]
            if _connected(len(tup), edges):
                phi = ursell(len(tup), edges)
                w = phi
                for g in tup:
                    w *= weights[g]
                out[K - remaining] += w
        for g in polys:
            if size[g] <= remaining:
                extend(tup + (g,), remaining - size[g])

    extend((), K)
    return out


def taylor_expansion_check(F: PolymerFamily, G: WeightedGraph, P: Pattern,
                           T: TorusSpec | None = None, K: int = 4) -> TaylorReport:
    """Compare log Xi(eps) with the cluster sums order by order, exactly."""
    weights = polymer_weights(F, G, P)
    log_side = list(formal_log(graded_xi(F, weights, K)).coeffs)
    cl = cluster_sums(F, weights, K)
    cl[0] = Fraction(0)
    return TaylorReport(K, log_side, cl)
