"""Brute-force ground truth on small tori Z_m^n.

Vertices are indexed 0..m^n-1 (mixed radix, coordinate 0 least significant);
vertex sets are int bitmasks throughout.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .graph_model import Pattern, WeightedGraph, dominant_patterns

HOM_CAP = 20
POLYMER_CAP = 16
DEFAULT_ALPHA = Fraction(1, 8)


class CapExceeded(RuntimeError):
    pass


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class TorusSpec:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 2 or self.m % 2:
            raise ValueError("m must be an even integer >= 2")
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def d(self) -> int:
        return (2 if self.m > 2 else 1) * self.n

    @property
    def size(self) -> int:
        return self.m ** self.n

    def coords(self, v: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.n):
            v, r = divmod(v, self.m)
            out.append(r)
        return tuple(out)

    def index(self, coords: Sequence[int]) -> int:
        v = 0
        for c in reversed(coords):
            v = v * self.m + c % self.m
        return v

    def parity(self, v: int) -> int:
        """0 for the even class E, 1 for the odd class O."""
        return sum(self.coords(v)) % 2

    @cached_property
    def neighbours(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for v in range(self.size):
            c = list(self.coords(v))
            nb = set()
            for i in range(self.n):
                for s in (1, -1):
                    w = c.copy()
                    w[i] = (w[i] + s) % self.m
                    nb.add(self.index(w))
            out.append(tuple(sorted(nb)))
        return tuple(out)

    @cached_property
    def nbr_mask(self) -> tuple[int, ...]:
        return tuple(sum(1 << w for w in nb) for nb in self.neighbours)

    @cached_property
    def odd_mask(self) -> int:
        return sum(1 << v for v in range(self.size) if self.parity(v))

    @cached_property
    def ball2_mask(self) -> tuple[int, ...]:
        """Vertices at graph distance <= 2 from each vertex (itself included)."""
        out = []
        for v in range(self.size):
            m1 = self.nbr_mask[v] | (1 << v)
            m2 = m1
            for w in _bits(self.nbr_mask[v]):
                m2 |= self.nbr_mask[w]
            out.append(m2)
        return tuple(out)

    def neighbourhood(self, mask: int) -> int:
        out = 0
        for v in _bits(mask):
            out |= self.nbr_mask[v]
        return out

    def ball2(self, mask: int) -> int:
        out = 0
        for v in _bits(mask):
            out |= self.ball2_mask[v]
        return out

    def bfs_order(self) -> list[int]:
        seen = {0}
        order = []
        dq = deque([0])
        while dq:
            v = dq.popleft()
            order.append(v)
            for w in self.neighbours[v]:
                if w not in seen:
                    seen.add(w)
                    dq.append(w)
        return order

    def g2_components(self, mask: int) -> list[int]:
        comps = []
        rest = mask
        while rest:
            low = rest & -rest
            comp = low
            frontier = low
            while frontier:
                grow = self.ball2(frontier) & rest & ~comp
                comp |= grow
                frontier = grow
            comps.append(comp)
            rest &= ~comp
        return comps

    def is_g2_connected(self, mask: int) -> bool:
        return mask != 0 and len(self.g2_components(mask)) == 1


def _check_cap(T: TorusSpec, cap: int, unsafe: bool, what: str):
    if T.size > cap and not unsafe:
        raise CapExceeded(f"{what}: torus has {T.size} vertices, cap is {cap} "
                          f"(pass --unsafe-cap to override)")


def _enumerate_colourings(T: TorusSpec, G: WeightedGraph, allowed: Sequence[Iterable[int]],
                          verts: Sequence[int]) -> Iterator[dict[int, int]]:
    """All homomorphisms of the induced subgraph T[verts] with f(v) in allowed[v]."""
    order = list(verts)
    pos = {v: i for i, v in enumerate(order)}
    earlier = [[pos[w] for w in T.neighbours[v] if w in pos and pos[w] < i]
               for i, v in enumerate(order)]
    allowed_sets = [frozenset(allowed[v]) for v in order]
    cols = [0] * len(order)

    def rec(i):
        if i == len(order):
            yield dict(zip(order, cols))
            return
        cand = allowed_sets[i]
        for j in earlier[i]:
            cand = cand & G.adj[cols[j]]
        for c in sorted(cand):
            cols[i] = c
            yield from rec(i + 1)

    yield from rec(0)


def homomorphisms(T: TorusSpec, G: WeightedGraph, order: Sequence[int] | None = None,
                  cap: int = HOM_CAP, unsafe_cap: bool = False) -> Iterator[tuple[int, ...]]:
    """Every homomorphism Z_m^n -> H as a colour tuple indexed by vertex."""
    _check_cap(T, cap, unsafe_cap, "homomorphism enumeration")
    order = T.bfs_order() if order is None else list(order)
    allowed = [range(G.q)] * T.size
    for f in _enumerate_colourings(T, G, allowed, order):
        yield tuple(f[v] for v in range(T.size))


def hom_weight(G: WeightedGraph, f: Sequence[int]) -> Fraction:
    w = Fraction(1)
    for c in f:
        w *= G.activities[c]
    return w


def partition_function(T: TorusSpec, G: WeightedGraph, order: Sequence[int] | None = None,
                       cap: int = HOM_CAP, unsafe_cap: bool = False) -> Fraction:
    """Exact Z by backtracking with forward pruning (integer-scaled activities)."""
    _check_cap(T, cap, unsafe_cap, "partition function")
    order = T.bfs_order() if order is None else list(order)
    D = math.lcm(*(lam.denominator for lam in G.activities))
    ints = [int(lam * D) for lam in G.activities]
    pos = {v: i for i, v in enumerate(order)}
    earlier = [[pos[w] for w in T.neighbours[v] if pos[w] < i] for i, v in enumerate(order)]
    N = len(order)
    cols = [0] * N
    full = frozenset(range(G.q))

    def rec(i):
        if i == N:
            return 1
        cand = full
        for j in earlier[i]:
            cand = cand & G.adj[cols[j]]
        total = 0
        for c in cand:
            cols[i] = c
            total += ints[c] * rec(i + 1)
        return total

    return Fraction(rec(0), D ** N)


def partition_function_transfer(m: int, G: WeightedGraph) -> Fraction:
    """Z on the cycle Z_m^1 as trace((A Lambda)^m); m=2 is a single edge."""
    if m < 2 or m % 2:
        raise ValueError("m must be even >= 2")
    q = G.q
    M = [[G.activities[j] if G.adjacent(i, j) else Fraction(0) for j in range(q)]
         for i in range(q)]
    P = [[Fraction(int(i == j)) for j in range(q)] for i in range(q)]
    for _ in range(m):
        P = [[sum((P[i][k] * M[k][j] for k in range(q)), Fraction(0)) for j in range(q)]
             for i in range(q)]
    return sum((P[i][i] for i in range(q)), Fraction(0))


# polymers

@dataclass(frozen=True)
class PolymerFamily:
    torus: TorusSpec
    alpha: Fraction
    polymers: tuple[int, ...]

    @cached_property
    def as_set(self) -> frozenset[int]:
        return frozenset(self.polymers)

    def __len__(self):
        return len(self.polymers)

    def __contains__(self, mask):
        return mask in self.as_set

    def incompatible(self, g1: int, g2: int) -> bool:
        return bool(self.torus.ball2(g1) & g2)


def is_polymer(T: TorusSpec, mask: int, alpha: Fraction) -> bool:
    if not T.is_g2_connected(mask):
        return False
    bound = (1 - Fraction(alpha)) * Fraction(T.size, 2)
    odd = mask & T.odd_mask
    even = mask & ~T.odd_mask
    return (bin(T.neighbourhood(even)).count("1") < bound
            and bin(T.neighbourhood(odd)).count("1") < bound)


def enumerate_polymers(T: TorusSpec, alpha=DEFAULT_ALPHA, cap: int = POLYMER_CAP,
                       unsafe_cap: bool = False) -> PolymerFamily:
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    _check_cap(T, cap, unsafe_cap, "polymer enumeration")
    polys = tuple(s for s in range(1, 1 << T.size) if is_polymer(T, s, alpha))
    return PolymerFamily(T, alpha, polys)


def _agree_sets(P: Pattern, G: WeightedGraph):
    """(agree, disagree) colour sets indexed by parity: 0 = E (agrees in B), 1 = O (in A)."""
    allc = frozenset(range(G.q))
    agree = (P.B, P.A)
    return agree, (allc - P.B, allc - P.A)


def polymer_weight(T: TorusSpec, G: WeightedGraph, P: Pattern, mask: int) -> Fraction:
    """Weight of a vertex set from colourings of S^+ that disagree exactly on S."""
    agree, disagree = _agree_sets(P, G)
    plus = mask | T.neighbourhood(mask)
    verts = list(_bits(plus))
    allowed = {}
    for v in verts:
        par = T.parity(v)
        allowed[v] = disagree[par] if mask >> v & 1 else agree[par]
    # order: S first, then boundary (prunes early)
    verts.sort(key=lambda v: (not (mask >> v & 1), v))
    num = Fraction(0)
    for f in _enumerate_colourings(T, G, allowed, verts):
        num += hom_weight(G, f.values())
    lam_a, lam_b = G.weight(P.A), G.weight(P.B)
    n_odd = bin(plus & T.odd_mask).count("1")
    n_even = len(verts) - n_odd
    return num / (lam_a ** n_odd * lam_b ** n_even)


def polymer_weight_global(T: TorusSpec, G: WeightedGraph, P: Pattern, mask: int,
                          eta: Fraction | None = None) -> Fraction:
    """Definition-level weight: full-torus sum over chi(S) divided by eta^(m^n/2)."""
    if eta is None:
        eta = dominant_patterns(G).eta
    agree, disagree = _agree_sets(P, G)
    allowed = [disagree[T.parity(v)] if mask >> v & 1 else agree[T.parity(v)]
               for v in range(T.size)]
    num = Fraction(0)
    for f in _enumerate_colourings(T, G, allowed, T.bfs_order()):
        num += hom_weight(G, f.values())
    return num / eta ** (T.size // 2)


def set_weight(T: TorusSpec, G: WeightedGraph, P: Pattern, mask: int) -> Fraction:
    """Weight of an arbitrary set as the product over its G^2-components."""
    w = Fraction(1)
    for comp in T.g2_components(mask):
        w *= polymer_weight(T, G, P, comp)
    return w


def polymer_weights(F: PolymerFamily, G: WeightedGraph, P: Pattern) -> dict[int, Fraction]:
    return {g: polymer_weight(F.torus, G, P, g) for g in F.polymers}


def xi_exact(F: PolymerFamily, G: WeightedGraph, P: Pattern, T: TorusSpec | None = None,
             weights: dict[int, Fraction] | None = None) -> Fraction:
    """Sum over compatible polymer families of the product of weights.

    Recursion on the lowest free vertex v: either no polymer contains v, or
    exactly one does and the rest avoid its radius-2 ball.
    """
    T = F.torus if T is None else T
    if weights is None:
        weights = polymer_weights(F, G, P)
    containing: dict[int, list[int]] = {v: [] for v in range(T.size)}
    for g in F.polymers:
        for v in _bits(g):
            containing[v].append(g)
    memo: dict[int, Fraction] = {}

    def xi(R: int) -> Fraction:
        if R == 0:
            return Fraction(1)
        if R in memo:
            return memo[R]
        v = (R & -R).bit_length() - 1
        total = xi(R & ~(1 << v))
        for g in containing[v]:
            if g & ~R == 0:
                total += weights[g] * xi(R & ~T.ball2(g))
        memo[R] = total
        return total

    return xi((1 << T.size) - 1)


def xi_by_subsets(F: PolymerFamily, G: WeightedGraph, P: Pattern) -> Fraction:
    """Independent route: sum of w(S) over sets whose G^2-components are all polymers."""
    T = F.torus
    weights = polymer_weights(F, G, P)
    total = Fraction(0)
    for S in range(1 << T.size):
        comps = T.g2_components(S)
        if all(c in weights for c in comps):
            w = Fraction(1)
            for c in comps:
                w *= weights[c]
            total += w
    return total


def defect_set(T: TorusSpec, P: Pattern, f: Sequence[int]) -> int:
    """S(f): odd vertices coloured outside A plus even vertices coloured outside B."""
    mask = 0
    for v, c in enumerate(f):
        if T.parity(v):
            if c not in P.A:
                mask |= 1 << v
        elif c not in P.B:
            mask |= 1 << v
    return mask


def capture_classify(T: TorusSpec, G: WeightedGraph, P: Pattern, f: Sequence[int],
                     F: PolymerFamily) -> bool:
    S = defect_set(T, P, f)
    return all(c in F for c in T.g2_components(S))


@dataclass
class TildeReport:
    torus: TorusSpec
    alpha: Fraction
    Z: Fraction
    Z_tilde: Fraction
    Z_tilde_from_capture: Fraction
    xi: dict[str, Fraction]
    p_histogram: dict[int, int]
    tv: Fraction | None = None

    @property
    def passed(self) -> bool:
        return self.Z_tilde == self.Z_tilde_from_capture

    def to_json(self) -> dict:
        out = {
            "m": self.torus.m,
            "n": self.torus.n,
            "alpha": _frac_str(self.alpha),
            "Z": _frac_str(self.Z),
            "Z_tilde": _frac_str(self.Z_tilde),
            "Z_tilde_capture": _frac_str(self.Z_tilde_from_capture),
            "identity": "PASS" if self.passed else "FAIL",
            "xi": {k: _frac_str(v) for k, v in self.xi.items()},
            "p_histogram": {str(k): v for k, v in sorted(self.p_histogram.items())},
        }
        if self.tv is not None:
            out["tv"] = _frac_str(self.tv)
        return out


@dataclass
class HomRecord:
    colouring: tuple[int, ...]
    weight: Fraction
    p: int
    capturing: tuple[Pattern, ...]
    mu: Fraction = Fraction(0)
    mu_hat: Fraction = Fraction(0)


@dataclass
class HomTable:
    torus: TorusSpec
    alpha: Fraction
    eta: Fraction
    records: list[HomRecord]
    Z: Fraction
    Z_tilde: Fraction
    xi: dict[Pattern, Fraction]
    tv: Fraction = Fraction(0)

    def p_histogram(self) -> dict[int, int]:
        return dict(Counter(r.p for r in self.records))

    def class_weights(self) -> dict[str, Fraction]:
        """Total weight of Hom_0, Hom_1 and Hom_2 (captured by 0, 1, >=2 patterns)."""
        out = {"Hom0": Fraction(0), "Hom1": Fraction(0), "Hom2": Fraction(0)}
        for r in self.records:
            out["Hom" + str(min(r.p, 2))] += r.weight
        return out


def _build_table(T: TorusSpec, G: WeightedGraph, alpha, cap: int, unsafe_cap: bool) -> HomTable:
    alpha = Fraction(alpha)
    dps = dominant_patterns(G)
    F = enumerate_polymers(T, alpha, unsafe_cap=unsafe_cap)
    xis = {P: xi_exact(F, G, P) for P in dps.patterns}
    Z_tilde = dps.eta ** (T.size // 2) * sum(xis.values(), Fraction(0))
    records = []
    Z = Fraction(0)
    for f in homomorphisms(T, G, cap=cap, unsafe_cap=unsafe_cap):
        w = hom_weight(G, f)
        caps = tuple(P for P in dps.patterns if capture_classify(T, G, P, f, F))
        records.append(HomRecord(f, w, len(caps), caps))
        Z += w
    return HomTable(T, alpha, dps.eta, records, Z, Z_tilde, xis)


def measures_table(T: TorusSpec, G: WeightedGraph, alpha=DEFAULT_ALPHA, cap: int = HOM_CAP,
                   unsafe_cap: bool = False) -> HomTable:
    """Exact mu(f) = weight/Z, mu_hat(f) = p_f * weight / Z_tilde and their TV distance."""
    table = _build_table(T, G, alpha, cap, unsafe_cap)
    tv = Fraction(0)
    for r in table.records:
        r.mu = r.weight / table.Z
        r.mu_hat = r.p * r.weight / table.Z_tilde
        if r.mu_hat > r.mu:
            tv += r.mu_hat - r.mu
    table.tv = tv
    return table


def verify_tilde_identity(T: TorusSpec, G: WeightedGraph, alpha=DEFAULT_ALPHA,
                          cap: int = HOM_CAP, unsafe_cap: bool = False,
                          with_tv: bool = False) -> TildeReport:
    table = measures_table(T, G, alpha, cap, unsafe_cap) if with_tv else \
        _build_table(T, G, alpha, cap, unsafe_cap)
    captured = sum((r.p * r.weight for r in table.records), Fraction(0))
    return TildeReport(
        torus=T, alpha=table.alpha, Z=table.Z, Z_tilde=table.Z_tilde,
        Z_tilde_from_capture=captured,
        xi={P.label(): v for P, v in table.xi.items()},
        p_histogram=table.p_histogram(),
        tv=table.tv if with_tv else None,
    )


# brute-force cluster sums on a concrete torus (no alpha cutoff)

def ursell_deletion_contraction(nv: int, edges: Iterable[tuple[int, int]]) -> Fraction:
    """Ursell function via deletion-contraction on a multigraph.

    C(F) = sum over spanning connected edge sets of (-1)^|E| satisfies
    C(F) = C(F-e) - C(F/e) for a non-loop edge, C = 0 with a loop and
    C = 1 on a single vertex; disconnected graphs give 0.
    """

    def signed(nv, es):
        if any(u == v for u, v in es):
            return 0
        if not es:
            return 1 if nv == 1 else 0
        (u, v), rest = es[0], es[1:]
        # contract v into u, relabel vertices above v
        def r(x):
            x = u if x == v else x
            return x - 1 if x > v else x
        contracted = [(r(a), r(b)) for a, b in rest]
        return signed(nv, rest) - signed(nv - 1, contracted)

    es = [(min(u, v), max(u, v)) for u, v in edges]
    return Fraction(signed(nv, es), math.factorial(nv))


def connected_sets_upto(T: TorusSpec, k: int) -> list[int]:
    """Every G^2-connected vertex set of size <= k, grown from single vertices."""
    layer = {1 << v for v in range(T.size)}
    out = set(layer)
    for _ in range(k - 1):
        nxt = set()
        for S in layer:
            for w in _bits(T.ball2(S) & ~S):
                nxt.add(S | (1 << w))
        out |= nxt
        layer = nxt
    return sorted(out)


def brute_cluster_sum(T: TorusSpec, G: WeightedGraph, P: Pattern, k: int) -> Fraction:
    """Total weight of clusters of size exactly k on T, all G^2-connected sets as polymers.

    Connected multisets are grown one incompatible polymer at a time and
    weighted by their number of orderings.
    """
    polys = connected_sets_upto(T, k)
    size = {g: bin(g).count("1") for g in polys}
    weights: dict[int, Fraction] = {}

    def w(g):
        if g not in weights:
            weights[g] = polymer_weight(T, G, P, g)
        return weights[g]

    by_vertex: dict[int, list[int]] = {v: [] for v in range(T.size)}
    for g in polys:
        for v in _bits(g):
            by_vertex[v].append(g)

    def incompatible_with(g):
        out = set()
        for v in _bits(T.ball2(g)):
            out.update(by_vertex[v])
        return out

    layer = {(g,) for g in polys if size[g] <= k}
    seen = set(layer)
    total = Fraction(0)
    while layer:
        nxt = set()
        for ms in layer:
            s = sum(size[g] for g in ms)
            if s == k:
                ell = len(ms)
                edges = [(i, j) for i in range(ell) for j in range(i + 1, ell)
                         if T.ball2(ms[i]) & ms[j]]
                orderings = math.factorial(ell)
                for c in Counter(ms).values():
                    orderings //= math.factorial(c)
                prod = Fraction(1)
                for g in ms:
                    prod *= w(g)
                total += orderings * ursell_deletion_contraction(ell, edges) * prod
                continue
            cand = set()
            for g in set(ms):
                cand |= incompatible_with(g)
            for h in cand:
                if s + size[h] <= k:
                    new = tuple(sorted(ms + (h,)))
                    if new not in seen:
                        seen.add(new)
                        nxt.add(new)
        layer = nxt
    return total
