"""Weighted target graphs (H, lambda), patterns and dominant patterns."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence


class GraphFormatError(ValueError):
    """Raised when a graph file cannot be parsed."""

    def __init__(self, message: str, lineno: int | None = None, source: str | None = None):
        self.lineno = lineno
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if lineno is not None:
            where += f"{lineno}: "
        elif where:
            where += " "
        super().__init__(where + message)


class NoPatternError(ValueError):
    pass


class NotDominantError(ValueError):
    pass


@dataclass(frozen=True)
class WeightedGraph:
    """A graph on vertices 0..q-1 with loops allowed and positive rational activities.

    ``adj`` is a tuple of frozensets; ``v in adj[v]`` marks a loop.
    """

    q: int
    adj: tuple[frozenset[int], ...]
    activities: tuple[Fraction, ...]
    name: str = ""

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if len(self.adj) != self.q or len(self.activities) != self.q:
            raise ValueError("adjacency / activities length mismatch")
        for u in range(self.q):
            for v in self.adj[u]:
                if not 0 <= v < self.q or u not in self.adj[v]:
                    raise ValueError("adjacency must be symmetric and in range")
        if any(lam <= 0 for lam in self.activities):
            raise ValueError("non-positive activity")

    @classmethod
    def from_edges(cls, q: int, edges: Iterable[tuple[int, int]],
                   activities: Sequence | None = None, name: str = "") -> "WeightedGraph":
        nbrs: list[set[int]] = [set() for _ in range(q)]
        for u, v in edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        if activities is None:
            acts = tuple(Fraction(1) for _ in range(q))
        else:
            acts = tuple(Fraction(a) for a in activities)
        return cls(q, tuple(frozenset(s) for s in nbrs), acts, name)

    def adjacent(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def weight(self, subset: Iterable[int]) -> Fraction:
        """lambda_X, the total activity of a vertex subset."""
        return sum((self.activities[v] for v in subset), Fraction(0))

    def has_adjacency(self) -> bool:
        return any(self.adj)

    def relabel(self, perm: Sequence[int]) -> "WeightedGraph":
        """Return the graph with vertex ``v`` renamed ``perm[v]``."""
        adj: list[frozenset[int]] = [frozenset()] * self.q
        acts: list[Fraction] = [Fraction(0)] * self.q
        for v in range(self.q):
            adj[perm[v]] = frozenset(perm[u] for u in self.adj[v])
            acts[perm[v]] = self.activities[v]
        return WeightedGraph(self.q, tuple(adj), tuple(acts), self.name)

    def is_bipartite(self) -> bool:
        colour: dict[int, int] = {}
        for s in range(self.q):
            if s in colour:
                continue
            colour[s] = 0
            stack = [s]
            while stack:
                u = stack.pop()
                for v in self.adj[u]:
                    if v not in colour:
                        colour[v] = 1 - colour[u]
                        stack.append(v)
                    elif colour[v] == colour[u]:
                        return False
        return True


@dataclass(frozen=True, order=True)
class Pattern:
    A: frozenset[int]
    B: frozenset[int]

    def swap(self) -> "Pattern":
        return Pattern(self.B, self.A)

    def label(self, one_indexed: bool = True) -> str:
        off = 1 if one_indexed else 0
        a = ",".join(str(v + off) for v in sorted(self.A))
        b = ",".join(str(v + off) for v in sorted(self.B))
        return f"({{{a}}},{{{b}}})"


@dataclass(frozen=True)
class DominantPatternSet:
    eta: Fraction
    patterns: tuple[Pattern, ...]

    def __len__(self):
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def __contains__(self, p):
        return p in self.patterns


def _parse_rational(tok: str) -> Fraction:
    return Fraction(tok)


def load_graph(text: str, source: str | None = None) -> WeightedGraph:
    """Parse the line-oriented graph format.

    ``q <int>`` must come first; then ``lambda <i> <p>/<q>`` and
    ``edge <i> <j>`` lines in any order. Vertices are 1-indexed in the file.
    """
    q = None
    edges: list[tuple[int, int]] = []
    acts: dict[int, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        key = toks[0]
        if q is None:
            if key != "q" or len(toks) != 2:
                raise GraphFormatError("malformed line: first directive must be 'q <integer>'",
                                       lineno, source)
            try:
                q = int(toks[1])
            except ValueError:
                raise GraphFormatError(f"malformed line: bad vertex count {toks[1]!r}",
                                       lineno, source) from None
            if q < 1:
                raise GraphFormatError("malformed line: q must be >= 1", lineno, source)
            continue

        def vertex(tok: str) -> int:
            try:
                i = int(tok)
            except ValueError:
                raise GraphFormatError(f"malformed line: bad vertex {tok!r}",
                                       lineno, source) from None
            if not 1 <= i <= q:
                raise GraphFormatError(f"vertex index out of range: {i}", lineno, source)
            return i - 1

        if key == "lambda":
            if len(toks) != 3:
                raise GraphFormatError("malformed line: expected 'lambda <i> <p>/<q>'",
                                       lineno, source)
            v = vertex(toks[1])
            try:
                lam = _parse_rational(toks[2])
            except (ValueError, ZeroDivisionError):
                raise GraphFormatError(f"malformed line: bad activity {toks[2]!r}",
                                       lineno, source) from None
            if lam <= 0:
                raise GraphFormatError(f"non-positive activity for vertex {v + 1}",
                                       lineno, source)
            if v in acts:
                raise GraphFormatError(f"duplicate activity declaration for vertex {v + 1}",
                                       lineno, source)
            acts[v] = lam
        elif key == "edge":
            if len(toks) != 3:
                raise GraphFormatError("malformed line: expected 'edge <i> <j>'", lineno, source)
            edges.append((vertex(toks[1]), vertex(toks[2])))
        else:
            raise GraphFormatError(f"malformed line: unknown directive {key!r}", lineno, source)
    if q is None:
        raise GraphFormatError("malformed line: missing 'q <integer>'", None, source)
    activities = [acts.get(v, Fraction(1)) for v in range(q)]
    return WeightedGraph.from_edges(q, edges, activities, name=source or "")


def dump_graph(G: WeightedGraph) -> str:
    lines = [f"q {G.q}"]
    for v, lam in enumerate(G.activities):
        if lam != 1:
            lines.append(f"lambda {v + 1} {lam.numerator}/{lam.denominator}")
    for u in range(G.q):
        for v in sorted(G.adj[u]):
            if u <= v:
                lines.append(f"edge {u + 1} {v + 1}")
    return "\n".join(lines) + "\n"


def common_neighborhood(G: WeightedGraph, A: Iterable[int]) -> frozenset[int]:
    """Vertices adjacent to every member of A; all of V(H) when A is empty."""
    out = frozenset(range(G.q))
    for a in A:
        out &= G.adj[a]
    return out


def _subsets(q: int):
    for r in range(1, q + 1):
        for c in combinations(range(q), r):
            yield frozenset(c)


def dominant_patterns(G: WeightedGraph) -> DominantPatternSet:
    # any dominant (A,B) has B = n(A), so a scan over A suffices
    if not G.has_adjacency():
        raise NoPatternError("no pattern exists: the graph has no edges or loops")
    best = Fraction(-1)
    found: set[Pattern] = set()
    for A in _subsets(G.q):
        B = common_neighborhood(G, A)
        if not B:
            continue
        val = G.weight(A) * G.weight(B)
        if val > best:
            best = val
            found = {Pattern(A, B)}
        elif val == best:
            found.add(Pattern(A, B))
    return DominantPatternSet(best, tuple(sorted(found, key=_pattern_key)))


def _pattern_key(p: Pattern):
    return (sorted(p.A), sorted(p.B))


def is_dominant(G: WeightedGraph, P: Pattern) -> bool:
    if not P.A or not P.B:
        return False
    if any(not G.adjacent(a, b) for a in P.A for b in P.B):
        return False
    return G.weight(P.A) * G.weight(P.B) == dominant_patterns(G).eta


def require_dominant(G: WeightedGraph, P: Pattern) -> None:
    if not is_dominant(G, P):
        raise NotDominantError(f"pattern {P.label()} is not dominant")


def delta(G: WeightedGraph, P: Pattern) -> Fraction:
    require_dominant(G, P)
    lam_a = G.weight(P.A)
    lam_b = G.weight(P.B)
    best = Fraction(0)
    for v in range(G.q):
        if v not in P.B:
            best = max(best, G.weight(G.adj[v] & P.A) / lam_a)
        if v not in P.A:
            best = max(best, G.weight(G.adj[v] & P.B) / lam_b)
    return best


def cayley_graph(N: int, S: Iterable[int]) -> WeightedGraph:
    """C(N; S): u ~ v iff u - v = +-x (mod N) for some x in S."""
    if N < 1:
        raise ValueError("N must be >= 1")
    S = {x % N for x in S}
    edges = []
    for u in range(N):
        for x in S:
            edges.append((u, (u + x) % N))
    return WeightedGraph.from_edges(N, edges, name=f"C({N};{sorted(S)})")


# standard instances

def complete_graph(q: int) -> WeightedGraph:
    return WeightedGraph.from_edges(q, combinations(range(q), 2), name=f"K_{q}")


def hardcore_graph(x=1) -> WeightedGraph:
    """Vertex 0 is v_in (activity x), vertex 1 is v_out (looped, activity 1)."""
    return WeightedGraph.from_edges(2, [(0, 1), (1, 1)], [Fraction(x), Fraction(1)],
                                    name=f"hardcore(x={Fraction(x)})")


def sk_set(k: int) -> set[int]:
    """S_k = {0..k} intersected with k + 2Z."""
    return {s for s in range(k + 1) if (s - k) % 2 == 0}
