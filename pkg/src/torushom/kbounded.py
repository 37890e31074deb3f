"""k-bounded functions on the Boolean lattice and their two bijections.

Subsets of [n] and hypercube vertices are both int bitmasks; bit i is
element i+1 (coordinate i).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .graph_model import cayley_graph, sk_set
from .torus_oracle import HOM_CAP, TorusSpec, partition_function

MAX_N = 4


class BijectionError(ValueError):
    pass


@dataclass(frozen=True)
class KBoundedFunction:
    n: int
    k: int
    values: tuple[int, ...]  # indexed by subset bitmask

    def __post_init__(self):
        if len(self.values) != 1 << self.n:
            raise ValueError("need one value per subset")
        if self.values[0] != 0:
            raise ValueError("f(empty set) must be 0")
        for A in range(1 << self.n):
            for i in range(self.n):
                if not A >> i & 1:
                    step = self.values[A | 1 << i] - self.values[A]
                    if not 0 <= step <= self.k:
                        raise ValueError(f"increment {step} outside 0..{self.k}")


@dataclass(frozen=True)
class LipFunction:
    n: int
    steps: frozenset[int]
    values: tuple[int, ...]  # indexed by hypercube vertex

    def __post_init__(self):
        if len(self.values) != 1 << self.n:
            raise ValueError("need one value per vertex")
        if self.values[0] != 0:
            raise ValueError("value at the zero vertex must be 0")
        for u, v in hypercube_edges(self.n):
            if abs(self.values[u] - self.values[v]) not in self.steps:
                raise ValueError(f"edge {u}-{v} violates the step set")


def hypercube_edges(n: int) -> Iterator[tuple[int, int]]:
    for v in range(1 << n):
        for i in range(n):
            if not v >> i & 1:
                yield v, v | 1 << i


def _rank_order(n: int) -> list[int]:
    return sorted(range(1 << n), key=lambda A: (bin(A).count("1"), A))


def iter_bk(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """Every k-bounded function on 2^[n], as value tuples indexed by subset."""
    if n > MAX_N:
        raise ValueError(f"n must be <= {MAX_N}")
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    order = _rank_order(n)
    vals = [0] * (1 << n)

    def rec(i):
        if i == len(order):
            yield tuple(vals)
            return
        A = order[i]
        lo, hi = 0, None
        for j in range(n):
            if A >> j & 1:
                below = vals[A ^ 1 << j]
                lo = max(lo, below)
                hi = below + k if hi is None else min(hi, below + k)
        for x in range(lo, hi + 1):
            vals[A] = x
            yield from rec(i + 1)

    yield from rec(1)


def enumerate_bk(n: int, k: int) -> int:
    """|B_k(n)| by depth-first search over the lattice in rank order."""
    if n > MAX_N:
        raise ValueError(f"n must be <= {MAX_N}")
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    order = _rank_order(n)
    vals = [0] * (1 << n)

    def rec(i):
        if i == len(order):
            return 1
        A = order[i]
        lo, hi = 0, None
        for j in range(n):
            if A >> j & 1:
                below = vals[A ^ 1 << j]
                lo = max(lo, below)
                hi = below + k if hi is None else min(hi, below + k)
        total = 0
        for x in range(lo, hi + 1):
            vals[A] = x
            total += rec(i + 1)
        return total

    return rec(1)


def phi_bijection(f: KBoundedFunction) -> LipFunction:
    """v -> 2 f(v) - k|v|, landing in Lip(Q_n; S_k)."""
    vals = tuple(2 * x - f.k * bin(v).count("1") for v, x in enumerate(f.values))
    return LipFunction(f.n, frozenset(sk_set(f.k)), vals)


def phi_inverse(g: LipFunction, k: int) -> KBoundedFunction:
    vals = []
    for v, x in enumerate(g.values):
        twice = x + k * bin(v).count("1")
        if twice % 2:
            raise BijectionError(f"parity violated at vertex {v}")
        vals.append(twice // 2)
    try:
        return KBoundedFunction(g.n, k, tuple(vals))
    except ValueError as e:
        raise BijectionError(str(e)) from None


def _check_modulus(steps, N):
    if N < 4 * max(steps) + 1:
        raise ValueError(f"N = {N} is below 4*max(S)+1")


def mod_bijection(g: LipFunction, N: int) -> tuple[int, ...]:
    """Reduce values mod N: a homomorphism Q_n -> C(N; S) sending 0 to 0."""
    _check_modulus(g.steps, N)
    return tuple(x % N for x in g.values)


def tree_parent(v: int) -> int:
    """Parent in the spanning tree: clear the first nonzero coordinate."""
    return v & (v - 1)


def mod_inverse(h: tuple[int, ...], steps, N: int) -> LipFunction:
    """Lift a rooted homomorphism along the spanning tree, then check every other edge."""
    steps = frozenset(steps)
    _check_modulus(steps, N)
    size = len(h)
    n = size.bit_length() - 1
    if h[0] != 0:
        raise BijectionError("homomorphism is not rooted at 0")
    lifts = {}
    for s in steps:
        for t in (s, -s):
            lifts.setdefault(t % N, t)
    g = [0] * size
    for v in range(1, size):
        p = tree_parent(v)
        r = (h[v] - h[p]) % N
        if r not in lifts:
            raise BijectionError(f"tree edge {p}-{v} is not an edge of C({N}; S)")
        g[v] = g[p] + lifts[r]
    for u, v in hypercube_edges(n):
        if abs(g[u] - g[v]) not in steps:
            raise BijectionError(f"non-tree edge {u}-{v} is inconsistent")
    return LipFunction(n, steps, tuple(g))


def is_rooted_hom(h: tuple[int, ...], steps, N: int) -> bool:
    if h[0] != 0:
        return False
    n = len(h).bit_length() - 1
    res = {t % N for s in steps for t in (s, -s)}
    return all((h[u] - h[v]) % N in res for u, v in hypercube_edges(n))


def count_via_hom(n: int, k: int, cap: int = HOM_CAP, unsafe_cap: bool = False) -> int:
    """|Hom(Q_n, C(4k+1; S_k))| / (4k+1)."""
    N = 4 * k + 1
    Z = partition_function(TorusSpec(2, n), cayley_graph(N, sk_set(k)), cap=cap,
                           unsafe_cap=unsafe_cap)
    q, r = divmod(Fraction(Z).numerator, N)
    if Fraction(Z).denominator != 1 or r:
        raise ArithmeticError(f"hom count {Z} not divisible by {N}")
    return q
