"""Exact exponential polynomials sum_i c_i * n^e_i * b_i^n, and truncated formal series."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import mpmath


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class ExpPoly:
    """Immutable canonical exponential polynomial in the integer variable n.

    Terms are keyed by (base, npow); zero coefficients and base-0 terms are
    never stored, so two ExpPolys are equal iff their term lists are equal.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple, Fraction] | Iterable[tuple] = ()):
        acc: dict[tuple[Fraction, int], Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else (
            ((b, e), c) for c, e, b in terms)
        for (base, npow), coeff in items:
            base = Fraction(base)
            coeff = Fraction(coeff)
            npow = int(npow)
            if npow < 0:
                raise ValueError("npow must be non-negative")
            if base < 0:
                raise ValueError("base must be non-negative")
            if base == 0 or coeff == 0:
                continue
            key = (base, npow)
            acc[key] = acc.get(key, Fraction(0)) + coeff
        self._terms = tuple(sorted((k, c) for k, c in acc.items() if c != 0))

    # constructors

    @classmethod
    def const(cls, c) -> "ExpPoly":
        return cls({(Fraction(1), 0): Fraction(c)})

    @classmethod
    def monomial(cls, coeff=1, npow: int = 0, base=1) -> "ExpPoly":
        return cls({(Fraction(base), npow): Fraction(coeff)})

    @classmethod
    def zero(cls) -> "ExpPoly":
        return cls()

    # access

    @property
    def terms(self) -> list[tuple[Fraction, int, Fraction]]:
        """Canonical (coeff, npow, base) list, sorted by (base, npow)."""
        return [(c, e, b) for (b, e), c in self._terms]

    def coeff(self, npow: int, base) -> Fraction:
        key = (Fraction(base), npow)
        for k, c in self._terms:
            if k == key:
                return c
        return Fraction(0)

    def bases(self) -> list[Fraction]:
        return sorted({b for (b, _), _ in self._terms})

    def max_npow(self) -> int:
        return max((e for (_, e), _ in self._terms), default=0)

    def restrict_base(self, base) -> "ExpPoly":
        base = Fraction(base)
        return ExpPoly({k: c for k, c in self._terms if k[0] == base})

    def is_zero(self) -> bool:
        return not self._terms

    # arithmetic

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            other = ExpPoly.const(other)
        return _sum_terms(self._terms, other._terms)

    __radd__ = __add__

    def __neg__(self) -> "ExpPoly":
        return self.scale(-1)

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            other = ExpPoly.const(other)
        return self + (-other)

    def scale(self, c) -> "ExpPoly":
        c = Fraction(c)
        return ExpPoly({k: v * c for k, v in self._terms})

    def __mul__(self, other) -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            return self.scale(other)
        acc: dict[tuple[Fraction, int], Fraction] = {}
        for (b1, e1), c1 in self._terms:
            for (b2, e2), c2 in other._terms:
                key = (b1 * b2, e1 + e2)
                acc[key] = acc.get(key, Fraction(0)) + c1 * c2
        return ExpPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "ExpPoly":
        out = ExpPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def __repr__(self):
        return f"ExpPoly({render(self)!r})"

    def __str__(self):
        return render(self)

    def __call__(self, n: int) -> Fraction:
        return eval_exact(self, n)


def _sum_terms(t1, t2) -> ExpPoly:
    acc: dict[tuple[Fraction, int], Fraction] = {}
    for k, c in t1 + t2:
        acc[k] = acc.get(k, Fraction(0)) + c
    return ExpPoly(acc)


def add(x: ExpPoly, y: ExpPoly) -> ExpPoly:
    return x + y


def scale(x: ExpPoly, c) -> ExpPoly:
    return x.scale(c)


def mul(x: ExpPoly, y: ExpPoly) -> ExpPoly:
    return x * y


def binomial_poly(a: int) -> ExpPoly:
    """C(n, a) = n(n-1)...(n-a+1)/a! as a polynomial in n."""
    if a < 0:
        raise ValueError("a must be >= 0")
    out = ExpPoly.const(1)
    for i in range(a):
        out = out * ExpPoly({(1, 1): 1, (1, 0): -i})
    return out.scale(Fraction(1, math.factorial(a)))


def eval_exact(x: ExpPoly, n: int) -> Fraction:
    if n < 0:
        raise ValueError("n must be non-negative")
    total = Fraction(0)
    for c, e, b in x.terms:
        total += c * n ** e * b ** n
    return total


@dataclass(frozen=True)
class FloatValue:
    """A float approximation with a relative error bound.

    ``log_abs`` is ln|value| (or -inf for zero) and stays finite when
    ``value`` overflows to +-inf.
    """

    value: float
    log_abs: float
    sign: int
    rel_err: float
    abs_err: float = 0.0


_MIN_NORMAL = 2.2250738585072014e-308


def _log_abs_fraction(v: Fraction) -> float:
    return math.log(abs(v.numerator)) - math.log(v.denominator)


def eval_float(x: ExpPoly, n: int, rel_tol: float = 1e-12) -> FloatValue:
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    exact = eval_exact(x, n)
    if exact == 0:
        return FloatValue(0.0, float("-inf"), 0, 0.0)
    sign = 1 if exact > 0 else -1
    log_abs = _log_abs_fraction(exact)
    if rel_tol >= 2.0 ** -52:
        try:
            val = float(exact)  # correctly rounded
        except OverflowError:
            val = sign * math.inf
        if abs(val) < _MIN_NORMAL:
            # underflow: only an absolute bound survives
            return FloatValue(val, log_abs, sign, 1.0, abs_err=_MIN_NORMAL)
        return FloatValue(val, log_abs, sign, 2.0 ** -53)
    digits = int(-math.log10(rel_tol)) + 5
    with mpmath.workdps(digits):
        mv = mpmath.mpf(exact.numerator) / exact.denominator
        val = float(mv)
    return FloatValue(val, log_abs, sign, rel_tol)


# serialization

def to_json(x: ExpPoly) -> list[dict]:
    return [{"coeff": _frac_str(c), "npow": e, "base": _frac_str(b)} for c, e, b in x.terms]


def from_json(data: list[dict]) -> ExpPoly:
    return ExpPoly({(Fraction(d["base"]), int(d["npow"])): Fraction(d["coeff"]) for d in data})


def render(x: ExpPoly) -> str:
    if x.is_zero():
        return "0"
    return " + ".join(f"{_frac_str(c)} * n^{e} * ({_frac_str(b)})^n" for c, e, b in x.terms)


# formal series in a grading variable

@dataclass(frozen=True)
class GradedSeries:
    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k]


def formal_log(s: GradedSeries) -> GradedSeries:
    """Coefficients of log(sum_k c_k eps^k) up to the same order.

    Uses k*l_k = k*c_k - sum_{j=1}^{k-1} j*l_j*c_{k-j}, valid when c_0 = 1.
    """
    c = s.coeffs
    if not c or c[0] != 1:
        raise ValueError("formal_log needs constant coefficient 1")
    K = len(c) - 1
    out = [Fraction(0)] * (K + 1)
    for k in range(1, K + 1):
        acc = k * c[k]
        for j in range(1, k):
            acc -= j * out[j] * c[k - j]
        out[k] = acc / k
    return GradedSeries(out)


def formal_exp(s: GradedSeries) -> GradedSeries:
    """exp of a series with zero constant term: k*e_k = sum_{j=1}^k j*s_j*e_{k-j}."""
    a = s.coeffs
    if a and a[0] != 0:
        raise ValueError("formal_exp needs constant coefficient 0")
    K = len(a) - 1
    out = [Fraction(0)] * (K + 1)
    out[0] = Fraction(1)
    for k in range(1, K + 1):
        acc = Fraction(0)
        for j in range(1, k + 1):
            acc += j * a[j] * out[k - j]
        out[k] = acc / k
    return GradedSeries(out)
