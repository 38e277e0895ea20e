"""Sparse multivariate polynomials with exact coefficients and a weight grading."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Mapping, Sequence

__all__ = [
    "WeightVector",
    "Poly",
    "InhomogeneousError",
    "NotReducedError",
    "monomials",
    "poly_mul",
    "poly_add",
]


class InhomogeneousError(ValueError):
    """The polynomial is not weighted homogeneous for the given weights."""

    def __init__(self, message: str, offending: Sequence[tuple] = ()):
        super().__init__(message)
        self.offending = list(offending)


class NotReducedError(ValueError):
    """The polynomial has a repeated factor."""


@dataclass(frozen=True)
class WeightVector:
    """Integer weights ``a`` with ``deg x_i = a_i`` and ``e = deg f``."""

    a: tuple[int, ...]
    e: int

    def __post_init__(self):
        if any((not isinstance(w, int)) or w <= 0 for w in self.a):
            raise ValueError(f"weights must be positive integers, got {self.a}")
        if self.e <= 0:
            raise ValueError(f"weighted degree must be positive, got {self.e}")

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def unweighted(self) -> bool:
        return all(w == 1 for w in self.a)

    def degree(self, beta: Sequence[int]) -> int:
        return sum(w * b for w, b in zip(self.a, beta))

    def rational_weights(self) -> tuple[Fraction, ...]:
        """The normalized weights ``w_i = a_i / e`` (so that ``deg f = 1``)."""
        return tuple(Fraction(w, self.e) for w in self.a)

    @classmethod
    def from_rational(cls, w: Sequence[Fraction]) -> "WeightVector":
        """Clear denominators of ``w_i`` to get integer weights and ``e``."""
        w = [Fraction(x) for x in w]
        e = 1
        for x in w:
            e = e * x.denominator // gcd(e, x.denominator)
        return cls(tuple(int(x * e) for x in w), e)


def monomials(a: Sequence[int], m: int) -> list[tuple[int, ...]]:
    """Exponent vectors of weighted degree ``m``, descending lexicographic."""
    n = len(a)
    out: list[tuple[int, ...]] = []
    if m < 0:
        return out
    if n == 0:
        return [()] if m == 0 else out

    def rec(i: int, rest: int, prefix: list[int]):
        if i == n - 1:
            if rest % a[i] == 0:
                out.append(tuple(prefix + [rest // a[i]]))
            return
        for b in range(rest // a[i], -1, -1):
            rec(i + 1, rest - b * a[i], prefix + [b])

    rec(0, m, [])
    return out


def poly_add(p: Mapping, q: Mapping, scale=1) -> dict:
    out = dict(p)
    for m, c in q.items():
        s = out.get(m, 0) + scale * c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def poly_mul(p: Mapping, q: Mapping) -> dict:
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            s = out.get(m, 0) + c1 * c2
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


@dataclass(frozen=True, eq=False)
class Poly:
    """A weighted homogeneous polynomial ``sum c_beta x^beta``.

    ``terms`` maps exponent tuples to nonzero :class:`Fraction` coefficients.
    Construction checks that every monomial has weighted degree ``weights.e``.
    """

    terms: Mapping[tuple[int, ...], Fraction]
    weights: WeightVector
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        terms = {tuple(m): Fraction(c) for m, c in self.terms.items() if c}
        if not terms:
            raise ValueError("the zero polynomial has no degree")
        n = self.weights.n
        for m in terms:
            if len(m) != n or any(x < 0 for x in m):
                raise ValueError(f"bad exponent vector {m} for {n} variables")
        bad = [m for m in terms if self.weights.degree(m) != self.weights.e]
        if bad:
            raise InhomogeneousError(
                f"monomials {bad} do not have weighted degree {self.weights.e}", bad
            )
        object.__setattr__(self, "terms", terms)
        if not self.names:
            object.__setattr__(self, "names", default_names(n))
        elif len(self.names) != n:
            raise ValueError("one name per variable required")

    @classmethod
    def from_terms(
        cls,
        terms: Mapping,
        weights: Sequence[int] | None = None,
        names: Sequence[str] = (),
    ) -> "Poly":
        """Build a polynomial, inferring ``e`` from the weights (default all 1)."""
        terms = {tuple(m): Fraction(c) for m, c in terms.items() if c}
        if not terms:
            raise ValueError("the zero polynomial has no degree")
        n = len(next(iter(terms)))
        a = tuple(weights) if weights is not None else (1,) * n
        degs = {sum(w * b for w, b in zip(a, m)) for m in terms}
        if len(degs) != 1:
            e = max(degs, key=lambda d: sum(1 for m in terms if sum(w * b for w, b in zip(a, m)) == d))
            bad = [m for m in terms if sum(w * b for w, b in zip(a, m)) != e]
            raise InhomogeneousError(
                f"not weighted homogeneous for weights {a}: monomials {sorted(bad)} "
                f"differ from degree {e}", bad
            )
        return cls(terms, WeightVector(a, degs.pop()), tuple(names))

    # -- basic data -------------------------------------------------------

    @property
    def n(self) -> int:
        return self.weights.n

    @property
    def e(self) -> int:
        return self.weights.e

    @property
    def a(self) -> tuple[int, ...]:
        return self.weights.a

    @cached_property
    def _key(self):
        return (frozenset(self.terms.items()), self.weights)

    def __hash__(self):
        return hash(self._key)

    def __eq__(self, other):
        return isinstance(other, Poly) and self._key == other._key

    def derivative(self, i: int) -> dict:
        """``d f / d x_i`` as a plain term dict (possibly empty)."""
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                out[tuple(mm)] = c * m[i]
        return out

    @cached_property
    def gradient(self) -> tuple[dict, ...]:
        return tuple(self.derivative(i) for i in range(self.n))

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            t = Fraction(c)
            for x, b in zip(point, m):
                t *= Fraction(x) ** b
            total += t
        return total

    # -- reducedness --------------------------------------------------------

    def is_reduced(self, seed: int = 0) -> bool:
        """Squarefree test: ``gcd(f, sum c_i df/dx_i)`` for generic ``c``.

        A repeated factor divides every such combination; for a squarefree
        ``f`` a random combination is coprime to ``f`` unless ``c`` is
        unlucky, so a nontrivial gcd is rechecked with fresh coefficients.
        """
        import sympy

        syms = sympy.symbols(" ".join(f"_x{i}" for i in range(self.n)), seq=True)
        f = self.to_sympy(syms)
        rng = random.Random(seed)
        for _ in range(3):
            c = [rng.randint(1, 97) for _ in range(self.n)]
            g = sum(ci * sympy.diff(f, s) for ci, s in zip(c, syms))
            h = sympy.gcd(f, g)
            if sympy.Poly(h, *syms).total_degree() == 0:
                return True
        return False

    def require_reduced(self):
        if not self.is_reduced():
            raise NotReducedError(f"{self} is not reduced (has a repeated factor)")

    def to_sympy(self, syms=None):
        import sympy

        if syms is None:
            syms = sympy.symbols(" ".join(self.names), seq=True)
        expr = 0
        for m, c in self.terms.items():
            t = sympy.Rational(c.numerator, c.denominator)
            for s, b in zip(syms, m):
                t *= s**b
            expr += t
        return expr

    # -- printing -------------------------------------------------------------

    def __str__(self):
        return format_terms(self.terms, self.names)

    def __repr__(self):
        return f"Poly({self}, weights={self.a}, e={self.e})"


def default_names(n: int) -> tuple[str, ...]:
    if n <= 4:
        return ("x", "y", "z", "w")[:n]
    return tuple(f"x{i + 1}" for i in range(n))


def format_terms(terms: Mapping, names: Sequence[str]) -> str:
    """Render terms in descending lexicographic order of exponents."""
    parts = []
    for m in sorted(terms, reverse=True):
        c = Fraction(terms[m])
        mono = "*".join(
            name if b == 1 else f"{name}^{b}" for name, b in zip(names, m) if b
        )
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out
