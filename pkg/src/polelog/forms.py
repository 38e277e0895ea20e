"""Monomial bases of graded differential forms and the operators df^, d, i_xi.

Grading: ``deg x_i = deg dx_i = a_i``.  A basis item is a pair ``(beta, I)``
standing for ``x^beta dx_I`` with ``I`` an increasing tuple of variable
indices.  Items are ordered by ``I`` (lexicographic over combinations) and
then by ``beta`` in descending lexicographic order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb

from .linalg import QQ, Field, SparseMatrix, rank
from .poly import Poly, WeightVector, monomials

__all__ = [
    "FormBasis",
    "GradedOperator",
    "basis_forms",
    "gamma_coeffs",
    "operator_matrix",
    "koszul_rank",
    "koszul_dim",
    "mu_nu",
    "KINDS",
]

KINDS = ("wedge_df", "ext_d", "contract_euler")


@dataclass(frozen=True, eq=False)
class FormBasis:
    a: tuple[int, ...]
    j: int
    k: int
    items: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    @property
    def index(self) -> dict:
        idx = self.__dict__.get("_index")
        if idx is None:
            idx = {it: i for i, it in enumerate(self.items)}
            object.__setattr__(self, "_index", idx)
        return idx

    def render(self, i: int, names=None) -> str:
        beta, I = self.items[i]
        names = names or [f"x{t + 1}" for t in range(len(self.a))]
        mono = "*".join(n if b == 1 else f"{n}^{b}" for n, b in zip(names, beta) if b)
        form = "^".join(f"d{names[t]}" for t in I)
        if mono and form:
            return f"{mono}*{form}"
        return mono or form or "1"


@dataclass(frozen=True, eq=False)
class GradedOperator:
    kind: str
    source: FormBasis
    target: FormBasis
    matrix: SparseMatrix


def _weights(w) -> tuple[int, ...]:
    if isinstance(w, WeightVector):
        return w.a
    if isinstance(w, Poly):
        return w.a
    return tuple(w)


@lru_cache(maxsize=4096)
def _basis(a: tuple[int, ...], j: int, k: int) -> FormBasis:
    n = len(a)
    items = []
    if 0 <= j <= n and k >= 0:
        for I in combinations(range(n), j):
            rest = k - sum(a[i] for i in I)
            for beta in monomials(a, rest):
                items.append((beta, I))
    return FormBasis(a, j, k, tuple(items))


def basis_forms(w, j: int, k: int) -> FormBasis:
    """Ordered monomial basis of the degree ``k`` piece of ``Omega^j``."""
    return _basis(_weights(w), j, k)


def gamma_coeffs(n: int, d: int) -> list[int]:
    """Coefficients of ``(t + ... + t^(d-1))^n``, indexed by ``k = 0..n(d-1)``."""
    if d < 2:
        raise ValueError("d >= 2 required")
    coeffs = [1]
    for _ in range(n):
        new = [0] * (len(coeffs) + d - 1)
        for i, c in enumerate(coeffs):
            if c:
                for s in range(1, d):
                    new[i + s] += c
        coeffs = new
    return coeffs


def _num(c: Fraction):
    return c.numerator if c.denominator == 1 else c


def _sign(I, i) -> int:
    return -1 if sum(1 for l in I if l < i) % 2 else 1


def _insert(I, i):
    return tuple(sorted(I + (i,)))


@lru_cache(maxsize=4096)
def _operator(f: Poly | None, a: tuple[int, ...], kind: str, j: int, k: int) -> GradedOperator:
    n = len(a)
    src = _basis(a, j, k)
    if kind == "wedge_df":
        tgt = _basis(a, j + 1, k + f.e)
    elif kind == "ext_d":
        tgt = _basis(a, j + 1, k)
    elif kind == "contract_euler":
        tgt = _basis(a, j - 1, k)
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    tidx = tgt.index
    cols = []
    if kind == "wedge_df":
        grad = [[(g, _num(c)) for g, c in f.derivative(i).items()] for i in range(n)]
        for beta, I in src.items:
            col: dict = {}
            for i in range(n):
                if i in I:
                    continue
                J = _insert(I, i)
                s = _sign(I, i)
                for g, c in grad[i]:
                    row = tidx[(tuple(x + y for x, y in zip(beta, g)), J)]
                    v = col.get(row, 0) + s * c
                    if v:
                        col[row] = v
                    else:
                        col.pop(row)
            cols.append(col)
    elif kind == "ext_d":
        for beta, I in src.items:
            col = {}
            for i in range(n):
                if i in I or not beta[i]:
                    continue
                b = list(beta)
                b[i] -= 1
                col[tidx[(tuple(b), _insert(I, i))]] = _sign(I, i) * beta[i]
            cols.append(col)
    else:
        for beta, I in src.items:
            col = {}
            for t, i in enumerate(I):
                b = list(beta)
                b[i] += 1
                col[tidx[(tuple(b), I[:t] + I[t + 1:])]] = (-1) ** t * a[i]
            cols.append(col)
    return GradedOperator(kind, src, tgt, SparseMatrix.from_columns(len(tgt), cols))


def operator_matrix(f: Poly, kind: str, j: int, k: int) -> GradedOperator:
    """Matrix of ``df^`` (degree k to k+e), ``d`` or ``i_xi`` on ``Omega^j_k``.

    ``xi = sum a_i x_i d/dx_i`` is the integer-weight Euler field.
    """
    if kind == "wedge_df":
        return _operator(f, f.a, kind, j, k)
    return _operator(None, _weights(f), kind, j, k)


@lru_cache(maxsize=8192)
def koszul_rank(f: Poly, j: int, k: int, field: Field = QQ) -> int:
    """Rank of ``df^ : Omega^j_k -> Omega^{j+1}_{k+e}``."""
    if j < 0 or j >= f.n or k < 0:
        return 0
    op = _operator(f, f.a, "wedge_df", j, k)
    if not len(op.source) or not len(op.target):
        return 0
    return rank(op.matrix, field)


def koszul_dim(f: Poly, j: int, k: int, field: Field = QQ) -> int:
    """``dim H^j(Omega, df^)`` in internal degree ``k``."""
    dim = len(_basis(f.a, j, k))
    return dim - koszul_rank(f, j, k, field) - koszul_rank(f, j - 1, k - f.e, field)


def mu_nu(f: Poly, k: int, field: Field = QQ, check_reduced: bool = True) -> tuple[int, int]:
    """``(mu_k, nu_k)`` with ``nu_k`` read at internal degree ``k - e``."""
    if check_reduced:
        f.require_reduced()
    n, e = f.n, f.e
    mu = len(_basis(f.a, n, k)) - koszul_rank(f, n - 1, k - e, field)
    nu = koszul_dim(f, n - 1, k - e, field) if k - e >= 0 else 0
    return mu, nu


def binomial_gamma(n: int, d: int) -> int:
    return comb(d - 1, n - 1)
