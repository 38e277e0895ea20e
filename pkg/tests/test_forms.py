from fractions import Fraction
from math import comb

import pytest
from hypothesis import assume, given, settings, strategies as st

from polelog.forms import basis_forms, gamma_coeffs, koszul_dim, mu_nu, operator_matrix
from polelog.linalg import SparseMatrix
from polelog.parser import parse_poly
from polelog.poly import Poly, monomials


def test_basis_examples():
    b = basis_forms((1, 1), 0, 2)
    assert [beta for beta, _ in b] == [(2, 0), (1, 1), (0, 2)]
    assert len(basis_forms((1, 1), 2, 2)) == 1
    b = basis_forms((1, 2), 1, 2)
    assert set(b.items) == {((1, 0), (0,)), ((0, 0), (1,))}


def test_gamma_examples():
    g = gamma_coeffs(4, 4)
    assert g[4:13] == [1, 4, 10, 16, 19, 16, 10, 4, 1]
    g = gamma_coeffs(3, 2)
    assert g[3] == 1 and sum(g) == 1
    assert gamma_coeffs(4, 5)[5] == comb(4, 3) == 4


def test_operator_examples():
    f = parse_poly("x^2 + y^2")
    op = operator_matrix(f, "wedge_df", 0, 0)
    col = op.matrix.apply({0: 1})
    got = {op.target.items[i]: c for i, c in col.items()}
    assert got == {((1, 0), (0,)): 2, ((0, 1), (1,)): 2}
    d = operator_matrix(f, "ext_d", 0, 1)
    assert d.matrix.to_dense() == [[1, 0], [0, 1]]
    iota = operator_matrix(f, "contract_euler", 1, 1)
    imgs = {iota.source.items[c]: {iota.target.items[r]: v for r, v in iota.matrix.apply({c: 1}).items()} for c in range(2)}
    assert imgs[((0, 0), (0,))] == {((1, 0), ()): 1}
    assert imgs[((0, 0), (1,))] == {((0, 1), ()): 1}


def test_mu_nu_examples(quartic, quintic_w):
    assert mu_nu(quartic, 9) == (17, 1)
    assert mu_nu(quintic_w, 10) == (48, 4)
    q = parse_poly("x^2 + y^2 + z^2")
    assert mu_nu(q, 3) == (1, 0)
    assert all(mu_nu(q, k)[0] == 0 for k in range(0, 9) if k != 3)


@st.composite
def weighted_poly(draw):
    n = draw(st.integers(2, 3))
    a = tuple(draw(st.integers(1, 3)) for _ in range(n))
    e = draw(st.integers(2, 6))
    mons = monomials(a, e)
    assume(mons)
    cs = draw(st.lists(st.integers(-3, 3), min_size=len(mons), max_size=len(mons)))
    terms = {m: Fraction(c) for m, c in zip(mons, cs) if c}
    assume(terms)
    return Poly.from_terms(terms, a)


def _mat(f, kind, j, k):
    return operator_matrix(f, kind, j, k).matrix


@settings(max_examples=60, deadline=None)
@given(weighted_poly(), st.integers(0, 2), st.integers(0, 8))
def test_differentials_square_to_zero(f, j, k):
    assume(j + 2 <= f.n)
    dd = _mat(f, "ext_d", j + 1, k) @ _mat(f, "ext_d", j, k)
    assert dd.is_zero()
    ww = _mat(f, "wedge_df", j + 1, k + f.e) @ _mat(f, "wedge_df", j, k)
    assert ww.is_zero()


@settings(max_examples=60, deadline=None)
@given(weighted_poly(), st.integers(0, 2), st.integers(0, 8))
def test_anticommutation(f, j, k):
    assume(j + 2 <= f.n)
    lhs = _mat(f, "ext_d", j + 1, k + f.e) @ _mat(f, "wedge_df", j, k)
    rhs = _mat(f, "wedge_df", j + 1, k) @ _mat(f, "ext_d", j, k)
    assert (lhs + rhs).is_zero()


@settings(max_examples=60, deadline=None)
@given(weighted_poly(), st.integers(0, 3), st.integers(0, 8))
def test_cartan_identity(f, j, k):
    assume(j <= f.n)
    size = len(basis_forms(f, j, k))
    assume(size)
    total = None
    if j >= 1:
        total = _mat(f, "ext_d", j - 1, k) @ _mat(f, "contract_euler", j, k)
    if j + 1 <= f.n:
        t = _mat(f, "contract_euler", j + 1, k) @ _mat(f, "ext_d", j, k)
        total = t if total is None else total + t
    # L_xi / e acts as k / e; with the integer Euler field that is k
    scaled = total.scale(Fraction(1, f.e))
    assert scaled == SparseMatrix.identity(size).scale(Fraction(k, f.e))


@settings(max_examples=60, deadline=None)
@given(weighted_poly())
def test_euler_contraction(f):
    df = _mat(f, "wedge_df", 0, 0).apply({0: 1})
    iota = operator_matrix(f, "contract_euler", 1, f.e)
    img = iota.matrix.apply(df)
    terms = {iota.target.items[i][0]: c for i, c in img.items()}
    assert terms == {m: f.e * c for m, c in f.terms.items()}


@pytest.mark.parametrize("text", ["x^4 + y^3*z + z^3*w + x*y*z*w", "x*y*z*(x+y+z)", "x^3 + y^3 + z^3"])
def test_koszul_acyclic_below_n_minus_1(text):
    f = parse_poly(text)
    for j in range(f.n - 1):
        for k in range(0, f.n * f.e + 1):
            assert koszul_dim(f, j, k) == 0


@pytest.mark.parametrize("text", ["x^4 + y^3*z + z^3*w + x*y*z*w", "x*y*z", "x^3 + y^3 + z^3", "x^5+y^4*z+x^3*y^2"])
def test_euler_characteristic_identity(text):
    f = parse_poly(text)
    g = gamma_coeffs(f.n, f.e)
    for k in range(0, f.n * f.e + 2):
        mu, nu = mu_nu(f, k)
        assert mu == nu + (g[k] if k < len(g) else 0)
