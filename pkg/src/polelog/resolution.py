"""Betti tables, regularity, tameness and freeness of logarithmic modules.

Conventions: forms carry ``deg dx_i = a_i``; ``L^j`` is ``K^j`` shifted down
by ``e`` so that ``w/f`` has degree ``deg w - e``; derivations are graded by
coefficient degree, the Euler field having degree 1.
"""

from __future__ import annotations

from fractions import Fraction

from .forms import basis_forms, operator_matrix
from .linalg import QQ, Field, rank, SparseMatrix, kernel_basis
from .modules import BettiTable, GradedModuleSketch, module_sketch, tor_betti
from .poly import Poly, poly_mul

__all__ = [
    "tor_betti",
    "default_ktor",
    "logforms_betti",
    "tameness_check",
    "regularity_check",
    "freeness_check",
    "decomposition_check",
    "arrangement_poly",
    "NotEssential",
    "log_de_rham_direct",
]


class NotEssential(ValueError):
    pass


def default_ktor(f: Poly) -> int:
    return 2 * f.e + f.n


def logforms_betti(f: Poly, j: int, K_tor: int | None = None, fld: Field = QQ) -> BettiTable:
    K = default_ktor(f) if K_tor is None else K_tor
    return tor_betti(module_sketch(f"logforms:{j}", f, K, fld), K)


def tameness_check(f: Poly, K_tor: int | None = None, fld: Field = QQ) -> dict:
    """``pd L^j <= j`` for every ``j``, on certified windows."""
    f.require_reduced()
    per_j = {}
    certified = True
    for j in range(f.n + 1):
        bt = logforms_betti(f, j, K_tor, fld)
        per_j[j] = {"pd": bt.pd, "certified": bt.certified, "boundary": bt.boundary}
        certified &= bt.certified
    tame = all(v["pd"] <= j for j, v in per_j.items())
    return {"tame": tame, "certified": certified, "per_j": per_j}


def arrangement_poly(forms, names=None) -> Poly:
    """Product of the linear forms (rational covectors)."""
    n = len(forms[0])
    terms = {(0,) * n: Fraction(1)}
    for cov in forms:
        lin = {}
        for i, c in enumerate(cov):
            c = Fraction(c)
            if c:
                m = [0] * n
                m[i] = 1
                lin[tuple(m)] = c
        if not lin:
            raise ValueError("zero covector")
        terms = poly_mul(terms, lin)
    return Poly.from_terms(terms, None, names or ())


def regularity_check(forms, K_tor: int | None = None, fld: Field = QQ) -> dict:
    """``reg L^j`` for each ``j`` and the verdict ``reg <= 0``; also ``reg Theta``."""
    n = len(forms[0])
    mat = SparseMatrix.from_dense([list(map(Fraction, c)) for c in forms])
    if rank(mat) < n:
        raise NotEssential(
            "the arrangement is not essential; split off the lineality space "
            "(Kunneth) and rerun on the essential part"
        )
    f = arrangement_poly(forms)
    d = f.e
    K = default_ktor(f) if K_tor is None else K_tor
    regs = {}
    certified = True
    for j in range(n + 1):
        bt = logforms_betti(f, j, K, fld)
        regs[j] = bt.reg
        certified &= bt.certified
    theta = tor_betti(module_sketch("logders", f, K, fld), K)
    ok = all(r is None or r <= 0 for r in regs.values())
    return {
        "reg": regs,
        "bound_ok": ok,
        "certified": certified and theta.certified,
        "reg_theta": theta.reg,
        "theta_bound": d - n + 1,
        "theta_bound_ok": theta.reg is None or theta.reg <= d - n + 1,
        "convention": "derivations graded by coefficient degree (Euler = 1)",
    }


def freeness_check(f: Poly, K_tor: int | None = None, fld: Field = QQ) -> dict:
    """Free iff ``Tor_1(Theta) = 0`` on a certified window."""
    f.require_reduced()
    K = default_ktor(f) if K_tor is None else K_tor
    bt = tor_betti(module_sketch("logders", f, K, fld), K)
    gens = sorted(k for (i, k), v in bt.entries.items() if i == 0 for _ in range(v))
    return {
        "free": not bt.row(1),
        "certified": bt.certified,
        "pd": bt.pd,
        "generator_degrees": gens,
        "betti": bt,
    }


def decomposition_check(f: Poly, m_lo: int, m_hi: int, fld: Field = QQ) -> dict:
    """``dim L^j_m = dim A^j_{m+e} + dim A^{j+1}_{m+e}`` on ``[m_lo, m_hi]``."""
    e, n = f.e, f.n
    K = m_hi + e
    A = {j: module_sketch(f"koszul_kernel:{j}", f, K, fld, k_min=0) for j in range(n + 2) if j <= n}
    bad = []
    table = {}
    for j in range(n + 1):
        L = module_sketch(f"logforms_raw:{j}", f, K, fld, k_min=0)
        for m in range(m_lo, m_hi + 1):
            k = m + e
            lhs = L.dim(k) if k >= 0 else 0
            rhs = (A[j].dim(k) if k >= 0 else 0) + (A[j + 1].dim(k) if j + 1 <= n and k >= 0 else 0)
            table[(j, m)] = (lhs, rhs)
            if lhs != rhs:
                bad.append((j, m))
    return {"ok": not bad, "violations": bad, "table": table}


def _times_f_matrix(f: Poly, j: int, k: int) -> SparseMatrix:
    src = basis_forms(f, j, k)
    tgt = basis_forms(f, j, k + f.e)
    tidx = tgt.index
    cols = []
    for beta, I in src:
        col = {}
        for m, c in f.terms.items():
            col[tidx[(tuple(p + q for p, q in zip(beta, m)), I)]] = c
        cols.append(col)
    return SparseMatrix.from_columns(len(tgt), cols)


def _log_cochains(f: Poly, j: int, K: int, fld: Field) -> list[tuple[dict, dict]]:
    """Pairs ``(w, theta)`` with ``df^w = f theta``, ``w`` in ``Omega^j_K``."""
    nw = len(basis_forms(f, j, K))
    if not nw:
        return []
    if j >= f.n:
        return [({i: 1}, {}) for i in range(nw)]
    W = operator_matrix(f, "wedge_df", j, K).matrix
    Fm = _times_f_matrix(f, j + 1, K)
    M = W.hstack(-Fm)
    out = []
    for v in kernel_basis(M, fld):
        out.append(({i: x for i, x in v.items() if i < nw}, {i - nw: x for i, x in v.items() if i >= nw}))
    return out


def log_de_rham_direct(f: Poly, r: int, j: int, fld: Field = QQ) -> int:
    """``dim H^j`` of ``(Omega(log D) f^-r, d)`` in the ``L_xi``-invariant piece.

    Works with numerators: ``w / f^(r+1)`` maps to ``dw - (r+1) theta`` where
    ``df^w = f theta``; the invariant piece is internal degree ``(r+1) e``.
    """
    K = (r + 1) * f.e

    def drank(jj):
        if jj < 0 or jj >= f.n:
            return 0
        C = _log_cochains(f, jj, K, fld)
        if not C:
            return 0
        D = operator_matrix(f, "ext_d", jj, K).matrix
        cols = []
        for w, th in C:
            v = D.apply(w)
            for i, x in th.items():
                v[i] = v.get(i, 0) - (r + 1) * x
            cols.append({i: x for i, x in v.items() if x})
        return rank(SparseMatrix.from_columns(D.nrows, cols), fld)

    if j < 0 or j > f.n:
        return 0
    return len(_log_cochains(f, j, K, fld)) - drank(j) - drank(j - 1)
