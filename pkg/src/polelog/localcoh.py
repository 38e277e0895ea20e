"""Local cohomology ``H^0_m`` of the Milnor module ``M`` and the tests built on it."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .forms import koszul_dim
from .linalg import QQ, Echelon, Field, SparseMatrix, kernel_basis
from .modules import GradedModuleSketch, milnor_sketch
from .poly import Poly, monomials

__all__ = [
    "LocalCohomologyProfile",
    "BoundTooSmall",
    "MuNotStabilized",
    "h0m_profile",
    "h0m_bruteforce",
    "symmetry_checks",
    "cor3_check",
    "prop1_report",
    "InternalInconsistency",
]


class BoundTooSmall(ValueError):
    pass


class MuNotStabilized(ValueError):
    pass


class InternalInconsistency(RuntimeError):
    pass


@dataclass
class LocalCohomologyProfile:
    f: Poly
    mu: dict[int, int]
    mu1: dict[int, int]  # mu'
    mu2: dict[int, int]  # mu''
    delta2: dict[int, int]  # delta''_k = mu''_k - nu_{k+e}
    tau_Z: int
    bound_used: int
    torsion_basis: dict[int, list[dict]] = field(default_factory=dict, repr=False)

    @property
    def degrees(self):
        return sorted(self.mu)


def _require_unweighted(f: Poly):
    if not all(w == 1 for w in f.a):
        raise ValueError("local cohomology profiles need an unweighted homogeneous f")


def _torsion_recursion(M: GradedModuleSketch, B: int) -> dict[int, list[dict]]:
    """``T_k = {v : x_i v in T_{k+1} for all i}``, ``T_k = 0`` above ``B``."""
    fld = M.field
    T: dict[int, list[dict]] = {B + 1: []}
    for k in range(B, M.k_min - 1, -1):
        dk = M.dims[k]
        if not dk:
            T[k] = []
            continue
        nxt = M.dims.get(k + 1, 0)
        ech = Echelon(fld)
        for v in T[k + 1]:
            ech.add(v)
        rows_per = nxt
        cols = []
        for b in range(dk):
            col = {}
            for i in range(M.n):
                w = M.mult[(i, k)].cols[b] if nxt else {}
                r = ech.residual(w) if w else {}
                for t, x in r.items():
                    col[i * rows_per + t] = x
            cols.append(col)
        T[k] = kernel_basis(SparseMatrix.from_columns(M.n * rows_per, cols), fld)
    return T


def h0m_profile(f: Poly, B: int | None = None, fld: Field = QQ) -> LocalCohomologyProfile:
    """``mu'``, ``mu''``, ``delta''`` and ``tau_Z`` from the saturation recursion."""
    _require_unweighted(f)
    f.require_reduced()
    n, d = f.n, f.e
    if B is None:
        B = n * d
    M = milnor_sketch(f, 0, B + 1, fld)
    T = _torsion_recursion(M, B)
    mu = {k: M.dims[k] for k in range(0, B + 1)}
    mu1 = {k: len(T[k]) for k in range(0, B + 1)}
    mu2 = {k: mu[k] - mu1[k] for k in mu}
    nu = {}
    for k in range(0, B + 1):
        s = k  # nu_{k+e} lives at internal degree k
        nu[k] = koszul_dim(f, n - 1, s, fld)
    delta2 = {k: mu2[k] - nu[k] for k in mu}
    near = [k for k in range(max(0, B - n + 1), B + 1) if mu1[k]]
    if near:
        raise BoundTooSmall(f"mu' is nonzero at degrees {near} within {n} of the bound {B}")
    top = [mu[k] for k in range(max(0, B - n + 1), B + 1)]
    if len(set(top)) != 1:
        raise MuNotStabilized(f"mu_k is not constant on the last {n} degrees: {top}")
    return LocalCohomologyProfile(f, mu, mu1, mu2, delta2, top[-1], B, T)


def h0m_bruteforce(f: Poly, B: int | None = None, fld: Field = QQ) -> dict[int, int]:
    """Oracle: ``mu'_k = dim ker(M_k -> ⊕_{|beta| = B+1-k} M_{B+1})``.

    Multiplies by every monomial directly in ``Omega^n`` and reduces modulo
    ``df^ Omega^{n-1}`` in degree ``B+1``; no recursion.
    """
    _require_unweighted(f)
    n = f.n
    if B is None:
        B = n * f.e
    M = milnor_sketch(f, 0, B + 1, fld)
    echs = M._echelons
    target = echs[B + 1]
    from .modules import FreeModule

    F = FreeModule.forms(f.a, n)
    out = {}
    for k in range(0, B + 1):
        comp = M.basis[k]
        if not comp:
            out[k] = 0
            continue
        betas = monomials(f.a, B + 1 - k)
        tidx = F.basis(B + 1)[1]
        src = F.basis(k)[0]
        cols = []
        for c in comp:
            col = {}
            cc, b0 = src[c]
            for t, beta in enumerate(betas):
                key = tidx[(cc, tuple(p + q for p, q in zip(b0, beta)))]
                r = target.residual({key: 1})
                for idx, x in r.items():
                    col[(t, idx)] = x
            cols.append(col)
        keys = sorted({key for col in cols for key in col})
        pos = {key: i for i, key in enumerate(keys)}
        mat = SparseMatrix.from_columns(len(keys), [{pos[key]: x for key, x in col.items()} for col in cols])
        out[k] = len(kernel_basis(mat, fld))
    return out


def symmetry_checks(profile: LocalCohomologyProfile) -> dict:
    """Violated degrees of ``mu'_k = mu'_{nd-k}`` and, for ``n = 3``,
    ``delta''_k = delta''_{2d-k}``, restricted to degrees inside the window."""
    f = profile.f
    n, d = f.n, f.e
    B = profile.bound_used
    mu1 = profile.mu1
    bad_mu = [k for k in mu1 if 0 <= n * d - k <= B and mu1[k] != mu1[n * d - k]]
    out = {"mu_prime_center": n * d / 2, "mu_prime_violations": bad_mu}
    if n == 3:
        dl = profile.delta2
        bad = [k for k in dl if 0 <= 2 * d - k <= B and dl[k] != dl[2 * d - k]]
        out["delta_center"] = d
        out["delta_violations"] = bad
    out["ok"] = not bad_mu and not out.get("delta_violations")
    return out


def cor3_check(f: Poly, profile: LocalCohomologyProfile | None = None, weighted_asserted: bool = False) -> dict:
    """Test ``binom(d-1, n-1) > mu_Z`` with ``mu_Z := tau_Z`` (injective but not surjective in the top degrees)."""
    if profile is None:
        profile = h0m_profile(f)
    n, d = f.n, f.e
    g = comb(d - 1, n - 1)
    tau = profile.tau_Z
    if tau == 0:
        verdict = "not applicable"
        text = "no singular points (tau_Z = 0)"
    elif g > tau:
        verdict = "triggered"
        text = (
            f"binom({d - 1},{n - 1}) = {g} > {tau} = mu_Z: injective for every j "
            f"but not surjective for j = {n - 1} or {n}"
        )
    else:
        verdict = "inconclusive"
        text = f"binom({d - 1},{n - 1}) = {g} <= {tau} = tau_Z"
    return {
        "verdict": verdict,
        "text": text,
        "gamma_d": g,
        "tau_Z": tau,
        "hypothesis_flags": {
            "isolated_proj_sing": True,
            "mu_Z_equals_tau_Z": weighted_asserted,
            "wh_asserted_by_user": weighted_asserted,
        },
    }


def prop1_report(f: Poly, weighted_asserted: bool = False, fld: Field = QQ) -> dict:
    """Conditions (c) and (d) evaluated independently; they must agree."""
    from .spectral import surjectivity_check_cor2

    if f.n != 3:
        raise ValueError("the (c)/(d) comparison is for n = 3 only")
    profile = h0m_profile(f, fld=fld)
    d = f.e
    cond_d = profile.mu1.get(d, 0) == 0
    cor2 = surjectivity_check_cor2(f, exact=fld.p == 0, weighted_asserted=weighted_asserted)
    cond_c = bool(cor2["verdict"])
    if cond_c != cond_d:
        raise InternalInconsistency(
            f"condition (c) gives {cond_c} but (d) gives {cond_d} for {f}"
        )
    return {
        "M_prime_d": profile.mu1.get(d, 0),
        "condition_c": cond_c,
        "condition_d": cond_d,
        "lct": cond_c,
        "free_divisor_indicator": all(v == 0 for v in profile.mu1.values()),
        "hypothesis_flags": {
            "isolated_proj_sing": True,
            "wh_asserted_by_user": weighted_asserted,
        },
        "witness_degrees": cor2["witness_degrees"],
    }
