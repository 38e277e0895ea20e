"""Pages of the pole order spectral sequence.

Two engines live here:

* ``ss_pages`` (two-row fast path) tracks explicit zig-zag chains.  A class
  of ``N^(r)_k`` is a chain ``w_0, ..., w_{r-1}`` with ``df^w_0 = 0`` and
  ``d w_{t-1} = df^w_t``; the differential ``d_r`` sends it to ``[d w_{r-1}]``
  in ``M^(r)_{k-re}``.  Witness chains are stored per page so that the next
  differential is evaluated on explicit representatives.
* ``filtered_page_dim`` computes ``E_r`` of the filtered total complex
  ``(Omega[dt], d - df^ . dt)`` straight from the definition
  ``Z_r / (Z_{r-1} + D Z_{r-1})``.  It is independent of the chain
  bookkeeping, handles a nonzero ``H^{n-2}`` row, and serves as the oracle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .forms import basis_forms, gamma_coeffs, koszul_dim, operator_matrix
from .linalg import (
    QQ,
    Echelon,
    Field,
    GF,
    SparseMatrix,
    _back_substitute,
    _row_echelon,
    kernel_basis,
    random_primes,
    rank,
)
from .poly import Poly

__all__ = [
    "SpectralTable",
    "RootIndicatorReport",
    "WindowError",
    "NonIsolatedError",
    "ss_pages",
    "filtered_page_dim",
    "default_kmax",
    "integral_bs_root_indicator",
    "surjectivity_check_cor2",
    "torsion_page_profile",
]


class WindowError(ValueError):
    """The requested pages cannot be reached from the degree window."""


class NonIsolatedError(ValueError):
    """Koszul cohomology is nonzero in rows the chosen engine does not handle."""


@dataclass
class SpectralTable:
    f: Poly
    k_min: int
    k_max: int
    r_max: int
    gamma: dict[int, int]
    mu: dict[int, dict[int, int]]  # r -> k -> mu^(r)_k
    nu: dict[int, dict[int, int]]
    witnesses: dict[int, dict] = field(default_factory=dict)
    r_stab: int | None = None
    mode: str = "exact"
    engine: str = "two-row"
    primes: tuple[int, ...] = ()

    @property
    def degrees(self) -> list[int]:
        return list(range(self.k_min, self.k_max + 1))

    def row(self, name: str) -> list[int]:
        """One table row by name: gamma, mu, mu2, mu3, nu, nu2, nu3, ..."""
        if name == "gamma":
            return [self.gamma.get(k, 0) for k in self.degrees]
        base, r = name[:2], int(name[2:] or 1)
        src = self.mu if base == "mu" else self.nu
        return [src[r].get(k, 0) for k in self.degrees]

    def dims(self) -> dict:
        return {
            (r, k): (self.mu[r][k], self.nu[r][k])
            for r in self.mu
            for k in self.degrees
        }


@dataclass
class RootIndicatorReport:
    flagged: set[int]
    hypothesis_flags: dict[str, bool]
    values: dict[int, int]
    warnings: list[str]

    @property
    def certified(self) -> bool:
        return all(self.hypothesis_flags.values())


def default_kmax(f: Poly) -> int:
    """Top of the gamma support: ``n(d-1)`` unweighted, ``n e - sum a`` weighted."""
    return f.n * f.e - sum(f.a)


# ---------------------------------------------------------------------------
# helpers


def _vec(v: dict, fld: Field) -> dict:
    if fld.p:
        return fld.vector(v)
    return {i: x for i, x in v.items() if x}


def _axpy(y: dict, a, x: dict, p: int) -> dict:
    """``y + a*x`` in place (mod p when ``p``)."""
    for i, xi in x.items():
        s = y.get(i, 0) + a * xi
        if p:
            s %= p
        if s:
            y[i] = s
        else:
            y.pop(i, None)
    return y


def _apply(m: SparseMatrix, x: dict, fld: Field) -> dict:
    return _vec(m.apply(x), fld)


def _check_rows(f: Poly, top: int, fld: Field, allow_n2: bool):
    """Verify ``H^j = 0`` below the supported rows for every degree used."""
    n, e = f.n, f.e
    for j in range(0, n - 1):
        for s in range(0, top - (n - 1 - j) * e + 1):
            h = koszul_dim(f, j, s, fld)
            if h:
                if j < n - 2:
                    raise NonIsolatedError(
                        f"nonisolated beyond supported rows: H^{j} has dimension {h} "
                        f"in internal degree {s}"
                    )
                if not allow_n2:
                    raise NonIsolatedError(
                        f"H^{n - 2} has dimension {h} in internal degree {s}; "
                        "the two-row engine does not apply (use three_row=True)"
                    )


# ---------------------------------------------------------------------------
# two-row engine


def _initial_witnesses(f: Poly, k: int, fld: Field, rng) -> list[dict]:
    """Basis of ``ker(df^) / df^ Omega^{n-2}`` in ``Omega^{n-1}_{k-e}``.

    ``df^ Omega^{n-2}`` is put in echelon form; the coordinates that are not
    pivots span a complement, and the kernel of ``df^`` restricted to them
    is isomorphic to the cohomology.
    """
    n, e = f.n, f.e
    s = k - e
    src = basis_forms(f, n - 1, s)
    if not len(src):
        return []
    ech = Echelon(fld)
    if s - e >= 0:
        J = operator_matrix(f, "wedge_df", n - 2, s - e).matrix
        cols = list(J.cols)
        if rng is not None:
            rng.shuffle(cols)
        for c in cols:
            if c:
                ech.add(c)
    comp = [i for i in range(len(src)) if i not in ech.rows]
    if rng is not None:
        rng.shuffle(comp)
    phi = operator_matrix(f, "wedge_df", n - 1, s).matrix.select_columns(comp)
    out = []
    for v in kernel_basis(phi, fld):
        out.append(_vec({comp[i]: x for i, x in v.items()}, fld))
    return out


def _two_row(f: Poly, k_lo: int, k_hi: int, r_max: int, fld: Field, seed=None):
    n, e = f.n, f.e
    p = fld.p
    top = k_hi + (r_max - 1) * e
    rng = random.Random(seed) if seed is not None else None

    # page 1
    mu = {1: {}}
    nu = {1: {}}
    W = {}
    for s in range(0, top + 1):
        W[s] = operator_matrix(f, "wedge_df", n - 1, s - e).matrix if s - e >= 0 else None
        dim = len(basis_forms(f, n, s))
        mu[1][s] = dim - (rank(W[s], fld) if W[s] is not None and W[s].ncols else 0)
    chains: dict[int, list[list[dict]]] = {}
    for k in range(0, top + 1):
        chains[k] = [[w] for w in _initial_witnesses(f, k, fld, rng)] if k >= e else []
        nu[1][k] = len(chains[k])
    gens: dict[int, list[tuple[dict, list[dict]]]] = {s: [] for s in range(top + 1)}
    witnesses = {1: {"N": {k: [c[0] for c in v] for k, v in chains.items()}}}

    one = Fraction(1) if not p else 1
    for r in range(1, r_max):
        mu[r + 1] = dict(mu[r])
        nu[r + 1] = {}
        new_chains = {}
        for k in range(0, top + 1):
            cur = chains[k]
            s = k - r * e
            if not cur:
                nu[r + 1][k] = 0
                new_chains[k] = []
                continue
            if s < 0 or not len(basis_forms(f, n, s)):
                new_chains[k] = [c + [{}] for c in cur]
                nu[r + 1][k] = len(cur)
                continue
            dop = operator_matrix(f, "ext_d", n - 1, s).matrix
            V = [_apply(dop, c[r - 1], fld) for c in cur]
            Wm = W[s]
            nW = Wm.ncols if Wm is not None else 0
            G = list(Wm.cols) if Wm is not None else []
            G += [g for g, _ in gens[s]]
            nG = len(G)
            M = SparseMatrix.from_columns(len(basis_forms(f, n, s)), G + V)
            ech = _row_echelon(M, fld)
            pivots = set(ech.rows)
            survivors = []
            for i in range(len(cur)):
                col = nG + i
                if col in pivots:
                    gens[s].append((V[i], cur[i]))
                    continue
                x = _back_substitute(ech, {col: one}, fld)
                chain = [dict() for _ in range(r)]
                for i2 in range(len(cur)):
                    c = x.get(nG + i2)
                    if c:
                        for t in range(r):
                            _axpy(chain[t], c, cur[i2][t], p)
                for l in range(nG - nW):
                    c = x.get(nW + l)
                    if c:
                        eta = gens[s][l][1]
                        off = r - len(eta)
                        for u, w in enumerate(eta):
                            _axpy(chain[off + u], c, w, p)
                last = {}
                for i2 in range(nW):
                    c = x.get(i2)
                    if c:
                        last[i2] = (-c) % p if p else -c
                chain.append(last)
                survivors.append(chain)
            if s <= top:
                mu[r + 1][s] = mu[r][s] - (len(cur) - len(survivors))
            new_chains[k] = survivors
            nu[r + 1][k] = len(survivors)
        chains = new_chains
        witnesses[r + 1] = {"N": {k: [c[0] for c in v] for k, v in chains.items()}}

    mu_out = {r: {k: mu[r].get(k, 0) for k in range(k_lo, k_hi + 1)} for r in mu}
    nu_out = {r: {k: nu[r].get(k, 0) for k in range(k_lo, k_hi + 1)} for r in nu}
    wit = {r: {"N": {k: w["N"].get(k, []) for k in range(k_lo, k_hi + 1)}} for r, w in witnesses.items()}
    return mu_out, nu_out, wit


# ---------------------------------------------------------------------------
# generic filtered-complex engine


class _Levels:
    """Direct sum of ``Omega^j`` pieces at consecutive ``dt``-levels.

    Level ``u`` has internal degree ``top - u*e``.
    """

    def __init__(self, f: Poly, j: int, top: int, u_lo: int, u_hi: int):
        self.f, self.j, self.top = f, j, top
        self.levels = list(range(u_lo, u_hi + 1))
        self.offset = {}
        size = 0
        for u in self.levels:
            self.offset[u] = size
            size += len(self.basis(u))
        self.size = size

    def degree(self, u):
        return self.top - u * self.f.e

    def basis(self, u):
        deg = self.degree(u)
        if deg < 0 or self.j < 0 or self.j > self.f.n:
            return ()
        return basis_forms(self.f, self.j, deg)

    def __contains__(self, u):
        return u in self.offset


def _D_columns(src: _Levels, tgt: _Levels, fld: Field) -> list[dict]:
    """Columns of ``D = d - df^ . dt`` from ``src`` into the levels of ``tgt``.

    ``(D w)_u = d w_u - df^ w_{u+1}``: level ``u+1`` sits one ``dt``-power
    below level ``u``, and ``df^`` raises the ``dt``-power by one.
    """
    f = src.f
    cols = []
    for u in src.levels:
        deg = src.degree(u)
        nb = len(src.basis(u))
        if not nb:
            continue
        dmat = operator_matrix(f, "ext_d", src.j, deg).matrix if u in tgt else None
        wmat = operator_matrix(f, "wedge_df", src.j, deg).matrix if (u - 1) in tgt else None
        for i in range(nb):
            col = {}
            if dmat is not None:
                off = tgt.offset[u]
                for r, v in dmat.cols[i].items():
                    col[off + r] = v
            if wmat is not None:
                off = tgt.offset[u - 1]
                for r, v in wmat.cols[i].items():
                    col[off + r] = -v
            cols.append(_vec(col, fld))
    return cols


def _kernel(cols: list[dict], nrows: int, fld: Field) -> list[dict]:
    return kernel_basis(SparseMatrix.from_columns(nrows, cols), fld)


def filtered_page_dim(f: Poly, j: int, top: int, r: int, fld: Field = QQ) -> int:
    """``dim E_r`` in column ``j`` whose top level has internal degree ``top``.

    Column ``n`` at ``top = s`` is ``M^(r)_s``; column ``n-1`` at
    ``top = k - e`` is ``N^(r)_k``.
    """
    if r < 1:
        raise ValueError("r >= 1")
    # x = (w_0..w_{r-1}) on levels 0..r-1
    T = _Levels(f, j, top, 0, r - 1)
    if not T.size:
        return 0
    # Z_r: (D x)_u = 0 for u in [-1, r-2]
    C = _Levels(f, j + 1, top, -1, r - 2)
    zr = _kernel(_D_columns(T, C, fld), C.size, fld)
    dim_z = len(zr)
    if not dim_z:
        return 0
    span = Echelon(fld)
    # Z_{r-1}^{p-1}: w_0 = 0 and the same equations
    T1 = _Levels(f, j, top, 1, r - 1)
    if T1.size:
        z1 = _kernel(_D_columns(T1, C, fld), C.size, fld)
        shift = T.offset.get(1, 0)
        for v in z1:
            span.add({shift + i: x for i, x in v.items()})
    # B: y on levels [2-r, r] with (D y)_u = 0 for u in [1-r, -1]
    Y = _Levels(f, j - 1, top, 2 - r, r)
    if Y.size:
        if r >= 2:
            CY = _Levels(f, j, top, 1 - r, -1)
            ys = _kernel(_D_columns(Y, CY, fld), CY.size, fld)
        else:
            ys = [{i: 1} for i in range(Y.size)]
        proj = _D_columns(Y, T, fld)
        for y in ys:
            v = {}
            for i, c in y.items():
                _axpy(v, c, proj[i], fld.p)
            if v:
                span.add(v)
    return dim_z - len(span)


def _filtered_table(f: Poly, k_lo: int, k_hi: int, r_max: int, fld: Field):
    n, e = f.n, f.e
    mu = {r: {} for r in range(1, r_max + 1)}
    nu = {r: {} for r in range(1, r_max + 1)}
    for r in range(1, r_max + 1):
        for k in range(k_lo, k_hi + 1):
            mu[r][k] = filtered_page_dim(f, n, k, r, fld) if k >= 0 else 0
            nu[r][k] = filtered_page_dim(f, n - 1, k - e, r, fld) if k - e >= 0 else 0
    return mu, nu


# ---------------------------------------------------------------------------
# public entry


def _r_stab(mu, nu, r_max) -> int | None:
    last = r_max
    r = r_max
    while r > 1 and mu[r - 1] == mu[last] and nu[r - 1] == nu[last]:
        r -= 1
    return r


def _compute(f, k_lo, k_hi, r_max, fld, three_row, seed):
    top = k_hi + (r_max - 1) * f.e
    _check_rows(f, top, fld, allow_n2=three_row)
    if three_row:
        mu, nu = _filtered_table(f, k_lo, k_hi, r_max, fld)
        return mu, nu, {}
    return _two_row(f, k_lo, k_hi, r_max, fld, seed)


def ss_pages(
    f: Poly,
    r_max: int = 3,
    K_max: int | None = None,
    k_min: int = 0,
    exact: bool = False,
    nprimes: int = 3,
    three_row: bool = False,
    seed: int | None = None,
    check_reduced: bool = True,
) -> SpectralTable:
    """Pages ``1..r_max`` of the pole order spectral sequence on ``[k_min, K_max]``.

    By default everything runs modulo ``nprimes`` word-size primes and the
    results must agree; any disagreement falls back to exact rational
    arithmetic, which ``exact=True`` forces from the start.  ``seed``
    shuffles the generator orders (dimensions must not change).
    """
    if check_reduced:
        f.require_reduced()
    if K_max is None:
        K_max = default_kmax(f)
    if r_max < 1:
        raise WindowError("r_max must be at least 1")
    if (r_max - 1) * f.e > max(K_max, 0):
        raise WindowError(
            f"window too small: page {r_max} needs differentials of degree "
            f"{(r_max - 1) * f.e} but the window ends at {K_max}"
        )
    gamma = {}
    if all(w == 1 for w in f.a):
        g = gamma_coeffs(f.n, f.e)
        gamma = {k: (g[k] if 0 <= k < len(g) else 0) for k in range(k_min, K_max + 1)}
    else:
        gamma = {k: _weighted_gamma(f, k) for k in range(k_min, K_max + 1)}

    primes: tuple[int, ...] = ()
    mode = "exact"
    result = None
    if not exact:
        primes = tuple(random_primes(nprimes, seed=0))
        runs = [_compute(f, k_min, K_max, r_max, GF(q), three_row, seed) for q in primes]
        dims = [(m, v) for m, v, _ in runs]
        if all(d == dims[0] for d in dims):
            result = runs[0]
            mode = f"multi-prime({len(primes)})"
    if result is None:
        result = _compute(f, k_min, K_max, r_max, QQ, three_row, seed)
        mode = "exact"
    mu, nu, wit = result
    return SpectralTable(
        f=f,
        k_min=k_min,
        k_max=K_max,
        r_max=r_max,
        gamma=gamma,
        mu=mu,
        nu=nu,
        witnesses=wit,
        r_stab=_r_stab(mu, nu, r_max),
        mode=mode,
        engine="three-row" if three_row else "two-row",
        primes=primes if mode != "exact" else (),
    )


def _weighted_gamma(f: Poly, k: int) -> int:
    """Coefficient of ``t^k`` in ``prod (t^{a_i} - t^e) / (1 - t^{a_i})``."""
    e = f.e
    coeffs = {0: 1}
    for a in f.a:
        factor = {a * s: 1 for s in range(1, e // a)} if e % a == 0 else None
        if factor is None:
            # non-divisible weight: the series does not truncate to a polynomial
            series = {}
            for m in range(0, k + 1):
                # (t^a - t^e)/(1 - t^a) = sum_{s>=1} t^{a s} - sum_{s>=0} t^{e + a s}
                c = (1 if m % a == 0 and m >= a else 0) - (1 if m >= e and (m - e) % a == 0 else 0)
                if c:
                    series[m] = c
            factor = series
        new = {}
        for i, c in coeffs.items():
            for j2, c2 in factor.items():
                if i + j2 <= k:
                    new[i + j2] = new.get(i + j2, 0) + c * c2
        coeffs = new
    return coeffs.get(k, 0)


# ---------------------------------------------------------------------------
# decision procedures


def integral_bs_root_indicator(
    f: Poly, table: SpectralTable | None = None, weighted_asserted: bool = False, **kw
) -> RootIndicatorReport:
    """Flag ``j >= 1`` with ``mu^(2)_{jd} != 0`` (candidate integral roots ``-j``)."""
    if not all(w == 1 for w in f.a):
        raise ValueError("the root indicator needs an unweighted homogeneous f")
    if table is None:
        table = ss_pages(f, r_max=2, **kw)
    d = f.e
    values = {}
    j = 1
    while j * d <= table.k_max:
        values[j] = table.mu[2][j * d]
        j += 1
    flagged = {j for j, v in values.items() if v}
    tau_stable = _tau_stabilized(table)
    flags = {
        "isolated_proj_sing": True,  # two-row engine raised otherwise
        "tau_stabilized": tau_stable,
        "wh_asserted_by_user": weighted_asserted,
    }
    warnings = []
    if not weighted_asserted:
        warnings.append(
            "weighted homogeneity of the singular points is not asserted; "
            "the flagged set is a one-sided indicator"
        )
    if 1 not in flagged:
        warnings.append("the root -1 is always present but is not detected at degree d by this indicator")
    return RootIndicatorReport(flagged, flags, values, warnings)


def _tau_stabilized(table: SpectralTable) -> bool:
    top = [table.mu[1][k] for k in table.degrees[-table.f.n:]]
    return len(set(top)) == 1


def surjectivity_check_cor2(f: Poly, table: SpectralTable | None = None, **kw) -> dict:
    """True iff ``mu^(2)_{jd} = 0`` for every ``j >= 2`` in the window."""
    rep = integral_bs_root_indicator(f, table, **kw)
    witness = sorted(j * f.e for j in rep.flagged if j >= 2)
    return {
        "verdict": not witness,
        "witness_degrees": witness,
        "hypothesis_flags": rep.hypothesis_flags,
        "warnings": rep.warnings,
    }


def torsion_page_profile(f: Poly, r_max: int = 3, table: SpectralTable | None = None, **kw) -> dict:
    """Page profile in degree ``e`` and the degree-one torsion verdict.

    The last computed page stands in for ``E_infinity``.
    """
    if table is None:
        table = ss_pages(f, r_max=r_max, K_max=max(default_kmax(f), f.e), **kw)
    e = f.e
    mus = [table.mu[r][e] for r in sorted(table.mu)]
    nus = [table.nu[r][e] for r in sorted(table.nu)]
    last = max(table.mu)
    drop = len(mus) >= 2 and (table.mu[2][e] != table.mu[last][e] or table.nu[2][e] != table.nu[last][e])
    return {
        "degree": e,
        "mu": mus,
        "nu": nus,
        "torsion_detected": bool(drop),
        "pages": last,
    }
