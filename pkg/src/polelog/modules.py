"""Finitely graded modules given degreewise, plus Koszul homology (graded Tor).

A :class:`GradedModuleSketch` stores ``dim M_k`` on a window and the matrices
of multiplication by each variable.  Sketches are built either as kernels of
a degree-preserving map out of a free module (log forms, log derivations,
Koszul kernels) or as the quotient ``Omega^n / df^ Omega^{n-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations

from .forms import basis_forms, operator_matrix
from .linalg import QQ, Echelon, Field, SparseMatrix, kernel_basis, rank
from .poly import Poly, monomials

__all__ = [
    "FreeModule",
    "GradedModuleSketch",
    "BettiTable",
    "module_sketch",
    "kernel_sketch",
    "milnor_sketch",
    "tor_betti",
    "WindowTruncation",
]


class WindowTruncation(ValueError):
    pass


class FreeModule:
    """``⊕_c R(-shift_c)`` over a weighted polynomial ring.

    Degree ``k`` basis items are ``(c, beta)`` with ``beta`` of weighted
    degree ``k - shift_c``, ordered by component then descending ``beta``.
    """

    def __init__(self, a: tuple[int, ...], shifts: list[int]):
        self.a = tuple(a)
        self.shifts = list(shifts)
        self._cache: dict[int, tuple[list, dict]] = {}

    @classmethod
    def forms(cls, a, j: int, extra_shift: int = 0) -> "FreeModule":
        """``Omega^j`` with components ordered like :func:`basis_forms`."""
        shifts = [sum(a[i] for i in I) + extra_shift for I in combinations(range(len(a)), j)]
        return cls(a, shifts)

    def basis(self, k: int):
        hit = self._cache.get(k)
        if hit is None:
            items = [(c, b) for c, s in enumerate(self.shifts) for b in monomials(self.a, k - s)]
            hit = (items, {it: i for i, it in enumerate(items)})
            self._cache[k] = hit
        return hit

    def dim(self, k: int) -> int:
        return len(self.basis(k)[0])

    def mult(self, i: int, v: dict, k: int) -> dict:
        """``x_i * v`` for ``v`` in degree ``k`` (result in degree ``k + a_i``)."""
        src = self.basis(k)[0]
        tgt = self.basis(k + self.a[i])[1]
        out = {}
        for idx, x in v.items():
            c, b = src[idx]
            bb = list(b)
            bb[i] += 1
            out[tgt[(c, tuple(bb))]] = x
        return out

    @property
    def min_degree(self) -> int:
        return min(self.shifts) if self.shifts else 0


@dataclass
class GradedModuleSketch:
    """Degreewise data of a graded module on ``[k_min, k_max]``.

    ``mult[(i, k)]`` is the matrix of ``x_i : M_k -> M_{k+a_i}`` (present
    whenever both degrees are in the window).  Degrees outside the window
    are unknown, not zero, unless ``zero_below`` says the module vanishes
    below ``k_min``.
    """

    a: tuple[int, ...]
    k_min: int
    k_max: int
    dims: dict[int, int]
    mult: dict[tuple[int, int], SparseMatrix]
    label: str = ""
    field: Field = QQ
    zero_below: bool = True
    basis: dict[int, list] = dc_field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.a)

    def dim(self, k: int) -> int:
        if k < self.k_min:
            if self.zero_below:
                return 0
            raise WindowTruncation(f"degree {k} below the window of {self.label}")
        if k > self.k_max:
            raise WindowTruncation(f"degree {k} above the window of {self.label}")
        return self.dims[k]

    def shifted(self, s: int, label: str | None = None) -> "GradedModuleSketch":
        """The module ``M(s)`` with ``M(s)_k = M_{k+s}``."""
        return GradedModuleSketch(
            self.a,
            self.k_min - s,
            self.k_max - s,
            {k - s: v for k, v in self.dims.items()},
            {(i, k - s): m for (i, k), m in self.mult.items()},
            label or f"{self.label}({s})",
            self.field,
            self.zero_below,
            {k - s: v for k, v in self.basis.items()},
        )

    def commutes(self) -> bool:
        for k in range(self.k_min, self.k_max + 1):
            for i in range(self.n):
                for j in range(i + 1, self.n):
                    k2 = k + self.a[i] + self.a[j]
                    if k2 > self.k_max or not self.dims.get(k):
                        continue
                    a = self.mult[(j, k + self.a[i])] @ self.mult[(i, k)]
                    b = self.mult[(i, k + self.a[j])] @ self.mult[(j, k)]
                    if self.field.p:
                        a = _mod(a, self.field.p)
                        b = _mod(b, self.field.p)
                    if a != b:
                        return False
        return True


def _mod(m: SparseMatrix, p: int) -> SparseMatrix:
    return SparseMatrix.from_columns(m.nrows, [{i: v % p for i, v in c.items() if v % p} for c in m.cols])


def kernel_sketch(F: FreeModule, phi, k_min: int, k_max: int, fld: Field = QQ, label: str = "") -> GradedModuleSketch:
    """Sketch of ``ker(phi)`` where ``phi(k)`` is the matrix of ``phi`` on ``F_k``.

    Each degree uses the canonical kernel basis, whose vectors are 1 at one
    free column and 0 at the others, so coordinates of an element of the
    kernel are read off at the free columns.
    """
    bases: dict[int, list[dict]] = {}
    free: dict[int, list[int]] = {}
    for k in range(k_min, k_max + 1):
        dim = F.dim(k)
        if not dim:
            bases[k], free[k] = [], []
            continue
        m = phi(k)
        if m is None or not m.nrows:
            vecs = [{i: 1} for i in range(dim)]
        else:
            vecs = kernel_basis(m, fld)
        bases[k] = vecs
        pivot_free = []
        for v in vecs:
            # the free column of a canonical kernel vector is its largest index
            pivot_free.append(max(v))
        free[k] = pivot_free
    mult = {}
    for k in range(k_min, k_max + 1):
        for i, ai in enumerate(F.a):
            if k + ai > k_max:
                continue
            cols = []
            pos = {c: t for t, c in enumerate(free[k + ai])}
            for v in bases[k]:
                w = F.mult(i, v, k)
                cols.append({pos[c]: x for c, x in w.items() if c in pos})
            mult[(i, k)] = SparseMatrix.from_columns(len(bases[k + ai]), cols)
    dims = {k: len(v) for k, v in bases.items()}
    return GradedModuleSketch(F.a, k_min, k_max, dims, mult, label, fld, True, bases)


def milnor_sketch(f: Poly, k_min: int, k_max: int, fld: Field = QQ) -> GradedModuleSketch:
    """``M = Omega^n / df^ Omega^{n-1}`` with coset bases given by non-pivot
    coordinates of an echelon form of ``df^ Omega^{n-1}``."""
    n, e = f.n, f.e
    F = FreeModule.forms(f.a, n)
    echs: dict[int, Echelon] = {}
    comp: dict[int, list[int]] = {}
    for k in range(k_min, k_max + 1 + max(f.a)):
        ech = Echelon(fld)
        if k - e >= 0:
            for c in operator_matrix(f, "wedge_df", n - 1, k - e).matrix.cols:
                if c:
                    ech.add(c)
        echs[k] = ech
        comp[k] = [i for i in range(F.dim(k)) if i not in ech.rows]
    mult = {}
    for k in range(k_min, k_max + 1):
        for i, ai in enumerate(f.a):
            if k + ai > k_max:
                continue
            pos = {c: t for t, c in enumerate(comp[k + ai])}
            cols = []
            for c in comp[k]:
                w = echs[k + ai].residual(F.mult(i, {c: 1}, k))
                cols.append({pos[t]: x for t, x in w.items()})
            mult[(i, k)] = SparseMatrix.from_columns(len(comp[k + ai]), cols)
    dims = {k: len(comp[k]) for k in range(k_min, k_max + 1)}
    sk = GradedModuleSketch(f.a, k_min, k_max, dims, mult, "M", fld, True, {k: comp[k] for k in dims})
    sk._echelons = echs  # reused by the saturation oracle
    return sk


def _times_f(f: Poly, F: FreeModule, v: dict, k: int) -> dict:
    src = F.basis(k)[0]
    tgt = F.basis(k + f.e)[1]
    out: dict = {}
    for idx, x in v.items():
        c, b = src[idx]
        for m, coef in f.terms.items():
            key = tgt[(c, tuple(p + q for p, q in zip(b, m)))]
            s = out.get(key, 0) + x * coef
            if s:
                out[key] = s
            else:
                out.pop(key)
    return out


def _logforms_phi(f: Poly, j: int):
    """``(w, eta) -> df^w - f eta`` on ``Omega^j_k ⊕ Omega^{j+1}_k``."""
    n = f.n
    Fj = FreeModule.forms(f.a, j)
    Fj1 = FreeModule.forms(f.a, j + 1)
    F = FreeModule(f.a, Fj.shifts + Fj1.shifts)

    def phi(k):
        dj = Fj.dim(k)
        d1 = Fj1.dim(k)
        rows = Fj1.dim(k + f.e)
        cols = []
        if dj:
            W = operator_matrix(f, "wedge_df", j, k).matrix if j < n else None
            for c in range(dj):
                cols.append(dict(W.cols[c]) if W is not None else {})
        for c in range(d1):
            cols.append({i: -x for i, x in _times_f(f, Fj1, {c: 1}, k).items()})
        return SparseMatrix.from_columns(rows, cols)

    return F, phi, Fj


def _logders_phi(f: Poly):
    """``(c_1..c_n, c_0) -> sum c_i df/dx_i - c_0 f``; derivation degree
    ``delta`` has ``c_i`` of degree ``delta - 1 + a_i``."""
    n, e = f.n, f.e
    shifts = [1 - ai for ai in f.a] + [1]
    F = FreeModule(f.a, shifts)
    target = FreeModule(f.a, [1 - e])  # R_{delta - 1 + e}
    grads = f.gradient

    def phi(k):
        items, _ = F.basis(k)
        tidx = target.basis(k)[1]
        cols = []
        for c, b in items:
            poly = grads[c] if c < n else {m: -x for m, x in f.terms.items()}
            col = {}
            for m, x in poly.items():
                key = tidx[(0, tuple(p + q for p, q in zip(b, m)))]
                s = col.get(key, 0) + x
                if s:
                    col[key] = s
                else:
                    col.pop(key)
            cols.append(col)
        return SparseMatrix.from_columns(target.dim(k), cols)

    return F, phi


def module_sketch(kind: str, f: Poly, K: int, fld: Field = QQ, k_min: int | None = None) -> GradedModuleSketch:
    """Build a sketch on degrees up to ``K``.

    ``kind`` is one of ``logforms:j`` (``L^j``, graded so that ``w/f`` has
    degree ``deg w - e``), ``logforms_raw:j`` (``K^j``, unshifted),
    ``logders``, ``koszul_kernel:j`` (``A^j``) or ``milnor_top`` (``M``).
    """
    name, _, arg = kind.partition(":")
    e = f.e
    if name == "milnor_top":
        return milnor_sketch(f, 0 if k_min is None else k_min, K, fld)
    if name == "koszul_kernel":
        j = int(arg)
        F = FreeModule.forms(f.a, j)
        if j >= f.n:
            phi = lambda k: None  # noqa: E731
        else:
            phi = lambda k: operator_matrix(f, "wedge_df", j, k).matrix  # noqa: E731
        lo = F.min_degree if k_min is None else k_min
        return kernel_sketch(F, phi, lo, K, fld, f"A^{j}")
    if name in ("logforms", "logforms_raw"):
        j = int(arg)
        F, phi, _ = _logforms_phi(f, j)
        if name == "logforms":
            lo = F.min_degree if k_min is None else k_min + e
            raw = kernel_sketch(F, phi, lo, K + e, fld, f"K^{j}")
            return raw.shifted(e, f"L^{j}")
        lo = F.min_degree if k_min is None else k_min
        return kernel_sketch(F, phi, lo, K, fld, f"K^{j}")
    if name == "logders":
        F, phi = _logders_phi(f)
        lo = F.min_degree if k_min is None else k_min
        return kernel_sketch(F, phi, lo, K, fld, "Theta")
    raise ValueError(f"unknown sketch kind {kind!r}")


# ---------------------------------------------------------------------------
# graded Tor via the Koszul complex


@dataclass
class BettiTable:
    entries: dict[tuple[int, int], int]
    window: tuple[int, int]
    certified: bool
    boundary: list[int] = dc_field(default_factory=list)

    @property
    def pd(self) -> int:
        nz = [i for (i, k), v in self.entries.items() if v]
        return max(nz) if nz else 0

    @property
    def reg(self) -> int | None:
        nz = [k - i for (i, k), v in self.entries.items() if v]
        return max(nz) if nz else None

    def row(self, i: int) -> dict[int, int]:
        return {k: v for (ii, k), v in self.entries.items() if ii == i and v}

    def render(self) -> str:
        """Macaulay-style table: rows ``k - i``, columns ``i``."""
        if not any(self.entries.values()):
            return "(zero)"
        imax = max(i for (i, _), v in self.entries.items() if v)
        shifts = sorted({k - i for (i, k), v in self.entries.items() if v})
        lines = ["      " + " ".join(f"{i:>4}" for i in range(imax + 1))]
        for s in range(shifts[0], shifts[-1] + 1):
            cells = []
            for i in range(imax + 1):
                v = self.entries.get((i, s + i), 0)
                cells.append(f"{v:>4}" if v else "   -")
            lines.append(f"{s:>4}: " + " ".join(cells))
        return "\n".join(lines)


def _koszul_map(M: GradedModuleSketch, i: int, k: int):
    """Matrix of ``Λ^i ⊗ M -> Λ^{i-1} ⊗ M`` in degree ``k``."""
    n, a = M.n, M.a
    src = [(S, k - sum(a[s] for s in S)) for S in combinations(range(n), i)]
    tgt = [(S, k - sum(a[s] for s in S)) for S in combinations(range(n), i - 1)]
    toff, size = {}, 0
    for S, deg in tgt:
        toff[S] = size
        size += M.dim(deg)
    cols = []
    for S, deg in src:
        for b in range(M.dim(deg)):
            col = {}
            for t, s in enumerate(S):
                T = S[:t] + S[t + 1:]
                mm = M.mult[(s, deg)]
                sign = -1 if t % 2 else 1
                for r, x in mm.cols[b].items():
                    col[toff[T] + r] = col.get(toff[T] + r, 0) + sign * x
            cols.append({r: x for r, x in col.items() if x})
    return SparseMatrix.from_columns(size, cols), sum(M.dim(deg) for _, deg in src)


def tor_betti(M: GradedModuleSketch, K_tor: int | None = None) -> BettiTable:
    """``dim Tor_i(M, k)_k`` for ``k <= K_tor`` from Koszul homology.

    Entries are certified only if every Tor group vanishes on the top ``n``
    degrees of the window.
    """
    n = M.n
    K = M.k_max if K_tor is None else min(K_tor, M.k_max)
    lo = M.k_min
    entries = {}
    fld = M.field
    for k in range(lo, K + 1):
        ranks = {}
        sizes = {}
        for i in range(0, n + 2):
            if i == 0 or i > n:
                ranks[i] = 0
                sizes[i] = M.dim(k) if i == 0 else 0
                continue
            mat, sz = _koszul_map(M, i, k)
            sizes[i] = sz
            ranks[i] = rank(mat, fld) if mat.ncols and mat.nrows else 0
        for i in range(0, n + 1):
            v = sizes[i] - ranks[i] - ranks[i + 1]
            if v:
                entries[(i, k)] = v
    boundary = [k for (i, k), v in entries.items() if v and k > K - n]
    return BettiTable(entries, (lo, K), not boundary, sorted(set(boundary)))
