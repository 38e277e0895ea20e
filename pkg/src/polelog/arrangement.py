"""Central hyperplane arrangements: intersection lattice, dense edges, delta
profiles and the residue certificates."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .forms import koszul_rank, basis_forms
from .linalg import QQ, Echelon, SparseMatrix, kernel_basis, solve
from .parser import parse_rational
from .resolution import arrangement_poly

__all__ = [
    "Arrangement",
    "Edge",
    "build_lattice",
    "dense_edges",
    "delta_profile",
    "lct_certificate",
    "load_arrangement",
    "avoidance_contains",
    "delta_bound_violations",
]


def _rank(vectors) -> int:
    ech = Echelon(QQ)
    for v in vectors:
        ech.add({i: Fraction(x) for i, x in enumerate(v) if x})
    return len(ech)


@dataclass
class Arrangement:
    forms: list[tuple[Fraction, ...]]
    residues: list[Fraction] | None = None

    def __post_init__(self):
        self.forms = [tuple(Fraction(x) for x in c) for c in self.forms]
        if not self.forms:
            raise ValueError("empty arrangement")
        n = len(self.forms[0])
        for c in self.forms:
            if len(c) != n:
                raise ValueError("covectors of different lengths")
            if not any(c):
                raise ValueError("zero covector")
        for a, b in combinations(range(len(self.forms)), 2):
            if _rank([self.forms[a], self.forms[b]]) < 2:
                raise ValueError(f"hyperplanes {a} and {b} coincide (arrangement not reduced)")
        if self.residues is not None:
            self.residues = [Fraction(x) for x in self.residues]
            if len(self.residues) != len(self.forms):
                raise ValueError("one residue per hyperplane required")

    @property
    def n(self) -> int:
        return len(self.forms[0])

    @property
    def essential(self) -> bool:
        return _rank(self.forms) == self.n

    def poly(self):
        return arrangement_poly(self.forms)


@dataclass
class Edge:
    hyperplanes: frozenset[int]
    codim: int
    subspace: list[dict]
    dense: bool = False
    alpha: Fraction | None = None
    delta: int | None = None
    delta_j: dict[int, int] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.hyperplanes)

    def describe(self) -> str:
        return "{" + ",".join(str(i) for i in sorted(self.hyperplanes)) + "}"


def _closure(arr: Arrangement, S) -> frozenset[int]:
    ech = Echelon(QQ)
    for i in S:
        ech.add({t: x for t, x in enumerate(arr.forms[i]) if x})
    return frozenset(i for i in range(len(arr.forms)) if ech.contains({t: x for t, x in enumerate(arr.forms[i]) if x}))


def build_lattice(arr: Arrangement) -> list[Edge]:
    """All intersections of hyperplanes, identified by the set of hyperplanes
    containing them, ordered by codimension then hyperplane set."""
    flats = {_closure(arr, [i]) for i in range(len(arr.forms))}
    frontier = set(flats)
    while frontier:
        new = set()
        for F in frontier:
            for i in range(len(arr.forms)):
                if i not in F:
                    G = _closure(arr, F | {i})
                    if G not in flats:
                        new.add(G)
        flats |= new
        frontier = new
    edges = []
    for F in flats:
        vecs = [arr.forms[i] for i in sorted(F)]
        c = _rank(vecs)
        mat = SparseMatrix.from_dense([list(v) for v in vecs])
        edges.append(Edge(F, c, kernel_basis(mat)))
    edges.sort(key=lambda E: (E.codim, sorted(E.hyperplanes)))
    if arr.residues is not None:
        for E in edges:
            E.alpha = sum((arr.residues[i] for i in E.hyperplanes), Fraction(0))
    return edges


def _decomposable(vectors: list) -> bool:
    """A nontrivial partition with ``rank A1 + rank A2 = rank A`` exists."""
    m = len(vectors)
    if m <= 1:
        return False
    total = _rank(vectors)
    idx = list(range(m))
    # element 0 always on the left; enumerate proper nonempty right parts
    for size in range(1, m):
        for right in combinations(idx[1:], size):
            left = [vectors[i] for i in idx if i not in right]
            rv = [vectors[i] for i in right]
            if _rank(left) + _rank(rv) == total:
                return True
    return False


def dense_edges(arr: Arrangement, edges: list[Edge] | None = None) -> list[Edge]:
    """Mark edges whose localized arrangement is indecomposable."""
    if edges is None:
        edges = build_lattice(arr)
    for E in edges:
        E.dense = not _decomposable([arr.forms[i] for i in sorted(E.hyperplanes)])
    return [E for E in edges if E.dense]


def _localize(arr: Arrangement, E: Edge):
    """Covectors of the hyperplanes containing ``E`` in coordinates on ``V/E``."""
    vecs = [arr.forms[i] for i in sorted(E.hyperplanes)]
    basis = []
    ech = Echelon(QQ)
    for v in vecs:
        if ech.add({t: x for t, x in enumerate(v) if x}) is not None:
            basis.append(v)
    B = SparseMatrix.from_columns(arr.n, [{t: x for t, x in enumerate(b) if x} for b in basis])
    local = []
    for v in vecs:
        x = solve(B, list(v))
        local.append(tuple(x.get(t, Fraction(0)) for t in range(len(basis))))
    return local


def delta_profile(arr: Arrangement, E: Edge) -> tuple[int, dict[int, int]]:
    """``delta_Z`` and ``delta_Z^(j) = m_Z - min{k : (A^j)_k != 0}`` on the
    essentialized localization (``deg dx_i = 1``)."""
    if E.codim == 1:
        E.delta, E.delta_j = 0, {}
        return 0, {}
    local = _localize(arr, E)
    f = arrangement_poly(local)
    m, c = f.e, f.n
    per_j = {}
    for j in range(1, c + 1):
        for k in range(j, m + j):
            dim = len(basis_forms(f, j, k))
            if dim - koszul_rank(f, j, k) > 0:
                per_j[j] = m - k
                break
    delta = max(per_j.values())
    E.delta, E.delta_j = delta, per_j
    return delta, per_j


def delta_bound_violations(E: Edge) -> list[str]:
    """Report (never suppress) failures of ``1 <= delta`` and, in codim >= 3,
    ``delta <= m - 3``."""
    out = []
    if E.delta is None or E.codim < 2:
        return out
    if E.delta < 1:
        out.append(f"delta = {E.delta} < 1 on {E.describe()}")
    if E.codim >= 3 and E.delta > E.m - 3:
        out.append(f"delta = {E.delta} > m - 3 = {E.m - 3} on {E.describe()}")
    return out


def avoidance_contains(alpha: Fraction, ms: Sequence[int]) -> bool:
    """``alpha in Z_{>=1} ∪ ⋃ (1/m) Z_{>=2}``."""
    alpha = Fraction(alpha)
    if alpha.denominator == 1 and alpha >= 1:
        return True
    for m in ms:
        t = alpha * m
        if t.denominator == 1 and t >= 2:
            return True
    return False


def _is_int_in(x: Fraction, lo=None, hi=None) -> bool:
    if x.denominator != 1:
        return False
    if lo is not None and x < lo:
        return False
    if hi is not None and x > hi:
        return False
    return True


def lct_certificate(arr: Arrangement, which: str = "bcd", alpha: Fraction | None = None) -> dict:
    """The three residue certificates with witnesses for failed hypotheses."""
    if alpha is not None:
        arr = Arrangement(arr.forms, [Fraction(alpha)] * len(arr.forms))
    if arr.residues is None:
        raise ValueError("residues are required (give them in the file or pass --alpha)")
    edges = build_lattice(arr)
    dense = dense_edges(arr, edges)
    report: dict = {
        "n": arr.n,
        "essential": arr.essential,
        "edges": [
            {
                "hyperplanes": sorted(E.hyperplanes),
                "codim": E.codim,
                "m": E.m,
                "dense": E.dense,
                "alpha": str(E.alpha),
            }
            for E in edges
        ],
    }
    if "b" in which:
        fails = []
        for k, a in enumerate(arr.residues):
            if _is_int_in(a, lo=1):
                fails.append({"edge": [k], "kind": "hyperplane", "alpha": str(a), "condition": "alpha_k in Z>=1"})
        for E in dense:
            if E.codim >= 2 and _is_int_in(E.alpha, lo=2):
                fails.append({"edge": sorted(E.hyperplanes), "kind": "dense edge", "alpha": str(E.alpha), "condition": "alpha_Z in Z>=2"})
        report["b"] = {"certified": not fails, "failures": fails}
    if "c" in which:
        fails = []
        deltas = {}
        bounds = []
        for E in dense:
            delta, per_j = delta_profile(arr, E)
            deltas[E.describe()] = {"delta": delta, "delta_j": per_j}
            bounds += delta_bound_violations(E)
            if _is_int_in(E.alpha, hi=delta):
                fails.append({"edge": sorted(E.hyperplanes), "alpha": str(E.alpha), "delta": delta, "condition": "alpha_Z in Z<=delta_Z"})
        report["c"] = {"certified": not fails, "failures": fails, "deltas": deltas, "bound_violations": bounds}
    if "d" in which:
        vals = set(arr.residues)
        if len(vals) != 1:
            report["d"] = {"applicable": False, "reason": "residues are not all equal"}
        else:
            a = vals.pop()
            ms = sorted({E.m for E in dense if E.codim >= 2})
            inside = avoidance_contains(a, ms)
            report["d"] = {
                "applicable": True,
                "alpha": str(a),
                "multiplicities": ms,
                "in_avoidance_set": inside,
                "certified": not inside,
                "statement": "the annihilator of f^(alpha-1) is generated by first order operators"
                if not inside
                else "alpha lies in the avoidance set; no certificate",
            }
    return report


def load_arrangement(path_or_text: str) -> Arrangement:
    """Read ``{"forms": [[...]], "residues": ["p/q", ...]}`` (residues optional)."""
    try:
        data = json.loads(path_or_text)
    except json.JSONDecodeError:
        with open(path_or_text) as fh:
            data = json.load(fh)
    forms = [[parse_rational(str(x)) for x in row] for row in data["forms"]]
    res = data.get("residues")
    if res is not None and res != "generic":
        res = [parse_rational(str(x)) for x in res]
    else:
        res = None
    return Arrangement(forms, res)
