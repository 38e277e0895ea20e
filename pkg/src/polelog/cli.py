"""Command line front end: ``polelog <verb> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import sympy

from . import arrangement as arr_mod
from . import localcoh, resolution, spectral, whlct
from .forms import mu_nu
from .linalg import QQ
from .modules import WindowTruncation, module_sketch, tor_betti
from .parser import PolySyntaxError, parse_poly, parse_rational
from .poly import InhomogeneousError, NotReducedError, Poly

__all__ = ["main", "render_table", "table_json", "build_parser"]

EXIT_OK, EXIT_INTERNAL, EXIT_HYPOTHESIS = 0, 1, 2

# input or hypothesis failures; everything else is an internal error
HYPOTHESIS_ERRORS = (
    PolySyntaxError,
    InhomogeneousError,
    NotReducedError,
    spectral.WindowError,
    spectral.NonIsolatedError,
    localcoh.BoundTooSmall,
    localcoh.MuNotStabilized,
    resolution.NotEssential,
    WindowTruncation,
)


def _row_names(table: spectral.SpectralTable) -> list[tuple[str, str]]:
    rows = [("gamma", "gamma_k:"), ("mu", "mu_k:")]
    rows += [(f"mu{r}", f"mu^({r})_k:") for r in range(2, table.r_max + 1)]
    rows += [("nu", "nu_k:")]
    rows += [(f"nu{r}", f"nu^({r})_k:") for r in range(2, table.r_max + 1)]
    return rows


def render_table(table: spectral.SpectralTable) -> str:
    """Text table in the row order k, gamma, mu, mu^(r), nu, nu^(r); zeros blank."""
    degs = table.degrees
    rows = [("k:", [str(k) for k in degs])]
    for name, label in _row_names(table):
        rows.append((label, [str(v) if v else "" for v in table.row(name)]))
    lw = max(len(label) for label, _ in rows)
    cw = max([len(c) for _, cells in rows for c in cells] + [1]) + 1
    lines = []
    for label, cells in rows:
        line = label.ljust(lw) + "".join(c.rjust(cw) for c in cells)
        lines.append(line.rstrip())
    if not degs:
        return lines[0] + "\n"
    return "\n".join(lines) + "\n"


def table_json(table: spectral.SpectralTable) -> dict:
    out = {
        "f": str(table.f),
        "weights": list(table.f.a),
        "e": table.f.e,
        "k": table.degrees,
        "r_max": table.r_max,
        "r_stab": table.r_stab,
        "mode": table.mode,
        "engine": table.engine,
        "primes": list(table.primes),
    }
    for name, _ in _row_names(table):
        out[name] = table.row(name)
    return out


def _to_json(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, Poly):
        return str(obj)
    if hasattr(obj, "entries") and hasattr(obj, "render"):
        return {f"{i},{k}": v for (i, k), v in sorted(obj.entries.items())}
    raise TypeError(f"not serializable: {type(obj).__name__}")


def _dump(obj) -> str:
    def keys(o):
        if isinstance(o, dict):
            return {str(k): keys(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [keys(v) for v in o]
        return o

    return json.dumps(keys(obj), default=_to_json, indent=2)


def _ints(text: str | None):
    if not text:
        return None
    return tuple(int(x) for x in text.split(","))


def _poly(args) -> Poly:
    if args.f is None:
        raise PolySyntaxError("no polynomial given (use -f)", "", 0)
    names = args.vars.split(",") if args.vars else None
    weights = _ints(args.weights) if getattr(args, "weights", None) else None
    return parse_poly(args.f, names=names, weights=weights)


def _emit(args, payload: dict, text: str):
    print(_dump(payload) if args.json else text, end="" if text.endswith("\n") and not args.json else "\n")


def _kv_text(d: dict, indent: str = "") -> str:
    lines = []
    for k, v in d.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.append(_kv_text(v, indent + "  "))
        else:
            lines.append(f"{indent}{k}: {v}")
    return "\n".join(lines)


# verbs ----------------------------------------------------------------------


def cmd_ss(args) -> int:
    f = _poly(args)
    k_min = args.kmin if args.kmin is not None else sum(f.a)
    table = spectral.ss_pages(
        f,
        r_max=args.rmax,
        K_max=args.kmax,
        k_min=k_min,
        exact=args.exact,
        three_row=args.three_row,
        seed=args.seed,
    )
    _emit(args, table_json(table), render_table(table))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    if not args.weights:
        raise PolySyntaxError("--weights is required", "", 0)
    w = [parse_rational(x) for x in args.weights.split(",")]
    sp, info = whlct.spectrum_wh(w)
    payload = {"spectrum": {str(a): m for a, m in sp.sorted()}, **info}
    _emit(args, payload, f"Sp(t) = {sp}\n" + _kv_text(info))
    return EXIT_OK


def _isolated(f: Poly) -> bool:
    top = spectral.default_kmax(f)
    return all(mu_nu(f, k, check_reduced=False)[0] == 0 for k in range(top + 1, top + 1 + max(f.a)))


def cmd_lct(args) -> int:
    """Spectrum criterion for a weighted-homogeneous isolated singularity."""
    f = _poly(args)
    if not _isolated(f):
        print("hypothesis failed: the singularity at 0 is not isolated", file=sys.stderr)
        return EXIT_HYPOTHESIS
    w = [Fraction(a, f.e) for a in f.a]
    sp, info = whlct.spectrum_wh(w)
    info["weights"] = [str(x) for x in w]
    info["hypothesis_flags"]["isolated_singularity_checked"] = True
    payload = {"spectrum": {str(a): m for a, m in sp.sorted()}, **info}
    _emit(args, payload, f"Sp(t) = {sp}\n" + _kv_text(info))
    return EXIT_OK


def cmd_betti(args) -> int:
    f = _poly(args)
    K = args.ktor if args.ktor is not None else resolution.default_ktor(f)
    kind = args.kind
    if not (kind == "logders" or kind.startswith("logforms:")):
        raise PolySyntaxError(f"unknown module kind {kind!r}", kind, 0)
    bt = tor_betti(module_sketch(kind, f, K, QQ), K)
    payload = {
        "kind": kind,
        "betti": bt,
        "pd": bt.pd,
        "reg": bt.reg,
        "certified": bt.certified,
        "window": bt.window,
    }
    text = bt.render() + f"\npd = {bt.pd}, reg = {bt.reg}, certified = {bt.certified}\n"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_logforms(args) -> int:
    f = _poly(args)
    tame = resolution.tameness_check(f, args.ktor)
    dims = {
        r: {j: whlct.log_dRham_dims(f, r, j) for j in range(f.n + 1)} for r in range(args.rmax)
    }
    payload = {"tameness": tame, "log_de_rham_dims": dims}
    lines = [f"tame: {tame['tame']} (certified: {tame['certified']})"]
    for j, v in tame["per_j"].items():
        lines.append(f"  pd L^{j} = {v['pd']}")
    for r, row in dims.items():
        lines.append(f"H^j(log, f^-{r}): " + " ".join(str(row[j]) for j in sorted(row)))
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_arrangement(args) -> int:
    if not args.file:
        raise PolySyntaxError("--file is required", "", 0)
    arr = arr_mod.load_arrangement(args.file)
    alpha = parse_rational(args.alpha) if args.alpha else None
    if arr.residues is None and alpha is None:
        print("hypothesis failed: residues are required (file or --alpha)", file=sys.stderr)
        return EXIT_HYPOTHESIS
    rep = arr_mod.lct_certificate(arr, which=args.certify, alpha=alpha)
    lines = [f"n = {rep['n']}, essential = {rep['essential']}"]
    for E in rep["edges"]:
        mark = "dense" if E["dense"] else ""
        lines.append(f"  edge {E['hyperplanes']} codim {E['codim']} m {E['m']} alpha {E['alpha']} {mark}".rstrip())
    for c in "bcd":
        if c in rep:
            lines.append(f"({c}): " + json.dumps(rep[c], default=str))
    _emit(args, rep, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_prop1(args) -> int:
    f = _poly(args)
    rep = localcoh.prop1_report(f, weighted_asserted=args.weighted)
    _emit(args, rep, _kv_text(rep) + "\n")
    return EXIT_OK


def cmd_cor2(args) -> int:
    f = _poly(args)
    kw = {"exact": args.exact}
    if args.kmax is not None:
        kw["K_max"] = args.kmax
    rep = spectral.surjectivity_check_cor2(f, weighted_asserted=args.weighted, **kw)
    _emit(args, rep, _kv_text(rep) + "\n")
    return EXIT_OK


def cmd_cor3(args) -> int:
    f = _poly(args)
    rep = localcoh.cor3_check(f, weighted_asserted=args.weighted)
    _emit(args, rep, _kv_text(rep) + "\n")
    return EXIT_OK


def _residue_data(args) -> whlct.ResidueData:
    if args.components:
        if not args.weights:
            raise PolySyntaxError("--weights is required with --components", "", 0)
        w = [parse_rational(x) for x in args.weights.split(",")]
        comps = []
        for item in args.components.split(","):
            d, a = item.split(":")
            comps.append((parse_rational(d), parse_rational(a)))
        return whlct.ResidueData(comps, tuple(w))
    f = _poly(args)
    if args.alpha is None:
        raise PolySyntaxError("--alpha or --components is required", "", 0)
    alpha = parse_rational(args.alpha)
    syms = sympy.symbols(f.names)
    _, factors = sympy.factor_list(f.to_sympy(syms), *syms)
    comps = []
    for g, mult in factors:
        if mult != 1:
            raise NotReducedError(f"{f} has a repeated factor")
        # weighted degree of g
        deg = max(sum(a * b for a, b in zip(f.a, m)) for m in sympy.Poly(g, *syms).monoms())
        comps.append((Fraction(deg, f.e), alpha))
    return whlct.ResidueData(comps, tuple(Fraction(a, f.e) for a in f.a))


def cmd_thm1(args) -> int:
    res = _residue_data(args)
    rep = whlct.thm1_acyclicity(res)
    rep["components"] = [(str(d), str(a)) for d, a in res.components]
    _emit(args, rep, _kv_text(rep) + "\n")
    return EXIT_OK


VERBS = {
    "ss": cmd_ss,
    "lct": cmd_lct,
    "spectrum": cmd_spectrum,
    "betti": cmd_betti,
    "logforms": cmd_logforms,
    "arrangement": cmd_arrangement,
    "prop1": cmd_prop1,
    "cor2": cmd_cor2,
    "cor3": cmd_cor3,
    "thm1": cmd_thm1,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polelog", description="Pole order spectral sequences and logarithmic comparison checks.")
    sub = p.add_subparsers(dest="verb", required=True)

    def poly_opts(sp):
        sp.add_argument("-f", help="polynomial, e.g. 'x^4 + y^3*z'")
        sp.add_argument("--vars", help="comma separated variable names")
        sp.add_argument("--weights", help="comma separated integer weights")
        sp.add_argument("--json", action="store_true")

    s = sub.add_parser("ss", help="pages of the pole order spectral sequence")
    poly_opts(s)
    s.add_argument("--kmin", type=int)
    s.add_argument("--kmax", type=int)
    s.add_argument("--rmax", type=int, default=3)
    s.add_argument("--exact", action="store_true")
    s.add_argument("--three-row", action="store_true", help="filtered-complex engine (nonzero H^{n-2})")
    s.add_argument("--seed", type=int)

    s = sub.add_parser("lct", help="spectrum criterion for isolated weighted-homogeneous f")
    poly_opts(s)

    s = sub.add_parser("spectrum", help="spectrum from rational weights")
    s.add_argument("--weights", required=True, help="rational weights, e.g. 1/2,1/3")
    s.add_argument("--json", action="store_true")

    s = sub.add_parser("betti", help="graded Betti table of logarithmic modules")
    poly_opts(s)
    s.add_argument("--kind", default="logders", help="logders or logforms:j")
    s.add_argument("--ktor", type=int)

    s = sub.add_parser("logforms", help="tameness and log de Rham dimensions")
    poly_opts(s)
    s.add_argument("--ktor", type=int)
    s.add_argument("--rmax", type=int, default=1, help="pole orders r = 0..rmax-1")

    s = sub.add_parser("arrangement", help="residue certificates for an arrangement")
    s.add_argument("--file", help="JSON file or inline JSON")
    s.add_argument("--certify", default="bcd", help="any of b, c, d")
    s.add_argument("--alpha", help="uniform residue p/q")
    s.add_argument("--json", action="store_true")

    for name in ("prop1", "cor2", "cor3"):
        s = sub.add_parser(name)
        poly_opts(s)
        s.add_argument("--weighted", action="store_true", help="assert weighted-homogeneous singular points")
        if name == "cor2":
            s.add_argument("--kmax", type=int)
            s.add_argument("--exact", action="store_true")

    s = sub.add_parser("thm1", help="acyclicity test from residues")
    poly_opts(s)
    s.add_argument("--alpha", help="uniform residue on all factors of f")
    s.add_argument("--components", help="d1:alpha1,d2:alpha2,... with rational weights in --weights")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return VERBS[args.verb](args)
    except HYPOTHESIS_ERRORS as exc:
        print(f"hypothesis failed: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except localcoh.InternalInconsistency as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS if isinstance(exc, (ValueError, OSError)) else EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
