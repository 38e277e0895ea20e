"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""

import os
import random
import time
from fractions import Fraction
from math import prod

import pytest

from acceptance_log import record
from reference_tables import QUARTIC, QUINTIC, QUINTIC_W, mismatches
from polelog.forms import gamma_coeffs, koszul_dim, mu_nu
from polelog.linalg import GF, QQ, random_primes
from polelog.localcoh import InternalInconsistency, h0m_profile, prop1_report
from polelog.parser import parse_poly
from polelog.poly import Poly, monomials
from polelog.resolution import freeness_check, decomposition_check, regularity_check
from polelog.spectral import filtered_page_dim, ss_pages, surjectivity_check_cor2, torsion_page_profile
from polelog.whlct import pencil_report, spectrum_wh, twisted_log_dims

V4 = ["x", "y", "z", "w"]
F = Fraction


def poly4(text):
    return parse_poly(text, names=V4)


def test_criterion_01_quartic_table():
    t0 = time.time()
    table = ss_pages(poly4("x^4 + y^3*z + z^3*w + x*y*z*w"), r_max=3, k_min=4, exact=True)
    dt = time.time() - t0
    bad = mismatches(table, QUARTIC)
    ok = not bad and dt < 60
    record(1, ok, f"quartic table exact, {len(bad)} mismatched cells, {dt:.1f}s (< 60s)")
    assert ok, bad


def test_criterion_02_quintic_table():
    f = poly4("x^5 + y^4*z + x^3*y^2 + w^5")
    t0 = time.time()
    exact = ss_pages(f, r_max=3, k_min=4, exact=True)
    dt = time.time() - t0
    modp = ss_pages(f, r_max=3, k_min=4)
    bad = mismatches(exact, QUINTIC)
    column = all(exact.mu[r][10] == modp.mu[r][10] and exact.nu[r][10] == modp.nu[r][10] for r in (1, 2, 3))
    agree = exact.dims() == modp.dims()
    ok = not bad and dt < 600 and column and agree and modp.mode.startswith("multi-prime")
    record(2, ok, f"quintic table exact, {len(bad)} mismatched cells, {dt:.1f}s; {modp.mode} agrees: {agree}")
    assert ok, bad


def test_criterion_03_quintic_w_table_and_cor2():
    f = poly4("x^5 + y^4*w + z^4*w")
    table = ss_pages(f, r_max=2, k_min=4, exact=True)
    bad = mismatches(table, QUINTIC_W)
    cor2 = surjectivity_check_cor2(f, table=table)
    ok = not bad and cor2["verdict"] is True
    record(3, ok, f"{len(bad)} mismatched cells; cor2 verdict {cor2['verdict']}")
    assert ok, bad


def _battery(count=10, seed=2024):
    """Sparse random reduced homogeneous f, n = 3, 4, d <= 5, with Koszul
    cohomology vanishing below n-1 on the window (isolated projective
    singularities)."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.choice([3, 4])
        d = rng.randint(3, 5)
        mons = monomials((1,) * n, d)
        terms = {m: F(rng.randint(-3, 3) or 1) for m in rng.sample(mons, rng.randint(n, n + 3))}
        f = Poly.from_terms(terms, (1,) * n)
        if not f.is_reduced():
            continue
        K = n * (d - 1) + d
        if any(koszul_dim(f, j, k) for j in range(n - 1) for k in range(K + 1)):
            continue
        out.append(f)
    return out


def test_criterion_04_euler_identity():
    polys = [
        poly4("x^4 + y^3*z + z^3*w + x*y*z*w"),
        poly4("x^5 + y^4*z + x^3*y^2 + w^5"),
        poly4("x^5 + y^4*w + z^4*w"),
    ] + _battery()
    failures = []
    for f in polys:
        g = gamma_coeffs(f.n, f.e)
        for k in range(0, f.n * (f.e - 1) + f.e + 1):
            mu, nu = mu_nu(f, k)
            if mu != nu + (g[k] if k < len(g) else 0):
                failures.append((str(f), k))
    ok = not failures
    record(4, ok, f"mu_k = nu_k + gamma_k on {len(polys)} polynomials, {len(failures)} failures")
    assert ok, failures


def test_criterion_05_torsion_profile():
    a = torsion_page_profile(poly4("x^5 + y^4*z + x^3*y^2 + w^5"), exact=True)
    b = torsion_page_profile(poly4("x^4 + y^3*z + z^3*w + x*y*z*w"), exact=True)
    ok = a["torsion_detected"] and a["mu"][1:] == [3, 1] and not b["torsion_detected"]
    record(5, ok, f"quintic mu_5 pages {a['mu']} flagged; quartic mu_4 pages {b['mu']} not flagged")
    assert ok


def _pencil(d):
    return parse_poly("*".join(f"(x+{i}*y)" for i in range(d - 1)) + "*y")


def test_criterion_06_pencil_dimensions():
    problems = []
    f3 = parse_poly("x*y*(x+y)")
    for j in (1, 2):
        if twisted_log_dims(f3, F(1, 3), 0, j) != 1:
            problems.append(("xy(x+y)", j))
    f5 = parse_poly("x*y*(x+y)*(x+2*y)*(x+3*y)")
    rep = pencil_report(f5, F(2, 5))
    if [rep["dims"][j]["twisted"] for j in (1, 2)] != [2, 2] or not rep["mismatch"]:
        problems.append(("five lines", rep["dims"]))
    for d in range(3, 8):
        f = _pencil(d)
        for t in range(1, d - 1):
            rep = pencil_report(f, F(t, d))
            for j in (1, 2):
                if rep["dims"][j]["twisted"] != d - 1 - t:
                    problems.append((d, t, j))
            if rep["mismatch"] != (2 <= t <= d - 2):
                problems.append((d, t, "mismatch"))
    ok = not problems
    record(6, ok, f"twisted dims d-1-d*alpha, mismatch exactly for d*alpha in [2, d-2] (d = 3..7); {len(problems)} problems")
    assert ok, problems


def test_criterion_07_regularity():
    cases = {
        "boolean": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        "xy(x+y)": [[1, 0], [0, 1], [1, 1]],
        "xyz(x+y+z)": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]],
        "5 lines": [[1, 0], [0, 1], [1, 1], [1, 2], [1, 3]],
    }
    results = {}
    ok = True
    for name, forms in cases.items():
        rep = regularity_check(forms)
        results[name] = rep["reg"]
        ok &= rep["bound_ok"] and rep["certified"]
    ok &= all(v == 0 for v in results["boolean"].values())
    record(7, ok, "reg L^j <= 0 certified: " + ", ".join(f"{k} {max(v.values())}" for k, v in results.items()))
    assert ok, results


def test_criterion_08_logform_decomposition():
    polys = [parse_poly("x*y*z"), parse_poly("x*y*(x+y)"), parse_poly("x^2+y^2+z^2"), poly4("x^4 + y^3*z + z^3*w + x*y*z*w")]
    bad = {}
    for f in polys:
        rep = decomposition_check(f, -f.e, 2 * f.e)
        if not rep["ok"]:
            bad[str(f)] = rep["violations"]
    ok = not bad
    record(8, ok, f"dim L^j_m = dim A^j + dim A^(j+1) at m+e on m in [-e, 2e]; {len(bad)} failing inputs")
    assert ok, bad


def test_criterion_09_spectrum():
    rng = random.Random(9)
    bad = []
    for _ in range(20):
        w = [F(1, rng.randint(2, 9)) for _ in range(rng.randint(1, 4))]
        sp, info = spectrum_wh(w)
        if not sp.symmetric() or sp.size != prod(1 / x - 1 for x in w):
            bad.append(w)
    _, half = spectrum_wh([F(1, 2)] * 3)
    _, third = spectrum_wh([F(1, 3)] * 3)
    ok = not bad and half["lct_holds"] and not third["lct_holds"]
    record(9, ok, f"20 weight vectors symmetric with Milnor count ({len(bad)} bad); (1/2)^3 holds, (1/3)^3 fails")
    assert ok, bad


BATTERY10 = ["x*y*z", "x^3 + y^3 + z^3", "x^5 + y^5 + z^5", "x^5 + y^4*z + x^3*y^2"]


@pytest.mark.xfail(
    strict=True,
    reason="x^5+y^4z+x^3y^2 has a non weighted homogeneous singular point; "
    "page 2 does not degenerate (mu^(2)_10 = 1, mu^(3)_10 = 0) so conditions (c) and (d) disagree",
)
def test_criterion_10_consistency_battery():
    disagreements = []
    for text in BATTERY10:
        f = parse_poly(text)
        try:
            prop1_report(f)
        except InternalInconsistency as exc:
            disagreements.append(f"{text}: {exc}")
        free = freeness_check(f)["free"]
        torsion_free = all(v == 0 for v in h0m_profile(f).mu1.values())
        if free != torsion_free:
            disagreements.append(f"{text}: free {free} but mu' == 0 is {torsion_free}")
    ok = not disagreements
    record(10, ok, "; ".join(disagreements) or "prop1 (c) = (d) and freeness = (mu' == 0) on the battery")
    assert ok, disagreements


def test_criterion_11_stretch_three_row():
    """Non-blocking: nu^(2)_14 and nu^(3)_14 for (xz+yw)(x^4w+y^5+xy^4)."""
    f = poly4("(x*z + y*w)*(x^4*w + y^5 + x*y^4)")
    exact = os.environ.get("POLELOG_STRETCH_EXACT") == "1"
    fld = QQ if exact else GF(random_primes(1, seed=0)[0])
    t0 = time.time()
    # nu^(r)_14 lives in H^3 at internal degree 14 - 7 = 7
    dims = [filtered_page_dim(f, 3, 7, r, fld) for r in (1, 2, 3)]
    dt = time.time() - t0
    ok = dims[1] == 1 and dims[2] == 0
    record(11, ok, f"nu^(r)_14 for r = 1,2,3: {dims} over {'QQ' if exact else fld}, {dt:.0f}s (stretch)")
    assert ok, dims


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
