import pytest

from polelog.forms import gamma_coeffs, mu_nu
from polelog.localcoh import (
    InternalInconsistency,
    cor3_check,
    h0m_bruteforce,
    h0m_profile,
    prop1_report,
    symmetry_checks,
)
from polelog.modules import milnor_sketch
from polelog.parser import parse_poly

CASES = ["x^3 + y^3 + z^3", "x*y*z", "x^5 + y^4*z + x^3*y^2", "x*y*(x+y)*z", "x^5 + y^5 + z^5"]


@pytest.fixture(scope="module")
def profiles():
    return {t: h0m_profile(parse_poly(t)) for t in CASES}


def test_smooth_cubic(profiles):
    p = profiles["x^3 + y^3 + z^3"]
    assert p.mu1 == p.mu
    assert set(p.mu2.values()) == {0}
    assert p.tau_Z == 0


def test_xyz(profiles):
    p = profiles["x*y*z"]
    assert set(p.mu1.values()) == {0}
    assert p.tau_Z == 3


def test_torsion_example_band(profiles):
    p = profiles["x^5 + y^4*z + x^3*y^2"]
    support = sorted(k for k, v in p.mu1.items() if v)
    assert support == [7, 8]
    assert p.tau_Z == 11


@pytest.mark.parametrize("text", CASES)
def test_recursion_matches_bruteforce(text, profiles):
    f = parse_poly(text)
    assert profiles[text].mu1 == h0m_bruteforce(f)


@pytest.mark.parametrize("text", CASES)
def test_profile_identities(text, profiles):
    p = profiles[text]
    f = p.f
    g = gamma_coeffs(f.n, f.e)
    for k in p.degrees:
        assert p.mu1[k] + p.mu2[k] == p.mu[k]
        nu = mu_nu(f, k)[1]
        assert p.mu[k] == nu + (g[k] if k < len(g) else 0)
    # mu'' nondecreasing up to tau_Z near the top
    top = [p.mu2[k] for k in p.degrees if k >= p.bound_used - f.n]
    assert set(top) == {p.tau_Z}


@pytest.mark.parametrize("text", CASES)
def test_symmetries(text, profiles):
    rep = symmetry_checks(profiles[text])
    assert rep["ok"], rep


def test_cor3_examples(quartic):
    m, d = 2, 5
    f = parse_poly(f"x^{m}*(x^{d - m} + z^{d - m}) + y^{m}*(y^{d - m} + z^{d - m})")
    rep = cor3_check(f)
    assert rep["tau_Z"] == 1 and rep["verdict"] == "triggered"
    assert cor3_check(parse_poly("x^3+y^3+z^3"))["verdict"] == "not applicable"


def test_cor3_quartic_inconclusive(quartic):
    p = h0m_profile(quartic, B=16)
    rep = cor3_check(quartic, profile=p)
    assert rep["tau_Z"] == 13 and rep["verdict"] == "inconclusive"
    assert rep["hypothesis_flags"]["mu_Z_equals_tau_Z"] is False


def test_prop1_examples():
    rep = prop1_report(parse_poly("x*y*z"))
    assert rep["condition_c"] and rep["condition_d"] and rep["free_divisor_indicator"]
    rep = prop1_report(parse_poly("x^3+y^3+z^3"))
    assert rep["M_prime_d"] == 1 and not rep["lct"]
    rep = prop1_report(parse_poly("x^5+y^5+z^5"))
    assert rep["M_prime_d"] == 6 and not rep["lct"]


def test_prop1_raises_when_conditions_disagree():
    # outside the weighted-homogeneous hypothesis the two conditions part ways
    with pytest.raises(InternalInconsistency):
        prop1_report(parse_poly("x^5 + y^4*z + x^3*y^2"))


def test_milnor_mults_commute():
    M = milnor_sketch(parse_poly("x^5 + y^4*z + x^3*y^2"), 0, 12, __import__("polelog").QQ)
    assert M.commutes()
