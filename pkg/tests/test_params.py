"""Parameter derivation and the inequality ledger."""

import math

import pytest

from pmcorner.errors import InfeasibleSeed
from pmcorner.params import (b_upper, derive_parameters, k2_drop, k4_at_corner, scherk_lower,
                             validate_ledger)


@pytest.fixture(scope="module")
def mer(meridian_ps):
    return meridian_ps


def test_m0_arithmetic(mer):
    assert mer.m0 == pytest.approx(6.5, abs=1e-12)


def test_m0_in_two_dimensions():
    # the dimension term vanishes; m0 = lambda/2 is then raised until r2 < p/3
    ps = derive_parameters({"scenario": "meridian", "lambda": 1.0, "n": 2, "p": 0.5})
    assert ps.m0 >= 0.5
    assert ps.r2 < ps.p / 3
    assert ps.r2 == pytest.approx(ps.s2 / ps.m0, rel=1e-12)


def test_b_bound(mer):
    assert b_upper(6.5, 0.5) == pytest.approx((7.5 - math.sqrt(43.25)) / 26, abs=1e-14)
    assert 0 < mer.b < 0.0355


def test_scherk2d_geometry():
    ps = derive_parameters({"scenario": "scherk2d", "sigma": -3 * math.pi / 8, "eps": 0.25,
                            "a": 1.1, "m": 2.5})
    # lens tangent at P makes the angle sigma with the horizontal
    assert ps.tau == pytest.approx(1.25 * math.tan(3 * math.pi / 8), abs=1e-12)
    assert math.atan2(-ps.tau, 1.25) == pytest.approx(ps.sigma, abs=1e-14)
    assert ps.r1 == pytest.approx(math.sqrt(ps.tau ** 2 + 1.5625), abs=1e-12)
    assert scherk_lower(ps.sigma) == pytest.approx(0.5611, abs=1e-4)


def test_scherk2d_infeasible_a_fails_ledger():
    # cosh^-1(a) above the Scherk lower bound leaves no gap
    ps = derive_parameters({"scenario": "scherk2d", "sigma": -3 * math.pi / 8, "eps": 0.25,
                            "a": 1.2, "m": 2.5})
    rep = validate_ledger(ps)
    assert not rep.required_pass
    assert "gap_a" in [e.name for e in rep.failures()]


def test_sigma_near_quarter_pi_rejected():
    with pytest.raises(InfeasibleSeed):
        derive_parameters({"scenario": "scherk2d", "sigma": -math.pi / 4 - 1e-9, "eps": 0.25})


def test_meridian_sigma_must_be_negative():
    with pytest.raises(InfeasibleSeed):
        derive_parameters({"scenario": "meridian", "lambda": 1.0, "n": 3, "p": 0.5,
                           "tau": 0.0})


def test_lens_radius(mer):
    assert mer.r4 == pytest.approx(math.hypot(mer.p, mer.tau), abs=1e-14)
    assert mer.sigma == pytest.approx(-math.atan(mer.tau / mer.p), abs=1e-14)


def test_ledger_all_pass(mer):
    rep = validate_ledger(mer)
    assert rep.required_pass
    assert rep.all_pass


def test_ledger_flags_assumption_a(mer):
    bad = mer.replace(a=0.99, b=0.03)
    rep = validate_ledger(bad)
    assert not rep.required_pass
    assert any("a" in e.name.lower() for e in rep.failures())


def test_certificate_gap_positive(mer):
    lower = -mer.beta * mer.sigma / 4
    upper = k2_drop(mer.lam, mer.p, mer.a)
    assert lower > upper > 0
    assert k4_at_corner(mer) < mer.m


def test_unknown_scenario():
    with pytest.raises(InfeasibleSeed):
        derive_parameters({"scenario": "nope"})


def test_derivation_deterministic(mer, meridian_cfg):
    again = derive_parameters({"scenario": "meridian", **meridian_cfg.seed()})
    assert again.to_dict() == mer.to_dict()


def test_default_seed_feasible():
    ps = derive_parameters({"scenario": "meridian", "lambda": 1.0, "n": 3, "p": 0.5})
    assert validate_ledger(ps).required_pass
    assert ps.a > ps.p
