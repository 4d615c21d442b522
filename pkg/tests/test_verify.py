"""Comparison checks, boundary traces, contact angles, the reduction identity
and certificates."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pmcorner.domain import annulus_domain, build_domain_2d, disk_domain
from pmcorner.errors import RegionMismatch
from pmcorner.mesh import BoundaryLayer, generate_mesh
from pmcorner.params import derive_parameters
from pmcorner.solver import ScalarField, solve_dirichlet_relaxed
from pmcorner.surfaces import catenoid_field, helicoid_build
from pmcorner.verify import (ABOVE, BELOW, Barrier, boundary_trace, comparison_check,
                             contact_angle, discontinuity_certificate,
                             mango_identity_check, ray_ordering_margin)


@pytest.fixture(scope="module")
def disk_solution():
    m = generate_mesh(disk_domain(1.0), 0.1)
    return solve_dirichlet_relaxed(m, 0.0, lambda x: x[:, 0] ** 2 - 0.5 * x[:, 1])


@pytest.fixture(scope="module")
def catenoid_solution():
    h = 0.01
    ds = annulus_domain(1.0, 1.1)
    m = generate_mesh(ds, h, boundary_layer=BoundaryLayer(("inner",), first=0.02 * h,
                                                          ratio=1.3, tangential=h))
    return solve_dirichlet_relaxed(m, 0.0, {"outer": 0.0, "inner": 2.5})


# -- comparison ----------------------------------------------------------------

def test_trivial_barrier_below(disk_solution):
    u = disk_solution
    lo = float(u.values.min())
    rep = comparison_check(u, lo - 1.0, np.ones(len(u.values), bool), BELOW, tol=1e-9)
    assert rep.passed
    assert rep.min_margin >= 1.0 - 1e-9


@settings(max_examples=20, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(-2.0, 2.0))
def test_comparison_antisymmetric(disk_solution, slope, shift):
    u = disk_solution
    neg = ScalarField(u.mesh, -u.values)
    b = lambda x: slope * x[:, 0] + shift
    mask = np.ones(len(u.values), bool)
    r1 = comparison_check(u, b, mask, BELOW, tol=1e-3)
    r2 = comparison_check(neg, -Barrier(b), mask, ABOVE, tol=1e-3)
    assert r1.passed == r2.passed
    assert r1.n_violations == r2.n_violations
    assert np.allclose(r1.margins, r2.margins)


def test_comparison_rejects_empty_region(disk_solution):
    u = disk_solution
    with pytest.raises(RegionMismatch):
        comparison_check(u, 0.0, np.zeros(len(u.values), bool), BELOW)


def test_comparison_bad_direction(disk_solution):
    with pytest.raises(ValueError):
        comparison_check(disk_solution, 0.0, None, "sideways")


def test_tolerance_cap(catenoid_solution):
    u = catenoid_solution
    cat = catenoid_field(1.1)
    mask = np.ones(len(u.values), bool)
    free = comparison_check(u, cat, mask, ABOVE)
    capped = comparison_check(u, cat, mask, ABOVE, tol_cap=1e-3)
    assert capped.tol <= 1e-3 < free.tol


# -- traces and contact angles -------------------------------------------------

def test_catenoid_detaches(catenoid_solution):
    tr = boundary_trace(catenoid_solution, "inner")
    assert tr.detached
    assert tr.on_arc_error < 1e-12


def test_outer_circle_attached(catenoid_solution):
    tr = boundary_trace(catenoid_solution, "outer")
    assert np.max(np.abs(tr.gap)) <= 10 * 1e-6 * 1.1 * 2


def test_catenoid_contact_angle(catenoid_solution):
    ca = contact_angle(catenoid_solution, "inner")
    assert ca.mean >= 0.9
    assert np.all(np.abs(ca.values) <= 1.0)


def test_constant_field_trace_and_angle():
    m = generate_mesh(disk_domain(1.0), 0.2)
    u = ScalarField(m, np.full(len(m.vertices), 1.25))
    tr = boundary_trace(u, "outer", phi=1.25)
    assert np.all(tr.gap == 0.0)
    assert np.max(np.abs(contact_angle(u, "outer").values)) < 1e-12


# -- reduction identity --------------------------------------------------------

def _pts(n=50, seed=0):
    rng = np.random.default_rng(seed)
    return np.column_stack([rng.uniform(-1, 1, n), rng.uniform(0.2, 2.0, n)])


def test_mango_linear_field():
    assert mango_identity_check(lambda x1, r: x1, 3, _pts()) < 1e-10


def test_mango_two_dimensions_no_correction():
    f = lambda x1, r: np.sin(x1) * np.cosh(r)
    assert mango_identity_check(f, 2, _pts()) < 1e-6


def test_mango_sin_cosh():
    f = lambda x1, r: np.sin(x1) * np.cosh(r)
    assert mango_identity_check(f, 3, _pts()) < 1e-6


@pytest.mark.parametrize("n", [3, 4, 5])
def test_mango_paraboloid_any_dimension(n):
    f = lambda x1, r: 0.3 * x1 ** 2 + 0.5 * r ** 2
    assert mango_identity_check(f, n, _pts()) < 1e-6


def test_mango_rejects_axis_points():
    with pytest.raises(ValueError):
        mango_identity_check(lambda x1, r: x1, 3, np.array([[0.0, 0.0]]))


# -- certificates --------------------------------------------------------------

def test_planar_analytic_bounds():
    ps = derive_parameters({"scenario": "scherk2d", "sigma": -3 * math.pi / 8, "eps": 0.25,
                            "a": 1.1, "m": 2.5})
    ds = build_domain_2d(ps)
    m = generate_mesh(ds, 0.02, 1.0)
    u = ScalarField(m, np.zeros(len(m.vertices)))
    cert = discontinuity_certificate(u, ps, ds, strict=False)
    assert cert.lower == pytest.approx(2 / math.pi * math.log(1 + math.sqrt(2)), abs=1e-12)
    assert cert.upper == pytest.approx(math.acosh(1.1), abs=1e-12)
    assert cert.gap == pytest.approx(0.1175, abs=1e-4)
    # a zero field shows no jump
    assert cert.verdict == "not-certified"
    # bounds do not depend on the field
    u2 = ScalarField(m, np.ones(len(m.vertices)))
    cert2 = discontinuity_certificate(u2, ps, ds, strict=False)
    assert (cert2.lower, cert2.upper) == (cert.lower, cert.upper)


def test_ray_margin_reported(meridian_ps):
    hel = helicoid_build(meridian_ps)
    rep = ray_ordering_margin(meridian_ps, hel)
    d = rep.to_dict()
    assert d["kind"] == "diagnostic"
    assert d["n_samples"] + d["n_outside"] == 200
    assert np.isfinite(d["min_margin"])
