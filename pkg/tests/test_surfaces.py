"""Analytic barrier surfaces: Scherk, Delaunay profiles, torus and helicoid."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pmcorner.errors import DomainViolation, InfeasibleContact
from pmcorner.surfaces import (catenoid_field, delaunay_profile, helicoid_build,
                               mean_curvature_residual, profile_eval, scherk_eval,
                               scherk_radial_limit, scherk_ray_values, torus_graph,
                               unit_nodoid)


# -- Scherk ------------------------------------------------------------------

@pytest.mark.parametrize("t", [0.3, 1.0, 1.7])
def test_scherk_vanishes_on_diagonal(t):
    assert abs(scherk_eval((t, t - 1.0)).value) < 1e-14


def test_scherk_examples():
    assert abs(scherk_eval((0.5, 0.5)).value) < 1e-14
    assert scherk_eval((0.5, 0.0)).value == pytest.approx(math.log(2) / math.pi, abs=1e-14)


def test_scherk_outside_domain():
    with pytest.raises(DomainViolation):
        scherk_eval((0.0, 0.5))
    with pytest.raises(DomainViolation):
        scherk_eval((1.0, 1.0))


def test_scherk_minimal():
    rng = np.random.default_rng(1)
    pts = np.column_stack([rng.uniform(0.1, 1.9, 100), rng.uniform(-0.9, 0.9, 100)])
    assert mean_curvature_residual(scherk_eval, pts, 0.0) < 1e-6


def test_scherk_symmetric_in_x2():
    rng = np.random.default_rng(2)
    pts = np.column_stack([rng.uniform(0.1, 1.9, 50), rng.uniform(-0.9, 0.9, 50)])
    flip = pts * np.array([1.0, -1.0])
    assert np.allclose(scherk_eval(pts).value, scherk_eval(flip).value, atol=1e-14)


def test_radial_limit_examples():
    assert abs(scherk_radial_limit(-math.pi / 4)) < 1e-14
    assert scherk_radial_limit(-3 * math.pi / 8) == pytest.approx(
        2 / math.pi * math.log(1 + math.sqrt(2)), abs=1e-14)
    with pytest.raises(DomainViolation):
        scherk_radial_limit(0.1)


@settings(max_examples=30, deadline=None)
@given(st.floats(-1.5, -0.1))
def test_ray_values_converge(theta):
    lim = scherk_radial_limit(theta)
    vals = scherk_ray_values(theta, ts=(1e-3, 1e-5))
    assert abs(vals[-1] - lim) <= abs(vals[0] - lim) + 1e-12
    assert abs(vals[-1] - lim) < 1e-3


# -- Delaunay profiles ---------------------------------------------------------

def test_unduloid_contact_radii():
    k2 = delaunay_profile(-1.0, "vertical-at-both", r_in=0.3)
    assert k2.r_out == pytest.approx(1.7, abs=1e-14)
    rng = np.random.default_rng(3)
    r = rng.uniform(0.35, 1.65, 100)
    ang = rng.uniform(0, 2 * math.pi, 100)
    pts = np.column_stack([r * np.cos(ang), r * np.sin(ang)])
    res = mean_curvature_residual(lambda x: profile_eval(k2, x), pts, -1.0)
    assert res < 1e-5


def test_nodoid_neck():
    _, s3 = unit_nodoid(0.5, H_div=1.0)
    assert abs(s3 - math.sqrt(1.25)) < 1e-10


def test_catenoid_closed_form():
    cat = catenoid_field(1.1)
    r = np.linspace(1.0, 1.1, 21)
    exact = np.arccosh(1.1) - np.arccosh(r)
    assert np.max(np.abs(cat.value(r) - exact)) < 1e-8
    assert cat.value(1.0) == pytest.approx(0.44357, abs=1e-5)


def test_catenoid_rejects_small_radius():
    with pytest.raises(DomainViolation):
        catenoid_field(1.0)


def test_vertical_at_both_needs_matching_sign():
    with pytest.raises(InfeasibleContact):
        delaunay_profile(1.0, "vertical-at-both", r_in=0.3)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 0.9), st.floats(0.5, 3.0))
def test_nodoid_first_integral(s1, H):
    prof, s3 = unit_nodoid(s1, H_div=H)
    assert s3 == pytest.approx(math.sqrt(s1 * s1 + 2 * s1 / H), rel=1e-12)
    r = np.linspace(s1 * 1.001, s3 * 0.999, 50)
    du = prof.derivative(r)
    conserved = r * du / np.sqrt(1 + du * du) - 0.5 * H * r * r
    assert np.allclose(conserved, prof.flux_c, atol=1e-8)
    assert np.allclose(prof.first_integral(r), prof.flux_c, atol=1e-8)


def test_profile_rotational_symmetry():
    k2 = delaunay_profile(-1.0, "vertical-at-both", r_in=0.3)
    ang = np.linspace(0, 2 * math.pi, 13)
    pts = 0.9 * np.column_stack([np.cos(ang), np.sin(ang)])
    v = profile_eval(k2, pts).value
    assert np.ptp(v) < 1e-14


def test_translated_profile():
    k2 = delaunay_profile(-1.0, "vertical-at-both", r_in=0.3)
    moved = k2.translated((0.4, -0.2))
    assert profile_eval(moved, (0.4 + 0.9, -0.2)).value == pytest.approx(
        float(k2.value(0.9)), abs=1e-14)


# -- torus and helicoid --------------------------------------------------------

def test_torus_zero_levels(meridian_ps):
    ps = meridian_ps
    tg = torus_graph(ps)
    pts = np.array([[ps.a, 0.0], [ps.p, 0.0], [0.0, ps.a], [0.0, ps.p]])
    assert np.max(np.abs(tg(pts).value)) < 1e-12
    mid = 0.5 * (ps.a + ps.p)
    assert tg(np.array([[mid, 0.0]])).value[0] == pytest.approx(ps.c - ps.b, abs=1e-12)


def test_torus_curvature_exceeds_m0(meridian_ps):
    ps = meridian_ps
    tg = torus_graph(ps)
    rho = np.linspace(0.5 * (ps.a + ps.p) - 0.99 * ps.b, 0.5 * (ps.a + ps.p) + 0.99 * ps.b, 50)
    assert np.all(tg.half_trace_curvature(rho) > ps.m0)


def test_helicoid_level_values(meridian_ps):
    ps = meridian_ps
    hel = helicoid_build(ps)
    assert hel.c0 == pytest.approx(ps.beta * ps.sigma / 4, rel=1e-12)
    for t, expect in ((0.0, ps.beta * ps.sigma / 4), (ps.sigma / 4, 0.0)):
        pts = hel.level_curve(t, n=20)[1:]
        assert np.allclose(hel(pts).value, expect, atol=1e-9)


def test_helicoid_level_curves_disjoint(meridian_ps):
    hel = helicoid_build(meridian_ps)
    s = meridian_ps.sigma
    a = hel.level_curve(0.75 * s, n=50)[1:]
    b = hel.level_curve(0.5 * s, n=50)[1:]
    d = np.min(np.linalg.norm(a[:, None] - b[None], axis=-1))
    assert d > 0


def test_helicoid_mean_curvature(meridian_ps):
    ps = meridian_ps
    hel = helicoid_build(ps)
    pts = hel.band(0.75 * ps.sigma, 0.25 * ps.sigma, n_rho=8, n_t=6)
    rho, _ = hel.rotation_parameter(pts)
    pts = pts[(rho > 0.2 * hel.rho_b) & (rho < 0.8 * hel.rho_b)]
    step = 1e-3 * hel.rho_b
    res = mean_curvature_residual(lambda x: hel(x), pts, 2 * ps.m0, step=step)
    assert res < 1e-3 * 2 * ps.m0
