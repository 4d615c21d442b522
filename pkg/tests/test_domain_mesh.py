"""Domains, corner geometry and mesh generation."""

import math

import numpy as np
import pytest

from pmcorner.domain import (annulus_domain, build_domain_2d, build_meridian_domain,
                             corner_diagnostics, disk_domain, gset_X, half_disk_domain,
                             subregions)
from pmcorner.errors import InfeasibleGeometry, MeshFailure
from pmcorner.mesh import (BoundaryLayer, CornerPatch, generate_mesh, read_mesh,
                           write_mesh)
from pmcorner.params import derive_parameters


@pytest.fixture(scope="module")
def ps2d():
    return derive_parameters({"scenario": "scherk2d", "sigma": -3 * math.pi / 8, "eps": 0.25,
                              "a": 1.1, "m": 2.5})


@pytest.fixture(scope="module")
def psm(meridian_ps):
    return meridian_ps


# -- domains -------------------------------------------------------------------

def test_planar_corner_opening(ps2d):
    info = corner_diagnostics(build_domain_2d(ps2d))
    assert info.opening == pytest.approx(math.pi + 3 * math.pi / 4, abs=1e-9)
    assert info.nonconvex


def test_planar_E_symmetric(ps2d):
    ds = build_domain_2d(ps2d)
    in_E = ds.notes["in_E"]
    rng = np.random.default_rng(0)
    x = rng.uniform(-1.2, 1.2, (2000, 2))
    assert np.array_equal(in_E(x), in_E(x * np.array([-1.0, 1.0])))
    bnd = np.vstack([pc.point(np.linspace(0, 1, 4001)) for pc in ds.loops[1]])
    for q in ((0.0, 1.0), (0.0, -1.0)):
        assert np.min(np.linalg.norm(bnd - np.array(q), axis=1)) < 1e-6


def test_planar_needs_a_above_one(ps2d):
    with pytest.raises(InfeasibleGeometry):
        build_domain_2d(ps2d.replace(a=1.0))


def test_meridian_lens(psm):
    ds = build_meridian_domain(psm)
    info = corner_diagnostics(ds)
    assert info.opening == pytest.approx(math.pi - 2 * psm.sigma, abs=1e-9)
    r4 = ds.notes["r4"]
    assert r4 == pytest.approx(math.hypot(0.5, psm.tau), abs=1e-14)
    assert ds.contains(np.array([[0.0, 0.5 + 1e-6]]))[0]
    assert not ds.contains(np.array([[0.0, 0.5 - 1e-6]]))[0]


def test_meridian_example_lens(psm):
    ps = psm.replace(tau=0.2, sigma=-math.atan(0.2 / 0.5), a=0.6)
    ds = build_meridian_domain(ps)
    assert ds.check_closed()
    ends = [pc.end for pc in ds.loops[0] if pc.label == "inner"]
    assert np.allclose(ends[0], [0.0, 0.5], atol=1e-15)
    assert ds.notes["r4"] == pytest.approx(math.sqrt(0.29), abs=1e-14)


def test_half_disk_corner_is_straight():
    info = corner_diagnostics(half_disk_domain())
    assert info.opening == pytest.approx(math.pi, abs=1e-12)
    assert not info.nonconvex


def test_subregions_planar(ps2d):
    regs = subregions(build_domain_2d(ps2d), ps2d)
    assert set(regs) == {"C", "W"}
    assert regs["W"].inside(np.array([[1.05, 0.0]]))[0]
    assert regs["C"].inside(np.array([[0.05, 0.93]]))[0]


def test_gset_endpoints():
    alpha, p = 2.0, 0.5
    th = math.pi / (2 * alpha)
    for s in (-1, 1):
        assert np.allclose(gset_X(s * th, math.pi / 2, 1.0, alpha, p), [0.0, p, 0.0],
                           atol=1e-15)
    X = gset_X(0.0, math.pi / 2, 1.0, alpha, p)
    assert np.allclose(X, [0.0, -p, 0.0], atol=1e-15)


# -- meshes --------------------------------------------------------------------

def test_uniform_disk_mesh():
    m = generate_mesh(disk_domain(1.0), 0.1)
    e = m.edge_lengths()
    assert e.min() >= 0.05 and e.max() <= 0.2
    assert m.min_angle() >= 20.0


def test_mesh_area_matches_domain():
    ds = annulus_domain(1.0, 1.5)
    m = generate_mesh(ds, 0.05)
    assert m.areas().sum() == pytest.approx(ds.area, rel=5e-3)
    assert m.areas().min() > 0


def test_boundary_vertices_on_arcs():
    ds = annulus_domain(1.0, 1.5)
    m = generate_mesh(ds, 0.05)
    r = np.hypot(*m.vertices[m.boundary_vertices("inner")].T)
    assert np.max(np.abs(r - 1.0)) < 1e-12


def test_grading_refines_corner(ps2d):
    ds = build_domain_2d(ps2d)
    h = 0.02
    m = generate_mesh(ds, h, 1.0)
    P = np.asarray(ds.P)
    iP = int(np.argmin(np.linalg.norm(m.vertices - P, axis=1)))
    assert np.linalg.norm(m.vertices[iP] - P) < 1e-12
    E = m.triangles
    nbr = np.unique(E[np.any(E == iP, axis=1)])
    lens = np.linalg.norm(m.vertices[nbr] - P, axis=1)
    assert lens[lens > 0].max() < h / 5


def test_bad_h_rejected():
    with pytest.raises(MeshFailure):
        generate_mesh(disk_domain(1.0), 0.0)


def test_mesh_round_trip(tmp_path):
    m = generate_mesh(disk_domain(1.0), 0.2)
    write_mesh(m, tmp_path / "m.txt")
    m2 = read_mesh(tmp_path / "m.txt")
    assert np.array_equal(m.vertices, m2.vertices)
    assert np.array_equal(m.triangles, m2.triangles)
    assert np.array_equal(m.boundary_edges, m2.boundary_edges)


def test_boundary_layer_aligned():
    ds = annulus_domain(1.0, 1.1)
    h = 0.01
    m = generate_mesh(ds, h, boundary_layer=BoundaryLayer(("inner",), first=2e-4, ratio=1.3,
                                                          tangential=h))
    r = np.hypot(*m.vertices.T)
    assert np.sum(np.abs(r - 1.0 - 2e-4) < 1e-12) > 100
    assert m.areas().sum() == pytest.approx(ds.area, rel=1e-3)
    assert m.min_angle() >= 20.0


def test_corner_patch_conforms(psm):
    ds = build_meridian_domain(psm)
    R = 0.6 * (psm.a - psm.p)
    plain = generate_mesh(ds, 0.005, 1.0, h_min=5e-5)
    m = generate_mesh(ds, 0.005, 1.0, h_min=5e-5, corner_patch=CornerPatch(R, 1e-4 * R))
    assert m.areas().min() > 0
    assert m.areas().sum() == pytest.approx(plain.areas().sum(), rel=1e-6)
    # both lens pieces reach P through the patch
    P = np.asarray(ds.P)
    iP = int(np.argmin(np.linalg.norm(m.vertices - P, axis=1)))
    assert np.linalg.norm(m.vertices[iP] - P) == 0.0
    on_lens = m.boundary_vertices("inner")
    assert iP in set(on_lens.tolist())
    rr = np.linalg.norm(m.vertices[on_lens] - P, axis=1)
    assert rr[rr > 0].min() < 1e-3 * R


def test_corner_patch_too_large(psm):
    ds = build_meridian_domain(psm)
    with pytest.raises(MeshFailure):
        generate_mesh(ds, 0.005, 1.0, corner_patch=CornerPatch(1.0, 1e-4))
