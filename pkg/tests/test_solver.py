"""Finite-element solver for the relaxed Dirichlet problem."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from pmcorner.domain import annulus_domain, disk_domain, meridian_annulus_domain
from pmcorner.mesh import generate_mesh
from pmcorner.solver import (ScalarField, SolveOptions, energy, pde_residual,
                             solve_axisymmetric, solve_dirichlet_relaxed)


@pytest.fixture(scope="module")
def disk():
    return generate_mesh(disk_domain(1.0), 0.08)


def _boundary_phi(x):
    return 0.3 * x[:, 0] + 0.2 * x[:, 1] ** 2


def test_flat_disk_energy(disk):
    u = ScalarField(disk, np.zeros(len(disk.vertices)))
    assert energy(u) == pytest.approx(math.pi, rel=1e-2)


def test_annulus_boundary_term():
    m = generate_mesh(annulus_domain(1.0, 1.1), 0.01)
    u = ScalarField(m, np.zeros(len(m.vertices)))
    J = energy(u, 0.0, {"outer": 0.0, "inner": 2.5})
    expect = math.pi * (1.1 ** 2 - 1.0) + 2 * math.pi * 2.5
    assert J == pytest.approx(expect, rel=1e-3)


def test_constant_data_gives_constant(disk):
    u = solve_dirichlet_relaxed(disk, 0.0, 3.0)
    assert np.max(np.abs(u.values - 3.0)) < 1e-8


def test_translation_invariance(disk):
    u = solve_dirichlet_relaxed(disk, 0.0, _boundary_phi)
    v = solve_dirichlet_relaxed(disk, 0.0, lambda x: _boundary_phi(x) + 1.5)
    assert np.max(np.abs(v.values - u.values - 1.5)) < 1e-6


def test_maximum_principle(disk):
    u = solve_dirichlet_relaxed(disk, 0.0, _boundary_phi)
    # the boundary term integrates phi along edges: use its range on the circle
    th = np.linspace(0, 2 * math.pi, 20001)
    bx = np.column_stack([np.cos(th), np.sin(th)])
    lo, hi = _boundary_phi(bx).min(), _boundary_phi(bx).max()
    assert u.values.min() >= lo - 1e-6 and u.values.max() <= hi + 1e-6


def test_mirror_symmetry(disk):
    u = solve_dirichlet_relaxed(disk, 0.0, lambda x: x[:, 1] ** 2)
    mirror = disk.vertices * np.array([-1.0, 1.0])
    uv = u.interpolate(mirror)
    ok = np.isfinite(uv)
    assert np.max(np.abs(uv[ok] - u.values[ok])) < 2e-3


def test_stage_energies_decrease(disk):
    u = solve_dirichlet_relaxed(disk, 0.0, _boundary_phi)
    E = [s["energy"] for s in u.info["stages"]]
    assert all(b <= a + 1e-12 for a, b in zip(E, E[1:]))
    assert u.info["converged"]


def test_hemisphere_cap():
    rho = 2.0
    m = generate_mesh(disk_domain(1.0), 0.04)
    exact = lambda x: -np.sqrt(rho ** 2 - np.sum(x * x, axis=1))
    u = solve_dirichlet_relaxed(m, 2.0 / rho, exact)
    err = np.max(np.abs(u.values - exact(m.vertices)))
    assert err < 2 * 0.04


def test_two_dimensional_reduction_matches_planar(disk):
    a = solve_dirichlet_relaxed(disk, 0.0, _boundary_phi)
    b = solve_axisymmetric(disk, 0.0, _boundary_phi, n=2)
    assert np.max(np.abs(a.values - b.values)) < 1e-10


def test_meridian_shell_flux():
    p, a, top = 0.5, 0.7, 5.0
    m = generate_mesh(meridian_annulus_domain(p, a), 0.01)
    u = solve_axisymmetric(m, 0.0, {"outer": 0.0, "inner": top}, n=3)
    exact_r = lambda r: quad(lambda s: p * p / math.sqrt(s ** 4 - p ** 4), r, a)[0]
    r = np.hypot(*m.vertices.T)
    sel = np.where((r > 0.55) & (r < 0.68))[0][::20]
    ex = np.array([exact_r(ri) for ri in r[sel]])
    assert np.max(np.abs(u.values[sel] - ex)) < 0.03
    # detached at the inner sphere
    inner = m.boundary_vertices("inner")
    assert np.all(u.values[inner] < top)


def test_residual_of_constants(disk):
    c = ScalarField(disk, np.full(len(disk.vertices), 2.0))
    assert pde_residual(c, 0.0).max < 1e-12
    res = pde_residual(c, 0.7)
    assert np.allclose(np.abs(res.per_vertex[res.mask]), 0.7, rtol=1e-12)


def test_residual_small_at_solution(disk):
    u = solve_dirichlet_relaxed(disk, 0.0, _boundary_phi, SolveOptions(newton_tol=1e-9))
    assert pde_residual(u, 0.0).max < 1e-6
