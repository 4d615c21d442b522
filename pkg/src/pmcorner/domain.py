"""Planar computational domains built from analytic arcs.

A domain is a set of closed loops of pieces (:class:`Arc` or
:class:`Segment`).  Every loop is oriented so that the domain lies on its
left: the outer loop runs counter-clockwise and hole loops run clockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InfeasibleGeometry, RegionEmpty


# ----------------------------------------------------------------------------
# Boundary pieces
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Arc:
    """Circle arc ``center + radius (cos t, sin t)`` for ``t`` from ``theta0`` to ``theta1``.

    ``theta1 < theta0`` means clockwise traversal.
    """

    center: tuple
    radius: float
    theta0: float
    theta1: float
    label: str

    @property
    def sweep(self):
        return self.theta1 - self.theta0

    @property
    def length(self):
        return abs(self.sweep) * self.radius

    def angle(self, s):
        return self.theta0 + np.asarray(s, dtype=float) * self.sweep

    def point(self, s):
        t = self.angle(s)
        return np.stack([self.center[0] + self.radius * np.cos(t),
                         self.center[1] + self.radius * np.sin(t)], axis=-1)

    def tangent(self, s):
        t = self.angle(s)
        sgn = 1.0 if self.sweep > 0 else -1.0
        return sgn * np.stack([-np.sin(t), np.cos(t)], axis=-1)

    @property
    def start(self):
        return self.point(0.0)

    @property
    def end(self):
        return self.point(1.0)

    def residual(self, x):
        """Distance of points from the supporting circle."""
        x = np.atleast_2d(x)
        return np.abs(np.hypot(x[:, 0] - self.center[0], x[:, 1] - self.center[1]) - self.radius)

    def project(self, x):
        """Snap points radially onto the supporting circle."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        d = x - np.asarray(self.center)
        r = np.hypot(d[:, 0], d[:, 1])
        return np.asarray(self.center) + self.radius * d / r[:, None]

    def curvature(self):
        return 1.0 / self.radius


@dataclass(frozen=True)
class Segment:
    """Straight segment from ``p0`` to ``p1``."""

    p0: tuple
    p1: tuple
    label: str

    @property
    def length(self):
        return math.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1])

    def point(self, s):
        s = np.asarray(s, dtype=float)[..., None]
        return (1 - s) * np.asarray(self.p0) + s * np.asarray(self.p1)

    def tangent(self, s):
        d = np.asarray(self.p1) - np.asarray(self.p0)
        d = d / np.linalg.norm(d)
        return np.broadcast_to(d, np.shape(np.asarray(s, dtype=float)) + (2,)).copy()

    @property
    def start(self):
        return np.asarray(self.p0, dtype=float)

    @property
    def end(self):
        return np.asarray(self.p1, dtype=float)

    def residual(self, x):
        x = np.atleast_2d(x)
        p0 = np.asarray(self.p0)
        d = np.asarray(self.p1) - p0
        nrm = np.array([-d[1], d[0]]) / np.linalg.norm(d)
        return np.abs((x - p0) @ nrm)

    def project(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        p0 = np.asarray(self.p0)
        d = np.asarray(self.p1) - p0
        s = ((x - p0) @ d) / (d @ d)
        return p0 + s[:, None] * d

    def curvature(self):
        return 0.0


def _piece_area_term(pc):
    """Contribution of a piece to ``(1/2) * loop integral of (x dy - y dx)``."""
    if isinstance(pc, Segment):
        (x0, y0), (x1, y1) = pc.p0, pc.p1
        return 0.5 * (x0 * y1 - x1 * y0)
    cx, cy = pc.center
    R = pc.radius
    t0, t1 = pc.theta0, pc.theta1
    return 0.5 * (R * R * (t1 - t0) + cx * R * (math.sin(t1) - math.sin(t0))
                  - cy * R * (math.cos(t1) - math.cos(t0)))


# ----------------------------------------------------------------------------
# Domain
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainSpec:
    """Closed loops of analytic pieces with a designated corner ``P``."""

    loops: tuple
    P: tuple
    scenario: str
    axis_weight_exponent: int = 0
    inside: Callable = field(default=None, repr=False, compare=False)
    hole_points: tuple = ()
    notes: dict = field(default_factory=dict, compare=False)

    @property
    def pieces(self):
        return [pc for loop in self.loops for pc in loop]

    @property
    def labels(self):
        return sorted({pc.label for pc in self.pieces})

    @property
    def area(self):
        return sum(_piece_area_term(pc) for pc in self.pieces)

    def polyline(self, tol=1e-4):
        """Vertices of each loop at chord sagitta below ``tol`` (for plotting and tests)."""
        out = []
        for loop in self.loops:
            pts = []
            for pc in loop:
                if isinstance(pc, Arc):
                    dth = 2.0 * math.sqrt(2.0 * tol / pc.radius)
                    k = max(2, int(math.ceil(abs(pc.sweep) / dth)))
                else:
                    k = 1
                pts.append(pc.point(np.linspace(0, 1, k + 1))[:-1])
            out.append(np.vstack(pts))
        return out

    @property
    def diameter(self):
        """Largest distance between two boundary points (polyline sagitta 1e-6)."""
        from scipy.spatial import ConvexHull
        from scipy.spatial.distance import pdist
        pts = np.vstack(self.polyline(1e-6))
        hull = pts[ConvexHull(pts).vertices]
        return float(pdist(hull).max())

    def contains(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.inside is not None:
            return self.inside(x)
        from matplotlib.path import Path
        loops = self.polyline(1e-6)
        res = Path(loops[0]).contains_points(x)
        for hole in loops[1:]:
            res &= ~Path(hole).contains_points(x)
        return res

    def check_closed(self, tol=1e-12):
        for loop in self.loops:
            for a, b in zip(loop, loop[1:] + loop[:1]):
                if np.linalg.norm(a.end - b.start) > tol:
                    raise InfeasibleGeometry("boundary loop is not closed")
        return True


# ----------------------------------------------------------------------------
# Planar example
# ----------------------------------------------------------------------------

def _lens_fillet(ps):
    """Centers and tangency data for the smoothed convex set ``E``."""
    tau, eps, r1 = ps.tau, ps.eps, ps.r1
    c = -(r1 - 1.0 - eps) / (r1 - 1.0 + eps)
    rho = 2.0 * eps / (r1 - 1.0 + eps)
    K = np.array([-tau, -eps])
    F = np.array([0.0, c])
    QR = K + r1 * (F - K) / np.linalg.norm(F - K)
    QL = np.array([-QR[0], QR[1]])
    return c, rho, QR, QL


def build_domain_2d(ps):
    """``B(O, a)`` minus the closure of a smoothed convex lens ``E`` with vertex ``P = (0, 1)``.

    ``E`` coincides with ``B(O,1) & B((tau,-eps), r1) & B((-tau,-eps), r1)``
    above the two tangency points ``Q_L, Q_R`` and is completed below by a
    circular fillet tangent to both large arcs and to the unit circle at
    ``(0, -1)``.
    """
    if ps.a is None or ps.a <= 1.0:
        raise InfeasibleGeometry("outer radius a must exceed 1")
    if not -0.5 * math.pi < ps.sigma < 0:
        raise InfeasibleGeometry("sigma must lie in (-pi/2, 0)")
    tau, eps, r1, a = ps.tau, ps.eps, ps.r1, ps.a
    c, rho, QR, QL = _lens_fillet(ps)
    if not (rho > 0 and QR[0] > 0 and QR[1] < 1.0):
        raise InfeasibleGeometry("three disks have no usable common interior")

    # right arc: circle centered (-tau, -eps), from P down to Q_R (clockwise)
    ang = lambda q, ctr: math.atan2(q[1] - ctr[1], q[0] - ctr[0])
    KR = (-tau, -eps)
    KL = (tau, -eps)
    P = np.array([0.0, 1.0])
    right = Arc(KR, r1, ang(P, KR), ang(QR, KR), "inner")
    t_qr = ang(QR, (0.0, c))
    fillet = Arc((0.0, c), rho, t_qr, -math.pi - t_qr, "smoothing")
    t_ql = ang(QL, KL)
    if t_ql < 0:
        t_ql += 2 * math.pi
    left = Arc(KL, r1, t_ql, ang(P, KL), "inner")
    outer = Arc((0.0, 0.0), a, 0.0, 2 * math.pi, "outer")

    yq = float(QR[1])

    def in_E(x):
        in_lens = (np.hypot(x[:, 0] + tau, x[:, 1] + eps) < r1) & (
            np.hypot(x[:, 0] - tau, x[:, 1] + eps) < r1)
        in_fil = np.hypot(x[:, 0], x[:, 1] - c) < rho
        return np.where(x[:, 1] > yq, in_lens & (x[:, 1] < 1.0), in_fil)

    def inside(x):
        x = np.atleast_2d(x)
        return (np.hypot(x[:, 0], x[:, 1]) < a) & ~in_E(x)

    ds = DomainSpec(
        loops=((outer,), (right, fillet, left)),
        P=(0.0, 1.0),
        scenario="planar-2d",
        axis_weight_exponent=0,
        inside=inside,
        hole_points=((0.0, 0.0),),
        notes={"fillet_center": (0.0, c), "fillet_radius": rho,
               "tangency_right": tuple(QR), "tangency_left": tuple(QL),
               "in_E": in_E},
    )
    ds.check_closed(1e-12)
    return ds


def scherk_sup_on_boundary(ps, samples=1000):
    """Sup of the Scherk field over ``C & dE``, sampled at ``samples`` points."""
    from .surfaces import scherk_eval
    ds = build_domain_2d(ps.replace(a=max(ps.a or 1.5, 1.0 + 1e-9)))
    pts = []
    for pc in ds.loops[1]:
        s = np.linspace(0, 1, samples + 1)[1:-1]
        pts.append(pc.point(s))
    pts = np.vstack(pts)
    inC = in_C(pts)
    if not np.any(inC):
        raise RegionEmpty("C & dE is empty")
    sel = pts[inC]
    # uniform resampling of the in-C part
    idx = np.linspace(0, len(sel) - 1, min(samples, len(sel))).astype(int)
    return float(np.max(scherk_eval(sel[idx]).value))


def in_C(x):
    x = np.atleast_2d(x)
    return (x[:, 0] > 0) & (x[:, 0] < 1) & (x[:, 1] > x[:, 0] - 1) & (x[:, 1] < 1 - x[:, 0])


# ----------------------------------------------------------------------------
# Meridian example
# ----------------------------------------------------------------------------

def build_meridian_domain(ps):
    """Upper half of ``B(O, a)`` minus the lens ``M = B((tau,0), r4) & B((-tau,0), r4)``.

    Coordinates are ``(x1, r)`` with ``r >= 0`` the distance to the symmetry
    axis.  The axis pieces are tagged ``axis`` and carry no boundary data.
    """
    p, tau, a = ps.p, ps.tau, ps.a
    if tau is None or tau <= 0:
        raise InfeasibleGeometry("tau must be positive (sigma < 0)")
    r4 = math.hypot(p, tau)
    if r4 <= tau:
        raise InfeasibleGeometry("r4 <= tau")
    if not a > p:
        raise InfeasibleGeometry("a must exceed p")
    xa = r4 - tau
    outer = Arc((0.0, 0.0), a, 0.0, math.pi, "outer")
    ax_left = Segment((-a, 0.0), (-xa, 0.0), "axis")
    lens_left = Arc((tau, 0.0), r4, math.pi, math.atan2(p, -tau), "inner")
    lens_right = Arc((-tau, 0.0), r4, math.atan2(p, tau), 0.0, "inner")
    ax_right = Segment((xa, 0.0), (a, 0.0), "axis")

    def in_M(x):
        return (np.hypot(x[:, 0] - tau, x[:, 1]) < r4) & (np.hypot(x[:, 0] + tau, x[:, 1]) < r4)

    def inside(x):
        x = np.atleast_2d(x)
        return (x[:, 1] >= 0) & (np.hypot(x[:, 0], x[:, 1]) < a) & ~in_M(x)

    ds = DomainSpec(
        loops=((outer, ax_left, lens_left, lens_right, ax_right),),
        P=(0.0, p),
        scenario="meridian",
        axis_weight_exponent=int(ps.n) - 2,
        inside=inside,
        notes={"in_M": in_M, "r4": r4},
    )
    ds.check_closed(1e-12)
    return ds


def half_disk_domain(R=1.0):
    """Synthetic half disk with a straight-boundary 'corner' at the origin."""
    seg1 = Segment((0.0, 0.0), (R, 0.0), "outer")
    arc = Arc((0.0, 0.0), R, 0.0, math.pi, "outer")
    seg2 = Segment((-R, 0.0), (0.0, 0.0), "outer")
    return DomainSpec(((seg1, arc, seg2),), (0.0, 0.0), "planar-2d",
                      inside=lambda x: (np.atleast_2d(x)[:, 1] > 0)
                      & (np.hypot(np.atleast_2d(x)[:, 0], np.atleast_2d(x)[:, 1]) < R))


def disk_domain(R=1.0, center=(0.0, 0.0)):
    arc = Arc(tuple(center), R, 0.0, 2 * math.pi, "outer")
    c = np.asarray(center)
    return DomainSpec(((arc,),), (center[0] + R, center[1]), "planar-2d",
                      inside=lambda x: np.hypot(*(np.atleast_2d(x) - c).T) < R)


def annulus_domain(r_in, r_out):
    outer = Arc((0.0, 0.0), r_out, 0.0, 2 * math.pi, "outer")
    inner = Arc((0.0, 0.0), r_in, 2 * math.pi, 0.0, "inner")
    return DomainSpec(((outer,), (inner,)), (r_in, 0.0), "planar-2d",
                      inside=lambda x: (np.hypot(*np.atleast_2d(x).T) > r_in)
                      & (np.hypot(*np.atleast_2d(x).T) < r_out),
                      hole_points=((0.0, 0.0),))


def meridian_annulus_domain(r_in, r_out):
    """Upper half annulus in ``(x1, r)`` coordinates: a spherical shell in meridian form."""
    outer = Arc((0.0, 0.0), r_out, 0.0, math.pi, "outer")
    ax_l = Segment((-r_out, 0.0), (-r_in, 0.0), "axis")
    inner = Arc((0.0, 0.0), r_in, math.pi, 0.0, "inner")
    ax_r = Segment((r_in, 0.0), (r_out, 0.0), "axis")
    return DomainSpec(((outer, ax_l, inner, ax_r),), (0.0, r_in), "meridian", 1,
                      inside=lambda x: (np.atleast_2d(x)[:, 1] >= 0)
                      & (np.hypot(*np.atleast_2d(x).T) > r_in)
                      & (np.hypot(*np.atleast_2d(x).T) < r_out))


# ----------------------------------------------------------------------------
# Corner
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class CornerInfo:
    tangent_rays: tuple
    opening: float
    nonconvex: bool


def corner_diagnostics(ds, tol=1e-9):
    """Tangent rays and interior opening angle of the boundary at ``ds.P``."""
    P = np.asarray(ds.P, dtype=float)
    for loop in ds.loops:
        for k, pc in enumerate(loop):
            if np.linalg.norm(pc.start - P) < tol:
                prev = loop[k - 1]
                t_out = np.asarray(pc.tangent(0.0))
                t_in = np.asarray(prev.tangent(1.0))
                turn = math.atan2(t_in[0] * t_out[1] - t_in[1] * t_out[0], t_in @ t_out)
                opening = math.pi - turn
                return CornerInfo((tuple(-t_in), tuple(t_out)), opening, opening > math.pi)
    raise InfeasibleGeometry("P is not a junction of two boundary pieces")


# ----------------------------------------------------------------------------
# Subregions
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """Named region with an exact membership test and a polygonal outline.

    ``polygons`` approximate the boundary within ``tol`` (Hausdorff);
    ``sampler(n)`` (optional) returns points exactly inside the region.
    """

    name: str
    inside: Callable
    polygons: tuple
    tol: float
    sampler: Callable | None = None

    def sample(self, n, seed=0):
        if self.sampler is not None:
            return self.sampler(n)
        rng = np.random.default_rng(seed)
        allp = np.vstack(self.polygons)
        lo, hi = allp.min(axis=0), allp.max(axis=0)
        out = []
        total = 0
        for _ in range(200):
            x = lo + (hi - lo) * rng.random((4 * n, 2))
            x = x[self.inside(x)]
            out.append(x)
            total += len(x)
            if total >= n:
                break
        pts = np.vstack(out)[:n] if out else np.zeros((0, 2))
        return pts


def _circle_poly(center, R, t0, t1, tol):
    dth = 2.0 * math.sqrt(2.0 * tol / R)
    k = max(8, int(math.ceil(abs(t1 - t0) / dth)))
    t = np.linspace(t0, t1, k + 1)
    return np.column_stack([center[0] + R * np.cos(t), center[1] + R * np.sin(t)])


def subregions(ds, ps, helicoid=None, tol=1e-4):
    """Witness regions for the comparison arguments.

    Planar: ``C`` (triangle at ``P``) and ``W`` (annulus ``1 < |x| < a``).
    Meridian: ``W`` (``p < |x| < a``), ``D_u`` (translated nodoid annulus),
    ``A`` (sector below ``theta_u``), ``inner`` (``|x| <= p``),
    ``Delta_plus`` and, when a helicoid is supplied, ``R2``.
    """
    regs = {}
    if ds.scenario == "planar-2d":
        if ps.a <= 1.0:
            raise RegionEmpty("W is empty for a <= 1")
        boundary_pts = np.vstack([pc.point(np.linspace(0, 1, 2001)) for pc in ds.loops[1]])
        if not np.any(in_C(boundary_pts)):
            raise RegionEmpty("C does not meet dE")
        tri = np.array([[0.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
        regs["C"] = Region("C", lambda x: in_C(x) & ds.contains(x), (tri,), 0.0)
        a = ps.a
        regs["W"] = Region(
            "W",
            lambda x: (np.hypot(*np.atleast_2d(x).T) > 1.0) & (np.hypot(*np.atleast_2d(x).T) < a),
            (_circle_poly((0, 0), a, 0, 2 * math.pi, tol),
             _circle_poly((0, 0), 1.0, 2 * math.pi, 0, tol)), tol)
        return regs

    p, a = ps.p, ps.a
    norm = lambda x: np.hypot(*np.atleast_2d(x).T)
    regs["W"] = Region(
        "W", lambda x: (norm(x) > p) & (norm(x) < a) & (np.atleast_2d(x)[:, 1] >= 0),
        (np.vstack([_circle_poly((0, 0), a, 0, math.pi, tol),
                    _circle_poly((0, 0), p, math.pi, 0, tol)]),), tol)
    regs["inner"] = Region(
        "inner", lambda x: (norm(x) <= p) & ds.contains(x),
        (_circle_poly((0, 0), p, 0, math.pi, tol),), tol)
    in_M = ds.notes["in_M"]
    r4 = ds.notes["r4"]
    kc = np.array([-ps.tau, 0.0])
    r_hi = 2.0 / ps.lam - r4
    regs["Delta_plus"] = Region(
        "Delta_plus",
        lambda x: (np.hypot(*(np.atleast_2d(x) - kc).T) > r4)
        & (np.hypot(*(np.atleast_2d(x) - kc).T) < r_hi) & ds.contains(x),
        (_circle_poly(kc, r4, 0, math.pi, tol),), tol)
    if ps.theta_u is not None:
        th = ps.theta_u
        u = p * np.array([math.cos(th), math.sin(th)])
        ctr = (p - ps.r2) / p * u
        r1, r2 = ps.r1, ps.r2

        def in_Du(x):
            d = np.hypot(*(np.atleast_2d(x) - ctr).T)
            return (d > r1) & (d < r2) & ds.contains(x)

        regs["D_u"] = Region("D_u", in_Du, (_circle_poly(ctr, r2, 0, 2 * math.pi, tol),
                                            _circle_poly(ctr, r1, 2 * math.pi, 0, tol)), tol)

        def in_A(x):
            x = np.atleast_2d(x)
            ang = np.arctan2(x[:, 1], x[:, 0])
            return (norm(x) < p) & (ang > 0) & (ang < th) & ~in_M(x) & (x[:, 1] >= 0)

        polyA = np.vstack([[0.0, 0.0], _circle_poly((0, 0), p, 0, th, tol)])
        regs["A"] = Region("A", in_A, (polyA,), tol)
        if not np.any(in_A(_grid_in(polyA, 200))):
            raise RegionEmpty("sector A misses the domain")
    if helicoid is not None:
        s = ps.sigma
        t0, t1 = 0.75 * s, 0.5 * s

        def in_R2(x):
            rho, t = helicoid.rotation_parameter(x)
            return (rho < helicoid.rho_b) & (t >= min(t0, t1)) & (t <= max(t0, t1))

        def samp(nn):
            k = max(4, int(math.sqrt(nn)))
            return helicoid.band(t0, t1, n_rho=k, n_t=k)

        regs["R2"] = Region("R2", in_R2, (helicoid.band_polygon(t0, t1),), 0.0, samp)
    return regs


def _grid_in(poly, k):
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    g = np.linspace(0, 1, k)
    X, Y = np.meshgrid(lo[0] + g * (hi[0] - lo[0]), lo[1] + g * (hi[1] - lo[1]))
    return np.column_stack([X.ravel(), Y.ravel()])


# ----------------------------------------------------------------------------
# Smooth-corner body G (geometry diagnostic only)
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class GsetReport:
    points: np.ndarray
    max_radius: float
    radius_ok: bool
    tangent_angles: tuple
    lens_angles: tuple
    angle_error: float
    opening_G: float
    opening_lens: float
    max_section_curvature: float
    smooth_ok: bool


def gset_Y(theta, phi, omega, alpha):
    k = 2.0 * np.cos(alpha * theta) * np.sin(phi)
    return np.stack([k * np.cos(theta) * np.sin(phi), k * np.sin(theta) * np.sin(phi),
                     k * np.cos(phi) * omega], axis=-1)


def gset_X(theta, phi, omega, alpha, p):
    """Boundary point of ``G``: ``F(Y)`` with ``F(x) = (p x2, p(1 - x1), p x3)``."""
    Y = gset_Y(theta, phi, omega, alpha)
    return np.stack([p * Y[..., 1], p * (1.0 - Y[..., 0]), p * Y[..., 2]], axis=-1)


def gset_boundary(alpha, p, samples=200, delta=1e-8):
    """Sample the boundary of ``G`` (n = 3) and check radius, smoothness and corner cone."""
    if alpha <= 1:
        raise InfeasibleGeometry("alpha must exceed 1")
    th_max = math.pi / (2 * alpha)
    th = np.linspace(-th_max, th_max, samples)
    ph = np.linspace(0, math.pi, samples)
    T, Ph = np.meshgrid(th, ph)
    pts = np.vstack([gset_X(T, Ph, w, alpha, p).reshape(-1, 3) for w in (1.0, -1.0)])
    rad = np.linalg.norm(pts, axis=1)
    max_r = float(rad.max())

    # cone at P in the x3 = 0 section (phi = pi/2)
    P = np.array([0.0, p])
    angs = []
    for sgn in (1.0, -1.0):
        x = gset_X(sgn * (th_max - delta), math.pi / 2, 1.0, alpha, p)[:2]
        d = x - P
        angs.append(math.atan2(d[1], d[0]))
    sigma = 0.5 * (math.pi / alpha - math.pi)
    lens = (sigma, -math.pi - sigma)
    err = max(abs(angs[0] - lens[0]),
              abs((angs[1] - lens[1] + math.pi) % (2 * math.pi) - math.pi))
    opening_G = (angs[0] - angs[1]) % (2 * math.pi)
    opening_lens = math.pi + 2 * sigma

    # curvature of the section curve away from P
    tt = np.linspace(-0.9 * th_max, 0.9 * th_max, 2001)
    sec = gset_X(tt, math.pi / 2, 1.0, alpha, p)[:, :2]
    d1 = np.gradient(sec, tt, axis=0)
    d2 = np.gradient(d1, tt, axis=0)
    kap = np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / np.linalg.norm(d1, axis=1) ** 3
    kmax = float(np.max(kap[2:-2]))
    return GsetReport(pts, max_r, bool(max_r <= p + 1e-12), tuple(angs), lens, float(err),
                      float(opening_G), float(opening_lens), kmax, bool(np.isfinite(kmax)))
