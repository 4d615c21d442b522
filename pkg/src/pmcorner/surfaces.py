"""Comparison surfaces used as barriers.

Every surface is exposed as a *field evaluator*: a callable taking planar
points of shape ``(N, 2)`` (or a single point) and returning a
:class:`FieldEval` with values and exact gradients.

Curvature convention: ``H_div`` is always the value of ``div(Tu)``, i.e. the
sum of the principal curvatures of the graph.  A surface described as having
"mean curvature k" (half the trace) therefore has ``H_div = 2k``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Chebyshev

from .errors import (
    DomainViolation,
    InfeasibleContact,
    InfeasibleHelicoid,
    NonMonotoneProfile,
)

TWO_PI = 2.0 * np.pi


def _points(x):
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != 2:
        raise ValueError("points must have shape (N, 2)")
    return pts, single


@dataclass(frozen=True)
class FieldEval:
    """Value and gradient of a graph at a set of points.

    ``vertical`` flags points where the graph is vertical (infinite slope);
    the gradient there is ``inf`` in the radial direction.
    """

    value: np.ndarray
    gradient: np.ndarray
    vertical: np.ndarray | None = None

    def __neg__(self):
        return FieldEval(-self.value, -self.gradient, self.vertical)

    def _squeeze(self):
        v = None if self.vertical is None else self.vertical[0]
        return FieldEval(self.value[0], self.gradient[0], v)


def _finish(ev, single):
    return ev._squeeze() if single else ev


# ----------------------------------------------------------------------------
# Scherk's first surface
# ----------------------------------------------------------------------------

def scherk_eval(x):
    """Scherk graph ``(2/pi) ln(cos(pi x2/2) / sin(pi x1/2))`` on (0,2)x(-1,1)."""
    pts, single = _points(x)
    x1, x2 = pts[:, 0], pts[:, 1]
    bad = (x1 <= 0) | (x1 >= 2) | (x2 <= -1) | (x2 >= 1)
    if np.any(bad):
        raise DomainViolation(
            f"Scherk field undefined at {pts[bad][0]} (needs (0,2)x(-1,1))")
    a1 = 0.5 * np.pi * x1
    a2 = 0.5 * np.pi * x2
    value = (2.0 / np.pi) * np.log(np.cos(a2) / np.sin(a1))
    grad = np.column_stack([-np.cos(a1) / np.sin(a1), -np.tan(a2)])
    return _finish(FieldEval(value, grad), single)


def scherk_radial_limit(theta):
    """Limit of the Scherk field at (0, 1) along the ray of angle ``theta``."""
    theta = np.asarray(theta, dtype=float)
    if np.any((theta <= -0.5 * np.pi) | (theta >= 0.0)):
        raise DomainViolation("theta must lie in (-pi/2, 0)")
    return (2.0 / np.pi) * np.log(-np.tan(theta))


def scherk_ray_values(theta, ts=(1e-2, 1e-3, 1e-4)):
    """Scherk values at ``(t cos theta, 1 + t sin theta)`` for each ``t``."""
    ts = np.asarray(ts, dtype=float)
    pts = np.column_stack([ts * np.cos(theta), 1.0 + ts * np.sin(theta)])
    return scherk_eval(pts).value


# ----------------------------------------------------------------------------
# Delaunay (rotationally symmetric CMC) profiles
# ----------------------------------------------------------------------------

class _HalfTable:
    """Integral of ``u'`` from a profile endpoint, in the variable t = sqrt|r - r_end|.

    The substitution turns the square-root singularity of a vertical contact
    into an analytic integrand, so a Chebyshev series converges spectrally.
    """

    def __init__(self, integrand, T, tol=1e-12, max_deg=2048):
        deg = 32
        prev = None
        while True:
            ser = Chebyshev.interpolate(integrand, deg, domain=[0.0, T])
            anti = ser.integ(lbnd=0.0)
            end = float(anti(T))
            if prev is not None and abs(end - prev) <= tol * (1.0 + abs(end)):
                tail = np.max(np.abs(ser.coef[-4:]))
                if tail <= 1e-10 * (1.0 + np.max(np.abs(ser.coef))) or deg >= max_deg:
                    break
            if deg >= max_deg:
                break
            prev = end
            deg *= 2
        self.T = T
        self.series = ser
        self.anti = anti
        self.degree = deg

    def __call__(self, t):
        return self.anti(t)

    def integrand(self, t):
        return self.series(t)


@dataclass(frozen=True)
class RadialProfile:
    """Rotationally symmetric graph solving ``div(Tu) = H_div``.

    The profile satisfies the first integral ``r u'/W = H_div r^2/2 + flux_c``
    with ``W = sqrt(1 + u'^2)``; equivalently ``u' = q/sqrt(1-q^2)`` with
    ``q(r) = H_div r/2 + flux_c/r``.  Values are ``u(r) = raw(r) + offset``
    where ``raw(r_in) = 0``.
    """

    H_div: float
    flux_c: float
    r_range: tuple
    offset: float = 0.0
    center: tuple = (0.0, 0.0)
    _left: _HalfTable = field(default=None, repr=False, compare=False)
    _right: _HalfTable = field(default=None, repr=False, compare=False)
    _contact: tuple = field(default=(None, None), repr=False, compare=False)

    def __post_init__(self):
        r_in, r_out = (float(v) for v in self.r_range)
        if not 0 < r_in < r_out:
            raise InfeasibleContact(f"bad radius range ({r_in}, {r_out})")
        object.__setattr__(self, "r_range", (r_in, r_out))
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self._left is None:
            self._build()

    # -- construction -------------------------------------------------------
    def q(self, r):
        r = np.asarray(r, dtype=float)
        return 0.5 * self.H_div * r + self.flux_c / r

    def _contact_sign(self, r):
        qv = float(self.q(r))
        if abs(abs(qv) - 1.0) < 1e-9:
            return 1.0 if qv > 0 else -1.0
        return None

    def _build(self):
        r_in, r_out = self.r_range
        H, C = self.H_div, self.flux_c
        grid = np.linspace(r_in, r_out, 2001)
        if np.max(np.abs(self.q(grid))) > 1.0 + 1e-9:
            raise InfeasibleContact("|q| > 1 inside the radius range")
        s_in = self._contact_sign(r_in)
        s_out = self._contact_sign(r_out)
        r_mid = 0.5 * (r_in + r_out)

        def make(r_end, sign_end, direction):
            # direction=+1: r = r_end + t^2 ; direction=-1: r = r_end - t^2
            def g(t):
                r = r_end + direction * t * t
                if sign_end is None:
                    qq = self.q(r)
                    up = qq / np.sqrt((1.0 - qq) * (1.0 + qq))
                    return 2.0 * t * up * direction
                D = 0.5 * H - C / (r * r_end)
                qq = sign_end + (r - r_end) * D
                # (1 - qq^2) = t^2 * kappa exactly, kappa > 0
                if sign_end < 0:
                    kappa = (1.0 - qq) * D * direction
                else:
                    kappa = -(1.0 + qq) * D * direction
                kappa = np.maximum(kappa, 0.0)
                return 2.0 * qq / np.sqrt(kappa) * direction
            return g

        left = _HalfTable(make(r_in, s_in, +1.0), np.sqrt(r_mid - r_in))
        right = _HalfTable(make(r_out, s_out, -1.0), np.sqrt(r_out - r_mid))
        object.__setattr__(self, "_left", left)
        object.__setattr__(self, "_right", right)
        object.__setattr__(self, "_contact", (s_in, s_out))

    # -- evaluation ---------------------------------------------------------
    @property
    def r_in(self):
        return self.r_range[0]

    @property
    def r_out(self):
        return self.r_range[1]

    @property
    def contact_radii(self):
        out = []
        if self._contact[0] is not None:
            out.append(self.r_in)
        if self._contact[1] is not None:
            out.append(self.r_out)
        return tuple(out)

    def raw(self, r):
        r = np.asarray(r, dtype=float)
        r_in, r_out = self.r_range
        r_mid = 0.5 * (r_in + r_out)
        # right table stores integral of -u' from r_out, i.e. u(r_out - t^2) - u(r_out)
        u_out = self._left(self._left.T) - self._right(self._right.T)
        rc = np.clip(r, r_in, r_out)
        left = self._left(np.sqrt(np.maximum(rc - r_in, 0.0)))
        right = u_out + self._right(np.sqrt(np.maximum(r_out - rc, 0.0)))
        return np.where(rc <= r_mid, left, right)

    def value(self, r):
        return self.raw(r) + self.offset

    def derivative(self, r):
        """Exact ``u'(r)``; ``+-inf`` at vertical contact radii."""
        r = np.asarray(r, dtype=float)
        qq = np.clip(self.q(r), -1.0, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            d = qq / np.sqrt((1.0 - qq) * (1.0 + qq))
        for rc, s in zip(self.r_range, self._contact):
            if s is not None:
                d = np.where(np.abs(r - rc) <= 1e-14 * rc, s * np.inf, d)
        return d

    def table_derivative(self, r):
        """``u'`` recovered by differentiating the quadrature tables (independent of ``q``)."""
        r = np.asarray(r, dtype=float)
        r_in, r_out = self.r_range
        r_mid = 0.5 * (r_in + r_out)
        tl = np.sqrt(np.maximum(r - r_in, 1e-300))
        tr = np.sqrt(np.maximum(r_out - r, 1e-300))
        dl = self._left.integrand(tl) / (2.0 * tl)
        dr = -self._right.integrand(tr) / (2.0 * tr)
        return np.where(r <= r_mid, dl, dr)

    def first_integral(self, r):
        """``r u'/W - H_div r^2/2`` using table derivatives; constant ``= flux_c``."""
        up = self.table_derivative(r)
        return r * up / np.sqrt(1.0 + up * up) - 0.5 * self.H_div * r * r

    def with_pin(self, radius, level=0.0):
        """Copy translated vertically so that ``u(radius) = level``."""
        off = level - float(self.raw(radius))
        return RadialProfile(self.H_div, self.flux_c, self.r_range, off, self.center,
                             self._left, self._right, self._contact)

    def translated(self, center):
        return RadialProfile(self.H_div, self.flux_c, self.r_range, self.offset,
                             tuple(center), self._left, self._right, self._contact)

    def shifted(self, dz):
        return RadialProfile(self.H_div, self.flux_c, self.r_range, self.offset + dz,
                             self.center, self._left, self._right, self._contact)

    def scaled(self, k):
        """Homothety by ``k``: radii and heights times ``k``, ``H_div`` divided by ``k``."""
        return RadialProfile(self.H_div / k, self.flux_c * k,
                             (self.r_in * k, self.r_out * k), self.offset * k,
                             tuple(k * c for c in self.center))

    def contact_distance(self, x):
        pts, _ = _points(x)
        rho = np.linalg.norm(pts - np.asarray(self.center), axis=1)
        radii = self.contact_radii
        if not radii:
            return np.full(len(pts), np.inf)
        return np.min(np.abs(rho[:, None] - np.asarray(radii)[None, :]), axis=1)

    def __call__(self, x):
        return profile_eval(self, x)

    def to_csv(self, path, n=401):
        """Write columns ``r, u, u_prime`` on a grid clustered at both ends."""
        s = 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, n)))
        r = self.r_in + (self.r_out - self.r_in) * s
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "u", "u_prime"])
            for ri, ui, di in zip(r, self.value(r), self.derivative(r)):
                w.writerow([repr(float(ri)), repr(float(ui)), repr(float(di))])


def delaunay_profile(H_div, contact, r_in=None, r_out=None, flux_c=None,
                     slope_sign=-1, pin_radius=None, pin_value=0.0, center=(0.0, 0.0)):
    """Solve the flux constant from contact conditions and tabulate the profile.

    ``contact`` is one of ``"vertical-at-inner"``, ``"vertical-at-both"`` or
    ``"radii"``.  Vertical contacts have ``q = slope_sign`` (``-1``: the graph
    plunges to ``-inf`` slope, as for every barrier used here).  The profile
    is pinned so that ``u(pin_radius) = pin_value`` (default: outer radius).
    """
    H = float(H_div)
    s = float(np.sign(slope_sign)) or -1.0
    if contact == "vertical-at-both":
        if r_in is None:
            raise InfeasibleContact("vertical-at-both needs r_in")
        if H == 0.0 or s * H <= 0:
            raise InfeasibleContact("vertical-at-both needs slope_sign * H_div > 0")
        C = s * r_in - 0.5 * H * r_in * r_in
        other = 2.0 * s / H - r_in
        if other <= r_in:
            raise InfeasibleContact(
                f"outer contact radius {other} does not exceed r_in={r_in}")
        if r_out is not None and abs(r_out - other) > 1e-12 * other:
            raise InfeasibleContact(f"r_out={r_out} inconsistent with contact at {other}")
        r_out = other
    elif contact == "vertical-at-inner":
        if r_in is None:
            raise InfeasibleContact("vertical-at-inner needs r_in")
        C = s * r_in - 0.5 * H * r_in * r_in
        if r_out is None:
            if H == 0.0 or -2.0 * C / H <= r_in * r_in:
                raise InfeasibleContact("no horizontal radius; pass r_out")
            r_out = np.sqrt(-2.0 * C / H)
    elif contact == "radii":
        if r_in is None or r_out is None or flux_c is None:
            raise InfeasibleContact("radii mode needs r_in, r_out and flux_c")
        C = float(flux_c)
    else:
        raise ValueError(f"unknown contact mode {contact!r}")
    prof = RadialProfile(H, C, (r_in, r_out), 0.0, center)
    if pin_radius is None:
        pin_radius = prof.r_out
    return prof.with_pin(pin_radius, pin_value)


def profile_eval(rp, x):
    """Evaluate a :class:`RadialProfile` about its (possibly translated) center."""
    pts, single = _points(x)
    d = pts - np.asarray(rp.center)
    rho = np.linalg.norm(d, axis=1)
    lo, hi = rp.r_range
    bad = (rho < lo * (1 - 1e-12)) | (rho > hi * (1 + 1e-12))
    if np.any(bad):
        raise DomainViolation(
            f"radius {rho[bad][0]:.6g} outside profile range [{lo:.6g}, {hi:.6g}]")
    rho_c = np.clip(rho, lo, hi)
    value = rp.value(rho_c)
    du = rp.derivative(rho_c)
    vertical = ~np.isfinite(du)
    with np.errstate(invalid="ignore"):
        grad = du[:, None] * d / rho[:, None]
    grad[vertical] = np.inf
    return _finish(FieldEval(value, grad, vertical), single)


def catenoid_field(a):
    """Catenoid graph ``arccosh(a) - arccosh(|x|)`` on ``1 <= |x| <= a``."""
    if a <= 1.0:
        raise DomainViolation("catenoid barrier needs a > 1")
    return delaunay_profile(0.0, "vertical-at-inner", r_in=1.0, r_out=a)


def unit_nodoid(s1, H_div=2.0):
    """Nodoid profile of the given ``H_div`` with inner neck ``s1``.

    Returns ``(profile on [s1, s3], s3)`` where ``s3`` is the radius of
    horizontal tangent plane.
    """
    prof = delaunay_profile(H_div, "vertical-at-inner", r_in=s1)
    return prof, prof.r_out


def radial_slope_bound(rp):
    """Infimum of ``-u'`` over the open radius range (positive for a decreasing profile)."""
    r_in, r_out = rp.r_range
    cands = [r_in, r_out]
    if rp.H_div != 0 and rp.flux_c / rp.H_div > 0:
        rs = np.sqrt(2.0 * rp.flux_c / rp.H_div)
        if r_in < rs < r_out:
            cands.append(rs)
    qs = np.array([rp.q(r) for r in cands])
    qs = np.clip(qs, -1.0, 1.0)
    with np.errstate(divide="ignore"):
        slopes = -qs / np.sqrt((1 - qs) * (1 + qs))
    beta0 = float(np.min(slopes))
    if not beta0 > 0:
        raise NonMonotoneProfile(f"inf of -u' is {beta0:.6g} <= 0")
    return beta0


# ----------------------------------------------------------------------------
# Lower half torus
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusGraph:
    """Lower half of a torus of tube radius ``b`` centered on radius ``(a+p)/2``."""

    a: float
    p: float
    b: float
    c: float

    @property
    def R0(self):
        return 0.5 * (self.a + self.p)

    def __call__(self, x):
        pts, single = _points(x)
        rho = np.linalg.norm(pts, axis=1)
        s = rho - self.R0
        if np.any(np.abs(s) > self.b * (1 + 1e-12)):
            raise DomainViolation("outside the torus annulus")
        root = np.sqrt(np.maximum(self.b * self.b - s * s, 0.0))
        value = self.c - root
        with np.errstate(divide="ignore", invalid="ignore"):
            d = s / root
            grad = d[:, None] * pts / rho[:, None]
        vertical = ~np.isfinite(d)
        grad[vertical] = np.inf
        return _finish(FieldEval(value, grad, vertical), single)

    def div_value(self, rho):
        """``div(T j)`` of the torus graph, i.e. the sum of principal curvatures."""
        rho = np.asarray(rho, dtype=float)
        return (2.0 * rho - self.R0) / (self.b * rho)

    def half_trace_curvature(self, rho):
        return 0.5 * self.div_value(rho)

    def contact_distance(self, x):
        pts, _ = _points(x)
        rho = np.linalg.norm(pts, axis=1)
        return np.abs(np.abs(rho - self.R0) - self.b)


def torus_graph(ps):
    return TorusGraph(ps.a, ps.p, ps.b, ps.c)


# ----------------------------------------------------------------------------
# CMC helicoidal graph
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class HelicoidField:
    """Helicoidal graph ``u = c0 - beta * t`` on the rotated copies ``l_t(L0)``.

    In polar coordinates ``(rho, phi)`` about the axis point ``w`` the graph is
    ``u = -beta * phi + psi(rho)`` with ``psi(0) = c0``; ``L0`` is the ``c0``
    level curve ``phi = theta_L(rho)``, ``0 < rho < rho_b``.  ``l_t`` rotates
    counter-clockwise by ``t`` about ``w``.
    """

    H_div: float
    beta: float
    sigma: float
    w: tuple
    rho_b: float
    flux_c: float = 0.0
    _theta: object = field(default=None, repr=False, compare=False)

    @property
    def m0(self):
        return 0.5 * self.H_div

    @property
    def c0(self):
        return 0.25 * self.beta * self.sigma

    @property
    def b_point(self):
        return self.level_curve(0.0, np.array([self.rho_b]))[0]

    @property
    def b1(self):
        return float(self.b_point[0] - self.w[0])

    def psi_prime(self, rho):
        rho = np.asarray(rho, dtype=float)
        F = 0.5 * self.H_div * rho
        return 0.5 * self.H_div * np.sqrt(rho * rho + self.beta ** 2) / np.sqrt(1.0 - F * F)

    def theta_L(self, rho):
        return self._theta(np.asarray(rho, dtype=float))

    def psi(self, rho):
        return self.c0 + self.beta * self.theta_L(rho)

    def first_integral(self, rho):
        """``rho psi'/W - H_div rho^2/2`` with ``W^2 = 1 + psi'^2 + beta^2/rho^2``."""
        rho = np.asarray(rho, dtype=float)
        # independent route: derivative of the integrated angle table
        pp = self.beta * self._theta.deriv()(rho)
        W = np.sqrt(1.0 + pp * pp + (self.beta / rho) ** 2)
        return rho * pp / W - 0.5 * self.H_div * rho * rho

    def level_curve(self, t, rho=None, n=200):
        """Points of ``l_t(L0)``."""
        if rho is None:
            rho = np.linspace(0.0, self.rho_b, n)
        ang = self.theta_L(rho) + t
        w = np.asarray(self.w)
        return w + np.column_stack([rho * np.cos(ang), rho * np.sin(ang)])

    def tangent_slopes(self, rho):
        rho = np.asarray(rho, dtype=float)
        th = self.theta_L(rho)
        dth = self._theta.deriv()(rho)
        tx = np.cos(th) - rho * dth * np.sin(th)
        ty = np.sin(th) + rho * dth * np.cos(th)
        return ty / tx

    def band(self, t0, t1, n_rho=60, n_t=20):
        """Sample points of ``union_{t in [t0, t1]} l_t(L0)`` (exact parametrization)."""
        rho = np.linspace(0.0, self.rho_b, n_rho + 1)[1:]
        ts = np.linspace(t0, t1, n_t)
        R, T = np.meshgrid(rho, ts)
        ang = self.theta_L(R) + T
        w = np.asarray(self.w)
        return w + np.column_stack([(R * np.cos(ang)).ravel(), (R * np.sin(ang)).ravel()])

    def band_polygon(self, t0, t1, n=80):
        a = self.level_curve(t0, n=n)
        b = self.level_curve(t1, n=n)[::-1]
        arc_t = np.linspace(t0, t1, 20)
        end = np.asarray(self.w) + self.rho_b * np.column_stack(
            [np.cos(self.theta_L(self.rho_b) + arc_t), np.sin(self.theta_L(self.rho_b) + arc_t)])
        return np.vstack([a, end[1:-1], b])

    def rotation_parameter(self, x):
        pts, _ = _points(x)
        d = pts - np.asarray(self.w)
        rho = np.linalg.norm(d, axis=1)
        phi = np.arctan2(d[:, 1], d[:, 0])
        return rho, phi - self.theta_L(np.minimum(rho, self.rho_b))

    def __call__(self, x):
        pts, single = _points(x)
        rho, t = self.rotation_parameter(pts)
        bad = (rho > self.rho_b * (1 + 1e-12)) | (np.abs(t) >= 7 * np.pi / 8) | (rho == 0)
        if np.any(bad):
            raise DomainViolation("point outside the helicoid region R")
        value = self.c0 - self.beta * t
        d = pts - np.asarray(self.w)
        er = d / rho[:, None]
        ephi = np.column_stack([-er[:, 1], er[:, 0]])
        grad = self.psi_prime(rho)[:, None] * er - (self.beta / rho)[:, None] * ephi
        return _finish(FieldEval(value, grad, np.zeros(len(pts), bool)), single)

    def contact_distance(self, x):
        pts, _ = _points(x)
        return np.full(len(pts), np.inf)


def _theta_table(H_div, beta, rho_max):
    def g(rho):
        F = 0.5 * H_div * rho
        return 0.5 * H_div * np.sqrt(rho * rho + beta * beta) / np.sqrt(1.0 - F * F) / beta
    deg = 32
    prev = None
    while True:
        ser = Chebyshev.interpolate(g, deg, domain=[0.0, rho_max]).integ(lbnd=0.0)
        end = float(ser(rho_max))
        if prev is not None and abs(end - prev) < 1e-13 * (1 + abs(end)):
            return ser
        if deg >= 1024:
            return ser
        prev = end
        deg *= 2


def build_helicoid(H_div, beta, sigma, p, tau, *, w=None, safety=0.9):
    """Construct the helicoid about ``w = (0, p)``; find the level-curve endpoint.

    The endpoint radius ``rho_b`` is the largest radius (times ``safety``) for
    which the level curve keeps ``|slope| < tan(-sigma/5)`` and every rotated
    copy ``l_t(L0)``, ``t`` in ``(3 sigma/4, sigma/4)``, stays inside
    ``B(O, p)`` and outside the lens ``B((tau,0), r4) & B((-tau,0), r4)``.
    """
    if not (beta > 0 and sigma < 0 and H_div > 0):
        raise InfeasibleHelicoid("needs beta > 0, sigma < 0, H_div > 0")
    w = np.array([0.0, p]) if w is None else np.asarray(w, dtype=float)
    rho_cap = min(0.9 * 2.0 / H_div, 0.5 * p)
    theta = _theta_table(H_div, beta, rho_cap)
    r4 = np.hypot(p, tau)
    slope_max = np.tan(-sigma / 5.0)
    ts = np.linspace(0.75 * sigma, 0.25 * sigma, 9)

    def ok(rho_end):
        rho = np.linspace(0.0, rho_end, 200)[1:]
        th = theta(rho)
        dth = theta.deriv()(rho)
        tx = np.cos(th) - rho * dth * np.sin(th)
        ty = np.sin(th) + rho * dth * np.cos(th)
        if np.any(tx <= 0) or np.any(np.abs(ty / tx) >= slope_max):
            return False
        for t in ts:
            ang = th + t
            pts = w + np.column_stack([rho * np.cos(ang), rho * np.sin(ang)])
            if np.any(np.hypot(pts[:, 0], pts[:, 1]) >= p):
                return False
            in_lens = (np.hypot(pts[:, 0] - tau, pts[:, 1]) < r4) & (
                np.hypot(pts[:, 0] + tau, pts[:, 1]) < r4)
            if np.any(in_lens):
                return False
        return True

    lo, hi = 0.0, rho_cap
    if ok(hi):
        lo = hi
    else:
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if ok(mid):
                lo = mid
            else:
                hi = mid
    rho_b = safety * lo
    if rho_b <= 1e-12:
        raise InfeasibleHelicoid("no level curve meets the slope and containment constraints")
    return HelicoidField(float(H_div), float(beta), float(sigma), (float(w[0]), float(w[1])),
                         float(rho_b), 0.0, theta)


def helicoid_build(ps, safety=0.9):
    """Helicoid barrier for a meridian :class:`~pmcorner.params.ParameterSet`.

    The surface has mean curvature ``m0`` (half trace), hence ``H_div = 2 m0``.
    """
    if ps.beta is None or ps.beta0 is None or not 0 < ps.beta < ps.beta0:
        raise InfeasibleHelicoid("beta must lie in (0, beta0)")
    return build_helicoid(2.0 * ps.m0, ps.beta, ps.sigma, ps.p, ps.tau, safety=safety)


# ----------------------------------------------------------------------------
# Residual oracle
# ----------------------------------------------------------------------------

def _flux(field_eval):
    g = field_eval.gradient
    return g / np.sqrt(1.0 + np.sum(g * g, axis=1))[:, None]


def mean_curvature_residual(field, points, H_expected, step=1e-4):
    """Max of ``|div(T u) - H_expected|`` by central differences of the flux ``Tu``."""
    pts, _ = _points(points)
    div = np.zeros(len(pts))
    for k in range(2):
        e = np.zeros(2)
        e[k] = step
        fp = _flux(field(pts + e))[:, k]
        fm = _flux(field(pts - e))[:, k]
        div += (fp - fm) / (2.0 * step)
    H = H_expected(pts) if callable(H_expected) else H_expected
    return float(np.max(np.abs(div - H)))
