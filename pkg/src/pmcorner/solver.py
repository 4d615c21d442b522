"""Minimization of the relaxed prescribed-mean-curvature functional.

For a piecewise-linear ``u`` on a triangulation the discrete functional is

    J(u) = sum_T w_T sqrt(1 + |grad u_T|^2)
         + sum_T w_T F(c_T, ubar_T)
         + sum_e sum_q w_eq |u(q) - phi(q)|

where ``w_T`` is the integral of ``r**k`` over ``T`` (``k = 0`` for planar
problems, ``k = n - 2`` for meridian reductions, with ``r`` the second
coordinate), ``F(x, u)`` is the primitive of ``H(x, .)`` from 0, and the
boundary sum runs over two Gauss points per non-axis boundary edge.

The absolute value is replaced by a Huber function whose width is driven to
zero along a continuation schedule; each stage is solved by damped Newton
with an Armijo line search.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

GAUSS2 = (0.5 - 0.5 / math.sqrt(3.0), 0.5 + 0.5 / math.sqrt(3.0))


# ----------------------------------------------------------------------------
# Prescribed curvature
# ----------------------------------------------------------------------------

class Curvature:
    """Prescribed ``H(x, t)`` with its primitive in ``t``.

    Parameters
    ----------
    func : float or callable
        A constant, ``func(x)`` (independent of ``t``) or ``func(x, t)``.
    t_dependent : bool
        Whether ``func`` takes the height ``t``.
    dfunc : callable, optional
        ``dH/dt(x, t)``; estimated by differences when omitted.
    """

    _GL_X, _GL_W = np.polynomial.legendre.leggauss(8)

    def __init__(self, func=0.0, t_dependent=False, dfunc=None):
        self.func = func
        self.t_dependent = t_dependent
        self.dfunc = dfunc

    @classmethod
    def coerce(cls, H):
        return H if isinstance(H, Curvature) else cls(H)

    @property
    def is_zero(self):
        return not callable(self.func) and self.func == 0.0

    def H(self, x, u):
        if not callable(self.func):
            return np.full(len(x), float(self.func))
        if self.t_dependent:
            return np.asarray(self.func(x, u), dtype=float)
        return np.asarray(self.func(x), dtype=float)

    def dH(self, x, u):
        if not self.t_dependent:
            return np.zeros(len(x))
        if self.dfunc is not None:
            return np.asarray(self.dfunc(x, u), dtype=float)
        d = 1e-6 * (1.0 + np.abs(u))
        return (self.H(x, u + d) - self.H(x, u - d)) / (2 * d)

    def F(self, x, u):
        """``int_0^u H(x, t) dt``."""
        if not self.t_dependent:
            return self.H(x, u) * u
        tot = np.zeros(len(x))
        for xi, wi in zip(self._GL_X, self._GL_W):
            tot += wi * self.H(x, 0.5 * u * (1 + xi))
        return 0.5 * u * tot


# ----------------------------------------------------------------------------
# Boundary data
# ----------------------------------------------------------------------------

def boundary_data(phi, pts, tags):
    """Evaluate boundary data ``phi`` at points carrying the given boundary tags."""
    return _phi_values(phi, np.atleast_2d(pts), np.asarray(tags, dtype=object))


def _phi_values(phi, pts, tags):
    """Evaluate boundary data: scalar, ``phi(points)`` or ``{label: scalar|callable}``."""
    if isinstance(phi, dict):
        out = np.zeros(len(pts))
        for lab, val in phi.items():
            sel = tags == lab
            if np.any(sel):
                out[sel] = val(pts[sel]) if callable(val) else float(val)
        return out
    if callable(phi):
        return np.asarray(phi(pts), dtype=float)
    return np.full(len(pts), float(phi))


# ----------------------------------------------------------------------------
# Geometry precomputation
# ----------------------------------------------------------------------------

def _complete_homogeneous(r, k):
    """``h_k(r1, r2, r3)``: sum of all monomials of degree ``k``."""
    r1, r2, r3 = r[:, 0], r[:, 1], r[:, 2]
    out = np.zeros(len(r))
    for i in range(k + 1):
        for j in range(k + 1 - i):
            out += r1 ** i * r2 ** j * r3 ** (k - i - j)
    return out


def triangle_weights(vertices, triangles, k):
    """Exact ``int_T r^k dA`` with ``r`` the second coordinate.

    Uses ``int_T r^k = 2|T| k!/(k+2)! h_k(r1, r2, r3)``.
    """
    v = vertices[triangles]
    e1 = v[:, 1] - v[:, 0]
    e2 = v[:, 2] - v[:, 0]
    area = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    if k == 0:
        return area
    r = v[:, :, 1]
    return 2.0 * area * math.factorial(k) / math.factorial(k + 2) * _complete_homogeneous(r, k)


class _Assembly:
    """Cached per-mesh geometric data for energy, gradient and Hessian."""

    def __init__(self, mesh, k, phi):
        V, T = mesh.vertices, mesh.triangles
        self.n = len(V)
        self.T = T
        v = V[T]
        e1 = v[:, 1] - v[:, 0]
        e2 = v[:, 2] - v[:, 0]
        det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        # gradients of the three hat functions (constant per triangle)
        G = np.empty((len(T), 3, 2))
        G[:, 1, 0] = e2[:, 1] / det
        G[:, 1, 1] = -e2[:, 0] / det
        G[:, 2, 0] = -e1[:, 1] / det
        G[:, 2, 1] = e1[:, 0] / det
        G[:, 0] = -G[:, 1] - G[:, 2]
        self.G = G
        self.w = triangle_weights(V, T, k)
        self.cent = v.mean(axis=1)
        self.k = k

        tags = mesh.boundary_tags
        keep = tags != "axis"
        E = mesh.boundary_edges[keep]
        etags = tags[keep]
        self.E = E
        p0, p1 = V[E[:, 0]], V[E[:, 1]]
        L = np.linalg.norm(p1 - p0, axis=1)
        self.eq = []
        for s in GAUSS2:
            q = (1 - s) * p0 + s * p1
            wq = 0.5 * L * (q[:, 1] ** k if k else 1.0)
            self.eq.append((s, wq, _phi_values(phi, q, etags), q))
        self.edge_len = L
        self.edge_tags = etags

        rows = np.repeat(T, 3, axis=1).ravel()
        cols = np.tile(T, (1, 3)).ravel()
        self.hrows, self.hcols = rows, cols
        # control measure per vertex for residual normalization
        self.mass = np.bincount(T.ravel(), np.repeat(self.w / 3.0, 3), minlength=self.n)

    def grads(self, u):
        return np.einsum("tij,ti->tj", self.G, u[self.T])

    def boundary_gap(self, u):
        """``u(q) - phi(q)`` at each Gauss point."""
        out = []
        for s, wq, ph, _ in self.eq:
            uq = (1 - s) * u[self.E[:, 0]] + s * u[self.E[:, 1]]
            out.append(uq - ph)
        return out


def _huber(z, eps):
    a = np.abs(z)
    return np.where(a <= eps, 0.5 * z * z / eps, a - 0.5 * eps)


def _huber_d(z, eps):
    return np.clip(z / eps, -1.0, 1.0)


def _huber_dd(z, eps):
    return (np.abs(z) < eps) / eps


def _energy(asm, H, u, eps):
    g = asm.grads(u)
    W = np.sqrt(1.0 + np.sum(g * g, axis=1))
    E_area = float(np.sum(asm.w * W))
    E_H = 0.0
    if not H.is_zero:
        ubar = u[asm.T].mean(axis=1)
        E_H = float(np.sum(asm.w * H.F(asm.cent, ubar)))
    E_b = 0.0
    for (s, wq, ph, _), z in zip(asm.eq, asm.boundary_gap(u)):
        E_b += float(np.sum(wq * (np.abs(z) if eps == 0 else _huber(z, eps))))
    return E_area + E_H + E_b


def _gradient(asm, H, u, eps, with_hessian=True):
    g = asm.grads(u)
    W = np.sqrt(1.0 + np.sum(g * g, axis=1))
    Tu = g / W[:, None]
    # area term
    loc = asm.w[:, None] * np.einsum("tij,tj->ti", asm.G, Tu)
    grad = np.bincount(asm.T.ravel(), loc.ravel(), minlength=asm.n)
    hvals = None
    if with_hessian:
        # w G (I/W - g g^T / W^3) G^T
        A = (np.eye(2)[None] / W[:, None, None]
             - np.einsum("ti,tj->tij", g, g) / (W ** 3)[:, None, None])
        Hloc = asm.w[:, None, None] * np.einsum("tik,tkl,tjl->tij", asm.G, A, asm.G)
        hvals = [Hloc.ravel()]
    if not H.is_zero:
        ubar = u[asm.T].mean(axis=1)
        hv = H.H(asm.cent, ubar)
        grad += np.bincount(asm.T.ravel(), np.repeat(asm.w * hv / 3.0, 3), minlength=asm.n)
        if with_hessian:
            dh = H.dH(asm.cent, ubar)
            if np.any(dh != 0):
                hvals.append(np.repeat(asm.w * dh / 9.0, 9))
    rows_b, cols_b, vals_b = [], [], []
    for (s, wq, ph, _), z in zip(asm.eq, asm.boundary_gap(u)):
        d = wq * _huber_d(z, eps)
        grad += np.bincount(asm.E[:, 0], (1 - s) * d, minlength=asm.n)
        grad += np.bincount(asm.E[:, 1], s * d, minlength=asm.n)
        if with_hessian:
            dd = wq * _huber_dd(z, eps)
            c = np.array([1 - s, s])
            for a in range(2):
                for b in range(2):
                    rows_b.append(asm.E[:, a])
                    cols_b.append(asm.E[:, b])
                    vals_b.append(dd * c[a] * c[b])
    if not with_hessian:
        return grad, None
    rows = [asm.hrows]
    cols = [asm.hcols]
    vals = [hvals[0]]
    if len(hvals) > 1:
        rows.append(asm.hrows)
        cols.append(asm.hcols)
        vals.append(hvals[1])
    rows += rows_b
    cols += cols_b
    vals += vals_b
    K = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(asm.n, asm.n)).tocsc()
    return grad, K


# ----------------------------------------------------------------------------
# Public types
# ----------------------------------------------------------------------------

@dataclass
class SolveOptions:
    """Controls for the continuation Newton solver.

    ``huber_eps_schedule`` is relative to the mesh extent (larger side of
    the bounding box) when ``relative_schedule`` is true.  ``skip_stages``
    drops that many leading stages, which is useful together with a good
    ``initial`` field.  ``newton_tol`` bounds the gradient divided by the
    per-vertex control measure (area plus boundary length), which has units
    of curvature.
    """

    huber_eps_schedule: tuple = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 1e-5, 1e-6)
    relative_schedule: bool = True
    newton_tol: float = 1e-7
    max_iters: int = 200
    axis_weight_exponent: int | None = None
    regularization: float = 1e-12
    log: list | None = None
    initial: np.ndarray | None = None
    skip_stages: int = 0


@dataclass
class ScalarField:
    """Piecewise-linear field on a mesh together with solver diagnostics."""

    mesh: object
    values: np.ndarray
    axis_weight_exponent: int = 0
    info: dict = field(default_factory=dict)

    def gradients(self):
        asm = _Assembly(self.mesh, self.axis_weight_exponent, 0.0)
        return asm.grads(self.values)

    def flux(self):
        g = self.gradients()
        return g / np.sqrt(1 + np.sum(g * g, axis=1))[:, None]

    def energy(self, H=0.0, phi=0.0):
        return energy(self, H, phi)

    def interpolator(self):
        import matplotlib.tri as mtri
        tri = mtri.Triangulation(self.mesh.vertices[:, 0], self.mesh.vertices[:, 1],
                                 self.mesh.triangles)
        return mtri.LinearTriInterpolator(tri, self.values)

    def interpolate(self, points):
        pts = np.atleast_2d(points)
        vals = self.interpolator()(pts[:, 0], pts[:, 1])
        return np.ma.filled(vals.astype(float), np.nan)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["vertex", "x", "y", "u"])
            for i, ((x, y), u) in enumerate(zip(self.mesh.vertices, self.values)):
                w.writerow([i, f"{x:.17g}", f"{y:.17g}", f"{u:.17g}"])

    def write_log(self, path):
        with open(path, "w") as fh:
            for rec in self.info.get("log", []):
                fh.write(json.dumps(rec) + "\n")


def energy(u, H=0.0, phi=0.0):
    """Exact (non-smoothed) discrete functional of a :class:`ScalarField`."""
    asm = _Assembly(u.mesh, u.axis_weight_exponent, phi)
    return _energy(asm, Curvature.coerce(H), u.values, 0.0)


# ----------------------------------------------------------------------------
# Solver
# ----------------------------------------------------------------------------

def _linear_solve(K, rhs):
    # the Hessian is symmetric positive definite: symmetric ordering, no pivoting
    attempts = (dict(permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                     options=dict(SymmetricMode=True)),
                dict(permc_spec="COLAMD"))
    for kw in attempts:
        try:
            x = spla.splu(K, **kw).solve(rhs)
        except RuntimeError:
            continue
        if np.all(np.isfinite(x)):
            return x
    return None


def _initial_guess(asm, n):
    vals = np.concatenate([ph for _, _, ph, _ in asm.eq]) if asm.eq else np.zeros(1)
    return np.full(n, float(np.min(vals)) if len(vals) else 0.0)


def _minimize_stage(asm, H, u, eps, opts, scale, stage, log):
    it = 0
    converged = False
    gnorm = np.inf
    E = _energy(asm, H, u, eps)
    for it in range(1, opts.max_iters + 1):
        grad, K = _gradient(asm, H, u, eps)
        gnorm = float(np.max(np.abs(grad) / scale))
        log.append({"stage": stage, "eps": eps, "iteration": it - 1, "energy": E,
                    "grad_norm": gnorm})
        if gnorm <= opts.newton_tol:
            converged = True
            break
        diag = K.diagonal()
        reg = opts.regularization * max(float(diag.max()), 1.0)
        step = _linear_solve(K + reg * sp.identity(asm.n, format="csc"), -grad)
        slope = float(grad @ step) if step is not None else 0.0
        if step is None or not slope < 0:
            step = -grad / np.maximum(diag, 1e-300)
            slope = float(grad @ step)
        t = 1.0
        accepted = False
        while t > 1e-12:
            cand = u + t * step
            Ec = _energy(asm, H, cand, eps)
            if Ec <= E + 1e-4 * t * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            # gradient-descent fallback
            step = -grad / np.maximum(diag, 1e-300)
            slope = float(grad @ step)
            t = 1.0
            while t > 1e-14:
                cand = u + t * step
                Ec = _energy(asm, H, cand, eps)
                if Ec <= E + 1e-4 * t * slope:
                    accepted = True
                    break
                t *= 0.5
        if not accepted:
            break
        if abs(E - Ec) <= 1e-15 * max(1.0, abs(E)) and np.max(np.abs(t * step)) < 1e-14:
            u = cand
            E = Ec
            converged = True
            break
        u = cand
        E = Ec
    return u, converged, it, gnorm


def solve_dirichlet_relaxed(mesh, H=0.0, phi=0.0, opts=None, *, axis_weight_exponent=0):
    """Minimize the relaxed functional over continuous P1 fields.

    Parameters
    ----------
    mesh : Mesh
    H : float, callable or Curvature
    phi : float, callable or dict
        Boundary data; a dict maps boundary labels to values or callables.
    opts : SolveOptions, optional

    Returns
    -------
    ScalarField
        ``info`` holds the final (exact) energy, per-stage energies and
        iteration counts, the convergence flag and the detached edge set.
    """
    opts = opts or SolveOptions()
    k = opts.axis_weight_exponent if opts.axis_weight_exponent is not None else axis_weight_exponent
    H = Curvature.coerce(H)
    asm = _Assembly(mesh, k, phi)
    diam = float(np.ptp(mesh.vertices, axis=0).max())
    sched = [e * diam if opts.relative_schedule else e for e in opts.huber_eps_schedule]
    if any(b >= a for a, b in zip(sched, sched[1:])):
        raise ValueError("huber_eps_schedule must be strictly decreasing")
    sched = sched[min(int(opts.skip_stages), len(sched) - 1):]

    # control measure: area share + boundary length share
    bl = np.zeros(asm.n)
    for s, wq, _, _ in asm.eq:
        bl += np.bincount(asm.E[:, 0], (1 - s) * wq, minlength=asm.n)
        bl += np.bincount(asm.E[:, 1], s * wq, minlength=asm.n)
    scale = np.maximum(asm.mass + bl, 1e-300)

    u = (np.array(opts.initial, dtype=float) if opts.initial is not None
         else _initial_guess(asm, asm.n))
    log = opts.log if opts.log is not None else []
    stages = []
    ok_all = True
    for si, eps in enumerate(sched):
        u, ok, its, gn = _minimize_stage(asm, H, u, eps, opts, scale, si, log)
        ok_all &= ok
        stages.append({"stage": si, "eps": eps, "iterations": its, "converged": ok,
                       "grad_norm": gn, "energy": _energy(asm, H, u, 0.0)})
    eps_f = sched[-1]
    gaps = asm.boundary_gap(u)
    det_edges = np.where((np.abs(gaps[0]) > 10 * eps_f) | (np.abs(gaps[1]) > 10 * eps_f))[0]
    info = {
        "energy": _energy(asm, H, u, 0.0),
        "stages": stages,
        "converged": bool(ok_all),
        "iterations": int(sum(s["iterations"] for s in stages)),
        "final_eps": eps_f,
        "detached_edges": asm.E[det_edges],
        "log": log,
        "phi": phi,
        "H": H,
    }
    return ScalarField(mesh, u, k, info)


def transfer(u, mesh):
    """Values of ``u`` at the vertices of another mesh of the same domain.

    Linear interpolation inside ``u.mesh``; vertices outside it (curved
    boundary chords) take the value of the nearest vertex.
    """
    from scipy.spatial import cKDTree
    vals = u.interpolate(mesh.vertices)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = cKDTree(u.mesh.vertices).query(mesh.vertices[bad])[1]
        vals[bad] = u.values[idx]
    return vals


def solve_axisymmetric(mesh, H=0.0, phi=0.0, n=3, opts=None):
    """Meridian reduction: minimize the ``r^(n-2)``-weighted functional.

    Axis edges (tag ``axis``) receive no boundary term; for ``n = 2`` this
    is exactly :func:`solve_dirichlet_relaxed`.
    """
    opts = opts or SolveOptions()
    opts = SolveOptions(**{**opts.__dict__, "axis_weight_exponent": int(n) - 2})
    return solve_dirichlet_relaxed(mesh, H, phi, opts)


def _neighbors_layers(mesh, seeds, layers):
    """Vertices within ``layers`` edge-hops of ``seeds``."""
    T = mesh.triangles
    n = len(mesh.vertices)
    rows = np.repeat(T, 3, axis=1).ravel()
    cols = np.tile(T, (1, 3)).ravel()
    A = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
    mark = np.zeros(n, bool)
    mark[np.asarray(seeds, dtype=int)] = True
    for _ in range(layers):
        mark = mark | (A @ mark.astype(float) > 0)
    return mark


@dataclass
class ResidualStats:
    per_vertex: np.ndarray
    mask: np.ndarray
    max: float
    quantiles: dict


def pde_residual(u, H=0.0, phi=None):
    """Weak residual ``div(Tu) - H`` per interior vertex, normalized by the control measure.

    Boundary vertices are excluded, as is a two-layer band around detached
    boundary vertices (from ``u.info['detached_edges']`` when present).
    """
    H = Curvature.coerce(H)
    asm = _Assembly(u.mesh, u.axis_weight_exponent, 0.0)
    asm.eq = []  # residual of the interior equation only
    grad, _ = _gradient(asm, H, u.values, 1.0, with_hessian=False)
    res = -grad / np.maximum(asm.mass, 1e-300)
    bnd = np.zeros(asm.n, bool)
    bnd[u.mesh.boundary_edges.ravel()] = True
    mask = ~bnd
    det = u.info.get("detached_edges")
    if det is not None and len(det):
        mask &= ~_neighbors_layers(u.mesh, np.unique(det.ravel()), 2)
    vals = np.abs(res[mask])
    q = {f"q{int(100 * p)}": float(np.quantile(vals, p)) for p in (0.5, 0.9, 0.99)} if len(vals) else {}
    return ResidualStats(res, mask, float(vals.max()) if len(vals) else 0.0, q)
