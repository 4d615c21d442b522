"""Graded conforming triangulations of analytic domains.

Boundary vertices are placed exactly on the analytic pieces (spaced by the
size function) and the interior is produced by Shewchuk's Triangle with a
minimum-angle constraint and no boundary Steiner points, so every boundary
vertex stays on its arc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import triangle as tr
from scipy.spatial import cKDTree

from .errors import MeshFailure

MARKER_OFFSET = 2  # Triangle reserves 0 and 1


@dataclass
class Mesh:
    """Triangulation with per-edge boundary tags.

    Attributes
    ----------
    vertices : (N, 2) array
    triangles : (T, 3) int array, counter-clockwise
    boundary_edges : (E, 2) int array, oriented with the domain on the left
    boundary_piece : (E,) int array, index into ``piece_labels``
    piece_labels : tuple of str, label of each boundary piece
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_piece: np.ndarray
    piece_labels: tuple
    h: float = float("nan")
    grading: float = 0.0
    P: tuple | None = None
    pieces: tuple = field(default=(), repr=False)
    layer: np.ndarray | None = field(default=None, repr=False)

    @property
    def boundary_tags(self):
        return np.array([self.piece_labels[k] for k in self.boundary_piece], dtype=object)

    @property
    def n_vertices(self):
        return len(self.vertices)

    def areas(self):
        v = self.vertices[self.triangles]
        e1 = v[:, 1] - v[:, 0]
        e2 = v[:, 2] - v[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def edge_lengths(self):
        v = self.vertices[self.triangles]
        return np.stack([np.linalg.norm(v[:, (k + 1) % 3] - v[:, k], axis=1)
                         for k in range(3)], axis=1)

    def angles_deg(self):
        L = self.edge_lengths()  # L[:,k] is edge k -> k+1, opposite vertex k+2
        a, b, c = L[:, 1], L[:, 2], L[:, 0]  # opposite vertices 0, 1, 2
        A = np.arccos(np.clip((b * b + c * c - a * a) / (2 * b * c), -1, 1))
        B = np.arccos(np.clip((a * a + c * c - b * b) / (2 * a * c), -1, 1))
        return np.degrees(np.stack([A, B, math.pi - A - B], axis=1))

    def min_angle(self, include_layer=False):
        """Smallest interior angle; boundary-layer triangles are skipped unless asked."""
        ang = self.angles_deg()
        if self.layer is not None and not include_layer:
            ang = ang[~self.layer]
        return float(ang.min())

    def edges_with_tag(self, tag):
        mask = self.boundary_tags == tag
        return self.boundary_edges[mask]

    def edges_of_piece(self, k):
        return self.boundary_edges[self.boundary_piece == k]

    def boundary_vertices(self, tag=None):
        e = self.boundary_edges if tag is None else self.edges_with_tag(tag)
        return np.unique(e.ravel())

    def centroids(self):
        return self.vertices[self.triangles].mean(axis=1)

    def to_file(self, path):
        write_mesh(self, path)


@dataclass(frozen=True)
class BoundaryLayer:
    """Structured layer of thin triangles along closed boundary loops.

    A loop is layered when all its pieces carry a label in ``labels``.  Rings
    of vertices are placed at normal offsets ``0, first, first*(1+ratio), ...``
    until the spacing reaches ``tangential`` (default ``h/2``), which is also
    the spacing of the vertices along the loop.  Aligned rings keep discrete
    gradients normal to the boundary, which matters where the solution meets
    the boundary vertically.

    Corners where the domain angle exceeds ``pi`` are wrapped by a fan of
    normals centered at the corner vertex, with angular step at most
    ``fan_angle``; other corners are rejected.
    """

    labels: tuple
    first: float
    ratio: float = 1.25
    tangential: float | None = None
    fan_angle: float = math.radians(2.0)


def _layer_offsets(first, ratio, spacing):
    d = [0.0]
    step = first
    while step < spacing:
        d.append(d[-1] + step)
        step *= ratio
    d.append(d[-1] + spacing)
    return np.array(d)


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class CornerPatch:
    """Structured polar patch of triangles around the corner ``P``.

    Rings of radius ``r_min * ring_ratio**k`` up to ``radius`` are centered
    at ``P``; on each ring the nodes sweep the domain angle between the two
    boundary pieces meeting at ``P``, with fractional steps growing
    geometrically from ``first_frac`` (by ``angle_ratio``, at most
    ``max_frac``) away from both pieces.  The end nodes lie exactly on the
    pieces.  Radial limits that depend on the direction of approach to ``P``
    are then represented at every scale down to ``r_min``.  Patch triangles
    are anisotropic and exempt from the angle check.
    """

    radius: float
    r_min: float
    ring_ratio: float = 1.1
    first_frac: float = 1e-3
    angle_ratio: float = 1.2
    max_frac: float = 0.03


def _patch_fractions(first, ratio, cap):
    steps = []
    total, step = 0.0, first
    while total < 0.5:
        steps.append(step)
        total += step
        step = min(step * ratio, cap)
    half = np.concatenate([[0.0], np.cumsum(steps)]) / (2.0 * total)
    return np.concatenate([half, 1.0 - half[-2::-1]])


def _param_at_distance(pc, P, r, from_end):
    """Parameters ``s`` with ``|pc(s) - P| = r``, measured from the end touching ``P``."""
    lo = np.zeros_like(r)
    hi = np.ones_like(r)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        d = np.linalg.norm(pc.point(1.0 - mid if from_end else mid) - P, axis=-1)
        inside = d < r
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    s = 0.5 * (lo + hi)
    return 1.0 - s if from_end else s


def _sub_piece(pc, s0, s1):
    from dataclasses import replace
    if hasattr(pc, "theta0"):
        return replace(pc, theta0=float(pc.angle(s0)), theta1=float(pc.angle(s1)))
    a, b = pc.point(s0), pc.point(s1)
    return replace(pc, p0=(float(a[0]), float(a[1])), p1=(float(b[0]), float(b[1])))


def _corner_patch(pc_in, pc_out, P, patch):
    """Rings of the patch between ``pc_in`` (ending at ``P``) and ``pc_out``.

    Returns ``(rings, s_in, s_out)``: ``rings[k, j]`` for ring ``k`` and
    angular node ``j`` (``j = 0`` on ``pc_out``), and the parameters of the
    outermost ring on both pieces.
    """
    P = np.asarray(P, dtype=float)
    for pc in (pc_in, pc_out):
        far = pc.start if pc is pc_in else pc.end
        if np.linalg.norm(np.asarray(far) - P) <= patch.radius:
            raise MeshFailure("corner patch radius exceeds a piece meeting P")
    nr = int(math.ceil(math.log(patch.radius / patch.r_min) / math.log(patch.ring_ratio)))
    radii = patch.radius * patch.ring_ratio ** (np.arange(nr + 1) - nr)
    s_in = _param_at_distance(pc_in, P, radii, True)
    s_out = _param_at_distance(pc_out, P, radii, False)
    a_in, a_out = pc_in.point(s_in), pc_out.point(s_out)
    th_out = np.arctan2(a_out[:, 1] - P[1], a_out[:, 0] - P[0])
    th_in = np.arctan2(a_in[:, 1] - P[1], a_in[:, 0] - P[0])
    th_in = np.where(th_in <= th_out, th_in + 2 * np.pi, th_in)
    frac = _patch_fractions(patch.first_frac, patch.angle_ratio, patch.max_frac)
    th = th_out[:, None] + frac[None, :] * (th_in - th_out)[:, None]
    rings = P + radii[:, None, None] * np.stack([np.cos(th), np.sin(th)], axis=-1)
    rings[:, 0] = a_out
    rings[:, -1] = a_in
    return rings, float(s_in[-1]), float(s_out[-1])


def _patch_triangles(index, center):
    nr, nj = index.shape
    tris = [np.stack([np.full(nj - 1, center), index[0, :-1], index[0, 1:]], axis=1)]
    for k in range(nr - 1):
        a, b = index[k, :-1], index[k, 1:]
        c, d = index[k + 1, 1:], index[k + 1, :-1]
        tris.append(np.stack([a, c, b], axis=1))
        tris.append(np.stack([a, d, c], axis=1))
    return np.vstack(tris)


def _layer_loop(loop, spacing, offsets, tree, owner, first_id, adj, fan_angle):
    """Rings of a layered loop.

    Returns ``(rings, pid, canon)``: ring vertex positions ``(nring, npts, 2)``,
    the piece index of each loop entry and, for each entry, the index of the
    entry whose ring-0 vertex it shares (fan entries collapse onto the corner).
    """
    step = min(fan_angle, spacing / offsets[-1])
    corners = []
    for i, pc in enumerate(loop):
        nxt = loop[(i + 1) % len(loop)]
        ta, tb = _unit(pc.tangent(np.array([1.0]))[0]), _unit(nxt.tangent(np.array([0.0]))[0])
        if float(ta @ tb) < 1 - 1e-6:
            corners.append(np.asarray(pc.end, dtype=float))
    fan_spacing = offsets[-1] * step

    def along(x):
        # tangential spacing, graded so that it meets the fan arc spacing at corners
        x = np.atleast_2d(x)
        out = np.full(len(x), spacing)
        for c in corners:
            out = np.minimum(out, fan_spacing + 0.25 * np.hypot(*(x - c).T))
        return out

    pts, nrm, pid, canon = [], [], [], []
    count = 0
    for i, pc in enumerate(loop):
        sp = _sample_piece(pc, along, tree, owner, first_id + i, adj[first_id + i])[:-1]
        x = pc.point(sp)
        t = pc.tangent(sp)
        t = t / np.linalg.norm(t, axis=1)[:, None]
        pts.append(x)
        nrm.append(np.stack([-t[:, 1], t[:, 0]], axis=1))
        pid.append(np.full(len(sp), first_id + i))
        canon.append(count + np.arange(len(sp)))
        count += len(sp)
        nxt = loop[(i + 1) % len(loop)]
        ta, tb = _unit(pc.tangent(np.array([1.0]))[0]), _unit(nxt.tangent(np.array([0.0]))[0])
        if float(ta @ tb) >= 1 - 1e-6:
            continue
        if ta[0] * tb[1] - ta[1] * tb[0] > 0:
            raise MeshFailure(f"boundary layer cannot follow the convex corner after "
                              f"{pc.label!r}")
        # reflex corner of the domain: fan of normals from n_a clockwise to n_b
        na, nb = np.array([-ta[1], ta[0]]), np.array([-tb[1], tb[0]])
        turn = math.atan2(na[0] * nb[1] - na[1] * nb[0], float(na @ nb))  # negative
        nf = max(1, int(math.ceil(abs(turn) / step)))
        phi0 = math.atan2(na[1], na[0])
        ang = phi0 + turn * np.arange(nf) / nf
        corner = np.asarray(pc.end, dtype=float)
        pts.append(np.repeat(corner[None, :], nf, axis=0))
        nrm.append(np.column_stack([np.cos(ang), np.sin(ang)]))
        pid.append(np.full(nf, first_id + i))
        # the corner's ring-0 vertex is the first entry of the next piece
        canon.append(np.full(nf, -1))
        count += nf
    X, Nm = np.vstack(pts), np.vstack(nrm)
    pid = np.concatenate(pid)
    canon = np.concatenate(canon)
    n = len(canon)
    for j in range(n - 1, -1, -1):
        if canon[j] < 0:
            canon[j] = canon[(j + 1) % n]
    rings = X[None, :, :] + offsets[:, None, None] * Nm[None, :, :]
    return rings, pid, canon


def _layer_triangles(nring, npts, index):
    """Triangles of the strip between consecutive rings (``index[k, j]`` -> vertex id).

    Triangles with a repeated vertex (inside corner fans) are dropped.
    """
    tris = []
    for k in range(nring - 1):
        j = np.arange(npts)
        j1 = (j + 1) % npts
        a, b, c, d = index[k, j], index[k, j1], index[k + 1, j1], index[k + 1, j]
        tris.append(np.stack([a, b, c], axis=1))
        tris.append(np.stack([a, c, d], axis=1))
    T = np.vstack(tris)
    ok = (T[:, 0] != T[:, 1]) & (T[:, 1] != T[:, 2]) & (T[:, 0] != T[:, 2])
    return T[ok]


def _size_function(P, h, grading, h_min, radius, targets=None):
    P = np.asarray(P, dtype=float)
    tree = cKDTree(targets) if targets is not None else None

    def size(x):
        x = np.atleast_2d(x)
        if grading <= 0:
            return np.full(len(x), h)
        if tree is not None:
            d = tree.query(x)[0]
        else:
            d = np.hypot(x[:, 0] - P[0], x[:, 1] - P[1])
        return np.maximum(h_min, h * np.minimum(1.0, (d / radius) ** grading))

    return size


def _param_grid(n_uniform=4001, n_geom=1500):
    g = np.geomspace(1e-12, 0.5, n_geom)
    return np.unique(np.concatenate([np.linspace(0, 1, n_uniform), g, 1.0 - g, [0.0, 1.0]]))


def _sample_piece(pc, size, lfs_tree, lfs_owner, piece_id, adjacent):
    s = _param_grid()
    x = pc.point(s)
    loc = size(x)
    if lfs_tree is not None:
        # cap by distance to non-adjacent boundary pieces
        far = ~np.isin(lfs_owner, list(adjacent) + [piece_id])
        if np.any(far):
            dd = cKDTree(lfs_tree.data[far]).query(x)[0]
            loc = np.minimum(loc, np.maximum(0.5 * dd, 1e-12))
    dens = pc.length / loc
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(s))])
    nseg = max(int(math.ceil(cum[-1])), 3 if pc.length > 0 else 1)
    targets = np.linspace(0.0, cum[-1], nseg + 1)
    sp = np.interp(targets, cum, s)
    sp[0], sp[-1] = 0.0, 1.0
    return sp


def generate_mesh(ds, h, grading=0.0, *, min_angle=25.0, h_min=None, grading_radius=None,
                  grade_to=None, boundary_layer=None, corner_patch=None, max_refine=12,
                  max_vertices=3_000_000):
    """Triangulate ``ds`` with target edge length ``h`` graded toward ``ds.P``.

    The local size is ``max(h_min, h * min(1, (d / grading_radius) ** grading))``
    where ``d`` is the distance to ``P``; ``h_min`` defaults to ``h/100`` and
    ``grading_radius`` to 2% of the domain diameter.  Boundary sizes are
    further capped by half the distance to non-adjacent boundary pieces so
    thin necks are resolved.  With ``grade_to`` (a collection of boundary
    labels) the distance is measured to those boundary pieces instead of
    ``P``.  ``boundary_layer`` (a :class:`BoundaryLayer`) replaces the
    unstructured mesh next to the selected loops by aligned rings of thin
    triangles; these are exempt from the angle check.  ``corner_patch`` (a
    :class:`CornerPatch`) replaces the mesh inside a small disc around ``P``
    by a structured polar patch, also exempt from the angle check.

    Raises
    ------
    MeshFailure
        For non-positive ``h`` or when the angle constraint cannot be met.
    """
    if not h > 0 or not math.isfinite(h):
        raise MeshFailure(f"target edge length must be positive, got {h}")
    if grading < 0:
        raise MeshFailure("grading must be non-negative")
    diam = ds.diameter
    if h_min is None:
        h_min = h / 100.0
    if grading_radius is None:
        grading_radius = 0.02 * diam
    pieces = ds.pieces
    targets = None
    if grade_to:
        targets = np.vstack([pc.point(np.linspace(0, 1, max(64, int(pc.length / h_min) + 1)))
                             for pc in pieces if pc.label in set(grade_to)])
    size = _size_function(ds.P, h, grading, h_min, grading_radius, targets)

    # dense boundary cloud for local-feature-size queries
    cloud, owner = [], []
    for k, pc in enumerate(pieces):
        nn = max(200, int(pc.length / max(h_min, 1e-6)))
        nn = min(nn, 20000)
        cloud.append(pc.point(np.linspace(0, 1, nn)))
        owner.append(np.full(nn, k))
    cloud = np.vstack(cloud)
    owner = np.concatenate(owner)
    tree = cKDTree(cloud)

    # adjacency through shared endpoints
    adj = {k: set() for k in range(len(pieces))}
    for i, a in enumerate(pieces):
        for j, b in enumerate(pieces):
            if i != j:
                ends_a = (a.start, a.end)
                ends_b = (b.start, b.end)
                if any(np.linalg.norm(x - y) < 1e-12 for x in ends_a for y in ends_b):
                    adj[i].add(j)

    layers = []  # (input offset of the outer ring, rings, piece ids)
    if boundary_layer is not None:
        bl_labels = set(boundary_layer.labels)
        spacing = boundary_layer.tangential or 0.5 * h
        offsets = _layer_offsets(boundary_layer.first, boundary_layer.ratio, spacing)

    patch_at = None
    psize = size
    if corner_patch is not None:
        P = np.asarray(ds.P, dtype=float)
        for i, a in enumerate(pieces):
            j = next((j for j, b in enumerate(pieces)
                      if j in adj[i] and np.linalg.norm(a.end - P) < 1e-12
                      and np.linalg.norm(b.start - P) < 1e-12), None)
            if j is not None:
                patch_at = (i, j)
                break
        if patch_at is None or patch_at[1] != patch_at[0] + 1:
            raise MeshFailure("corner patch needs consecutive boundary pieces meeting at P")
        patch_rings, s_in, s_out = _corner_patch(pieces[patch_at[0]], pieces[patch_at[1]],
                                                 P, corner_patch)
        patch_s = (s_in, s_out)
        ends = patch_rings[-1, [0, -1]]
        end_len = min(np.linalg.norm(patch_rings[-1, 1] - patch_rings[-1, 0]),
                      np.linalg.norm(patch_rings[-1, -1] - patch_rings[-1, -2]))
        end_tree = cKDTree(ends)

        def psize(x):
            # grade the pieces away from the tiny end segments of the patch ring
            return np.minimum(size(x), end_len + 0.3 * end_tree.query(np.atleast_2d(x))[0])

    verts, segs, marks = [], [], []
    base = 0
    k_global = 0
    for loop in ds.loops:
        loop_start = base
        if boundary_layer is not None and all(pc.label in bl_labels for pc in loop):
            rings, pid, canon = _layer_loop(loop, spacing, offsets, tree, owner, k_global,
                                            adj, boundary_layer.fan_angle)
            outer = rings[-1]
            mine = np.isin(owner, np.arange(k_global, k_global + len(loop)))
            if np.any(~mine):
                gap = cKDTree(cloud[~mine]).query(outer)[0].min()
                if gap < 0.5 * spacing:
                    raise MeshFailure(f"boundary layer of thickness {offsets[-1]:.3g} comes "
                                      f"within {gap:.3g} of another boundary loop")
            nloc = len(outer)
            verts.append(outer)
            for i in range(nloc):
                segs.append((base + i, base + i + 1))
                marks.append(0)  # internal interface, not a domain boundary
            layers.append((base, rings, pid, canon))
            base += nloc
            k_global += len(loop)
            segs[-1] = (segs[-1][0], loop_start)
            continue
        for i_pc, pc in enumerate(loop):
            piece = pc
            if patch_at is not None and patch_at[1] == k_global:
                piece = _sub_piece(pc, patch_s[1], 1.0)
            if patch_at is not None and patch_at[0] == k_global:
                piece = _sub_piece(pc, 0.0, patch_s[0])
            sp = _sample_piece(piece, psize, tree, owner, k_global, adj[k_global])
            pts = piece.point(sp[:-1])
            nloc = len(pts)
            verts.append(pts)
            for i in range(nloc):
                segs.append((base + i, base + i + 1))
                marks.append(k_global + MARKER_OFFSET)
            base += nloc
            if patch_at is not None and patch_at[0] == k_global:
                # outer ring of the patch, from the incoming piece to the outgoing one
                ring = patch_rings[-1, -1:0:-1]
                patch_off = base
                verts.append(ring)
                for i in range(len(ring)):
                    segs.append((base + i, base + i + 1))
                    marks.append(0)  # internal interface
                base += len(ring)
            k_global += 1
        segs[-1] = (segs[-1][0], loop_start)
    V = np.vstack(verts)
    S = np.array(segs, dtype=np.int32)
    geom = {"vertices": V, "segments": S, "segment_markers": np.array(marks, dtype=np.int32)[:, None]}
    if ds.hole_points:
        geom["holes"] = np.asarray(ds.hole_points, dtype=float)

    out = tr.triangulate(geom, f"pq{min_angle:g}Y")
    for _ in range(max_refine):
        Vt, Tt = out["vertices"], out["triangles"]
        cen = Vt[Tt].mean(axis=1)
        e1 = Vt[Tt[:, 1]] - Vt[Tt[:, 0]]
        e2 = Vt[Tt[:, 2]] - Vt[Tt[:, 0]]
        area = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        target = (math.sqrt(3) / 4.0) * size(cen) ** 2
        if np.all(area <= 1.5 * target):
            break
        if len(Vt) > max_vertices:
            raise MeshFailure("vertex budget exceeded")
        refine = dict(out)
        refine["triangle_max_area"] = np.minimum(target, area)[:, None].astype(float)
        out = tr.triangulate(refine, f"rpq{min_angle:g}Ya")

    Vt = np.asarray(out["vertices"], dtype=float)
    Tt = np.asarray(out["triangles"], dtype=np.int64)
    # restore exact boundary coordinates (Triangle copies input vertices verbatim)
    Vt[: len(V)] = V
    e1 = Vt[Tt[:, 1]] - Vt[Tt[:, 0]]
    e2 = Vt[Tt[:, 2]] - Vt[Tt[:, 0]]
    neg = (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]) < 0
    Tt[neg] = Tt[neg][:, [0, 2, 1]]

    seg_out = np.asarray(out["segments"], dtype=np.int64)
    mk = np.asarray(out["segment_markers"]).ravel() - MARKER_OFFSET
    keep = mk >= 0
    seg_out, mk = seg_out[keep], mk[keep]

    is_layer = np.zeros(len(Tt), bool)
    for off, rings, pid, canon in layers:
        nr, npts = rings.shape[:2]
        index = np.empty((nr, npts), np.int64)
        index[-1] = off + np.arange(npts)
        index[:-1] = len(Vt) + np.arange((nr - 1) * npts).reshape(nr - 1, npts)
        index[0] = index[0][canon]
        Vt = np.vstack([Vt, rings[:-1].reshape(-1, 2)])
        lt = _layer_triangles(nr, npts, index)
        Tt = np.vstack([Tt, lt])
        is_layer = np.concatenate([is_layer, np.ones(len(lt), bool)])
        j = np.arange(npts)
        e = np.stack([index[0, j], index[0, (j + 1) % npts]], axis=1)
        real = e[:, 0] != e[:, 1]
        seg_out = np.vstack([seg_out, e[real]])
        mk = np.concatenate([mk, pid[real]])
    if patch_at is not None:
        nr, nj = patch_rings.shape[:2]
        index = np.empty((nr, nj), np.int64)
        index[-1, -1:0:-1] = patch_off + np.arange(nj - 1)
        index[-1, 0] = patch_off + nj - 1  # first vertex of the trimmed outgoing piece
        index[:-1] = len(Vt) + np.arange((nr - 1) * nj).reshape(nr - 1, nj)
        center = len(Vt) + (nr - 1) * nj
        Vt = np.vstack([Vt, patch_rings[:-1].reshape(-1, 2), np.asarray(ds.P, float)[None]])
        pt = _patch_triangles(index, center)
        Tt = np.vstack([Tt, pt])
        is_layer = np.concatenate([is_layer, np.ones(len(pt), bool)])
        side_out = np.concatenate([[center], index[:, 0]])
        side_in = np.concatenate([[center], index[:, -1]])
        seg_out = np.vstack([seg_out, np.stack([side_out[:-1], side_out[1:]], axis=1),
                             np.stack([side_in[1:], side_in[:-1]], axis=1)])
        mk = np.concatenate([mk, np.full(nr, patch_at[1]), np.full(nr, patch_at[0])])
    if layers or patch_at is not None:
        e1 = Vt[Tt[:, 1]] - Vt[Tt[:, 0]]
        e2 = Vt[Tt[:, 2]] - Vt[Tt[:, 0]]
        cr = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        if np.any(cr[is_layer] <= 0):
            bad = np.where(is_layer & (cr <= 0))[0]
            raise MeshFailure("boundary layer or corner patch folds near "
                              f"{Vt[Tt[bad[0]]].mean(axis=0)} ({len(bad)} triangles)")
    # orient boundary edges with the domain on their left
    seg_out = _orient_boundary(Tt, seg_out)
    used = np.zeros(len(Vt), bool)
    used[Tt.ravel()] = True
    if not used.all():
        # drop orphan vertices (e.g. duplicate inputs)
        remap = -np.ones(len(Vt), np.int64)
        remap[used] = np.arange(used.sum())
        Vt = Vt[used]
        Tt = remap[Tt]
        seg_out = remap[seg_out]

    mesh = Mesh(Vt, Tt, seg_out, mk, tuple(pc.label for pc in pieces), h, grading,
                tuple(ds.P), tuple(pieces),
                is_layer if layers or patch_at is not None else None)
    ang = mesh.min_angle()
    if ang < 20.0:
        raise MeshFailure(f"minimum angle {ang:.2f} deg below 20")
    return mesh


def _orient_boundary(T, E):
    """Flip boundary edges so that each agrees with its triangle's CCW orientation."""
    directed = {}
    for t in T:
        for k in range(3):
            directed[(int(t[k]), int(t[(k + 1) % 3]))] = True
    out = E.copy()
    for i, (a, b) in enumerate(E):
        if (int(a), int(b)) not in directed:
            out[i] = (b, a)
    return out


# ----------------------------------------------------------------------------
# Mesh file format
# ----------------------------------------------------------------------------

def write_mesh(mesh, path):
    """Write the ``mesh v1`` text format."""
    tags = mesh.boundary_tags
    with open(path, "w") as fh:
        fh.write("mesh v1\n")
        fh.write(f"{len(mesh.vertices)}\n")
        for x, y in mesh.vertices:
            fh.write(f"v {x:.17g} {y:.17g}\n")
        fh.write(f"{len(mesh.triangles)}\n")
        for i, j, k in mesh.triangles:
            fh.write(f"t {i} {j} {k}\n")
        for (i, j), tag, pc in zip(mesh.boundary_edges, tags, mesh.boundary_piece):
            fh.write(f"b {i} {j} {tag}\n")


def read_mesh(path):
    """Read a ``mesh v1`` file.  Piece indices are rebuilt from the tag names."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if lines[0] != "mesh v1":
        raise MeshFailure("not a 'mesh v1' file")
    nv = int(lines[1])
    V = np.array([[float(t) for t in ln.split()[1:3]] for ln in lines[2:2 + nv]])
    nt = int(lines[2 + nv])
    T = np.array([[int(t) for t in ln.split()[1:4]] for ln in lines[3 + nv:3 + nv + nt]],
                 dtype=np.int64)
    E, tags = [], []
    for ln in lines[3 + nv + nt:]:
        parts = ln.split()
        if parts[0] != "b":
            raise MeshFailure(f"unexpected line {ln!r}")
        E.append((int(parts[1]), int(parts[2])))
        tags.append(parts[3])
    labels = tuple(sorted(set(tags)))
    piece = np.array([labels.index(t) for t in tags], dtype=np.int64)
    return Mesh(V, T, np.array(E, dtype=np.int64).reshape(-1, 2), piece, labels)
