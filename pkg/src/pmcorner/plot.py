"""Static SVG contour maps of solutions with the corner and witness regions."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import matplotlib.tri as mtri  # noqa: E402
import numpy as np  # noqa: E402

_REGION_COLORS = ("tab:red", "tab:blue", "tab:green", "tab:purple", "tab:orange", "tab:brown")


def contour_svg(path, u=None, *, P=None, regions=None, curves=None, title=None,
                levels=24, zoom=None):
    """Write a filled contour plot of ``u`` to ``path`` as SVG.

    Parameters
    ----------
    path : str or Path
    u : ScalarField, optional
        Field to contour; omitted for pure geometry plots.
    P : (2,) sequence, optional
        Corner point, drawn as a black star.
    regions : dict, optional
        ``name -> Region``; each polygon outline is drawn and labeled.
    curves : dict, optional
        ``name -> (k, 2) array`` of extra polylines.
    zoom : (xmin, xmax, ymin, ymax), optional
        Axis limits; by default the full mesh.
    """
    with plt.rc_context({"svg.hashsalt": "pmcorner", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.4, 5.6))
        if u is not None:
            V, T = u.mesh.vertices, u.mesh.triangles
            tri = mtri.Triangulation(V[:, 0], V[:, 1], T)
            cs = ax.tricontourf(tri, u.values, levels=levels, cmap="viridis")
            ax.tricontour(tri, u.values, levels=levels, colors="k", linewidths=0.2)
            fig.colorbar(cs, ax=ax, label="u")
        for k, (name, reg) in enumerate(sorted((regions or {}).items())):
            color = _REGION_COLORS[k % len(_REGION_COLORS)]
            for j, poly in enumerate(reg.polygons):
                poly = np.asarray(poly)
                closed = np.vstack([poly, poly[:1]])
                ax.plot(closed[:, 0], closed[:, 1], color=color, lw=1.0,
                        label=name if j == 0 else None)
        for name, pts in sorted((curves or {}).items()):
            pts = np.asarray(pts)
            ax.plot(pts[:, 0], pts[:, 1], lw=1.0, ls="--", label=name)
        if P is not None:
            ax.plot([P[0]], [P[1]], marker="*", color="k", ms=12, ls="none", label="P")
        ax.set_aspect("equal")
        if zoom is not None:
            ax.set_xlim(zoom[0], zoom[1])
            ax.set_ylim(zoom[2], zoom[3])
        elif u is not None:
            V = u.mesh.vertices
            pad = 0.02 * float(np.ptp(V, axis=0).max())
            ax.set_xlim(V[:, 0].min() - pad, V[:, 0].max() + pad)
            ax.set_ylim(V[:, 1].min() - pad, V[:, 1].max() + pad)
        if title:
            ax.set_title(title)
        if ax.get_legend_handles_labels()[0]:
            ax.legend(loc="best", fontsize=8)
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    return path
