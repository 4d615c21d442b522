"""Rotationally symmetric barriers: unduloid, nodoid and catenoid.

Every barrier in the construction is a graph of constant mean curvature
over an annulus.  Its profile follows from one first integral,
r u'/W = H r^2/2 + c, and the contact radii where the graph turns
vertical are roots of a quadratic.  This script draws the three profiles
and checks each one against a finite-difference curvature residual.

Usage: python demos/delaunay_barriers.py [out_dir]
"""

import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from pmcorner.surfaces import (catenoid_field, delaunay_profile, mean_curvature_residual,
                               profile_eval, unit_nodoid)

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo-out")
out.mkdir(parents=True, exist_ok=True)


def residual(rp, H, n=200, seed=0):
    rng = np.random.default_rng(seed)
    r0, r1 = rp.r_range
    r = rng.uniform(r0 + 0.01 * (r1 - r0), r1 - 0.01 * (r1 - r0), n)
    ang = rng.uniform(0, 2 * math.pi, n)
    pts = np.column_stack([r * np.cos(ang), r * np.sin(ang)])
    return mean_curvature_residual(lambda x: profile_eval(rp, x), pts, H)


und = delaunay_profile(-1.0, "vertical-at-both", r_in=0.3)
print(f"unduloid: contact radii {und.r_range}, residual {residual(und, -1.0):.1e}")

nod, s3 = unit_nodoid(0.5, H_div=1.0)
print(f"nodoid: neck 0.5, outer radius {s3:.12f} (sqrt 1.25 = {math.sqrt(1.25):.12f})")

cat = catenoid_field(1.1)
print(f"catenoid over 1 < r < 1.1: inner height {float(cat((1.0, 0.0)).value):.6f}, "
      f"arccosh(1.1) = {math.acosh(1.1):.6f}")

fig, axes = plt.subplots(1, 3, figsize=(11, 3.2))
for ax, rp, name in ((axes[0], und, "unduloid"), (axes[1], nod, "nodoid")):
    r = np.linspace(*rp.r_range, 400)
    ax.plot(r, profile_eval(rp, np.column_stack([r, 0 * r])).value)
    ax.set_title(name)
    ax.set_xlabel("r")
r = np.linspace(1.0, 1.1, 200)
axes[2].plot(r, cat(np.column_stack([r, 0 * r])).value)
axes[2].set_title("catenoid")
axes[2].set_xlabel("r")
fig.tight_layout()
fig.savefig(out / "delaunay_profiles.png", dpi=120)
print(f"figure in {out / 'delaunay_profiles.png'}")
