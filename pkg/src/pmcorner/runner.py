"""End-to-end scenario runs: mesh, solve, certify and write the artifacts.

Each run writes into one output directory:

``mesh.txt``
    Triangulation in the ``mesh v1`` text format.
``solution.csv``
    ``vertex,x,y,u`` per mesh vertex.
``solver_log.jsonl``
    One JSON object per Newton iteration.
``certificate.json``
    Scenario, parameters, bounds, evidence and verdict.
``contour.svg``
    Contour map with the corner ``P`` and witness regions.

Scenarios without a solve (``ledger-only``, ``mango-check``, ``gset-check``)
write only the files that apply.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, load_config
from .domain import (annulus_domain, build_domain_2d, build_meridian_domain, disk_domain,
                     gset_boundary, gset_X, subregions)
from .errors import ConfigError, PMCError
from .mesh import BoundaryLayer, CornerPatch, generate_mesh, write_mesh
from .params import derive_parameters, validate_ledger
from .plot import contour_svg
from .solver import SolveOptions, solve_axisymmetric, solve_dirichlet_relaxed, transfer
from .surfaces import catenoid_field, helicoid_build
from .verify import boundary_trace, contact_angle, discontinuity_certificate, mango_identity_check

ENV_OUT = "PMCORNER_OUT"

__all__ = ["RunResult", "run", "run_file", "dumps_json", "resolve_out_dir", "ENV_OUT"]


# ----------------------------------------------------------------------------
# Deterministic JSON
# ----------------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if x is None or isinstance(x, str):
        return x
    return str(x)


def _dump(x, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f'{pad}{_dump(str(k), indent, level + 1)}: {_dump(v, indent, level + 1)}'
                 for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(x, list):
        if not x:
            return "[]"
        items = [pad + _dump(v, indent, level + 1) for v in x]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            return "null"
        s = format(x, ".17g")
        if not any(c in s for c in ".en"):
            s += ".0"
        return s
    import json
    return json.dumps(x, ensure_ascii=False)


def dumps_json(obj, indent=2):
    """JSON text with every float written to 17 significant digits.

    Key order follows insertion order, so identical inputs give identical
    bytes.  Non-finite floats become ``null``.
    """
    return _dump(_jsonable(obj), indent, 0) + "\n"


# ----------------------------------------------------------------------------
# Runs
# ----------------------------------------------------------------------------

@dataclass
class RunResult:
    """Outcome of :func:`run`; ``status`` is the process exit code."""

    status: int
    out_dir: Path
    files: dict
    certificate: dict
    timings: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status == 0


def resolve_out_dir(cfg, out=None):
    """Output directory: explicit argument, then ``$PMCORNER_OUT``, then config, then default."""
    if out:
        return Path(out)
    env = os.environ.get(ENV_OUT)
    if env:
        return Path(env)
    if cfg.get("out_dir"):
        return Path(cfg["out_dir"])
    return Path("pmcorner-out") / cfg.scenario


def _mesh_kwargs(cfg):
    h = cfg["h"]
    return dict(grading=cfg["grading"], h_min=cfg["h_min_frac"] * h)


def _solve_opts(cfg, **kw):
    return SolveOptions(newton_tol=cfg["newton_tol"], max_iters=cfg["max_iters"], **kw)


def _mesh_and_solve(cfg, ds, H, phi, *, axisymmetric_n=None, grading_radius=None,
                    layer_labels=None, corner_patch=None):
    """Mesh ``ds`` at the configured size and solve, warm-starting from ``coarse_h``."""
    h = cfg["h"]
    gr = cfg["grading_radius"] * ds.diameter if grading_radius is None else grading_radius

    def layer(hh):
        if not layer_labels or not cfg.get("layer_first"):
            return None
        return BoundaryLayer(tuple(layer_labels), first=cfg["layer_first"] * hh,
                             ratio=cfg["layer_ratio"], tangential=hh)

    solve = ((lambda m, o: solve_axisymmetric(m, H, phi, axisymmetric_n, o))
             if axisymmetric_n is not None
             else (lambda m, o: solve_dirichlet_relaxed(m, H, phi, o)))
    timings = {}
    t0 = time.perf_counter()
    initial, skip = None, 0
    ch = cfg.get("coarse_h", 0.0)
    if ch and ch > h:
        mc = generate_mesh(ds, ch, cfg["grading"], h_min=cfg["h_min_frac"] * ch,
                           grading_radius=gr, boundary_layer=layer(ch))
        uc = solve(mc, _solve_opts(cfg))
        timings["coarse_solve"] = time.perf_counter() - t0
        t0 = time.perf_counter()
        mesh = generate_mesh(ds, h, grading_radius=gr, boundary_layer=layer(h),
                             corner_patch=corner_patch, **_mesh_kwargs(cfg))
        initial, skip = transfer(uc, mesh), _WARM_SKIP
    else:
        mesh = generate_mesh(ds, h, grading_radius=gr, boundary_layer=layer(h),
                             corner_patch=corner_patch, **_mesh_kwargs(cfg))
    timings["mesh"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    u = solve(mesh, _solve_opts(cfg, initial=initial, skip_stages=skip))
    timings["solve"] = time.perf_counter() - t0
    return mesh, u, timings


# Continuation stages skipped after a warm start: the coarse solution already
# carries the boundary-layer structure down to the coarse mesh scale.
_WARM_SKIP = 5


def _run_scherk2d(cfg):
    ps = derive_parameters({"scenario": "scherk2d", **cfg.seed()})
    ds = build_domain_2d(ps)
    phi = {"outer": 0.0, "inner": ps.m, "smoothing": ps.m}
    mesh, u, timings = _mesh_and_solve(cfg, ds, 0.0, phi, layer_labels=("inner", "smoothing"))
    cert = discontinuity_certificate(u, ps, ds, tol_cert=cfg.get("tol_cert"),
                                     tol_cmp=cfg.get("tol_cmp"),
                                     witness_scale=cfg["witness_scale"], strict=False)
    d = cert.to_dict()
    d["mesh"] = _mesh_summary(mesh, cfg)
    d["solver"] = _solver_summary(u)
    status = 0 if cert.discontinuous and u.info.get("converged", False) else 1
    regs = subregions(ds, ps)
    plot = dict(u=u, P=ds.P, regions=regs, title="scherk2d: u with C and W")
    return d, status, mesh, u, plot, timings


# Innermost ring of the corner patch relative to its radius.  Deeper patches
# make the relaxed Newton solve stall on the near-degenerate center fan.
_PATCH_DEPTH = 2e-4


def _run_meridian(cfg):
    ps = derive_parameters({"scenario": "meridian", **cfg.seed()})
    H = cfg["H"]
    ds = build_meridian_domain(ps)
    phi = {"outer": 0.0, "inner": ps.m}
    patch = None
    if cfg.get("corner_patch"):
        radius = cfg["corner_patch"] * (ps.a - ps.p)
        patch = CornerPatch(radius, _PATCH_DEPTH * radius, ring_ratio=1.15)
    mesh, u, timings = _mesh_and_solve(cfg, ds, H, phi, axisymmetric_n=ps.n,
                                       corner_patch=patch)
    try:
        hel = helicoid_build(ps)
    except PMCError:
        hel = None
    cert = discontinuity_certificate(u, ps, ds, tol_cert=cfg.get("tol_cert"),
                                     tol_cmp=cfg.get("tol_cmp"),
                                     witness_scale=cfg["witness_scale"], helicoid=hel,
                                     strict=False)
    d = cert.to_dict()
    d["parameters"]["H"] = H
    d["mesh"] = _mesh_summary(mesh, cfg)
    d["solver"] = _solver_summary(u)
    core = {"hopping", "catx", "taxi_trace", "taxi_below_m"}
    core_ok = all(e["passed"] for e in d["evidence"] if e["check"] in core)
    if cert.strength == "full":
        ok = cert.discontinuous
    else:
        ok = core_ok
    status = 0 if ok and core_ok and u.info.get("converged", False) else 1
    regs = subregions(ds, ps, helicoid=hel)
    P = ds.P
    span = 6 * (ps.a - ps.p) + 0.02
    plot = dict(u=u, P=P, regions={k: v for k, v in regs.items() if k in ("W", "inner", "R2")},
                title="ridge-meridian: u near the ridge",
                zoom=(P[0] - span, P[0] + span, P[1] - span, P[1] + 0.5 * span))
    return d, status, mesh, u, plot, timings


def _run_catenoid(cfg):
    a, m, h = cfg["a"], cfg["m"], cfg["h"]
    ds = annulus_domain(1.0, a)
    layer = BoundaryLayer(("inner",), first=cfg["layer_first"] * h, ratio=cfg["layer_ratio"],
                          tangential=h)
    t0 = time.perf_counter()
    mesh = generate_mesh(ds, h, 0.0, boundary_layer=layer)
    timings = {"mesh": time.perf_counter() - t0}
    t0 = time.perf_counter()
    phi = {"outer": 0.0, "inner": m}
    u = solve_dirichlet_relaxed(mesh, 0.0, phi, _solve_opts(cfg))
    timings["solve"] = time.perf_counter() - t0
    rp = catenoid_field(a)
    exact = rp.value(np.hypot(*mesh.vertices.T))
    err = float(np.max(np.abs(u.values - exact)))
    ca = contact_angle(u, "inner")
    tr = boundary_trace(u, "inner")
    ev = [
        {"check": "max_error", "kind": "validation", "value": err, "bound": cfg["tol_error"],
         "passed": err < cfg["tol_error"]},
        {"check": "contact_angle_mean", "kind": "validation", "value": ca.mean,
         "min": ca.min, "bound": cfg["tol_contact"], "passed": ca.mean >= cfg["tol_contact"]},
        {**tr.to_dict(), "passed": bool(np.all(tr.gap < 0))},
    ]
    lower = float(np.arccosh(a))
    d = _plain_certificate("validate-catenoid", {"a": a, "m": m}, ev,
                           bounds={"lower": lower, "upper": lower, "gap": 0.0,
                                   "note": "exact inner height arccosh(a)"})
    d["mesh"] = _mesh_summary(mesh, cfg)
    d["solver"] = _solver_summary(u)
    status = 0 if d["verdict"] == "validated" else 1
    plot = dict(u=u, P=ds.P, title="validate-catenoid")
    return d, status, mesh, u, plot, timings


def _run_hemisphere(cfg):
    rho, R = cfg["rho"], cfg["R"]
    if not R < rho:
        raise ConfigError("validate-hemisphere needs R < rho")
    ds = disk_domain(R)

    def exact(x):
        return -np.sqrt(rho ** 2 - np.sum(np.atleast_2d(x) ** 2, axis=1))

    H = 2.0 / rho
    mesh, u, timings = _mesh_and_solve(cfg, ds, H, exact)
    err = float(np.max(np.abs(u.values - exact(mesh.vertices))))
    ev = [{"check": "max_error", "kind": "validation", "value": err,
           "bound": cfg["tol_error"], "passed": err < cfg["tol_error"]}]
    d = _plain_certificate("validate-hemisphere", {"rho": rho, "R": R, "H": H}, ev)
    d["mesh"] = _mesh_summary(mesh, cfg)
    d["solver"] = _solver_summary(u)
    status = 0 if d["verdict"] == "validated" else 1
    plot = dict(u=u, title="validate-hemisphere")
    return d, status, mesh, u, plot, timings


def _run_ledger(cfg):
    con = cfg["construction"]
    seed = {"scenario": con, **cfg.seed()}
    ps = derive_parameters(seed)
    rep = validate_ledger(ps)
    ev = [{"check": e.pop("name"), "kind": "ledger", **e} for e in rep.to_dict()["entries"]]
    d = _plain_certificate("ledger-only", _params_dict(ps), ev,
                           verdict="ledger-pass" if rep.required_pass else "ledger-fail")
    d["ledger_all_pass"] = rep.all_pass
    return d, (0 if rep.required_pass else 1), None, None, None, {}


def mango_test_fields():
    """Two smooth fields ``g(x1, r)`` for the reduction identity."""
    return {
        "paraboloid": lambda x1, r: 0.3 * x1 ** 2 + 0.5 * r ** 2 + 0.1 * x1 * r,
        "wave": lambda x1, r: np.sin(x1) * np.cosh(0.5 * r) + 0.2 * r,
    }


def _run_mango(cfg):
    rng = np.random.default_rng(cfg["seed"])
    pts = np.column_stack([rng.uniform(-1.0, 1.0, cfg["samples"]),
                           rng.uniform(0.2, 1.5, cfg["samples"])])
    ev = []
    for name, f in mango_test_fields().items():
        err = mango_identity_check(f, cfg["n"], pts)
        ev.append({"check": f"identity:{name}", "kind": "identity", "value": err,
                   "bound": cfg["tol_identity"], "passed": err < cfg["tol_identity"]})
    d = _plain_certificate("mango-check", {"n": cfg["n"], "samples": cfg["samples"],
                                           "seed": cfg["seed"]}, ev)
    return d, (0 if d["verdict"] == "validated" else 1), None, None, None, {}


def _run_gset(cfg):
    sigma, p = cfg["sigma"], cfg["p"]
    alpha = math.pi / (math.pi + 2.0 * sigma)
    rep = gset_boundary(alpha, p, samples=cfg["samples"])
    tol = cfg["tol_angle"]
    ev = [
        {"check": "max_radius", "kind": "geometry", "value": rep.max_radius,
         "bound": p + 1e-12, "passed": bool(rep.max_radius <= p + 1e-12)},
        {"check": "cone_angle", "kind": "geometry", "value": rep.angle_error, "bound": tol,
         "opening_G": rep.opening_G, "opening_lens": rep.opening_lens,
         "passed": bool(rep.angle_error <= tol)},
        {"check": "smooth_sections", "kind": "geometry",
         "value": rep.max_section_curvature, "passed": bool(rep.smooth_ok)},
    ]
    d = _plain_certificate("gset-check", {"sigma": sigma, "p": p, "alpha": alpha}, ev)
    status = 0 if all(e["passed"] for e in ev[:2]) else 1
    th = np.linspace(-math.pi / (2 * alpha), math.pi / (2 * alpha), 801)
    section = gset_X(th, math.pi / 2, 1.0, alpha, p)[:, :2]
    circle = p * np.column_stack([np.cos(np.linspace(0, 2 * math.pi, 401)),
                                  np.sin(np.linspace(0, 2 * math.pi, 401))])
    plot = dict(u=None, P=(0.0, p), curves={"section x3 = 0": section, "|x| = p": circle},
                title="gset-check: boundary section")
    return d, status, None, None, plot, {}


def _params_dict(ps):
    return {k: v for k, v in ps.to_dict().items() if v is not None and k != "provenance"}


def _plain_certificate(scenario, parameters, evidence, bounds=None, verdict=None):
    if verdict is None:
        verdict = "validated" if all(e["passed"] for e in evidence) else "failed"
    b = {"lower": None, "upper": None, "gap": None}
    b.update(bounds or {})
    return {"scenario": scenario, "parameters": parameters, "bounds": b,
            "evidence": evidence, "verdict": verdict}


def _mesh_summary(mesh, cfg):
    return {"h": cfg["h"], "grading": cfg.get("grading", 0.0),
            "n_vertices": int(len(mesh.vertices)), "n_triangles": int(len(mesh.triangles)),
            "min_angle_deg": float(mesh.min_angle())}


def _solver_summary(u):
    info = u.info
    stages = info.get("stages", [])
    return {"converged": bool(info.get("converged", False)),
            "stages": len(stages),
            "iterations": int(sum(s.get("iterations", 0) for s in stages))}


_DISPATCH = {
    "scherk2d": _run_scherk2d,
    "ridge-meridian": _run_meridian,
    "validate-catenoid": _run_catenoid,
    "validate-hemisphere": _run_hemisphere,
    "ledger-only": _run_ledger,
    "mango-check": _run_mango,
    "gset-check": _run_gset,
}


def run(cfg: ScenarioConfig, out=None):
    """Run one scenario and write its artifacts.

    Parameters
    ----------
    cfg : ScenarioConfig
    out : str or Path, optional
        Output directory; overrides ``$PMCORNER_OUT`` and ``out_dir``.

    Returns
    -------
    RunResult
        ``status`` is 0 exactly when every check of the scenario passed.
    """
    out_dir = resolve_out_dir(cfg, out)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    cert, status, mesh, u, plot, timings = _DISPATCH[cfg.scenario](cfg)
    timings["total"] = time.perf_counter() - t0
    cert = {**cert, "config": {k: cfg.values[k] for k in sorted(cfg.values)},
            "provenance": {k: cfg.provenance[k] for k in sorted(cfg.provenance)}}
    files = {}
    if mesh is not None:
        files["mesh"] = out_dir / "mesh.txt"
        write_mesh(mesh, files["mesh"])
    if u is not None:
        files["solution"] = out_dir / "solution.csv"
        u.to_csv(files["solution"])
        files["log"] = out_dir / "solver_log.jsonl"
        u.write_log(files["log"])
    files["certificate"] = out_dir / "certificate.json"
    files["certificate"].write_text(dumps_json(cert), encoding="utf-8")
    if plot is not None:
        files["plot"] = out_dir / "contour.svg"
        contour_svg(files["plot"], **plot)
    return RunResult(status, out_dir, files, cert, timings)


def run_file(path, out=None, *, mesh_h=None, overrides=None):
    """Load a config file, apply CLI overrides and :func:`run` it."""
    cfg = load_config(path)
    extra = dict(overrides or {})
    if mesh_h is not None:
        extra["h"] = mesh_h
    if extra:
        cfg = cfg.with_overrides(extra)
    return run(cfg, out)
