"""Scenario configuration files.

A config is UTF-8 text with one ``key = value`` per line; ``#`` starts a
comment.  Numeric values may be arithmetic in ``pi`` (``sigma = -3*pi/8``).
Every key has a type and a default that depends on the scenario; keys that
the scenario does not use are rejected, as are unknown keys.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field

from .errors import ConfigError

SCENARIOS = ("scherk2d", "ridge-meridian", "validate-catenoid", "validate-hemisphere",
             "ledger-only", "mango-check", "gset-check")

# key -> (type, help)
KEYS = {
    "scenario": (str, "scenario name"),
    # construction seeds
    "sigma": (float, "corner half-opening parameter (negative)"),
    "tau": (float, "lens offset"),
    "eps": (float, "planar construction parameter in (0, 0.5)"),
    "a": (float, "outer radius"),
    "a_frac": (float, "position of a inside its admissible interval"),
    "m": (float, "Dirichlet plateau height"),
    "m_margin": (float, "factor above the lower bound for m"),
    "lambda": (float, "mean-curvature bound"),
    "n": (int, "ambient dimension"),
    "p": (float, "corner radius"),
    "s1": (float, "unit-nodoid inner neck"),
    "s2": (float, "unit-nodoid outer radius of the barrier annulus"),
    "s2_frac": (float, "position of s2 in (s1, s3)"),
    "b": (float, "torus tube radius"),
    "b_frac": (float, "fraction of the upper bound on b"),
    "tau_frac": (float, "fraction of the upper bound on tau"),
    "beta": (float, "helicoid pitch parameter"),
    "beta_frac": (float, "fraction of beta0"),
    "theta_u": (float, "ray angle for the translated nodoid"),
    "u_frac": (float, "fraction of the admissible chord |u - w|"),
    "H": (float, "constant prescribed curvature (|H| <= lambda)"),
    "construction": (str, "ledger-only: scherk2d or meridian"),
    "rho": (float, "hemisphere radius"),
    "R": (float, "disk radius"),
    # mesh
    "h": (float, "target edge length"),
    "grading": (float, "grading exponent toward P"),
    "grading_radius": (float, "grading radius as a fraction of the diameter"),
    "h_min_frac": (float, "smallest edge length as a fraction of h"),
    "layer_first": (float, "first boundary-layer offset as a fraction of h"),
    "layer_ratio": (float, "growth ratio of boundary-layer offsets"),
    "coarse_h": (float, "edge length of the warm-start mesh (0 disables)"),
    "corner_patch": (float, "radius of the polar patch at P as a fraction of a - p "
                            "(0 disables)"),
    # solver
    "newton_tol": (float, "Newton stopping tolerance"),
    "max_iters": (int, "Newton iterations per continuation stage"),
    # tolerances
    "tol_cert": (float, "certificate slack (default 15% of the gap)"),
    "tol_cmp": (float, "uniform comparison allowance (default 5 h_loc |grad b|)"),
    "tol_error": (float, "max-norm error threshold of validation runs"),
    "tol_contact": (float, "lower bound for the mean of Tu.nu on detached arcs"),
    "tol_identity": (float, "relative error threshold of the reduction identity"),
    "tol_angle": (float, "corner-cone angle tolerance"),
    "witness_scale": (float, "near-P witness radius gating the verdict (fraction of diam)"),
    # misc
    "samples": (int, "number of random sample points"),
    "seed": (int, "random seed"),
    "out_dir": (str, "output directory"),
}

COMMON = {"scenario", "out_dir"}
MESHED = {"h", "grading", "grading_radius", "h_min_frac", "coarse_h", "newton_tol", "max_iters"}

SCHEMA = {
    "scherk2d": COMMON | MESHED | {"sigma", "tau", "eps", "a", "a_frac", "m", "m_margin",
                                   "layer_first", "layer_ratio", "tol_cert", "tol_cmp",
                                   "witness_scale"},
    "ridge-meridian": COMMON | MESHED | {"lambda", "n", "p", "s1", "s2", "s2_frac", "b",
                                         "b_frac", "tau", "sigma", "tau_frac", "a", "a_frac",
                                         "m", "m_margin", "beta", "beta_frac", "theta_u",
                                         "u_frac", "H", "tol_cert", "tol_cmp",
                                         "witness_scale", "corner_patch"},
    "validate-catenoid": COMMON | MESHED | {"a", "m", "layer_first", "layer_ratio",
                                            "tol_error", "tol_contact"},
    "validate-hemisphere": COMMON | MESHED | {"rho", "R", "tol_error"},
    "ledger-only": COMMON | {"construction", "lambda", "n", "p", "s1", "s2", "s2_frac", "b",
                             "b_frac", "tau", "sigma", "tau_frac", "a", "a_frac", "m",
                             "m_margin", "beta", "beta_frac", "theta_u", "u_frac", "eps"},
    "mango-check": COMMON | {"n", "samples", "seed", "tol_identity"},
    "gset-check": COMMON | {"sigma", "p", "samples", "tol_angle"},
}

BASE_DEFAULTS = {
    "h": 0.01, "grading": 0.0, "grading_radius": 0.02, "h_min_frac": 0.01, "coarse_h": 0.0,
    "newton_tol": 1e-7, "max_iters": 200, "witness_scale": 0.02,
}

DEFAULTS = {
    "scherk2d": {"sigma": -3 * math.pi / 8, "eps": 0.25, "a": 1.1, "m": 2.5, "h": 0.005,
                 "grading": 1.0, "layer_first": 0.02, "layer_ratio": 1.3},
    "ridge-meridian": {"lambda": 1.0, "n": 3, "p": 0.5, "s1": 0.5, "s2": 0.5005, "H": 0.0,
                       "h": 0.005, "grading": 1.0, "corner_patch": 0.6},
    "validate-catenoid": {"a": 1.1, "m": 2.5, "h": 0.005, "layer_first": 0.02,
                          "layer_ratio": 1.3, "tol_error": 2e-2, "tol_contact": 0.9},
    "validate-hemisphere": {"rho": 2.0, "R": 1.0, "h": 0.01, "tol_error": 2e-2},
    "ledger-only": {"construction": "meridian", "lambda": 1.0, "n": 3, "p": 0.5},
    "mango-check": {"n": 3, "samples": 50, "seed": 0, "tol_identity": 1e-6},
    "gset-check": {"sigma": -0.5, "p": 0.5, "samples": 200, "tol_angle": 1e-6},
}

POSITIVE = {"h", "eps", "a", "m", "lambda", "p", "s1", "s2", "b", "beta", "rho", "R",
            "layer_first", "layer_ratio", "newton_tol", "max_iters", "samples",
            "witness_scale", "grading_radius", "h_min_frac"}
TOLERANCES = {k for k in KEYS if k.startswith("tol_")}

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow, ast.USub: operator.neg,
        ast.UAdd: operator.pos}
_NAMES = {"pi": math.pi, "e": math.e}
_FUNCS = {"sqrt": math.sqrt, "atan": math.atan, "tan": math.tan, "log": math.log}


def _eval_number(text):
    """Evaluate a numeric literal or an arithmetic expression in ``pi``."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"unsupported expression {ast.dump(node)}")
    return ev(ast.parse(text.strip(), mode="eval"))


def _convert(key, raw, line):
    typ = KEYS[key][0]
    if typ is str:
        return raw.strip()
    try:
        val = _eval_number(raw)
    except (ValueError, SyntaxError, ZeroDivisionError, TypeError, OverflowError) as exc:
        raise ConfigError(f"{key}: cannot read {raw.strip()!r} as a number ({exc})", line)
    if typ is int:
        if float(val) != int(val):
            raise ConfigError(f"{key} must be an integer, got {raw.strip()!r}", line)
        return int(val)
    val = float(val)
    if not math.isfinite(val):
        raise ConfigError(f"{key} must be finite", line)
    return val


@dataclass(frozen=True)
class ScenarioConfig:
    """Parsed scenario configuration.

    ``values`` holds every key the scenario uses (defaults filled in);
    ``provenance`` maps each key to ``"explicit"`` or ``"default"``.
    """

    scenario: str
    values: dict
    provenance: dict
    lines: dict = field(default_factory=dict, compare=False)

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        v = self.values.get(key)
        return default if v is None else v

    @property
    def explicit(self):
        return {k: v for k, v in self.values.items() if self.provenance.get(k) == "explicit"}

    def seed(self):
        """Seed dictionary for :func:`~pmcorner.params.derive_parameters`."""
        skip = {"scenario", "out_dir", "construction", "H"} | MESHED | TOLERANCES | {
            "witness_scale", "layer_first", "layer_ratio", "rho", "R", "samples", "seed",
            "corner_patch"}
        return {k: v for k, v in self.values.items() if k not in skip and v is not None}

    def with_overrides(self, overrides):
        """New config with ``overrides`` (key -> value or text) marked explicit."""
        text = serialize_config(self)
        for k, v in overrides.items():
            text += f"{k} = {v if isinstance(v, str) else repr(v)}\n"
        return parse_config(text, allow_repeat=True)


def parse_config(text, *, allow_repeat=False):
    """Parse config text into a :class:`ScenarioConfig`.

    Raises
    ------
    ConfigError
        With the 1-based line number for syntax errors, unknown keys,
        repeated keys, bad values, keys foreign to the scenario and a
        missing ``scenario``.
    """
    raw = {}
    where = {}
    for i, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", i)
        key, val = (s.strip() for s in body.split("=", 1))
        if not key:
            raise ConfigError("empty key", i)
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", i)
        if key in raw and not allow_repeat:
            raise ConfigError(f"key {key!r} repeated (first on line {where[key]})", i)
        if not val:
            raise ConfigError(f"missing value for {key!r}", i)
        raw[key] = _convert(key, val, i)
        where[key] = i

    if "scenario" not in raw:
        raise ConfigError("missing required key 'scenario'")
    scen = raw["scenario"]
    if scen not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scen!r}; choose from {', '.join(SCENARIOS)}",
                          where["scenario"])
    allowed = SCHEMA[scen]
    for k in raw:
        if k not in allowed:
            raise ConfigError(f"key {k!r} does not apply to scenario {scen!r}", where[k])

    for k, v in raw.items():
        ln = where[k]
        if k == "sigma" and not v < 0:
            raise ConfigError(f"sigma must be negative, got {v:g}", ln)
        if (k in POSITIVE or k in TOLERANCES) and not v > 0:
            raise ConfigError(f"{k} must be positive, got {v:g}", ln)
        if k == "n" and v < 2:
            raise ConfigError(f"n must be at least 2, got {v}", ln)
        if k == "construction" and v not in ("meridian", "scherk2d"):
            raise ConfigError("construction must be 'meridian' or 'scherk2d'", ln)
        if k in ("grading", "coarse_h") and v < 0:
            raise ConfigError(f"{k} must be non-negative", ln)
        if k == "corner_patch" and not 0 <= v < 1:
            raise ConfigError("corner_patch must lie in [0, 1)", ln)
        if k.endswith("_frac") and k != "h_min_frac" and not 0 < v < 1:
            raise ConfigError(f"{k} must lie in (0, 1)", ln)

    defaults = {k: v for k, v in BASE_DEFAULTS.items() if k in allowed}
    defaults.update(DEFAULTS.get(scen, {}))
    if scen == "ledger-only" and raw.get("construction") == "scherk2d":
        defaults = {"construction": "scherk2d", "sigma": -3 * math.pi / 8, "eps": 0.25}
    # explicit sigma or tau replaces the default of the other
    if "tau" in raw:
        defaults.pop("sigma", None)
    values = {"scenario": scen}
    prov = {"scenario": "explicit"}
    for k in sorted(allowed - {"scenario"}):
        if k in raw:
            values[k] = raw[k]
            prov[k] = "explicit"
        elif k in defaults:
            values[k] = defaults[k]
            prov[k] = "default"
    # the relative-frac seeds conflict with explicit values
    for frac, base in (("s2_frac", "s2"), ("a_frac", "a"), ("m_margin", "m"),
                       ("beta_frac", "beta"), ("b_frac", "b"), ("u_frac", "theta_u")):
        if frac in raw and base in raw:
            raise ConfigError(f"give {base!r} or {frac!r}, not both", where[frac])
        if frac in raw and prov.get(base) == "default":
            values.pop(base)
            prov.pop(base)
    if "H" in values and "lambda" in values and abs(values["H"]) > values["lambda"]:
        raise ConfigError(f"|H| = {abs(values['H']):g} exceeds lambda = {values['lambda']:g}",
                          where.get("H", where.get("lambda")))
    return ScenarioConfig(scen, values, prov, dict(where))


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_config(cfg):
    """Text form of the explicit entries; :func:`parse_config` inverts it."""
    out = [f"scenario = {cfg.scenario}"]
    for k in sorted(cfg.values):
        if k != "scenario" and cfg.provenance.get(k) == "explicit":
            out.append(f"{k} = {_fmt(cfg.values[k])}")
    return "\n".join(out) + "\n"


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
