"""Construction parameters and the inequality ledger.

Two scenarios share one :class:`ParameterSet`:

``scherk2d``
    Planar minimal-surface example.  Uses ``sigma, eps, tau, r1, a, m``.
``meridian``
    Rotationally symmetric example in dimension ``n``.  Uses every other
    field; ``r1`` here is the scaled inner nodoid neck.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import InfeasibleSeed
from .surfaces import (
    delaunay_profile,
    radial_slope_bound,
    scherk_radial_limit,
)

SCENARIOS = ("scherk2d", "meridian")


@dataclass(frozen=True)
class ParameterSet:
    """All scalar construction parameters with the provenance of each value."""

    scenario: str
    lam: float | None = None
    n: int | None = None
    p: float | None = None
    tau: float | None = None
    sigma: float | None = None
    a: float | None = None
    b: float | None = None
    c: float | None = None
    m0: float | None = None
    r1: float | None = None
    r2: float | None = None
    r3: float | None = None
    r4: float | None = None
    beta0: float | None = None
    beta: float | None = None
    m: float | None = None
    eps: float | None = None
    theta_u: float | None = None
    s1: float | None = None
    s2: float | None = None
    s3: float | None = None
    provenance: dict = field(default_factory=dict, compare=False)

    def replace(self, **kw):
        return replace(self, **kw)

    def to_dict(self):
        d = asdict(self)
        d["provenance"] = dict(self.provenance)
        return d

    @property
    def H_nodoid(self):
        """``div(T g1)``: the nodoid has mean curvature ``m0``, so the trace is ``2 m0``."""
        return 2.0 * self.m0


# ----------------------------------------------------------------------------
# Barrier profiles shared by the derivation, the ledger and the certificate
# ----------------------------------------------------------------------------

def nodoid_g1(ps):
    """Scaled nodoid profile ``g1`` on ``[r1, r2]`` pinned to zero at ``r2``."""
    return delaunay_profile(ps.H_nodoid, "vertical-at-inner", r_in=ps.r1, r_out=ps.r2,
                            pin_radius=ps.r2)


def unduloid_k2(lam, p):
    """Unduloid ``k2`` on ``[p, 2/lam - p]`` with ``div(T k2) = -lam``, zero at the waist."""
    return delaunay_profile(-lam, "vertical-at-both", r_in=p)


def unduloid_kplus(lam, r4, tau):
    """Unduloid ``k+`` centered at ``(-tau, 0)`` on ``[r4, 2/lam - r4]``."""
    return delaunay_profile(-lam, "vertical-at-both", r_in=r4, center=(-tau, 0.0))


def k2_drop(lam, p, a):
    """``k2(0, p) - k2(0, a)``: the upper bound on ``p < |x| < a``."""
    k2 = unduloid_k2(lam, p)
    return float(k2.value(p) - k2.value(a))


def k4_at_corner(ps):
    """``k4`` at the lens vertex ``(0, p)``, where ``k+`` attains its supremum."""
    kp = unduloid_kplus(ps.lam, ps.r4, ps.tau)
    return float(kp.value(ps.r4)) + k2_drop(ps.lam, ps.p, ps.a)


def early_terms(ps):
    """The three quantities that ``m`` must exceed in the meridian scenario."""
    g1 = nodoid_g1(ps)
    k2 = unduloid_k2(ps.lam, ps.p)
    kp = unduloid_kplus(ps.lam, ps.r4, ps.tau)
    return {
        "g1_sup": float(g1.value(ps.r1)),
        "torus_bound": 1.0 / (2.0 * ps.m0),
        "kplus_sup_plus_k2_span": float(kp.value(ps.r4))
        + float(k2.value(ps.p) - k2.value(2.0 / ps.lam - ps.p)),
    }


def b_upper(m0, p):
    return (1.0 + 2.0 * m0 * p - math.sqrt(1.0 + 4.0 * m0 * m0 * p * p)) / (4.0 * m0)


def tau_bounds(ps):
    """The three upper bounds on ``tau``: nodoid clearance, unduloid cover, torus cover."""
    lam, p, b = ps.lam, ps.p, ps.b
    return {
        "shockers_nodoid": p * ps.r1 / math.sqrt(ps.r2 ** 2 - ps.r1 ** 2),
        "shockers_unduloid": 2.0 * (1.0 - p * lam) / (lam * (2.0 - p * lam)),
        "shockers_torus": b * (4.0 * p - b) / (4.0 * (2.0 * p - b)),
    }


def scherk_lower(sigma):
    return float(scherk_radial_limit(sigma))


def scherk2d_m_bound(ps, sup_h=None):
    """``max{r1 arccosh((2 + |(tau, eps)|)/r1), sup h on C & dE}``."""
    cat = ps.r1 * math.acosh((2.0 + math.hypot(ps.tau, ps.eps)) / ps.r1)
    if sup_h is None:
        from .domain import scherk_sup_on_boundary
        sup_h = scherk_sup_on_boundary(ps)
    return {"catenoid_term": cat, "scherk_sup": sup_h}


def cat2_witness(ps, theta_u=None):
    """Margin of ``B((p - r2)/p u, r1) inside M``; positive when contained."""
    th = ps.theta_u if theta_u is None else theta_u
    u = ps.p * np.array([math.cos(th), math.sin(th)])
    ctr = (ps.p - ps.r2) / ps.p * u
    d1 = ps.r4 - math.hypot(ctr[0] - ps.tau, ctr[1]) - ps.r1
    d2 = ps.r4 - math.hypot(ctr[0] + ps.tau, ctr[1]) - ps.r1
    return min(d1, d2)


# ----------------------------------------------------------------------------
# Derivation
# ----------------------------------------------------------------------------

def _require(cond, name, detail):
    if not cond:
        raise InfeasibleSeed(name, detail)


def derive_parameters(seed):
    """Derive a full :class:`ParameterSet` from a seed dictionary.

    Parameters
    ----------
    seed : dict
        ``scenario`` selects the construction.  For ``scherk2d``: ``sigma``
        (or ``tau``), ``eps``, optional ``a`` and ``m``.  For ``meridian``:
        ``lambda``, ``n``, ``p``, optional ``tau``/``sigma``, ``s1``, ``s2``
        (or ``s2_frac``), ``a``, ``m`` and the safety fractions ``b_frac``,
        ``tau_frac``, ``beta_frac``, ``a_frac``, ``m_margin``.

    Raises
    ------
    InfeasibleSeed
        Naming the first violated inequality.
    """
    scenario = seed.get("scenario", "meridian")
    if scenario == "scherk2d":
        return _derive_scherk2d(seed)
    if scenario == "meridian":
        return _derive_meridian(seed)
    raise InfeasibleSeed("scenario", f"unknown scenario {scenario!r}")


def _derive_scherk2d(seed):
    prov = {}
    eps = float(seed.get("eps", 0.25))
    _require(0.0 < eps < 0.5, "eps_range", f"eps={eps} not in (0, 0.5)")
    if seed.get("sigma") is not None:
        sigma = float(seed["sigma"])
        _require(-0.5 * math.pi < sigma < -0.25 * math.pi, "sigma_range",
                 f"sigma={sigma} not in (-pi/2, -pi/4)")
        tau = (1.0 + eps) * math.tan(-sigma)
        prov["tau"] = "tau = (1+eps) tan(-sigma)"
        prov["sigma"] = "seed"
    elif seed.get("tau") is not None:
        tau = float(seed["tau"])
        sigma = -math.atan(tau / (1.0 + eps))
        _require(-0.5 * math.pi < sigma < -0.25 * math.pi, "sigma_range",
                 f"sigma={sigma} from tau={tau} not in (-pi/2, -pi/4)")
        prov["tau"] = "seed"
        prov["sigma"] = "sigma = -arctan(tau/(1+eps))"
    else:
        raise InfeasibleSeed("sigma_range", "seed needs sigma or tau")
    r1 = math.hypot(tau, 1.0 + eps)
    prov["r1"] = "r1 = sqrt(tau^2 + (1+eps)^2)"
    lower = scherk_lower(sigma)
    a_max = min(2.0, math.cosh(lower))
    _require(a_max > 1.0, "gap_a", "no a > 1 with arccosh(a) < (2/pi) ln tan(-sigma)")
    if seed.get("a") is not None:
        a = float(seed["a"])
        prov["a"] = "seed"
    else:
        a = 1.0 + float(seed.get("a_frac", 0.5)) * (a_max - 1.0)
        prov["a"] = "midpoint of (1, min(2, cosh(lower)))"
    ps = ParameterSet("scherk2d", sigma=sigma, eps=eps, tau=tau, r1=r1, a=a,
                      provenance=prov)
    if seed.get("m") is not None:
        m = float(seed["m"])
        prov["m"] = "seed"
    else:
        terms = scherk2d_m_bound(ps)
        m = float(seed.get("m_margin", 1.1)) * max(terms.values())
        prov["m"] = "m_margin * max{catenoid term, sup h on C & dE}"
    return ps.replace(m=m, provenance=prov)


def _derive_meridian(seed):
    prov = {}
    lam = float(seed.get("lambda", 1.0))
    n = int(seed.get("n", 3))
    p = float(seed.get("p", 0.5))
    _require(lam > 0, "lambda_positive", f"lambda={lam}")
    _require(n >= 2, "dimension", f"n={n} < 2")
    _require(0.0 < p < 1.0 / lam, "p_range", f"p={p} not in (0, 1/lambda)")

    # unit nodoid: mean curvature 1, so div = 2 and s3 = sqrt(s1 + s1^2)
    s1 = float(seed.get("s1", 0.5))
    s3 = math.sqrt(s1 + s1 * s1)
    if seed.get("s2") is not None:
        s2 = float(seed["s2"])
        prov["s2"] = "seed"
    else:
        s2 = s1 + float(seed.get("s2_frac", 0.5)) * (s3 - s1)
        prov["s2"] = "s1 + s2_frac (s3 - s1)"
    _require(s1 < s2 < s3, "nodoid_radii", f"need s1 < s2 < s3, got {s1}, {s2}, {s3}")

    m0 = lam / 2.0 + (n - 2) / (p / 3.0)
    prov["m0"] = "m0 = lambda/2 + (n-2)/(p/3)"
    if s2 / m0 >= p / 3.0:
        m0 = 3.0 * s2 / p * 1.01
        prov["m0"] = "increased so that r2 = s2/m0 < p/3"
    r1, r2, r3 = s1 / m0, s2 / m0, s3 / m0
    for k in ("r1", "r2", "r3"):
        prov[k] = f"{k} = s{k[1]}/m0"

    g1 = delaunay_profile(2.0 * m0, "vertical-at-inner", r_in=r1, r_out=r2, pin_radius=r2)
    beta0 = radial_slope_bound(g1)
    prov["beta0"] = "inf of -g1'(r) over (r1, r2)"
    if seed.get("beta") is not None:
        beta = float(seed["beta"])
        prov["beta"] = "seed"
    else:
        beta = float(seed.get("beta_frac", 0.5)) * beta0
        prov["beta"] = "beta_frac * beta0"
    _require(0 < beta < beta0, "beta_range", f"beta={beta} not in (0, {beta0})")

    bmax = b_upper(m0, p)
    if seed.get("b") is not None:
        b = float(seed["b"])
        prov["b"] = "seed"
    else:
        b = float(seed.get("b_frac", 0.9)) * bmax
        prov["b"] = "b_frac * (1/(4 m0))(1 + 2 m0 p - sqrt(1 + 4 m0^2 p^2))"
    _require(0 < b < bmax, "b_bound", f"b={b} not in (0, {bmax})")

    partial = ParameterSet("meridian", lam=lam, n=n, p=p, b=b, m0=m0, r1=r1, r2=r2, r3=r3)
    tb = tau_bounds(partial)
    tmax = min(tb.values())
    if seed.get("tau") is not None or seed.get("sigma") is not None:
        if seed.get("tau") is not None:
            tau = float(seed["tau"])
        else:
            tau = -p * math.tan(float(seed["sigma"]))
        prov["tau"] = "seed"
        _require(tau > 0, "sigma_negative", f"tau={tau} gives sigma >= 0")
        for name, bound in tb.items():
            _require(tau < bound, name, f"tau={tau} >= {bound}")
    else:
        tau = float(seed.get("tau_frac", 0.9)) * tmax
        prov["tau"] = "tau_frac * min(three tau bounds)"
    sigma = -math.atan(tau / p)
    prov["sigma"] = "sigma = -arctan(tau/p)"
    r4 = math.hypot(p, tau)
    prov["r4"] = "r4 = sqrt(p^2 + tau^2)"

    a_hi = min(p + b, 1.0 / lam)
    _require(a_hi > p, "assumption_a", f"min(p+b, 1/lambda)={a_hi} <= p")
    target = -beta * sigma / 4.0
    if seed.get("a") is not None:
        a = float(seed["a"])
        prov["a"] = "seed"
    else:
        # k2 drop is increasing in a; bisect for the gap-admissible end
        lo, hi = p, a_hi
        if k2_drop(lam, p, hi) >= target:
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if k2_drop(lam, p, mid) < target:
                    lo = mid
                else:
                    hi = mid
            a_gap = lo
        else:
            a_gap = hi
        a = p + float(seed.get("a_frac", 0.5)) * (a_gap - p)
        prov["a"] = "midpoint of (p, min(p+b, 1/lambda, a_gap))"
        _require(a > p, "gap_condition", "gap-admissible interval for a is empty")
    half = 0.5 * (a - p)
    _require(b > half, "assumption_a", f"a={a} >= p + b")
    c = math.sqrt(b * b - half * half)
    prov["c"] = "c = sqrt(b^2 - ((a-p)/2)^2)"

    ps = ParameterSet("meridian", lam=lam, n=n, p=p, tau=tau, sigma=sigma, a=a, b=b,
                      c=c, m0=m0, r1=r1, r2=r2, r3=r3, r4=r4, beta0=beta0, beta=beta,
                      s1=s1, s2=s2, s3=s3, provenance=prov)
    terms = early_terms(ps)
    if seed.get("m") is not None:
        m = float(seed["m"])
        prov["m"] = "seed"
    else:
        m = float(seed.get("m_margin", 1.1)) * max(terms.values())
        prov["m"] = "m_margin * max(early terms)"
    ps = ps.replace(m=m)

    if seed.get("theta_u") is not None:
        theta_u = float(seed["theta_u"])
        prov["theta_u"] = "seed"
    else:
        theta_u = _choose_theta_u(ps, float(seed.get("u_frac", 0.5)))
        prov["theta_u"] = "|u - w| = u_frac * min(b1, Cat2 witness radius)"
    return ps.replace(theta_u=theta_u, provenance=prov)


def _choose_theta_u(ps, u_frac):
    """Pick ``u`` on ``|x| = p`` near ``w``: inside the helicoid reach and Cat2-admissible."""
    from .errors import InfeasibleHelicoid
    from .surfaces import helicoid_build

    # largest chord |u - w| for which the translated nodoid disk stays in M
    lo, hi = 0.0, ps.p
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        th = 0.5 * math.pi - 2.0 * math.asin(mid / (2.0 * ps.p))
        if cat2_witness(ps, th) > 0:
            lo = mid
        else:
            hi = mid
    reach = lo
    try:
        hel = helicoid_build(ps)
        reach = min(reach, hel.rho_b)
    except InfeasibleHelicoid:
        pass
    _require(reach > 0, "cat2_witness", "no u near w keeps B((p-r2)/p u, r1) inside M")
    chord = u_frac * reach
    return 0.5 * math.pi - 2.0 * math.asin(chord / (2.0 * ps.p))


# ----------------------------------------------------------------------------
# Ledger
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class LedgerEntry:
    """One inequality of the construction.

    ``required`` is false for hypotheses that neither comparison step of the
    discontinuity argument uses; they are reported but do not gate a verdict.
    """

    name: str
    passed: bool
    lhs: float
    rhs: float
    relation: str
    required: bool = True

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "lhs": self.lhs,
                "rhs": self.rhs, "relation": self.relation, "required": self.required}


@dataclass(frozen=True)
class LedgerReport:
    scenario: str
    entries: tuple

    @property
    def all_pass(self):
        return all(e.passed for e in self.entries)

    @property
    def required_pass(self):
        return all(e.passed for e in self.entries if e.required)

    def failures(self):
        return [e for e in self.entries if not e.passed]

    def __getitem__(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def names(self):
        return [e.name for e in self.entries]

    def to_dict(self):
        return {"scenario": self.scenario, "all_pass": self.all_pass,
                "required_pass": self.required_pass,
                "entries": [e.to_dict() for e in self.entries]}


def _lt(name, lhs, rhs):
    lhs, rhs = float(lhs), float(rhs)
    return LedgerEntry(name, bool(lhs < rhs), lhs, rhs, "<")


def _close(name, lhs, rhs, tol=1e-12):
    lhs, rhs = float(lhs), float(rhs)
    return LedgerEntry(name, bool(abs(lhs - rhs) <= tol * (1 + abs(rhs))), lhs, rhs, "==")


def validate_ledger(ps):
    """Check every construction inequality; failures are entries, never exceptions."""
    if ps.scenario == "scherk2d":
        return _ledger_scherk2d(ps)
    return _ledger_meridian(ps)


def _ledger_scherk2d(ps):
    e = []
    e.append(_lt("sigma_lower", -0.5 * math.pi, ps.sigma))
    e.append(_lt("sigma_upper", ps.sigma, -0.25 * math.pi))
    e.append(_lt("eps_positive", 0.0, ps.eps))
    e.append(_lt("eps_upper", ps.eps, 0.5))
    e.append(_close("tau_relation", ps.tau, (1 + ps.eps) * math.tan(-ps.sigma)))
    e.append(_close("r1_relation", ps.r1, math.hypot(ps.tau, 1 + ps.eps)))
    e.append(_lt("a_lower", 1.0, ps.a))
    e.append(_lt("a_upper", ps.a, 2.0))
    if -0.5 * math.pi < ps.sigma < 0:
        lower = scherk_lower(ps.sigma)
        e.append(_lt("gap_a", math.acosh(max(ps.a, 1.0)), lower))
    else:
        e.append(LedgerEntry("gap_a", False, float("nan"), float("nan"), "<"))
    try:
        terms = scherk2d_m_bound(ps)
        cat = _lt("m_catenoid", terms["catenoid_term"], ps.m)
        e.append(LedgerEntry(cat.name, cat.passed, cat.lhs, cat.rhs, cat.relation, False))
        e.append(_lt("m_scherk_sup", terms["scherk_sup"], ps.m))
    except Exception:
        e.append(LedgerEntry("m_catenoid", False, float("nan"), ps.m, "<", False))
        e.append(LedgerEntry("m_scherk_sup", False, float("nan"), ps.m, "<"))
    return LedgerReport("scherk2d", tuple(e))


def _ledger_meridian(ps):
    e = []
    sigma = ps.sigma if ps.sigma is not None else -math.atan(ps.tau / ps.p)
    e.append(_lt("sigma_negative", sigma, 0.0))
    e.append(_close("sigma_relation", sigma, -math.atan(ps.tau / ps.p)))
    try:
        for name, bound in tau_bounds(ps).items():
            e.append(_lt(name, ps.tau, bound))
    except (ValueError, ZeroDivisionError):
        for name in ("shockers_nodoid", "shockers_unduloid", "shockers_torus"):
            e.append(LedgerEntry(name, False, ps.tau, float("nan"), "<"))
    e.append(_lt("b_positive", 0.0, ps.b))
    e.append(_lt("b_bound", ps.b, b_upper(ps.m0, ps.p)))
    e.append(_lt("assumption_a_lower", ps.p, ps.a))
    e.append(_lt("assumption_a", ps.a, min(ps.p + ps.b, 1.0 / ps.lam)))
    half = 0.5 * (ps.a - ps.p)
    if ps.c is not None and ps.b >= abs(half):
        e.append(_close("c_relation", ps.c, math.sqrt(ps.b ** 2 - half ** 2)))
    else:
        e.append(LedgerEntry("c_relation", False, float(ps.c or float("nan")),
                             float("nan"), "=="))
    e.append(_lt("cos_sigma", ps.r1 / ps.r2, math.cos(sigma)))
    e.append(_lt("radii_order_12", ps.r1, ps.r2))
    e.append(_lt("radii_order_23", ps.r2, ps.r3))
    e.append(_lt("r2_below_p_third", ps.r2, ps.p / 3.0))
    e.append(_lt("book_volume", ps.lam * ps.a, ps.n))
    e.append(LedgerEntry("star_supersolution",
                         bool(2 * ps.m0 >= ps.lam + 2 * (ps.n - 2) / (ps.p / 3) - 1e-12),
                         2 * ps.m0, ps.lam + 2 * (ps.n - 2) / (ps.p / 3), ">="))
    if ps.beta0 is not None and ps.beta is not None:
        e.append(_lt("beta_positive", 0.0, ps.beta))
        e.append(_lt("beta_range", ps.beta, ps.beta0))
    ok_geom = sigma < 0 and ps.p < ps.a < 2.0 / ps.lam - ps.p
    if ok_geom and ps.m is not None:
        try:
            terms = early_terms(ps)
            e.append(_lt("early_m", max(terms.values()), ps.m))
        except Exception:
            e.append(LedgerEntry("early_m", False, float("nan"), ps.m, "<"))
    else:
        e.append(LedgerEntry("early_m", False, float("nan"), float(ps.m or float("nan")), "<"))
    if ok_geom and ps.beta is not None:
        e.append(_lt("gap_condition", k2_drop(ps.lam, ps.p, ps.a), -ps.beta * sigma / 4.0))
    else:
        e.append(LedgerEntry("gap_condition", False, float("nan"), float("nan"), "<"))
    if ps.theta_u is not None and ps.tau:
        e.append(_lt("cat2_witness", 0.0, cat2_witness(ps)))
    return LedgerReport("meridian", tuple(e))
