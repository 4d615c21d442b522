"""Command line interface: ``pmcorner run <config-file> [options]``."""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, PMCError
from .runner import run_file


def _parse_override(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    k, v = text.split("=", 1)
    return k.strip(), v.strip()


def build_parser():
    ap = argparse.ArgumentParser(prog="pmcorner",
                                 description="Prescribed mean curvature corner experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one scenario config")
    r.add_argument("config", help="scenario config file (key = value lines)")
    r.add_argument("--out", help="output directory (overrides $PMCORNER_OUT and out_dir)")
    r.add_argument("--mesh-h", type=float, help="target mesh edge length")
    r.add_argument("--seed-override", action="append", default=[], type=_parse_override,
                   metavar="KEY=VAL", help="override a config key; repeatable")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        res = run_file(args.config, args.out, mesh_h=args.mesh_h,
                       overrides=dict(args.seed_override))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PMCError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    cert = res.certificate
    print(f"scenario: {cert['scenario']}")
    print(f"verdict:  {cert['verdict']}")
    for e in cert.get("evidence", []):
        val = e.get("value", e.get("max_violation"))
        extra = f" value={val:.6g}" if isinstance(val, float) else ""
        mark = "info" if e.get("kind") == "diagnostic" else ("pass" if e["passed"] else "FAIL")
        print(f"  [{mark}] {e['check']}{extra}")
    print(f"output:   {res.out_dir}")
    return res.status


if __name__ == "__main__":
    sys.exit(main())
