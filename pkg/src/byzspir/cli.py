"""Command line entry point: ``byzspir {run,audit,golden,bounds}``.

Exit codes: 0 success, 2 configuration error, 3 failed check in
``golden`` or ``audit``.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import privacy
from .errors import ConfigError
from .hashing import scheme_error_bound
from .scheme import (SchemeParams, accounting, capacity, capacity_omniscient_zero_error,
                     rho_threshold)
from .sim import emit_report, expand_sweep, golden_transcript_check, parse_config, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_CHECK = 0, 2, 3

_FLAGS = ("n", "t", "b", "e", "k-messages", "l", "q", "alpha", "beta", "model", "strategy",
          "trials", "seed", "index", "hash-check", "workers")


def _write(data: bytes, out: str | None):
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode())


def cmd_run(args) -> int:
    text = ""
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
    overrides = {f.replace("-", "_"): getattr(args, f.replace("-", "_")) for f in _FLAGS}
    ls = None
    if overrides["l"] is not None and "," in overrides["l"]:
        ls = [int(x) for x in overrides["l"].split(",") if x.strip()]
        overrides["l"] = str(ls[0])
    cfg = parse_config(text, overrides)
    configs = expand_sweep(cfg, ls) if ls else [cfg]
    reports = [run_experiment(c) for c in configs]
    _write(emit_report(reports, args.format), args.out)
    return EXIT_OK


def default_audit() -> dict:
    """The audit set used for acceptance: user privacy at q=5, database privacy at q=3."""
    records = []

    def add(name, value, ok, **extra):
        records.append({"check": name, "value": value, "passed": bool(ok), **extra})

    for N in range(2, 9):
        for T in range(0, N):
            for B in range(0, N - T):
                params = SchemeParams.create(K=2, N=N, T=T, B=B, l=1, alpha=1)
                ok, witness = privacy.certify_user_privacy_algebraic(params)
                if not ok:
                    add("user_privacy_algebraic", None, False, N=N, T=T, B=B, witness=witness)
    if not records:
        add("user_privacy_algebraic", "all N<=8", True)

    up = SchemeParams.create(K=2, N=3, T=1, B=1, l=1, alpha=1, q=5)
    inst = privacy.AuditInstance(up)
    d = privacy.audit_user_privacy_exhaustive(inst, 1, 2)
    add("user_privacy_exhaustive", str(d), d == 0, q=5)
    d = privacy.audit_user_privacy_exhaustive(inst, 1, 2, variant="leaky_queries")
    add("user_privacy_negative_control", str(d), d > 0, q=5)

    for B in (0, 1):
        dp = SchemeParams.create(K=2, N=3, T=1, B=B, l=1, alpha=1, q=3, lambdas=(1, 2, 0),
                                 allow_zero_lambda=True)
        inst = privacy.AuditInstance(dp)
        r = privacy.audit_database_privacy_exhaustive(inst, 1)
        add("database_privacy_exhaustive", r.mutual_information, r.independent, q=3, B=B)
        r = privacy.audit_database_privacy_exhaustive(inst, 1, variant="unmasked")
        add("database_privacy_negative_control", r.mutual_information,
            r.mutual_information > 0, q=3, B=B)
    return {"passed": all(r["passed"] for r in records), "records": records}


def cmd_audit(args) -> int:
    result = default_audit()
    _write((json.dumps(result, indent=2) + "\n").encode(), args.out)
    return EXIT_OK if result["passed"] else EXIT_CHECK


def cmd_golden(args) -> int:
    result = golden_transcript_check(args.q)
    _write((json.dumps(result, indent=2) + "\n").encode(), args.out)
    return EXIT_OK if result["passed"] else EXIT_CHECK


def cmd_bounds(args) -> int:
    lines = ["N,T,B,capacity,rho_threshold,capacity_omniscient_zero_error"]
    for N in range(2, args.max_n + 1):
        for T in range(0, N):
            for B in range(0, N - T):
                thr = rho_threshold(N, T, B) if N > T + B else Fraction(0)
                lines.append(f"{N},{T},{B},{capacity(N, T, B, thr)},{thr},"
                             f"{capacity_omniscient_zero_error(N, T, B)}")
    if args.l:
        lines.append("")
        lines.append("model,N,T,B,E,l,q,alpha,beta,rate,bound,bound_nominal")
        for l in [int(x) for x in args.l.split(",")]:
            params = SchemeParams.create(K=args.k_messages, N=args.n, T=args.t, B=args.b,
                                         l=l, alpha=args.alpha, model=args.model, E=args.e,
                                         beta=args.beta)
            acc = accounting(params)
            bound = scheme_error_bound(params)
            lines.append(f"{params.model.value},{params.N},{params.T},{params.B},{params.E},"
                         f"{l},{params.q},{params.alpha},{params.beta},{float(acc.rate):.6g},"
                         f"{float(bound.actual):.6g},{float(bound.nominal):.6g}")
    _write(("\n".join(lines) + "\n").encode(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="byzspir")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run Monte Carlo experiments")
    run.add_argument("config", nargs="?", help="key = value config file")
    for flag in _FLAGS:
        run.add_argument(f"--{flag}", default=None)
    run.add_argument("--out")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.set_defaults(func=cmd_run)

    audit = sub.add_parser("audit", help="exhaustive privacy audits")
    audit.add_argument("--out")
    audit.set_defaults(func=cmd_audit)

    golden = sub.add_parser("golden", help="check the toy three-server transcript")
    golden.add_argument("--q", type=int, default=5)
    golden.add_argument("--out")
    golden.set_defaults(func=cmd_golden)

    bounds = sub.add_parser("bounds", help="capacity and error-bound tables")
    bounds.add_argument("--max-n", type=int, default=6)
    bounds.add_argument("--l", help="comma-separated l values for an error-bound table")
    bounds.add_argument("--n", type=int, default=3)
    bounds.add_argument("--t", type=int, default=1)
    bounds.add_argument("--b", type=int, default=1)
    bounds.add_argument("--e", type=int, default=0)
    bounds.add_argument("--k-messages", type=int, default=2)
    bounds.add_argument("--alpha", type=int, default=2)
    bounds.add_argument("--beta", type=int, default=0)
    bounds.add_argument("--model", default="secret")
    bounds.add_argument("--out")
    bounds.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print("config error:", file=sys.stderr)
        for key, msg in exc.fields.items():
            print(f"  {key}: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
