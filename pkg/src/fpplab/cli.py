"""Command-line surface: simulation runs, certificates, and counting
oracles, with reproducible run manifests.

Every output file cites the manifest hash of the run that produced it, so
a CSV row or certificate can be traced back to (command, config, seed)
and replayed.  Exit codes: 0 success, 2 precondition/validity failure
(the failed gate is named on stderr), 1 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from typing import List, Optional

from . import certifier, combinatorics, estimators
from .distributions import parse_distribution
from .engine import SearchCaps
from .errors import FppLabError, UsageError

ESTIMATES_HEADER = "quantity,d,n,replicas,mean,stderr,exact_fraction,seed"
OVERLAP_HEADER = "p,n,l,K,prob,bound,ratio"


def _load_config(path: str) -> dict:
    """Flat key = value lines; '#' comments; flags win on conflict."""
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"bad config line: {raw.strip()!r}")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


def _manifest(args: argparse.Namespace, command: str) -> dict:
    snapshot = {k: v for k, v in sorted(vars(args).items())
                if k not in ("func", "config") and v is not None}
    core = {"command": command, "config": {k: repr(v) for k, v in snapshot.items()},
            "tool_version": certifier.TOOL_VERSION}
    digest = hashlib.sha256(
        json.dumps(core, sort_keys=True).encode()).hexdigest()[:16]
    core["manifest_hash"] = digest
    core["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return core


def _out_dir(args) -> Optional[str]:
    return args.out_dir or os.environ.get("FPPLAB_OUT_DIR")


def _emit(args, manifest: dict, name: str, text: str) -> None:
    """Print to stdout and, when an output directory is set, persist the
    payload plus the manifest."""
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    d = _out_dir(args)
    if d:
        os.makedirs(d, exist_ok=True)
        with open(os.path.join(d, name), "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
        with open(os.path.join(d, f"manifest-{manifest['manifest_hash']}.json"), "w") as fh:
            json.dump(manifest, fh, indent=2)


def _estimates_csv(manifest: dict, records) -> str:
    lines = [f"# manifest {manifest['manifest_hash']}", ESTIMATES_HEADER]
    lines += [r.csv_row() for r in records]
    return "\n".join(lines)


# ------------------------------------------------------------- commands

def _cmd_simulate_mu(args) -> int:
    spec = parse_distribution(args.dist)
    m = _manifest(args, "simulate-mu")
    rec = estimators.estimate_mu_e1(args.d, spec, n=args.n, replicas=args.replicas,
                                    master_seed=args.seed,
                                    caps=SearchCaps(max_settled=args.max_settled))
    _emit(args, m, f"mu-e1-d{args.d}.csv", _estimates_csv(m, [rec]))
    return 0


def _cmd_simulate_mustar(args) -> int:
    spec = parse_distribution(args.dist)
    m = _manifest(args, "simulate-mustar")
    rec = estimators.estimate_mu_star(args.d, spec, n=args.n if args.n else 3,
                                      replicas=args.replicas, master_seed=args.seed,
                                      caps=SearchCaps(max_settled=args.max_settled))
    _emit(args, m, f"mu-star-d{args.d}.csv", _estimates_csv(m, [rec]))
    return 0


def _cmd_slab(args) -> int:
    spec = parse_distribution(args.dist)
    m = _manifest(args, "slab")
    rec = estimators.estimate_slab_mean(args.d, spec, replicas=args.replicas,
                                        master_seed=args.seed)
    _emit(args, m, f"slab-d{args.d}.csv", _estimates_csv(m, [rec]))
    return 0


def _cmd_greedy_diag(args) -> int:
    spec = parse_distribution(args.dist)
    m = _manifest(args, "greedy-diag")
    rec = estimators.greedy_diagonal_bound(args.d, spec, n=args.n if args.n else 3,
                                           replicas=args.replicas, master_seed=args.seed)
    _emit(args, m, f"greedy-diag-d{args.d}.csv", _estimates_csv(m, [rec]))
    return 0


def _cmd_certify_upper(args) -> int:
    spec = parse_distribution(args.dist)
    m = _manifest(args, "certify-upper")
    val, params = certifier.optimize_upper(args.d, spec)
    payload = json.dumps({
        "manifest_hash": m["manifest_hash"], "d": args.d, "dist": spec.label,
        "mu_upper": val,
        "params": {"delta": params.delta, "eta": params.eta, "B": params.B,
                   "A": params.A, "n": params.n, "p": params.p},
        "preconditions": [{"name": k, "satisfied": bool(v)} for k, v in params.validity],
    }, indent=2)
    _emit(args, m, f"upper-d{args.d}.json", payload)
    return 0


def _cmd_certify_lower(args) -> int:
    spec = parse_distribution(args.dist)
    m = _manifest(args, "certify-lower")
    if args.delta is not None:
        bound, flags = certifier.lower_bound_mu(args.d, spec, args.delta)
        delta = args.delta
    else:
        bound, delta, flags = certifier.best_lower_bound_mu(args.d, spec)
    failed = [k for k, ok in flags if not ok]
    payload = json.dumps({
        "manifest_hash": m["manifest_hash"], "d": args.d, "dist": spec.label,
        "mu_lower": bound, "delta": delta,
        "preconditions": [{"name": k, "satisfied": bool(v)} for k, v in flags],
    }, indent=2)
    _emit(args, m, f"lower-d{args.d}.json", payload)
    if failed or bound <= 0.0:
        print(f"failed gate: {', '.join(failed) or 'no-valid-delta'}", file=sys.stderr)
        return 2
    return 0


def _cmd_certify_shape(args) -> int:
    spec = parse_distribution(args.dist)
    m = _manifest(args, "certify-shape")
    cert = certifier.shape_certificate(args.d, spec)
    text = cert.to_json()
    text = text.replace('"schema_version": 1,',
                        f'"schema_version": 1,\n  "manifest_hash": "{m["manifest_hash"]}",', 1)
    _emit(args, m, f"shape-d{args.d}.json", text)
    return 0


def _cmd_find_threshold(args) -> int:
    spec = parse_distribution(args.dist)
    m = _manifest(args, "find-threshold")
    th = certifier.find_threshold(spec, args.verdict, delta=args.delta)
    payload = json.dumps({"manifest_hash": m["manifest_hash"], "dist": spec.label,
                          "verdict": args.verdict, "delta": args.delta,
                          "threshold": th}, indent=2)
    _emit(args, m, f"threshold-{args.verdict}.json", payload)
    return 0


def _cmd_saw(args) -> int:
    m = _manifest(args, "saw")
    count = combinatorics.saw_count(args.n, args.d)
    lower, root, expansion = combinatorics.xi_bounds(args.d, args.n)
    payload = json.dumps({"manifest_hash": m["manifest_hash"], "n": args.n, "d": args.d,
                          "count": count, "root_count": root,
                          "lower_const": lower, "expansion": expansion}, indent=2)
    _emit(args, m, f"saw-n{args.n}-d{args.d}.json", payload)
    return 0


def _cmd_rw_overlap(args) -> int:
    m = _manifest(args, "rw-overlap")
    mode = "monte_carlo" if args.samples else "exact_enumeration"
    stats = combinatorics.rw_overlap_stats(args.p, args.n, mode,
                                           samples=args.samples or 0, seed=args.seed)
    n, p = args.n, args.p

    def bound(l, K):
        if not 1 <= l <= n - 1:
            return None
        return (0.5 / p) ** l * certifier.overlap_correction(n, p, l)

    lines = [f"# manifest {m['manifest_hash']}", OVERLAP_HEADER]
    lines += stats.csv_rows(bound)
    _emit(args, m, f"overlap-p{p}-n{n}.csv", "\n".join(lines))
    return 0


def _cmd_alpha_star(args) -> int:
    m = _manifest(args, "alpha-star")
    al, half = certifier.alpha_star()
    resid = certifier.inf_identity_residual()
    payload = json.dumps({"manifest_hash": m["manifest_hash"], "alpha_star": al,
                          "half_sqrt_alpha_sq_minus_1": half,
                          "inf_identity_residual": resid}, indent=2)
    _emit(args, m, "alpha-star.json", payload)
    return 0


# --------------------------------------------------------------- parser

def _build_parser():
    top = argparse.ArgumentParser(prog="fpplab",
                                  description="first-passage percolation laboratory")
    top.add_argument("--config", help="flat key = value config file; flags win")
    sub = top.add_subparsers(dest="command", required=True)
    children = []

    def add_parser(name):
        p = sub.add_parser(name)
        # accepted after the subcommand too; consumed before parsing
        p.add_argument("--config", help=argparse.SUPPRESS)
        children.append(p)
        return p

    def common(p, dist=True, d=True):
        if dist:
            p.add_argument("--dist", default="exponential:1.0",
                           help="exponential:RATE | uniform:0:S | deterministic:C"
                                " | shifted:OFF:BASE")
        if d:
            # required, but enforced after config-file defaults are merged
            p.add_argument("--d", type=int, default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out-dir", default=None)
        p.add_argument("--workers", type=int, default=1,
                       help="accepted for interface stability; execution is"
                            " sequential and output order is deterministic")

    for name, fn, needs_n in (("simulate-mu", _cmd_simulate_mu, True),
                              ("simulate-mustar", _cmd_simulate_mustar, True),
                              ("slab", _cmd_slab, False),
                              ("greedy-diag", _cmd_greedy_diag, True)):
        p = add_parser(name)
        common(p)
        if needs_n:
            p.add_argument("--n", type=int, default=None)
        p.add_argument("--replicas", type=int, default=100)
        p.add_argument("--max-settled", type=int, default=5_000_000)
        p.set_defaults(func=fn)

    for name, fn in (("certify-upper", _cmd_certify_upper),
                     ("certify-shape", _cmd_certify_shape)):
        p = add_parser(name)
        common(p)
        p.add_argument("--eta", type=float, default=None,
                       help="accepted for compatibility; the optimizer scans eta")
        p.set_defaults(func=fn)

    p = add_parser("certify-lower")
    common(p)
    p.add_argument("--delta", type=float, default=None)
    p.set_defaults(func=_cmd_certify_lower)

    p = add_parser("find-threshold")
    common(p, d=False)
    p.add_argument("--verdict", required=True,
                   choices=["ball_excluded", "cube_strict", "diamond_strict"])
    p.add_argument("--delta", type=float, default=None)
    p.set_defaults(func=_cmd_find_threshold)

    p = add_parser("saw")
    common(p, dist=False)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_saw)

    p = add_parser("rw-overlap")
    common(p, dist=False, d=False)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=None,
                   help="switch to Monte Carlo with this many pair samples")
    p.set_defaults(func=_cmd_rw_overlap)

    p = add_parser("alpha-star")
    common(p, dist=False, d=False)
    p.set_defaults(func=_cmd_alpha_star)
    return top, children


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser, children = _build_parser()
    try:
        # config file supplies defaults; explicit flags override
        if "--config" in argv:
            cfg_path = argv[argv.index("--config") + 1]
            cfg = _load_config(cfg_path)
            typed = {}
            for k, v in cfg.items():
                try:
                    typed[k] = int(v)
                except ValueError:
                    try:
                        typed[k] = float(v)
                    except ValueError:
                        typed[k] = v
            for child in children:
                child.set_defaults(**typed)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            # argparse exits 2 on bad flags; that's a usage error here
            return 0 if exc.code in (0, None) else 1
        if getattr(args, "d", -1) is None:
            print("usage error: --d is required (flag or config file)", file=sys.stderr)
            return 1
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except FppLabError as exc:
        print(f"failed gate: {exc.code}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError, IndexError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
