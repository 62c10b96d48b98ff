"""Command-line entry point: ``meanorder <group> <command> [flags]``.

Exit codes: 0 all checks pass, 1 a proposition is falsified, 2 usage
error, 3 evaluation or budget error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Iterable

import numpy as np

from . import __version__, gini, hardy, metric, order
from .errors import BudgetError, DomainError, EvaluationError, InconsistencyError, PreconditionError
from .gini import GiniParams, NegativeReciprocal, PositiveReciprocal
from .means import GiniMean, describe, parse_mean, pointwise_leq
from .sampling import STRATEGIES, DomainSampler
from .verify import SABOTAGES, StageError, VerifyConfig, verify_paper

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE, EXIT_EVAL = 0, 1, 2, 3


# --- output -------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, GiniParams):
        return str(x)
    if isinstance(x, (set, frozenset)):
        return sorted(x, key=str)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _clean(x):
    # json.dumps writes inf as Infinity, which is not JSON; spell it out instead
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _flat(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (list, tuple)):
        return ";".join(_flat(v) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True, default=_jsonable)
    return str(value)


def emit(records: Iterable[dict], fmt: str, out=None) -> None:
    out = out or sys.stdout
    records = [_clean(json.loads(json.dumps(r, default=_jsonable))) for r in records]
    if fmt == "json":
        for r in records:
            out.write(json.dumps(r, sort_keys=True) + "\n")
        return
    keys = sorted({k for r in records for k in r})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    for r in records:
        w.writerow([_flat(r.get(k)) for k in keys])
    out.write(buf.getvalue())


# --- argument helpers -----------------------------------------------------------

def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _params(text: str) -> GiniParams:
    try:
        return GiniParams.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _mean(text: str):
    try:
        return parse_mean(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _radius(text: str) -> float:
    r = float(text)
    if not r > 0:
        raise argparse.ArgumentTypeError("radius must be positive or inf")
    return r


def _sampler(args) -> DomainSampler:
    return DomainSampler(args.n_min, args.n_max, args.lo, args.hi, args.strategy, args.seed)


def _domain(args) -> metric.SharedDomain:
    return metric.SharedDomain(args.n, args.lo, args.hi, args.grid)


def _load_poset(path: str) -> order.FinitePoset:
    with open(path, encoding="utf-8") as fh:
        return order.parse_poset(fh.read())


# --- commands ---------------------------------------------------------------------

def cmd_gini_eval(args):
    v = np.asarray(args.vec, dtype=float)
    value = gini.gini_eval((args.p, args.q), v)
    return [{"params": [args.p, args.q], "vector": v, "value": float(value)}], EXIT_OK


def cmd_gini_compare(args):
    a, b = args.a, args.b
    rec = {"a": str(a), "b": str(b), "a_leq_b": gini.gini_leq(a, b), "b_leq_a": gini.gini_leq(b, a)}
    if args.search:
        sampler = _sampler(args)
        for key, (x, y) in (("a_leq_b", (a, b)), ("b_leq_a", (b, a))):
            v = pointwise_leq(GiniMean(x), GiniMean(y), sampler, args.samples)
            rec[key + "_witness"] = v.witness
            rec[key + "_witness_index"] = v.witness_index
    return [rec], EXIT_OK


def cmd_gini_interval(args):
    inside = gini.gini_interval_contains(args.lower, args.upper, args.candidate)
    return [{"lower": str(args.lower), "upper": str(args.upper), "candidate": str(args.candidate),
             "contains": inside}], EXIT_OK


def cmd_gini_boundary(args):
    f, g = PositiveReciprocal(args.c), NegativeReciprocal(args.d)
    rep = gini.check_boundary_interval_type(args.set, f, g, args.trials, args.seed)
    rec = {"set": rep.set_id, "c": args.c, "d": args.d, "trials": rep.trials, "checked": rep.checked,
           "violations": len(rep.violations), "ok": rep.ok,
           "witness": [[str(x) for x in rep.violations[0]]] if rep.violations else None}
    return [rec], EXIT_OK if rep.ok else EXIT_FALSIFIED


def _hardy_budget(args) -> hardy.HardyBudget:
    return hardy.HardyBudget(terms=args.budget) if args.budget else hardy.HardyBudget()


def cmd_hardy_estimate(args):
    est = hardy.hardy_lower_bound(args.mean, _hardy_budget(args), args.families)
    return [est.to_dict()], EXIT_OK


def cmd_hardy_sandwich(args):
    P, M, Q = args.lower, args.mean, args.upper
    for x, y in ((P, M), (M, Q)):
        verdict = pointwise_leq(x, y, _sampler(args), args.samples)
        if verdict.status != "yes":
            raise PreconditionError(f"order premise {describe(x)} <= {describe(y)} is not certified "
                                    f"(status {verdict.status})")
    budget = _hardy_budget(args)
    low = hardy.hardy_lower_bound(P, budget, args.families)
    high = hardy.known_constant(Q, args.known_upper)
    lo, hi = hardy.hardy_sandwich(low, high)
    rec = low.to_dict()
    rec.update(mean=describe(M), lower=lo, upper=hi, lower_mean=describe(P), upper_mean=describe(Q))
    return [rec], EXIT_OK


def cmd_dist_rho(args):
    est = metric.rho(args.a, args.b, _domain(args))
    return [{"a": describe(args.a), "b": describe(args.b), **est.to_dict()}], EXIT_OK


def cmd_dist_ball(args):
    verdict = metric.ball_member(args.center, args.r, args.candidate, _domain(args), closed=not args.open)
    rec = {"center": describe(args.center), "candidate": describe(args.candidate), "radius": args.r,
           "closed": not args.open, "status": verdict.status, **verdict.estimate.to_dict()}
    return [rec], EXIT_OK


def cmd_dist_check_itype(args):
    rep = metric.check_ball_interval_type(args.center, args.r, _domain(args), args.trials, args.seed)
    return [{**rep.to_dict(), "plan": _domain(args).to_dict()}], EXIT_OK if rep.ok else EXIT_FALSIFIED


def cmd_poset_laws(args):
    P = _load_poset(args.file)
    rep = order.check_closure_laws(P, args.trials, args.seed)
    return [json.loads(r.to_json()) for r in rep.records], EXIT_OK if rep.ok else EXIT_FALSIFIED


def cmd_poset_itype(args):
    P = _load_poset(args.file)
    S = P.subset(args.subset)
    verdict = order.is_interval_type(S, P)
    return [{"subset": S.members, "interval_type": verdict.holds, "witness": verdict.witness,
             "hull": order.gi_set(S, P)}], EXIT_OK


def cmd_verify(args):
    cfg = VerifyConfig(seed=args.seed, trials=args.trials, sabotage=frozenset(args.sabotage or ()))
    if args.budget:
        cfg = VerifyConfig(cfg.seed, cfg.trials, args.budget, cfg.sabotage)
    rows = [r.to_dict() for r in verify_paper(cfg)]
    status = EXIT_OK if all(r["verdict"] == "pass" for r in rows) else EXIT_FALSIFIED
    return rows, status


# --- parser -------------------------------------------------------------------------

def _global_flags(parser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=d(0), help="random seed (default 0)")
    parser.add_argument("--output", choices=("json", "csv"), default=d("json"))
    parser.add_argument("--trials", type=int, default=d(None), help="trial count for randomized checks")
    parser.add_argument("--budget", type=int, default=d(None), help="term budget for Hardy searches")


def _sampler_flags(parser):
    parser.add_argument("--n-min", type=int, default=1)
    parser.add_argument("--n-max", type=int, default=6)
    parser.add_argument("--lo", type=float, default=1e-4)
    parser.add_argument("--hi", type=float, default=1e4)
    parser.add_argument("--strategy", choices=STRATEGIES, default="mixed")
    parser.add_argument("--samples", type=int, default=1000)


def _domain_flags(parser):
    parser.add_argument("--n", type=int, default=2, help="vector length")
    parser.add_argument("--lo", type=float, default=1.0)
    parser.add_argument("--hi", type=float, default=4.0)
    parser.add_argument("--grid", type=int, default=16, help="points per axis")


def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(prog="meanorder", description="Order, interval and distance checks for means.")
    root.add_argument("--version", action="version", version=f"meanorder {__version__}")
    _global_flags(root, suppress=False)
    groups = root.add_subparsers(dest="group", required=True)

    def leaf(sub, name, func, **kw):
        p = sub.add_parser(name, **kw)
        _global_flags(p, suppress=True)
        p.set_defaults(func=func)
        return p

    g = groups.add_parser("gini", help="Gini means").add_subparsers(dest="command", required=True)
    p = leaf(g, "eval", cmd_gini_eval, help="evaluate G_{p,q}(v)")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--vec", type=_floats, required=True, help="comma-separated positive entries")
    p = leaf(g, "compare", cmd_gini_compare, help="exact order of two Gini means")
    p.add_argument("--a", type=_params, required=True)
    p.add_argument("--b", type=_params, required=True)
    p.add_argument("--search", action="store_true", help="also search for separating vectors")
    _sampler_flags(p)
    p = leaf(g, "interval", cmd_gini_interval, help="membership in an order interval")
    p.add_argument("--lower", type=_params, required=True)
    p.add_argument("--upper", type=_params, required=True)
    p.add_argument("--candidate", type=_params, required=True)
    p = leaf(g, "boundary", cmd_gini_boundary, help="interval-type check of an involution-bounded set")
    p.add_argument("--set", choices=gini.BOUNDARY_SETS, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--d", type=float, default=1.0)

    h = groups.add_parser("hardy", help="Hardy constants").add_subparsers(dest="command", required=True)
    families = lambda s: tuple(t for t in s.split(",") if t)  # noqa: E731
    p = leaf(h, "estimate", cmd_hardy_estimate, help="lower bound for the Hardy constant")
    p.add_argument("--mean", type=_mean, required=True)
    p.add_argument("--families", type=families, default=hardy.FAMILY_KINDS)
    p = leaf(h, "sandwich", cmd_hardy_sandwich, help="enclose H_M from P <= M <= Q")
    p.add_argument("--lower", type=_mean, required=True)
    p.add_argument("--upper", type=_mean, required=True)
    p.add_argument("--mean", type=_mean, required=True)
    p.add_argument("--known-upper", type=float, default=math.inf, help="known upper bound for H_Q")
    p.add_argument("--families", type=families, default=hardy.FAMILY_KINDS)
    _sampler_flags(p)

    d = groups.add_parser("dist", help="sup-norm distance").add_subparsers(dest="command", required=True)
    p = leaf(d, "rho", cmd_dist_rho, help="sampled sup distance")
    p.add_argument("--a", type=_mean, required=True)
    p.add_argument("--b", type=_mean, required=True)
    _domain_flags(p)
    p = leaf(d, "ball", cmd_dist_ball, help="refute ball membership")
    p.add_argument("--center", type=_mean, required=True)
    p.add_argument("--r", type=_radius, required=True)
    p.add_argument("--candidate", type=_mean, required=True)
    p.add_argument("--open", action="store_true", help="open ball (default closed)")
    _domain_flags(p)
    p = leaf(d, "check-itype", cmd_dist_check_itype, help="search squeeze counterexamples")
    p.add_argument("--center", type=_mean, required=True)
    p.add_argument("--r", type=_radius, required=True)
    _domain_flags(p)

    o = groups.add_parser("poset", help="finite posets").add_subparsers(dest="command", required=True)
    p = leaf(o, "laws", cmd_poset_laws, help="closure laws on a fixture, one JSON line per record")
    p.add_argument("--file", required=True)
    p = leaf(o, "itype", cmd_poset_itype, help="is a subset interval-type")
    p.add_argument("--file", required=True)
    p.add_argument("--subset", type=lambda s: [t for t in s.split(",") if t], default=[])

    p = groups.add_parser("verify-paper", help="run every property suite")
    _global_flags(p, suppress=True)
    p.add_argument("--sabotage", action="append", choices=SABOTAGES, help="inject a known fault")
    p.set_defaults(func=cmd_verify, command=None)
    return root


_DEFAULT_TRIALS = {"boundary": 1000, "check-itype": 1000, "laws": 10, None: 200}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.trials is None:
        args.trials = _DEFAULT_TRIALS.get(args.command, _DEFAULT_TRIALS[None])
    if args.trials < 1:
        parser.error("--trials must be at least 1")
    if args.budget is not None and args.budget < 1:
        parser.error("--budget must be at least 1")
    try:
        records, status = args.func(args)
    except StageError as exc:
        print(f"meanorder: {exc}", file=sys.stderr)
        return EXIT_EVAL if isinstance(exc.cause, (EvaluationError, BudgetError)) else EXIT_FALSIFIED
    except (EvaluationError, BudgetError) as exc:
        print(f"meanorder: {exc}", file=sys.stderr)
        return EXIT_EVAL
    except InconsistencyError as exc:
        print(f"meanorder: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED
    except (DomainError, PreconditionError, OSError) as exc:
        print(f"meanorder: {exc}", file=sys.stderr)
        return EXIT_USAGE
    emit(records, args.output)
    return status


if __name__ == "__main__":
    sys.exit(main())
