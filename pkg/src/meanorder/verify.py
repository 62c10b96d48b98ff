"""Run every property suite and summarize one verdict row per claim.

Each suite takes the predicate it exercises as a parameter, so a
deliberately broken predicate (``sabotage``) can be swapped in to show
that the suite detects it.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from . import gini, hardy, metric, order
from .errors import MeanOrderError
from .gini import GiniParams, NegativeReciprocal, PositiveReciprocal
from .means import GiniMean
from .sampling import DomainSampler

SABOTAGES = ("ginicomp", "ball-strictness", "interval-swap")


def _flipped_leq(a, b):
    return not gini.gini_leq(a, b)


def _interval_without_swap(lower, upper, candidate):
    lower, upper, candidate = (gini._as_params(x) for x in (lower, upper, candidate))
    p, q, r, s = lower.lo, lower.hi, upper.lo, upper.hi
    x, y = candidate.p, candidate.q
    return p <= x <= r and q <= y <= s


def _nonstrict_ball(value, radius, closed):
    return metric._ball_status(value, radius, True)


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = 0
    trials: int = 200
    hardy_terms: int = 20_000
    sabotage: frozenset = frozenset()

    def __post_init__(self):
        unknown = set(self.sabotage) - set(SABOTAGES)
        if unknown:
            raise ValueError(f"unknown sabotage {sorted(unknown)}; choose from {SABOTAGES}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    @property
    def leq(self) -> Callable:
        return _flipped_leq if "ginicomp" in self.sabotage else gini.gini_leq

    @property
    def interval_contains(self) -> Callable:
        return _interval_without_swap if "interval-swap" in self.sabotage else gini.gini_interval_contains

    @property
    def ball_status(self) -> Callable:
        return _nonstrict_ball if "ball-strictness" in self.sabotage else metric._ball_status


@dataclass
class Row:
    name: str
    claim: str
    passed: bool
    witness: Any = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"row": self.name, "claim": self.claim, "verdict": "pass" if self.passed else "fail",
                "witness": self.witness, **self.detail}


class StageError(MeanOrderError):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"stage {stage!r} failed: {exc}")
        self.stage = stage
        self.cause = exc


def _plain(x):
    """JSON-friendly copy of a witness."""
    if isinstance(x, GiniParams):
        return [x.p, x.q]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (frozenset, set)):
        return sorted((_plain(e) for e in x), key=str)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(e) for e in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


# --- order kernel -------------------------------------------------------------

def _posets(cfg: VerifyConfig):
    count = max(3, min(cfg.trials // 20, 25))
    rng = np.random.default_rng([cfg.seed, 0x05])
    for i in range(count):
        n = int(rng.integers(2, 9))
        yield i, order.random_poset(n, float(rng.uniform(0.1, 0.6)), rng)


def suite_closure(cfg: VerifyConfig) -> list[Row]:
    rows = []
    bad = None
    count = 0
    for i, P in _posets(cfg):
        rep = order.check_closure_laws(P, trials=max(1, cfg.trials // 50), seed=cfg.seed * 1000 + i)
        count += len(rep.records)
        if rep.violations and bad is None:
            bad = json.loads(rep.violations[0].to_json())
    rows.append(Row("order/closure-laws", "interval-type sets are closed under intersection, increasing "
                    "union and restriction; [p,q] u [q,r] lies in [p,r]", bad is None, bad, {"records": count}))

    bad = None
    for _, P in _posets(cfg):
        for x in P.elements:
            for S in (P.down_set([x]), P.up_set([x])):
                if not order.is_interval_type(P.subset(S), P):
                    bad = bad or {"set": _plain(S)}
        for mask in range(min(1 << len(P), 256)):
            S = P.subset(P.members(mask))
            hull = order.gi_set(S, P)
            if not (S.members <= hull and order.gi_set(P.subset(hull), P) == hull):
                bad = bad or {"set": _plain(S.members), "hull": _plain(hull)}
    rows.append(Row("order/hull", "down-sets and up-sets are interval-type; the hull is extensive "
                    "and idempotent", bad is None, bad))

    D = order.diamond()
    gap = order.bracket_union_gap(D, "bot", "a", "top")
    rows.append(Row("order/bracket-union-strict", "[p,q] u [q,r] can miss part of [p,r]",
                    gap == frozenset({"b"}), {"p": "bot", "q": "a", "r": "top", "missed": _plain(gap)}))
    return rows


# --- Gini -----------------------------------------------------------------------

def suite_gini(cfg: VerifyConfig) -> list[Row]:
    rows = []
    sampler = DomainSampler(seed=cfg.seed)
    rng = np.random.default_rng([cfg.seed, 0x61])
    bad = None
    for i in range(cfg.trials):
        v = sampler.vector(i)
        p, q = rng.uniform(-5, 5, 2)
        g = gini.gini_eval((p, q), v)
        checks = {
            "symmetry": abs(g - gini.gini_eval((q, p), v)) <= 1e-12 * g,
            "homogeneity": abs(gini.gini_eval((p, q), 1e3 * v) - 1e3 * g) <= 1e-12 * 1e3 * g,
            "internality": v.min() <= g <= v.max(),
        }
        failed = [k for k, ok in checks.items() if not ok]
        if failed and bad is None:
            bad = {"params": [p, q], "vector": v.tolist(), "failed": failed}
    rows.append(Row("gini/identities", "Gini means are symmetric, homogeneous and internal", bad is None, bad))

    grid = np.linspace(-2, 2, 9)
    params = [GiniParams(a, b) for a in grid for b in grid]
    rep = gini.check_comparability(params, DomainSampler(strategy="corners", seed=cfg.seed), 400, leq=cfg.leq)
    witness = None
    if rep.violations:
        a, b, v = rep.violations[0]
        witness = {"a": _plain(a), "b": _plain(b), "vector": _plain(v)}
    elif rep.refuted_fraction < 0.99:
        witness = {"unrefuted": _plain(rep.unrefuted[:3])}
    rows.append(Row("gini/comparability", "G_{p,q} <= G_{p',q'} iff min and max of the exponents are ordered",
                    rep.ok(), witness, {"certified": rep.certified, "refuted_fraction": rep.refuted_fraction}))

    lattice = np.arange(-1.0, 1.01, 0.5)
    cands = np.arange(-2.0, 2.01, 0.5)
    bad = None
    cases = 0
    for p, q, r, s in itertools.product(lattice, repeat=4):
        if not (p <= q and r <= s and p <= r and q <= s):
            continue
        for x, y in itertools.product(cands, repeat=2):
            cases += 1
            got = cfg.interval_contains(GiniParams(p, q), GiniParams(r, s), GiniParams(x, y))
            want = gini.gini_leq((p, q), (x, y)) and gini.gini_leq((x, y), (r, s))
            if got != want and bad is None:
                bad = {"lower": [p, q], "upper": [r, s], "candidate": [x, y], "formula": got, "order": want}
    rows.append(Row("gini/interval", "the order interval [G_{p,q}, G_{r,s}] is the union of two parameter boxes",
                    bad is None, bad, {"cases": cases}))

    bad = None
    checked = 0
    per_set = max(1, cfg.trials // 3)
    for set_id in gini.BOUNDARY_SETS:
        for c in (0.5, 1.0, 2.0):
            rep = gini.check_boundary_interval_type(
                set_id, PositiveReciprocal(c), NegativeReciprocal(c), per_set, cfg.seed, leq=cfg.leq)
            checked += rep.checked
            if rep.violations and bad is None:
                a, b, cc = rep.violations[0]
                bad = {"set": set_id, "c": c, "A": _plain(a), "B": _plain(b), "C": _plain(cc)}
    rows.append(Row("gini/boundary-sets", "sets bounded by decreasing involutions are interval-type",
                    bad is None, bad, {"checked": checked}))
    return rows


# --- Hardy ------------------------------------------------------------------------

def suite_hardy(cfg: VerifyConfig) -> list[Row]:
    rows = []
    fams = hardy.default_families(cfg.hardy_terms)
    rep = hardy.check_ratio_monotonicity(max(1, cfg.trials // 20), cfg.seed, fams, leq=cfg.leq)
    rows.append(Row("hardy/ratio-order", "P <= M pointwise gives ratio(P) <= ratio(M) on every sequence",
                    rep.ok, rep.violations[0] if rep.violations else None, {"checks": rep.checks}))

    budget = hardy.HardyBudget(terms=cfg.hardy_terms, grid_terms=min(2000, cfg.hardy_terms),
                               grid_points=8, refine_steps=4)
    P, M, Q = (GiniMean.of(x, 0.0) for x in (0.0, 0.25, 0.5))
    est = {m: hardy.hardy_lower_bound(m, budget) for m in (P, M, Q)}
    bad = None
    if not (cfg.leq(P.params, M.params) and cfg.leq(M.params, Q.params)):
        bad = {"premise": "P <= M <= Q not certified"}
    for lo_m, hi_m in ((P, M), (M, Q)):
        fam_spec = est[lo_m].witness
        fam = (hardy.PowerLaw(fam_spec["epsilon"], fam_spec["terms"]) if fam_spec["kind"] == "powerlaw"
               else hardy.Geometric(fam_spec["ratio"], fam_spec["terms"]))
        r_hi = hardy.hardy_ratio(hi_m, fam)
        if est[lo_m].lower > r_hi + 1e-9 and bad is None:
            bad = {"lower_mean": est[lo_m].mean, "upper_mean": est[hi_m].mean, "family": fam_spec,
                   "ratios": [est[lo_m].lower, r_hi]}
    try:
        enclosure = hardy.hardy_sandwich(est[P], hardy.known_constant(Q, np.inf))
    except MeanOrderError as exc:
        bad = bad or {"sandwich": str(exc)}
        enclosure = None
    rows.append(Row("hardy/sandwich", "P <= M <= Q gives H_M in [H_P, H_Q]", bad is None, bad,
                    {"lower_bounds": [est[m].lower for m in (P, M, Q)],
                     "enclosure_lower": None if enclosure is None else enclosure[0]}))
    return rows


# --- metric ------------------------------------------------------------------------

def suite_metric(cfg: VerifyConfig) -> list[Row]:
    rows = []
    center = GiniMean.of(1.0, 0.0)
    bad = None
    checked = 0
    for n, grid in ((2, 9), (3, 5)):
        dom = metric.SharedDomain(n, 1.0, 4.0, grid)
        rep = metric.check_ball_interval_type(center, 1.0, dom, max(1, cfg.trials // 2), cfg.seed,
                                              membership=cfg.ball_status)
        checked += rep.checked
        if not rep.ok and bad is None:
            bad = (rep.squeeze_violations or rep.closed_violations or rep.open_violations)[0]
    rows.append(Row("metric/squeeze", "balls B_r(M), closed balls and B(M) are interval-type",
                    bad is None, bad, {"checked": checked}))

    dom = metric.SharedDomain(2, 1.0, 4.0, 7)
    bad = None
    for cand in (GiniMean.of(0, 0), GiniMean.of(2, 0), GiniMean.of(-1, 1), GiniMean.of(3, 1)):
        miss = metric.check_boundary_strictness(center, cand, dom, membership=cfg.ball_status)
        if miss and bad is None:
            bad = miss
    rows.append(Row("metric/ball-boundary", "at radius = distance the closed ball contains the candidate "
                    "and the open ball does not", bad is None, bad))

    rng = np.random.default_rng([cfg.seed, 0x7A])
    means = [GiniMean.of(*rng.uniform(-3, 3, 2)) for _ in range(6)]
    bad = metric.pseudometric_violations(means, metric.SharedDomain(3, 0.5, 5.0, 6))
    rows.append(Row("metric/pseudometric", "the sampled sup distance is symmetric and satisfies the triangle "
                    "inequality", not bad, bad[0] if bad else None))
    return rows


STAGES = (
    ("order-kernel", suite_closure),
    ("gini", suite_gini),
    ("hardy", suite_hardy),
    ("metric", suite_metric),
)


def verify_paper(cfg: Optional[VerifyConfig] = None) -> list[Row]:
    """Run all suites in order; module errors are re-raised as :class:`StageError`."""
    cfg = cfg or VerifyConfig()
    rows = []
    for stage, suite in STAGES:
        try:
            rows.extend(suite(cfg))
        except MeanOrderError as exc:
            raise StageError(stage, exc) from exc
    for row in rows:
        row.witness = _plain(row.witness)
    return rows
