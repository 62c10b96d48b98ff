"""End-to-end acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line (also repeated in the terminal
summary) and then asserts the criterion at its stated tolerance.
"""
import contextlib
import io
import itertools
import json
import math
import time

import numpy as np
import pytest

from meanorder import (
    MAX,
    MIN,
    DomainSampler,
    GiniMean,
    GiniParams,
    HardyBudget,
    NegativeReciprocal,
    PositiveReciprocal,
    SharedDomain,
    bracket,
    check_ball_interval_type,
    check_boundary_interval_type,
    check_closure_laws,
    check_comparability,
    check_ratio_monotonicity,
    gini_eval,
    gini_interval_contains,
    gini_leq,
    hardy_lower_bound,
    is_interval_type,
    random_poset,
)
from meanorder.cli import main
from meanorder.hardy import default_families
from meanorder.metric import pseudometric_violations
from meanorder.order import bracket_union_gap, diamond

pytestmark = pytest.mark.acceptance


def test_criterion_1_gini_identities(acceptance_line):
    t0 = time.perf_counter()
    n = 10_000
    sampler = DomainSampler(seed=0)
    params = np.random.default_rng(1).uniform(-10, 10, (n, 2))
    fails = dict.fromkeys(("symmetry", "homogeneity", "internality", "slice", "branch"), 0)
    worst_branch = 0.0
    for idx, rows in sampler.by_length(n):
        for k, i in enumerate(idx):
            v = rows[k]
            p, q = params[i]
            g = gini_eval((p, q), v)
            fails["symmetry"] += abs(gini_eval((q, p), v) - g) > 1e-12 * g
            for lam in (1e-3, 1.0, 1e3):
                fails["homogeneity"] += abs(gini_eval((p, q), lam * v) - lam * g) > 1e-12 * lam * g
            fails["internality"] += not v.min() <= g <= v.max()
            # power mean written out directly; |p| >= 0.01 keeps 1/p well conditioned
            s = math.copysign(max(abs(p), 0.01), p)
            direct = float(np.mean(v**s) ** (1 / s))
            fails["slice"] += abs(gini_eval((s, 0), v) - direct) > 1e-12 * direct
            same = gini_eval((p, p), v)
            rel = abs(gini_eval((p, p + 1e-5), v) - same) / same
            worst_branch = max(worst_branch, rel)
            fails["branch"] += rel > 1e-6
    dt = time.perf_counter() - t0
    ok = not any(fails.values()) and dt < 30
    acceptance_line(1, ok, f"{n} samples; failures {fails}; worst branch gap {worst_branch:.2e}", dt)
    assert fails["symmetry"] == fails["homogeneity"] == fails["internality"] == fails["slice"] == 0
    assert fails["branch"] == 0, f"branch continuity at eps=1e-5 exceeds 1e-6 on {fails['branch']} samples"
    assert dt < 30


def test_criterion_2_comparability(acceptance_line):
    t0 = time.perf_counter()
    grid = np.linspace(-3, 3, 25)
    params = [GiniParams(a, b) for a in grid for b in grid]
    rep = check_comparability(params, DomainSampler(strategy="corners", seed=0), 1000)
    dt = time.perf_counter() - t0
    ok = rep.ok(0.99) and dt < 120
    acceptance_line(2, ok, f"{rep.pairs} pairs, {rep.certified} certified with {len(rep.violations)} violations, "
                    f"{rep.refuted}/{rep.refutable} incomparable pairs refuted ({rep.refuted_fraction:.4f})", dt)
    assert not rep.violations
    assert rep.refuted_fraction >= 0.99
    assert dt < 120


def test_criterion_3_interval_coincidence(acceptance_line):
    t0 = time.perf_counter()
    ends = np.arange(-2.0, 2.01, 0.5)
    cases = mismatches = 0
    first = None
    for p, q, r, s in itertools.product(ends, repeat=4):
        if not (p <= s and p <= q <= s and p <= r <= s):
            continue
        cand = np.arange(p - 1, s + 1.001, 0.25)
        for x, y in itertools.product(cand, repeat=2):
            cases += 1
            got = gini_interval_contains((p, q), (r, s), (x, y))
            want = gini_leq((p, q), (x, y)) and gini_leq((x, y), (r, s))
            if got != want:
                mismatches += 1
                first = first or (p, q, r, s, x, y)
    dt = time.perf_counter() - t0
    ok = cases >= 100_000 and mismatches == 0 and dt < 60
    acceptance_line(3, ok, f"{cases} cases, {mismatches} disagreements" + (f", first {first}" if first else ""), dt)
    assert cases >= 100_000
    assert mismatches == 0
    assert dt < 60


def test_criterion_4_boundary_sets(acceptance_line):
    t0 = time.perf_counter()
    consts = (0.5, 1.0, 2.0)
    per_pair = math.ceil(10_000 / len(consts) ** 2)
    totals = {}
    for set_id in ("X", "Y", "XY"):
        trials = checked = violations = 0
        for c, d in itertools.product(consts, repeat=2):
            rep = check_boundary_interval_type(set_id, PositiveReciprocal(c), NegativeReciprocal(d), per_pair, seed=0)
            trials += rep.trials
            checked += rep.checked
            violations += len(rep.violations)
        totals[set_id] = (trials, checked, violations)
    dt = time.perf_counter() - t0
    ok = all(t >= 10_000 and v == 0 for t, _, v in totals.values()) and dt < 60
    acceptance_line(4, ok, "; ".join(f"{k}: {t} trials, {c} checked, {v} violations"
                                     for k, (t, c, v) in totals.items()), dt)
    for trials, _, violations in totals.values():
        assert trials >= 10_000
        assert violations == 0
    assert dt < 60


def test_criterion_5_hardy_constants(acceptance_line):
    results = {}
    for label, params, lo, hi in (("Gini(0,0)", (0, 0), 2.5, 2.7183), ("Gini(0.5,0)", (0.5, 0), 3.0, 4.0001)):
        m = GiniMean.of(*params)
        t0 = time.perf_counter()
        est = hardy_lower_bound(m, HardyBudget(), ("powerlaw",))
        dt = time.perf_counter() - t0
        budget = HardyBudget()
        tenth = hardy_lower_bound(m, HardyBudget(terms=budget.terms // 10), ("powerlaw",))
        results[label] = (est, tenth, dt, lo, hi)
    ok = all(lo <= e.lower <= hi and t.lower <= e.lower and dt < 60 and e.witness["kind"] == "powerlaw"
             for e, t, dt, lo, hi in results.values())
    text = "; ".join(f"{k}: lower {e.lower:.5f} in [{lo}, {hi}] (N={e.witness['terms']}, eps={e.witness['epsilon']:.4g}), "
                     f"N/10 gives {t.lower:.5f}, {dt:.1f}s" for k, (e, t, dt, lo, hi) in results.items())
    acceptance_line(5, ok, text, sum(r[2] for r in results.values()))
    for est, tenth, dt, lo, hi in results.values():
        assert est.witness["kind"] == "powerlaw"
        assert lo <= est.lower <= hi
        assert tenth.lower <= est.lower
        assert dt < 60


def test_criterion_6_hardy_sandwich(acceptance_line):
    t0 = time.perf_counter()
    rep = check_ratio_monotonicity(trials=100, seed=0, families=default_families(100_000), tol=1e-9)
    dt = time.perf_counter() - t0
    ok = rep.ok and rep.checks == 100 * 7 and dt < 120
    acceptance_line(6, ok, f"{rep.checks} (triple, family) checks, {len(rep.violations)} violations", dt)
    assert rep.checks == 700
    assert rep.ok, rep.violations[:3]
    assert dt < 120


def test_criterion_7_metric_squeeze(acceptance_line):
    t0 = time.perf_counter()
    center = GiniMean.of(1, 0)
    checked = squeeze = 0
    for n, grid in ((2, 16), (3, 8)):
        rep = check_ball_interval_type(center, 1.0, SharedDomain(n, 1.0, 4.0, grid), trials=5000, seed=n)
        checked += rep.checked
        squeeze += len(rep.squeeze_violations)
    rng = np.random.default_rng(7)
    means = [GiniMean.of(*rng.uniform(-3, 3, 2)) for _ in range(44)] + [MIN, MAX]
    pairs = len(means) * (len(means) - 1) // 2
    laws = pseudometric_violations(means, SharedDomain(3, 0.5, 5.0, 6), tol=1e-10)
    dt = time.perf_counter() - t0
    ok = checked >= 10_000 and squeeze == 0 and pairs >= 1000 and not laws and dt < 60
    acceptance_line(7, ok, f"{checked} triples, {squeeze} squeeze violations; {pairs} mean pairs, "
                    f"{len(laws)} pseudometric violations", dt)
    assert checked >= 10_000 and squeeze == 0
    assert pairs >= 1000 and not laws
    assert dt < 60


def test_criterion_8_order_kernel(acceptance_line):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    subsets = disagreements = law_violations = 0
    for k in range(100):
        n = int(rng.integers(4, 11))
        P = random_poset(n, float(rng.uniform(0.05, 0.7)), rng)
        leq = P.leq
        for mask in range(1 << n):
            member = np.array([mask >> i & 1 for i in range(n)], dtype=bool)
            # definitional hull: above some member and below some member
            hull = leq[member].any(axis=0) & leq[:, member].any(axis=1)
            fixpoint = bool(np.array_equal(hull, member))
            S = P.subset(P.members(mask))
            subsets += 1
            disagreements += bool(is_interval_type(S, P)) != fixpoint
        law_violations += len(check_closure_laws(P, trials=10, seed=k).violations)
    D = diamond()
    gap = bracket_union_gap(D, "bot", "a", "top")
    strict = gap == {"b"} and "b" in bracket(D.full(), "bot", "top")
    dt = time.perf_counter() - t0
    ok = not disagreements and not law_violations and strict and dt < 60
    acceptance_line(8, ok, f"{subsets} subsets of 100 posets, {disagreements} disagreements, "
                    f"{law_violations} law violations, diamond gap {sorted(gap)}", dt)
    assert disagreements == 0 and law_violations == 0
    assert strict
    assert dt < 60


def _verify(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["verify-paper", *argv])
    return code, [json.loads(line) for line in buf.getvalue().splitlines()]


def test_criterion_9_mutation_coverage(acceptance_line):
    t0 = time.perf_counter()
    clean, rows = _verify()
    caught = {}
    for fault in ("ginicomp", "ball-strictness", "interval-swap"):
        code, rows = _verify("--sabotage", fault)
        failed = [r for r in rows if r["verdict"] == "fail"]
        caught[fault] = (code, [r["row"] for r in failed], all(r["witness"] for r in failed))
    dt = time.perf_counter() - t0
    ok = clean == 0 and all(code == 1 and rows and wit for code, rows, wit in caught.values())
    acceptance_line(9, ok, f"clean run exit {clean}; " + "; ".join(
        f"{k}: exit {c}, failed rows {r}" for k, (c, r, _) in caught.items()), dt)
    assert clean == 0
    for code, failed, has_witness in caught.values():
        assert code == 1 and failed and has_witness
