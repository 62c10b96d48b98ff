"""Sup-norm distance between means on a shared, finitely sampled domain.

Every number computed here is a maximum over sample points, hence a
lower bound on the true supremum.  Consequently ball membership can be
refuted (``"outside"``) but never certified.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, EvaluationError
from .gini import GiniParams, gini_leq
from .means import MAX, MIN, GiniMean, MeanDescriptor, describe, evaluate_rows

# absolute slack for squeeze and triangle checks
ABS_TOL = 1e-10


@dataclass(frozen=True)
class SharedDomain:
    """``grid**n`` evenly spaced points of ``[lo, hi]**n`` plus extra points."""

    n: int
    lo: float
    hi: float
    grid: int = 16
    extra: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("vector length must be at least 1")
        if not (0 < self.lo < self.hi and math.isfinite(self.hi)):
            raise DomainError(f"box must satisfy 0 < lo < hi, got [{self.lo}, {self.hi}]")
        if self.grid < 2:
            raise DomainError("grid needs at least 2 points per axis")
        for x in self.extra:
            x = np.asarray(x, dtype=float)
            if x.shape != (self.n,) or np.any(x < self.lo) or np.any(x > self.hi):
                raise DomainError(f"extra point {x} is not in [{self.lo}, {self.hi}]^{self.n}")

    def points(self) -> np.ndarray:
        axis = np.linspace(self.lo, self.hi, self.grid)
        pts = np.array(list(itertools.product(axis, repeat=self.n)))
        if self.extra:
            pts = np.vstack([pts, np.asarray(self.extra, dtype=float)])
        return pts

    def to_dict(self) -> dict:
        return {"n": self.n, "lo": self.lo, "hi": self.hi, "grid": self.grid, "extra": len(self.extra)}


@dataclass(frozen=True)
class DistanceEstimate:
    value: float
    witness: np.ndarray
    plan: SharedDomain

    def to_dict(self) -> dict:
        return {"value": self.value, "witness": self.witness.tolist(), "plan": self.plan.to_dict()}


def _values(m: MeanDescriptor, pts: np.ndarray) -> np.ndarray:
    try:
        return evaluate_rows(m, pts)
    except EvaluationError:
        raise
    except Exception as exc:  # black boxes may raise anything
        raise EvaluationError(f"{describe(m)} failed on the shared domain: {exc}") from exc


def rho(m1: MeanDescriptor, m2: MeanDescriptor, dom: SharedDomain) -> DistanceEstimate:
    """``max |m1(x) - m2(x)|`` over the domain samples, with its argmax.

    Ties go to the lowest sample index, so witnesses are reproducible.
    """
    pts = dom.points()
    gap = np.abs(_values(m1, pts) - _values(m2, pts))
    k = int(np.argmax(gap))
    return DistanceEstimate(float(gap[k]), pts[k], dom)


@dataclass(frozen=True)
class BallVerdict:
    status: str
    estimate: DistanceEstimate

    @property
    def outside(self) -> bool:
        return self.status == "outside"


def ball_member(
    center: MeanDescriptor,
    radius: float,
    candidate: MeanDescriptor,
    dom: SharedDomain,
    closed: bool = True,
) -> BallVerdict:
    """Refute membership of `candidate` in the ball of `radius` around `center`.

    Closed balls are refuted by an estimate ``> radius``, open balls by
    ``>= radius``.  ``radius=inf`` is the finite-distance ball.
    """
    if not radius > 0:
        raise DomainError("radius must be positive or inf")
    est = rho(center, candidate, dom)
    return BallVerdict(_ball_status(est.value, radius, closed), est)


def _ball_status(value: float, radius: float, closed: bool) -> str:
    if math.isinf(radius):
        return "outside" if math.isinf(value) else "undefeated"
    beyond = value > radius if closed else value >= radius
    return "outside" if beyond else "undefeated"


@dataclass
class BallReport:
    center: str
    radius: float
    trials: int
    checked: int = 0
    skipped: int = 0
    boundary_cases: int = 0
    squeeze_violations: list = field(default_factory=list)
    closed_violations: list = field(default_factory=list)
    open_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.squeeze_violations or self.closed_violations or self.open_violations)

    def to_dict(self) -> dict:
        return {
            "center": self.center, "radius": self.radius, "trials": self.trials,
            "checked": self.checked, "skipped": self.skipped, "boundary_cases": self.boundary_cases,
            "squeeze_violations": self.squeeze_violations[:5],
            "closed_violations": self.closed_violations[:5],
            "open_violations": self.open_violations[:5],
            "ok": self.ok,
        }


def squeeze_gap(p_vals, c_vals, q_vals, k_vals) -> np.ndarray:
    """Per-point ``|C - K| - max(|P - K|, |Q - K|)``; positive entries break the squeeze."""
    return np.abs(c_vals - k_vals) - np.maximum(np.abs(p_vals - k_vals), np.abs(q_vals - k_vals))


def _random_triple(rng, center: MeanDescriptor, spread: float):
    """``P <= C <= Q`` as Gini means, certified by the exact order.

    Exponents are drawn near the center's when it is a Gini mean.  One
    trial in eight uses ``min <= G <= max`` instead, whose order rests
    on internality and is re-checked at the sample points.
    """
    if rng.random() < 0.125:
        g = GiniMean.of(*rng.uniform(-3, 3, 2))
        return MIN, g, MAX, False
    base = center.params if isinstance(center, GiniMean) else GiniParams(0.0, 1.0)
    lo_a, lo_b = np.sort(base.lo + rng.uniform(-spread, spread, 2))
    hi_a = rng.uniform(max(lo_a, base.hi - spread), base.hi + spread)
    hi_b = rng.uniform(max(hi_a, lo_b), base.hi + 2 * spread)
    lo_c = rng.uniform(lo_a, lo_b)
    hi_c = rng.uniform(max(hi_a, lo_c), hi_b)
    P, C, Q = GiniParams(lo_a, hi_a), GiniParams(lo_c, hi_c), GiniParams(lo_b, hi_b)
    assert gini_leq(P, C) and gini_leq(C, Q)
    return GiniMean(P), GiniMean(C), GiniMean(Q), True


def check_ball_interval_type(
    center: MeanDescriptor,
    radius: float,
    dom: SharedDomain,
    trials: int = 1000,
    seed: int = 0,
    spread: float = 1.0,
    membership: Callable = _ball_status,
) -> BallReport:
    """Look for ``P <= C <= Q`` with ``P, Q`` in a ball but ``C`` outside it.

    For every triple the per-point squeeze
    ``|C - K| <= max(|P - K|, |Q - K|)`` is checked against the center
    ``K``.  When ``P`` and ``Q`` are not refuted as members of the closed
    (resp. open) ball, ``C`` must not be refuted either; a radius equal to
    an endpoint estimate is counted as a boundary case, where only the
    open ball excludes that endpoint.
    """
    pts = dom.points()
    k_vals = _values(center, pts)
    rng = np.random.default_rng([seed, 0xD1])
    report = BallReport(describe(center), radius, trials)
    for _ in range(trials):
        P, C, Q, certified = _random_triple(rng, center, spread)
        pv, cv, qv = (_values(m, pts) for m in (P, C, Q))
        if not certified and (np.any(pv > cv + ABS_TOL) or np.any(cv > qv + ABS_TOL)):
            report.skipped += 1
            continue
        report.checked += 1
        gap = squeeze_gap(pv, cv, qv, k_vals)
        if gap.max() > ABS_TOL:
            i = int(np.argmax(gap))
            report.squeeze_violations.append(
                {"P": describe(P), "C": describe(C), "Q": describe(Q), "point": pts[i].tolist(), "excess": float(gap[i])}
            )
        dp, dc, dq = (float(np.max(np.abs(x - k_vals))) for x in (pv, cv, qv))
        if max(dp, dq) == radius:
            report.boundary_cases += 1
        for closed, bucket in ((True, report.closed_violations), (False, report.open_violations)):
            ends_in = all(membership(x, radius, closed) == "undefeated" for x in (dp, dq))
            if ends_in and membership(dc, radius, closed) == "outside":
                bucket.append({"P": describe(P), "C": describe(C), "Q": describe(Q), "rho": [dp, dc, dq]})
    return report


def check_boundary_strictness(
    center: MeanDescriptor,
    candidate: MeanDescriptor,
    dom: SharedDomain,
    membership: Callable = _ball_status,
) -> Optional[dict]:
    """Put the radius exactly at the candidate's estimate.

    The candidate then belongs to the closed ball and is refuted from the
    open one.  Returns a description of the mismatch, or ``None``.
    """
    est = rho(center, candidate, dom)
    r = est.value
    if r <= 0:
        return None
    closed = membership(r, r, True)
    opened = membership(r, r, False)
    if closed == "undefeated" and opened == "outside":
        return None
    return {"center": describe(center), "candidate": describe(candidate), "radius": r,
            "closed": closed, "open": opened, "witness": est.witness.tolist()}


def pseudometric_violations(
    means: Sequence[MeanDescriptor], dom: SharedDomain, tol: float = ABS_TOL
) -> list:
    """Symmetry, zero self-distance and the triangle inequality on one sample set."""
    pts = dom.points()
    vals = [_values(m, pts) for m in means]
    out = []
    for i, j in itertools.combinations(range(len(means)), 2):
        dij = np.max(np.abs(vals[i] - vals[j]))
        dji = np.max(np.abs(vals[j] - vals[i]))
        if dij != dji:
            out.append(("symmetry", describe(means[i]), describe(means[j])))
    for i, a in enumerate(vals):
        if np.max(np.abs(a - a)) != 0:
            out.append(("identity", describe(means[i])))
    for i, j, k in itertools.permutations(range(len(means)), 3):
        dik = np.max(np.abs(vals[i] - vals[k]))
        via = np.max(np.abs(vals[i] - vals[j])) + np.max(np.abs(vals[j] - vals[k]))
        if dik > via + tol:
            out.append(("triangle", describe(means[i]), describe(means[j]), describe(means[k])))
    return out
