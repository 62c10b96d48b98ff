"""Lower bounds on Hardy constants and the order sandwich.

The Hardy constant ``H_M`` of a mean ``M`` is the least ``H`` with
``sum_n M(v_1..v_n) <= H * sum_n v_n`` for all positive summable ``v``.
Every finite positive sequence gives a lower bound: padding it with a
geometrically vanishing tail leaves the numerator no smaller and moves
the denominator arbitrarily little, so
``sum_{n<=N} M(prefix_n) / sum_{n<=N} v_n <= H_M``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .errors import BudgetError, DomainError, InconsistencyError
from .gini import gini_prefix_means
from .means import BlackBox, GiniMean, MeanDescriptor, evaluate, describe

CHUNK = 1 << 20
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


# --- sequence families -------------------------------------------------------

@dataclass(frozen=True)
class PowerLaw:
    """``v_n = n ** -(1 + epsilon)`` for ``n = 1..terms``."""

    epsilon: float
    terms: int

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError("power-law exponent offset must be positive")
        _check_terms(self.terms)

    def log_chunks(self, chunk: int = CHUNK) -> Iterator[np.ndarray]:
        for start in range(1, self.terms + 1, chunk):
            n = np.arange(start, min(self.terms, start + chunk - 1) + 1, dtype=float)
            yield -(1.0 + self.epsilon) * np.log(n)

    def tail_bound(self) -> float:
        # sum_{n>N} n^(-1-eps) <= int_N^inf x^(-1-eps) dx
        return self.terms ** -self.epsilon / self.epsilon


@dataclass(frozen=True)
class Geometric:
    """``v_n = ratio ** n`` for ``n = 1..terms``."""

    ratio: float
    terms: int

    def __post_init__(self):
        if not 0 < self.ratio < 1:
            raise DomainError("geometric ratio must lie in (0, 1)")
        _check_terms(self.terms)

    def log_chunks(self, chunk: int = CHUNK) -> Iterator[np.ndarray]:
        lr = math.log(self.ratio)
        for start in range(1, self.terms + 1, chunk):
            n = np.arange(start, min(self.terms, start + chunk - 1) + 1, dtype=float)
            yield n * lr

    def total(self) -> float:
        return self.ratio / (1.0 - self.ratio)


@dataclass(frozen=True)
class Explicit:
    """A finite positive sequence given entry by entry."""

    entries: tuple

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 1 or arr.size == 0 or np.any(arr <= 0) or not np.all(np.isfinite(arr)):
            raise DomainError("explicit sequences need finite, strictly positive entries")

    @property
    def terms(self) -> int:
        return len(self.entries)

    def log_chunks(self, chunk: int = CHUNK) -> Iterator[np.ndarray]:
        ell = np.log(np.asarray(self.entries, dtype=float))
        for start in range(0, ell.size, chunk):
            yield ell[start:start + chunk]


SequenceFamily = Union[PowerLaw, Geometric, Explicit]


def _check_terms(terms):
    if int(terms) != terms or terms < 1:
        raise DomainError("a family needs a positive integer number of terms")


def family_params(family: SequenceFamily) -> dict:
    if isinstance(family, PowerLaw):
        return {"kind": "powerlaw", "epsilon": family.epsilon, "terms": family.terms}
    if isinstance(family, Geometric):
        return {"kind": "geometric", "ratio": family.ratio, "terms": family.terms}
    return {"kind": "explicit", "terms": family.terms}


# --- the ratio ---------------------------------------------------------------

def _denominator(family: SequenceFamily, truncated_sum: float, tail: bool) -> float:
    if not tail:
        return truncated_sum
    if isinstance(family, Geometric):
        return family.total()
    if isinstance(family, PowerLaw):
        return truncated_sum + family.tail_bound()
    return truncated_sum


def hardy_ratio(
    m: MeanDescriptor,
    family: SequenceFamily,
    tail: bool = False,
    naive_terms: int = 5000,
) -> float:
    """``sum_{n<=N} M(v_1..v_n) / sum v_n`` for one family; a lower bound on ``H_M``.

    With ``tail=False`` the denominator is the truncated sum.  With
    ``tail=True`` it is the full infinite sum (exact for geometric
    families, an integral upper bound for power laws), which makes the
    ratio non-decreasing in the number of terms.

    Gini means are streamed in linear time.  Black-box means use their
    `prefix` hook when present and are otherwise re-evaluated on every
    prefix, which is refused beyond `naive_terms` terms.
    """
    if isinstance(m, GiniMean):
        num = den = 0.0
        seen = []

        def feed():
            for ell in family.log_chunks():
                seen.append(ell)
                yield ell

        for means in gini_prefix_means(m.params, feed()):
            num += float(np.sum(means))
            den += float(np.sum(np.exp(seen.pop())))
        return num / _denominator(family, den, tail)

    v = np.exp(np.concatenate(list(family.log_chunks())))
    if np.any(v <= 0):
        v = v[: int(np.argmin(v > 0))]
    if m.prefix is not None:
        means = np.asarray(m.prefix(v), dtype=float)
    else:
        if v.size > naive_terms:
            raise BudgetError(
                f"{describe(m)} has no prefix hook; {v.size} terms exceed the {naive_terms}-term budget"
            )
        means = np.array([evaluate(m, v[: k + 1]) for k in range(v.size)])
    return float(np.sum(means)) / _denominator(family, float(np.sum(v)), tail)


# --- search ------------------------------------------------------------------

@dataclass(frozen=True)
class HardyBudget:
    """Work limits for :func:`hardy_lower_bound`.

    The parameter grid is scanned with `grid_terms` terms per sequence and
    the best cell is refined by golden-section search with `terms` terms.
    Black-box means are capped at `blackbox_terms` (with a prefix hook) or
    `naive_terms` (without).
    """

    terms: int = 30_000_000
    grid_terms: int = 100_000
    grid_points: int = 40
    refine_steps: int = 20
    bracket_cells: int = 4
    blackbox_terms: int = 100_000
    naive_terms: int = 2000

    def __post_init__(self):
        if self.terms < 1 or self.grid_points < 2 or self.refine_steps < 0:
            raise DomainError("budget needs terms >= 1, grid_points >= 2, refine_steps >= 0")


@dataclass(frozen=True)
class HardyEstimate:
    """Enclosure data for one mean's Hardy constant.

    `lower` is a ratio actually achieved by the witness family; `upper`
    is ``inf`` unless supplied from outside (e.g. a known constant).
    """

    mean: str
    lower: float
    upper: float = math.inf
    witness: Optional[dict] = None
    evaluations: int = 0
    budget_limited: bool = False

    def __post_init__(self):
        if self.lower > self.upper:
            raise InconsistencyError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    def to_dict(self) -> dict:
        w = self.witness or {}
        return {
            "mean": self.mean,
            "lower": self.lower,
            "upper": self.upper,
            "witness_family": w.get("kind"),
            "witness_params": {k: v for k, v in w.items() if k not in ("kind", "terms")},
            "N": w.get("terms"),
            "budget_limited": self.budget_limited,
            "evaluations": self.evaluations,
        }


# each kind maps a search coordinate t (a log) to a family
_KINDS = {
    "powerlaw": (math.log(1e-4), math.log(1.0), lambda t, n: PowerLaw(math.exp(t), n)),
    "geometric": (math.log(1e-4), math.log(0.5), lambda t, n: Geometric(1.0 - math.exp(t), n)),
}
FAMILY_KINDS = tuple(_KINDS)


def _golden_max(f, a: float, b: float, steps: int):
    """Golden-section search for a maximum on ``[a, b]``; returns all probes."""
    probes = []
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    probes += [(f1, x1), (f2, x2)]
    for _ in range(steps):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
            probes.append((f1, x1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
            probes.append((f2, x2))
    return probes


def hardy_lower_bound(
    m: MeanDescriptor,
    budget: HardyBudget = HardyBudget(),
    families: Sequence[str] = FAMILY_KINDS,
) -> HardyEstimate:
    """Best Hardy ratio over the power-law and geometric families.

    For each kind, a log-spaced parameter grid is scanned at
    ``budget.grid_terms`` terms, then golden-section search runs at
    ``budget.terms`` terms on the ``budget.bracket_cells`` cells around
    the best grid point.  The largest ratio seen is returned with its
    family.  Black-box means are truncated to their term cap and the
    estimate is flagged ``budget_limited``.
    """
    limited = False
    terms, grid_terms = budget.terms, min(budget.grid_terms, budget.terms)
    if isinstance(m, BlackBox):
        cap = budget.blackbox_terms if m.prefix is not None else budget.naive_terms
        if terms > cap:
            limited = True
            terms = cap
            grid_terms = min(grid_terms, cap)

    best = (-math.inf, None)
    evaluations = 0
    for kind in families:
        try:
            t_lo, t_hi, make = _KINDS[kind]
        except KeyError:
            raise DomainError(f"unknown family kind {kind!r}; expected one of {FAMILY_KINDS}") from None

        def ratio_at(t, n):
            nonlocal evaluations, best
            evaluations += 1
            fam = make(t, n)
            r = hardy_ratio(m, fam, naive_terms=budget.naive_terms)
            if r > best[0]:
                best = (r, fam)
            return r

        grid = np.linspace(t_lo, t_hi, budget.grid_points)
        scores = [ratio_at(t, grid_terms) for t in grid]
        k = int(np.argmax(scores))
        if budget.refine_steps and terms > 0:
            a = grid[max(k - budget.bracket_cells, 0)]
            b = grid[min(k + budget.bracket_cells, len(grid) - 1)]
            ratio_at(grid[k], terms)
            _golden_max(lambda t: ratio_at(t, terms), a, b, budget.refine_steps)

    value, fam = best
    return HardyEstimate(
        mean=describe(m),
        lower=value,
        witness=family_params(fam),
        evaluations=evaluations,
        budget_limited=limited,
    )


def known_constant(m: MeanDescriptor, value: float) -> HardyEstimate:
    """An estimate whose upper end is supplied by the caller."""
    return HardyEstimate(mean=describe(m), lower=0.0, upper=float(value))


def hardy_sandwich(lower_mean: HardyEstimate, upper_mean: HardyEstimate) -> tuple[float, float]:
    """Enclosure ``[H_P.lower, H_Q.upper]`` for any ``M`` with ``P <= M <= Q``.

    The caller is responsible for the order premise.  Raises
    :class:`InconsistencyError` when the enclosure is empty, which means
    an input or the order premise is wrong.
    """
    lo, hi = lower_mean.lower, upper_mean.upper
    if lo > hi:
        raise InconsistencyError(
            f"H_P >= {lo} exceeds H_Q <= {hi} for P={lower_mean.mean}, Q={upper_mean.mean}"
        )
    return lo, hi


@dataclass
class SandwichReport:
    trials: int
    checks: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def default_families(terms: int = 20_000) -> list:
    return [
        PowerLaw(0.05, terms), PowerLaw(0.3, terms), PowerLaw(1.0, terms),
        Geometric(0.5, terms), Geometric(0.99, terms), Geometric(0.9999, terms),
        Explicit((1.0, 1e-3, 5.0, 0.2, 0.2, 7.0, 1e-2)),
    ]


def check_ratio_monotonicity(
    trials: int = 100,
    seed: int = 0,
    families: Optional[Sequence[SequenceFamily]] = None,
    tol: float = 1e-9,
    span: float = 3.0,
    leq=None,
) -> SandwichReport:
    """Ratios of ordered Gini triples ``A <= C <= B`` must be ordered too.

    Triples are certified by `leq` (default: the exact Gini order) and every
    family in `families` is tried; each ``ratio(A) > ratio(C) + tol`` or
    ``ratio(C) > ratio(B) + tol`` is recorded.
    """
    from .gini import GiniParams, gini_leq

    leq = leq or gini_leq
    families = families if families is not None else default_families()
    rng = np.random.default_rng([seed, 0x4A])
    report = SandwichReport(trials)
    for _ in range(trials):
        a_lo, b_lo = np.sort(rng.uniform(-span, span, 2))
        a_hi = rng.uniform(a_lo, span)
        b_hi = rng.uniform(max(a_hi, b_lo), span + 1.0)
        c_lo = rng.uniform(a_lo, b_lo)
        c_hi = rng.uniform(max(a_hi, c_lo), b_hi)
        A, B, C = GiniParams(a_lo, a_hi), GiniParams(b_lo, b_hi), GiniParams(c_lo, c_hi)
        if not (leq(A, C) and leq(C, B)):
            continue
        for fam in families:
            ra, rc, rb = (hardy_ratio(GiniMean(x), fam) for x in (A, C, B))
            report.checks += 1
            if ra > rc + tol or rc > rb + tol:
                report.violations.append(
                    {"A": str(A), "C": str(C), "B": str(B), "family": family_params(fam),
                     "ratios": [ra, rc, rb]}
                )
    return report
