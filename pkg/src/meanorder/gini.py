"""Gini means: stable evaluation, exact order, order intervals, boundary sets.

For ``p != q`` the Gini mean of a positive vector ``v`` is
``(sum v**p / sum v**q) ** (1 / (p - q))``; for ``p == q`` it is the
``v**p``-weighted geometric mean ``exp(sum v**p ln v / sum v**p)``.
The family is symmetric in ``(p, q)``, and its pointwise order is
decided exactly by comparing the sorted parameter pairs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Union

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, EvaluationError, PreconditionError

PARAM_CAP = 500.0
# below this |p - q| the p == q formula is used at the midpoint
BRANCH_DELTA = 1e-7


@dataclass(frozen=True)
class GiniParams:
    """Exponent pair ``(p, q)`` naming the Gini mean ``G_{p,q}``."""

    p: float
    q: float

    def __post_init__(self):
        if not (math.isfinite(self.p) and math.isfinite(self.q)):
            raise DomainError(f"Gini exponents must be finite, got ({self.p}, {self.q})")

    @property
    def lo(self) -> float:
        return min(self.p, self.q)

    @property
    def hi(self) -> float:
        return max(self.p, self.q)

    def normalized(self) -> "GiniParams":
        return GiniParams(self.lo, self.hi)

    @classmethod
    def parse(cls, text: str) -> "GiniParams":
        try:
            p, q = (float(t) for t in text.split(","))
        except ValueError:
            raise DomainError(f"expected 'p,q', got {text!r}") from None
        return cls(p, q)

    def __str__(self):
        return f"{self.p:g},{self.q:g}"


def _as_params(params) -> GiniParams:
    if isinstance(params, GiniParams):
        return params
    p, q = params
    return GiniParams(float(p), float(q))


def _check_cap(params: GiniParams):
    if abs(params.p) > PARAM_CAP or abs(params.q) > PARAM_CAP:
        raise DomainError(f"|p|, |q| must not exceed {PARAM_CAP:g}, got ({params.p}, {params.q})")


def _softmax(a: np.ndarray) -> np.ndarray:
    w = np.exp(a - a.max(axis=-1, keepdims=True))
    return w / w.sum(axis=-1, keepdims=True)


def gini_eval(params, v) -> Union[float, np.ndarray]:
    """Evaluate ``G_{p,q}`` on one vector or on each row of a 2-D array.

    The computation works on ``x = ln v - c`` where ``c`` is the midpoint of
    the log-range, which by homogeneity only shifts the result.  Close
    exponents use ``log1p``/``expm1`` so the ``1/(p-q)`` factor does not
    amplify cancellation; distant exponents use a difference of
    log-sum-exps.  The result is clamped to ``[min v, max v]`` to absorb
    last-ulp rounding.

    Raises
    ------
    DomainError
        If an exponent exceeds ``PARAM_CAP`` in magnitude or ``v`` has a
        non-positive or non-finite entry.
    EvaluationError
        If the result is not finite.
    """
    params = _as_params(params)
    _check_cap(params)
    v = np.asarray(v, dtype=float)
    if v.ndim == 0 or v.shape[-1] == 0:
        raise DomainError("a mean needs at least one entry")
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise DomainError(f"entries must be finite and strictly positive: {v}")

    lo, hi = params.lo, params.hi
    d = hi - lo
    ell = np.log(v)
    lmin = ell.min(axis=-1, keepdims=True)
    lmax = ell.max(axis=-1, keepdims=True)
    c = 0.5 * (lmin + lmax)
    x = ell - c
    if d < BRANCH_DELTA:
        shift = (_softmax(0.5 * (lo + hi) * x) * x).sum(axis=-1)
    elif d <= 1.0:
        s = (_softmax(lo * x) * np.expm1(d * x)).sum(axis=-1)
        shift = np.log1p(s) / d
    else:
        shift = (logsumexp(hi * x, axis=-1) - logsumexp(lo * x, axis=-1)) / d
    out = np.exp(c[..., 0] + shift)
    if not np.all(np.isfinite(out)):
        raise EvaluationError(f"non-finite Gini mean for {params}", point=v)
    out = np.clip(out, v.min(axis=-1), v.max(axis=-1))
    return float(out) if out.ndim == 0 else out


def _log_cumsum(a: np.ndarray, carry: float) -> tuple[np.ndarray, float]:
    """Running ``log(exp(carry) + cumsum(exp(a)))`` without overflow.

    Uses one shift and a plain cumsum when every prefix stays within 600
    nats of the chunk maximum, and ``logaddexp.accumulate`` otherwise.
    """
    s = max(carry, float(a.max()))
    if s == -np.inf:
        return np.full_like(a, -np.inf), -np.inf
    # prefix sums are bounded below by their first term
    if s - max(carry, float(a[0])) < 600.0:
        out = np.exp(a - s)
        np.cumsum(out, out=out)
        out += math.exp(carry - s)
        np.log(out, out=out)
        out += s
    else:
        out = np.logaddexp.accumulate(np.concatenate(([carry], a)))[1:]
    return out, float(out[-1])


def _weighted_log_mean(ell: np.ndarray, a: np.ndarray, carry: tuple) -> tuple[np.ndarray, tuple]:
    """Running ``sum e^a ell / sum e^a`` continued from ``carry = (log W, mean)``."""
    log_w, mean = carry
    s = max(log_w, float(a.max()))
    if s - max(log_w, float(a[0])) < 600.0:
        w = np.exp(a - s)
        w0 = math.exp(log_w - s)
        num = np.cumsum(w * ell)
        num += w0 * mean
        np.cumsum(w, out=w)
        w += w0
        out = num / w
        return out, (math.log(w[-1]) + s, float(out[-1]))
    # wide dynamic range: split the signed numerator into two log-sums
    with np.errstate(divide="ignore"):
        pos = np.where(ell > 0, a + np.log(np.abs(ell)), -np.inf)
        neg = np.where(ell < 0, a + np.log(np.abs(ell)), -np.inf)
        c_pos = log_w + math.log(mean) if mean > 0 else -np.inf
        c_neg = log_w + math.log(-mean) if mean < 0 else -np.inf
    lw, new_w = _log_cumsum(a, log_w)
    lp, _ = _log_cumsum(pos, c_pos)
    ln, _ = _log_cumsum(neg, c_neg)
    out = np.exp(lp - lw) - np.exp(ln - lw)
    return out, (new_w, float(out[-1]))


def gini_prefix_means(params, log_chunks: Iterable[np.ndarray]) -> Iterator[np.ndarray]:
    """Stream ``G(v_1..v_n)`` for every prefix of a sequence given as logs.

    `log_chunks` yields consecutive pieces of ``ln v``; one array of prefix
    means is yielded per piece.  Power sums are carried as log-sums
    between pieces, so the cost is linear in the sequence length and
    exponents up to ``PARAM_CAP`` do not overflow.  Unlike
    :func:`gini_eval` the values are not clamped to the entry range.
    """
    params = _as_params(params)
    _check_cap(params)
    lo, hi = params.lo, params.hi
    d = hi - lo
    mid = 0.5 * (lo + hi)
    l_hi = l_lo = -np.inf
    weighted = (-np.inf, 0.0)
    for ell in log_chunks:
        ell = np.asarray(ell, dtype=float)
        if ell.size == 0:
            continue
        if not np.all(np.isfinite(ell)):
            raise DomainError("sequence entries must be finite and strictly positive")
        if d < BRANCH_DELTA:
            log_mean, weighted = _weighted_log_mean(ell, mid * ell, weighted)
        else:
            lh, l_hi = _log_cumsum(hi * ell, l_hi)
            ll, l_lo = _log_cumsum(lo * ell, l_lo)
            log_mean = lh
            log_mean -= ll
            log_mean /= d
        yield np.exp(log_mean, out=log_mean)


def gini_leq(a, b) -> bool:
    """Exact pointwise order: ``G_a <= G_b`` on every positive vector of
    every length iff ``min a <= min b`` and ``max a <= max b``."""
    a, b = _as_params(a), _as_params(b)
    return a.lo <= b.lo and a.hi <= b.hi


def gini_interval_contains(lower, upper, candidate) -> bool:
    """Membership of `candidate` in the order interval ``[G_lower, G_upper]``.

    With ``(p, q) = lower`` and ``(r, s) = upper`` (each sorted), the
    interval is the set of ``G_{x,y}`` with ``(x, y)`` in
    ``[p,r] x [q,s]`` or ``[q,s] x [p,r]``.  The pairs must satisfy
    ``p <= s`` and ``q, r`` in ``[p, s]``.
    """
    lower, upper, candidate = _as_params(lower), _as_params(upper), _as_params(candidate)
    p, q = lower.lo, lower.hi
    r, s = upper.lo, upper.hi
    _check_interval_hypothesis(p, q, r, s)
    x, y = candidate.p, candidate.q
    return (p <= x <= r and q <= y <= s) or (q <= x <= s and p <= y <= r)


def _check_interval_hypothesis(p, q, r, s):
    if not p <= s:
        raise PreconditionError(f"interval ends need p <= s, got p={p}, s={s}")
    if not p <= q <= s:
        raise PreconditionError(f"interval ends need q in [p, s], got q={q}, [p, s]=[{p}, {s}]")
    if not p <= r <= s:
        raise PreconditionError(f"interval ends need r in [p, s], got r={r}, [p, s]=[{p}, {s}]")


# --- involutions and boundary sets -------------------------------------------

@dataclass(frozen=True)
class PositiveReciprocal:
    """``f(x) = c / x`` on ``(0, inf)``."""

    c: float = 1.0
    sign = 1

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError("reciprocal constant must be positive")

    def __call__(self, x):
        return self.c / np.asarray(x, dtype=float)


@dataclass(frozen=True)
class NegativeReciprocal:
    """``g(x) = d / x`` on ``(-inf, 0)``; negative-valued and decreasing."""

    d: float = 1.0
    sign = -1

    def __post_init__(self):
        if not self.d > 0:
            raise DomainError("reciprocal constant must be positive")

    def __call__(self, x):
        return self.d / np.asarray(x, dtype=float)


@dataclass(frozen=True)
class UserTable:
    """Decreasing involution given by a table of points on one half-line.

    The graph is interpolated linearly in log-log coordinates and
    extrapolated along the end segments, so a point set symmetric under
    ``(x, y) -> (y, x)`` gives an exact involution that diverges at 0.
    For ``sign=-1`` the points are given for ``|x|`` and the map is
    ``g(x) = -F(-x)``.
    """

    points: tuple
    sign: int = 1
    _lx: np.ndarray = field(init=False, repr=False, compare=False)
    _ly: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise DomainError("a table needs at least two (x, y) points")
        if np.any(pts <= 0) or not np.all(np.isfinite(pts)):
            raise DomainError("table points are given as positive magnitudes")
        pts = pts[np.argsort(pts[:, 0])]
        if np.any(np.diff(pts[:, 0]) <= 0) or np.any(np.diff(pts[:, 1]) >= 0):
            raise DomainError("table must be strictly decreasing")
        if self.sign not in (1, -1):
            raise DomainError("sign must be +1 or -1")
        object.__setattr__(self, "_lx", np.log(pts[:, 0]))
        object.__setattr__(self, "_ly", np.log(pts[:, 1]))

    def _magnitude(self, t):
        lt = np.log(t)
        lx, ly = self._lx, self._ly
        out = np.interp(lt, lx, ly)
        left = (ly[1] - ly[0]) / (lx[1] - lx[0])
        right = (ly[-1] - ly[-2]) / (lx[-1] - lx[-2])
        out = np.where(lt < lx[0], ly[0] + left * (lt - lx[0]), out)
        out = np.where(lt > lx[-1], ly[-1] + right * (lt - lx[-1]), out)
        return np.exp(out)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.sign * self._magnitude(self.sign * x)


Involution = Union[PositiveReciprocal, NegativeReciprocal, UserTable]


def validate_involution(f: Involution, n_points: int = 1000, rtol: float = 1e-6) -> None:
    """Check the hypotheses the boundary-set statements rely on.

    Samples `n_points` log-spaced points on the half-line and checks that
    ``f`` maps it into itself, is strictly decreasing, satisfies
    ``f(f(x)) = x`` to `rtol`, and blows up along ``x -> 0``.
    """
    sign = f.sign
    x = sign * np.geomspace(1e-6, 1e6, n_points)
    y = f(x)
    if np.any(np.sign(y) != sign) or not np.all(np.isfinite(y)):
        raise DomainError("involution must map its half-line into itself")
    if np.any(np.diff(y) * sign >= 0):
        raise DomainError("involution must be strictly decreasing")
    back = f(y)
    if np.any(np.abs(back - x) > rtol * np.abs(x)):
        worst = int(np.argmax(np.abs(back - x) / np.abs(x)))
        raise DomainError(f"f(f(x)) != x at x={x[worst]:g} (got {back[worst]:g})")
    near = f(sign * np.geomspace(1e-3, 1e-12, 10)) * sign
    if np.any(np.diff(near) <= 0):
        raise DomainError("involution must diverge at 0")


BOUNDARY_SETS = ("X", "Y", "XY")


def _in_x(x, y, f):
    return x <= 0 or y <= float(f(x))


def _in_y(x, y, g):
    return x >= 0 or y >= float(g(x))


def _in_xy(x, y, f, g):
    return (x < 0 and y >= float(g(x))) or x == 0 or (x > 0 and y <= float(f(x)))


def boundary_set_contains(set_id: str, f: Involution, g: Involution, params) -> bool:
    """Membership of ``G_{x,y}`` in one of the involution-bounded sets.

    ``X``: ``x <= 0`` or ``y <= f(x)``; ``Y``: ``x >= 0`` or ``y >= g(x)``;
    ``XY``: ``x < 0, y >= g(x)`` or ``x = 0`` or ``x > 0, y <= f(x)``.
    A mean belongs when either ordering of its exponents qualifies.
    """
    params = _as_params(params)
    x, y = params.p, params.q
    if set_id == "X":
        test = lambda a, b: _in_x(a, b, f)
    elif set_id == "Y":
        test = lambda a, b: _in_y(a, b, g)
    elif set_id == "XY":
        test = lambda a, b: _in_xy(a, b, f, g)
    else:
        raise DomainError(f"unknown boundary set {set_id!r}; expected one of {BOUNDARY_SETS}")
    return test(x, y) or test(y, x)


@dataclass
class BoundaryReport:
    set_id: str
    trials: int
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _sample_member(rng, set_id, f, g, radius, above=None):
    """Rejection-sample a member of the set, optionally ``>=`` a given mean.

    Half the draws are placed on the curve ``y = f(x)`` or ``y = g(x)``
    so the boundary itself is exercised.
    """
    for _ in range(200):
        if above is None:
            lo_min, hi_min = -radius, -radius
        else:
            lo_min, hi_min = above.lo, above.hi
        # boundary draws can land beyond `radius`; keep the ranges non-empty
        x = rng.uniform(lo_min, max(radius, lo_min))
        y = rng.uniform(max(hi_min, x), max(radius, hi_min, x))
        if rng.random() < 0.5:
            if set_id in ("X", "XY") and x > 0 and rng.random() < 0.5:
                y = float(f(x))
            elif set_id in ("Y", "XY") and y < 0:
                x = float(g(y))
        cand = GiniParams(x, y)
        if above is not None and not gini_leq(above, cand):
            continue
        if boundary_set_contains(set_id, f, g, cand):
            return cand
    return None


def check_boundary_interval_type(
    set_id: str,
    f: Involution,
    g: Involution,
    trials: int = 1000,
    seed: int = 0,
    radius: float = 6.0,
    leq: Callable = gini_leq,
) -> BoundaryReport:
    """Search for ``A <= C <= B`` with ``A, B`` in the set but ``C`` outside.

    ``C`` is drawn from the definitional order interval: its sorted
    exponents range over ``[A.lo, B.lo] x [A.hi, B.hi]``.
    """
    validate_involution(f)
    validate_involution(g)
    rng = np.random.default_rng([seed, 0xB0])
    report = BoundaryReport(set_id, trials)
    for _ in range(trials):
        a = _sample_member(rng, set_id, f, g, radius)
        if a is None:
            continue
        b = _sample_member(rng, set_id, f, g, radius, above=a)
        if b is None or not leq(a, b):
            continue
        c_lo = rng.uniform(a.lo, b.lo)
        c_hi = rng.uniform(max(a.hi, c_lo), b.hi)
        if rng.random() < 0.1:
            c_lo, c_hi = (a.lo, a.hi) if rng.random() < 0.5 else (b.lo, b.hi)
        c = GiniParams(c_lo, c_hi)
        report.checked += 1
        if not boundary_set_contains(set_id, f, g, c):
            report.violations.append((a, b, c))
    return report


# --- sampled soundness of the exact order ------------------------------------

@dataclass
class ComparabilityReport:
    """Sampled evidence for the exact order on a set of exponent pairs.

    `violations` lists certified pairs ``a <= b`` that a sample refutes;
    `unrefuted` lists pairs ordered in neither direction for which no
    sample separates them either way.
    """

    pairs: int
    samples: int
    certified: int = 0
    refutable: int = 0
    refuted: int = 0
    violations: list = field(default_factory=list)
    unrefuted: list = field(default_factory=list)

    @property
    def refuted_fraction(self) -> float:
        return self.refuted / self.refutable if self.refutable else 1.0

    def ok(self, min_refuted: float = 0.99) -> bool:
        return not self.violations and self.refuted_fraction >= min_refuted


def check_comparability(
    params: list,
    sampler,
    samples: int = 1000,
    leq: Callable = gini_leq,
    rtol: float = 1e-9,
) -> ComparabilityReport:
    """Compare every ordered pair of `params` against sampled vectors.

    Pairs that `leq` certifies must show no sample with
    ``G_a(v) > G_b(v)`` beyond `rtol`; pairs certified in neither
    direction should be separated by some sample in at least one.
    """
    params = [_as_params(p) for p in params]
    k = len(params)
    vals = np.empty((k, samples))
    vectors = {}
    for idx, rows in sampler.by_length(samples):
        for i, pr in enumerate(params):
            vals[i, idx] = gini_eval(pr, rows)
        vectors.update(zip(idx.tolist(), rows))
    certified = np.array([[bool(leq(a, b)) for b in params] for a in params])
    beats = np.zeros((k, k), dtype=bool)
    first = np.full((k, k), -1)
    for i in range(k):
        diff = vals[i][None, :] - vals
        bad = diff > rtol * np.maximum(np.abs(vals[i])[None, :], np.abs(vals))
        beats[i] = bad.any(axis=1)
        first[i] = np.where(beats[i], bad.argmax(axis=1), -1)
    report = ComparabilityReport(pairs=k * k, samples=samples)
    report.certified = int(certified.sum())
    for i, j in np.argwhere(certified & beats):
        v = vectors[int(first[i, j])]
        report.violations.append((params[i], params[j], v))
    open_pairs = ~certified & ~certified.T
    report.refutable = int(open_pairs.sum())
    separated = beats | beats.T
    report.refuted = int((open_pairs & separated).sum())
    for i, j in np.argwhere(open_pairs & ~separated):
        report.unrefuted.append((params[i], params[j]))
    return report
