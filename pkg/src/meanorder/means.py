"""Mean descriptors, evaluation dispatch and the sampled pointwise order."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import DomainError, EvaluationError
from .gini import GiniParams, gini_eval, gini_leq
from .sampling import DomainSampler

# relative gap separating a genuine order violation from rounding noise
ORDER_RTOL = 1e-9


def as_sample_vector(v) -> np.ndarray:
    """Validate a finite, non-empty vector of strictly positive reals."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"a sample vector is a non-empty 1-D sequence, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"entries must be finite and strictly positive: {arr}")
    return arr


@dataclass(frozen=True)
class GiniMean:
    params: GiniParams

    @classmethod
    def of(cls, p: float, q: float) -> "GiniMean":
        return cls(GiniParams(float(p), float(q)))

    @property
    def label(self) -> str:
        return f"gini:{self.params}"


@dataclass(frozen=True)
class BlackBox:
    """A mean known only through evaluation.

    `func` maps one positive vector to a real.  `rows` (optional) maps a
    2-D array to one value per row, and `prefix` (optional) maps a
    sequence to the values on all of its prefixes; both are speed-ups
    that must agree with `func`.  No internality is assumed; wrap with
    :func:`internal` to enforce it.
    """

    func: Callable[[np.ndarray], float] = field(compare=False)
    label: str = "anonymous"
    rows: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)
    prefix: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)


MeanDescriptor = Union[GiniMean, BlackBox]

MIN = BlackBox(
    np.min, "min",
    rows=lambda x: np.min(x, axis=-1),
    prefix=np.minimum.accumulate,
)
MAX = BlackBox(
    np.max, "max",
    rows=lambda x: np.max(x, axis=-1),
    prefix=np.maximum.accumulate,
)
BUILTIN_BLACKBOXES = {"min": MIN, "max": MAX}


def evaluate(m: MeanDescriptor, v) -> float:
    v = as_sample_vector(v)
    if isinstance(m, GiniMean):
        return gini_eval(m.params, v)
    value = m.func(v)
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise EvaluationError(f"{m.label} returned a non-real value {value!r}", point=v) from None
    if not np.isfinite(value):
        raise EvaluationError(f"{m.label} returned {value} at v={v}", point=v)
    return value


def evaluate_rows(m: MeanDescriptor, rows) -> np.ndarray:
    """Evaluate on each row of a 2-D array of equal-length vectors."""
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2:
        raise DomainError("expected a 2-D array of sample vectors")
    if isinstance(m, GiniMean):
        return gini_eval(m.params, rows)
    if m.rows is not None:
        out = np.asarray(m.rows(rows), dtype=float)
        bad = ~np.isfinite(out)
        if bad.any():
            i = int(np.argmax(bad))
            raise EvaluationError(f"{m.label} returned {out[i]} at v={rows[i]}", point=rows[i])
        return out
    return np.array([evaluate(m, r) for r in rows])


def internal(m: MeanDescriptor, rtol: float = 1e-12) -> BlackBox:
    """Wrap `m` so that any value outside ``[min v, max v]`` raises."""

    def checked(v):
        value = evaluate(m, v)
        lo, hi = v.min(), v.max()
        slack = rtol * max(abs(lo), abs(hi))
        if not lo - slack <= value <= hi + slack:
            raise EvaluationError(f"{describe(m)} is not internal at v={v}: {value}", point=v)
        return value

    return BlackBox(checked, f"internal({describe(m)})")


def describe(m: MeanDescriptor) -> str:
    """Serialize as ``gini:p,q`` or ``blackbox:<label>``.

    Black-box means are not round-trippable unless their label names a
    builtin.
    """
    if isinstance(m, GiniMean):
        return m.label
    return f"blackbox:{m.label}"


def parse_mean(text: str) -> MeanDescriptor:
    kind, _, rest = text.partition(":")
    if kind == "gini":
        return GiniMean(GiniParams.parse(rest))
    if kind == "blackbox":
        try:
            return BUILTIN_BLACKBOXES[rest]
        except KeyError:
            raise DomainError(
                f"black-box mean {rest!r} cannot be reconstructed from text; "
                f"builtins are {sorted(BUILTIN_BLACKBOXES)}"
            ) from None
    raise DomainError(f"unrecognized mean {text!r}; expected gini:p,q or blackbox:<label>")


@dataclass(frozen=True)
class OrderVerdict:
    """Outcome of comparing two means.

    `status` is ``"yes"`` or ``"no"`` when `certain`, and ``"no"`` or
    ``"undefeated"`` for sampled comparisons: sampling can refute an
    inequality but never establish it.
    """

    status: str
    certain: bool
    samples: int
    witness: Optional[np.ndarray] = None
    witness_index: Optional[int] = None
    gap: Optional[float] = None


def violates(left: np.ndarray, right: np.ndarray, rtol: float = ORDER_RTOL) -> np.ndarray:
    """Elementwise ``left > right`` beyond a relative tolerance."""
    scale = np.maximum(np.abs(left), np.abs(right))
    return left - right > rtol * scale


def find_witness(
    m1: MeanDescriptor,
    m2: MeanDescriptor,
    sampler: DomainSampler,
    samples: int,
    rtol: float = ORDER_RTOL,
):
    """Lowest sampler index ``i`` with ``m1(v_i) > m2(v_i)`` beyond `rtol`.

    Returns ``(index, vector, gap)`` or ``None``.
    """
    best = None
    for idx, rows in sampler.by_length(samples):
        a = evaluate_rows(m1, rows)
        b = evaluate_rows(m2, rows)
        bad = np.flatnonzero(violates(a, b, rtol))
        if bad.size:
            k = bad[0]
            if best is None or idx[k] < best[0]:
                best = (int(idx[k]), rows[k], float(a[k] - b[k]))
    return best


def pointwise_leq(
    m1: MeanDescriptor,
    m2: MeanDescriptor,
    sampler: Optional[DomainSampler] = None,
    samples: int = 1000,
    rtol: float = ORDER_RTOL,
) -> OrderVerdict:
    """Decide or refute ``m1 <= m2`` pointwise on positive vectors.

    Two Gini means are compared exactly; if they are not ordered a sampled
    witness is attached when one is found.  Any other pair is sampled and
    the verdict is ``"no"`` (with a witness) or ``"undefeated"``.
    """
    sampler = sampler or DomainSampler()
    exact = isinstance(m1, GiniMean) and isinstance(m2, GiniMean)
    if exact and gini_leq(m1.params, m2.params):
        return OrderVerdict("yes", True, 0)
    hit = find_witness(m1, m2, sampler, samples, rtol)
    if exact:
        if hit is None:
            return OrderVerdict("no", True, samples)
        return OrderVerdict("no", True, samples, hit[1], hit[0], hit[2])
    if hit is None:
        return OrderVerdict("undefeated", False, samples)
    return OrderVerdict("no", False, samples, hit[1], hit[0], hit[2])
