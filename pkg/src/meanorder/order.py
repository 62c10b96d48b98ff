"""Brackets, the interval hull and interval-type sets on finite posets.

A subset ``I`` of an ordered set is *interval-type* when every element
squeezed between two members of ``I`` belongs to ``I``.  The hull
``gi_set`` collects everything squeezed between members; interval-type
sets are exactly its fixpoints.

Internally subsets are bitmasks over element positions, which keeps the
exhaustive ``2**n`` sweeps cheap.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional, Sequence

import numpy as np

from .errors import DomainError

MAX_EXHAUSTIVE = 16


class FinitePoset:
    """Finite set with an explicit partial order.

    Parameters
    ----------
    elements : sequence of hashable ids
    leq : (n, n) boolean array
        ``leq[i, j]`` means ``elements[i] <= elements[j]``.  The relation
        is validated, never repaired: it must already be reflexive,
        antisymmetric and transitive.
    """

    def __init__(self, elements: Sequence[Hashable], leq):
        elements = list(elements)
        leq = np.array(leq, dtype=bool)
        n = len(elements)
        if len(set(elements)) != n:
            raise DomainError("element ids must be distinct")
        if leq.shape != (n, n):
            raise DomainError(f"relation must be {n}x{n}, got {leq.shape}")
        if not leq.diagonal().all():
            i = int(np.argmin(leq.diagonal()))
            raise DomainError(f"relation is not reflexive at {elements[i]!r}")
        both = leq & leq.T
        np.fill_diagonal(both, False)
        if both.any():
            i, j = np.argwhere(both)[0]
            raise DomainError(f"relation is not antisymmetric: {elements[i]!r} and {elements[j]!r}")
        two_step = (leq.astype(np.uint8) @ leq.astype(np.uint8)) > 0
        if (two_step & ~leq).any():
            i, j = np.argwhere(two_step & ~leq)[0]
            raise DomainError(f"relation is not transitive: {elements[i]!r} <= {elements[j]!r} is implied but missing")
        self.elements = tuple(elements)
        self.leq = leq
        self.leq.setflags(write=False)
        self._index = {e: i for i, e in enumerate(elements)}
        self._up = [sum(1 << int(j) for j in np.flatnonzero(leq[i])) for i in range(n)]
        self._down = [sum(1 << int(j) for j in np.flatnonzero(leq[:, i])) for i in range(n)]

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"FinitePoset({list(self.elements)!r})"

    def index(self, e) -> int:
        try:
            return self._index[e]
        except (KeyError, TypeError):
            raise DomainError(f"unknown element {e!r}") from None

    def le(self, a, b) -> bool:
        return bool(self.leq[self.index(a), self.index(b)])

    def mask(self, members: Iterable) -> int:
        out = 0
        for e in members:
            out |= 1 << self.index(e)
        return out

    def members(self, mask: int) -> frozenset:
        return frozenset(e for i, e in enumerate(self.elements) if mask >> i & 1)

    def full(self) -> "SubsetView":
        return SubsetView(self, frozenset(self.elements))

    def subset(self, members: Iterable) -> "SubsetView":
        return SubsetView(self, frozenset(members))

    def restrict(self, members: Iterable) -> "FinitePoset":
        """The induced order on a subset, elements kept in parent order."""
        keep = sorted(self.index(e) for e in set(members))
        return FinitePoset([self.elements[i] for i in keep], self.leq[np.ix_(keep, keep)])

    # bitmask kernels

    def _hull_mask(self, mask: int) -> int:
        above = below = 0
        i = 0
        m = mask
        while m:
            if m & 1:
                above |= self._up[i]
                below |= self._down[i]
            m >>= 1
            i += 1
        return above & below

    def _bracket_mask(self, i: int, j: int) -> int:
        return self._up[i] & self._down[j]

    def down_set(self, members: Iterable) -> frozenset:
        out = 0
        for e in members:
            out |= self._down[self.index(e)]
        return self.members(out)

    def up_set(self, members: Iterable) -> frozenset:
        out = 0
        for e in members:
            out |= self._up[self.index(e)]
        return self.members(out)


@dataclass(frozen=True)
class SubsetView:
    parent: FinitePoset
    members: frozenset

    def __post_init__(self):
        for e in self.members:
            self.parent.index(e)


@dataclass(frozen=True)
class ITypeVerdict:
    holds: bool
    witness: Optional[Hashable] = None

    def __bool__(self):
        return self.holds


def bracket(space: SubsetView, lower, upper) -> frozenset:
    """Members ``y`` of `space` with ``lower <= y <= upper``.

    The endpoints only need to belong to the parent poset; the bracket is
    empty when ``lower`` is not below ``upper``.
    """
    P = space.parent
    i, j = P.index(lower), P.index(upper)
    return P.members(P._bracket_mask(i, j) & P.mask(space.members))


def _check_inner(inner: SubsetView, ambient: FinitePoset):
    if inner.parent is not ambient:
        raise DomainError("inner subset must be drawn from the ambient poset")


def gi_set(inner: SubsetView, ambient: FinitePoset) -> frozenset:
    """Elements of `ambient` squeezed between two members of `inner`."""
    _check_inner(inner, ambient)
    return ambient.members(ambient._hull_mask(ambient.mask(inner.members)))


def is_interval_type(inner: SubsetView, ambient: FinitePoset) -> ITypeVerdict:
    """Whether ``gi_set(inner) == inner``; otherwise names one extra element."""
    _check_inner(inner, ambient)
    mask = ambient.mask(inner.members)
    extra = ambient._hull_mask(mask) & ~mask
    if not extra:
        return ITypeVerdict(True)
    low = (extra & -extra).bit_length() - 1
    return ITypeVerdict(False, ambient.elements[low])


def iter_interval_type_masks(P: FinitePoset) -> Iterable[int]:
    """All interval-type subsets of `P` as bitmasks (exhaustive)."""
    if len(P) > MAX_EXHAUSTIVE:
        raise DomainError(f"exhaustive sweeps are capped at {MAX_EXHAUSTIVE} elements")
    for mask in range(1 << len(P)):
        if P._hull_mask(mask) == mask:
            yield mask


# --- random posets and fixtures ---------------------------------------------

def random_poset(n: int, density: float, rng: np.random.Generator, labels=None) -> FinitePoset:
    """Random partial order: a random DAG on a shuffled ranking, closed transitively."""
    rel = np.triu(rng.random((n, n)) < density, k=1)
    rel |= np.eye(n, dtype=bool)
    for k in range(n):
        rel |= rel[:, [k]] & rel[[k], :]
    perm = rng.permutation(n)
    rel = rel[np.ix_(perm, perm)]
    return FinitePoset(labels if labels is not None else list(range(n)), rel)


def chain(n: int) -> FinitePoset:
    return FinitePoset(list(range(1, n + 1)), np.triu(np.ones((n, n), dtype=bool)))


def diamond() -> FinitePoset:
    elems = ["bot", "a", "b", "top"]
    le = {("bot", x) for x in elems} | {(x, "top") for x in elems} | {(x, x) for x in elems}
    return FinitePoset(elems, [[(x, y) in le for y in elems] for x in elems])


def parse_poset(text: str) -> FinitePoset:
    """Read the fixture format.

    One ``elements: a b c`` line and one ``le: x y`` line per related pair,
    reflexive pairs included.  Blank lines and ``#`` comments are
    ignored.  Nothing is inferred; the relation is validated as given.
    """
    elements = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key, toks = key.strip(), rest.split()
        if key == "elements":
            if elements is not None:
                raise DomainError(f"line {lineno}: duplicate elements line")
            elements = toks
        elif key == "le":
            if len(toks) != 2:
                raise DomainError(f"line {lineno}: 'le' takes exactly two ids")
            pairs.append((lineno, *toks))
        else:
            raise DomainError(f"line {lineno}: unknown directive {key!r}")
    if elements is None:
        raise DomainError("missing 'elements:' line")
    idx = {e: i for i, e in enumerate(elements)}
    rel = np.zeros((len(elements), len(elements)), dtype=bool)
    for lineno, x, y in pairs:
        if x not in idx or y not in idx:
            raise DomainError(f"line {lineno}: unknown element in 'le: {x} {y}'")
        rel[idx[x], idx[y]] = True
    return FinitePoset(elements, rel)


def format_poset(P: FinitePoset) -> str:
    lines = ["elements: " + " ".join(str(e) for e in P.elements)]
    for i, j in np.argwhere(P.leq):
        lines.append(f"le: {P.elements[i]} {P.elements[j]}")
    return "\n".join(lines) + "\n"


# --- closure laws ------------------------------------------------------------

LAWS = ("intersection", "increasing-union", "restriction", "bracket-union")


@dataclass
class LawRecord:
    law: str
    poset_seed: int
    verdict: str
    witness: Optional[dict] = None

    def to_json(self) -> str:
        rec = {"law": self.law, "poset_seed": self.poset_seed, "verdict": self.verdict}
        if self.witness is not None:
            rec["witness"] = self.witness
        return json.dumps(rec, sort_keys=True, default=_jsonable)


def _jsonable(x):
    if isinstance(x, (frozenset, set)):
        return sorted(x, key=str)
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(type(x))


@dataclass
class ClosureReport:
    records: list = field(default_factory=list)

    @property
    def violations(self) -> list:
        return [r for r in self.records if r.verdict == "violated"]

    @property
    def ok(self) -> bool:
        return not self.violations


def _random_itype_masks(P: FinitePoset, rng, count: int) -> list[int]:
    """Random interval-type subsets: filtered random subsets plus hulls."""
    n = len(P)
    out = []
    for _ in range(4 * count):
        mask = int(rng.integers(0, 1 << n)) if n else 0
        if P._hull_mask(mask) == mask:
            out.append(mask)
        else:
            out.append(P._hull_mask(mask))
        if len(out) >= count:
            break
    return out


def check_closure_laws(
    ambient: FinitePoset,
    trials: int = 10,
    seed: int = 0,
    max_chain: int = 5,
) -> ClosureReport:
    """Exercise the closure laws of interval-type sets on random instances.

    Per trial: (a) the intersection of two interval-type sets, (b) the union
    of a nested chain of at most `max_chain` interval-type sets, (c) the
    trace ``I & Y`` inside the restricted order on a random ``Y``, and
    (d) ``[p,q] | [q,r] <= [p,r]`` for a random ``p <= q <= r``.
    """
    if trials < 1:
        raise DomainError("trials must be at least 1")
    P = ambient
    n = len(P)
    report = ClosureReport()
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        rec_seed = seed * 1_000_003 + t

        i1, i2 = _random_itype_masks(P, rng, 2)
        inter = i1 & i2
        ok = P._hull_mask(inter) == inter
        report.records.append(LawRecord(
            "intersection", rec_seed, "holds" if ok else "violated",
            None if ok else {"I1": P.members(i1), "I2": P.members(i2)},
        ))

        length = int(rng.integers(1, max_chain + 1))
        seeds = [int(rng.integers(0, 1 << n)) if n else 0 for _ in range(length)]
        nested, acc = [], 0
        for s in seeds:
            acc |= s
            nested.append(P._hull_mask(acc))
        union = 0
        for m in nested:
            union |= m
        ok = all(a & ~b == 0 for a, b in zip(nested, nested[1:])) and P._hull_mask(union) == union
        report.records.append(LawRecord(
            "increasing-union", rec_seed, "holds" if ok else "violated",
            None if ok else {"chain": [P.members(m) for m in nested]},
        ))

        (itype,) = _random_itype_masks(P, rng, 1)
        y_mask = int(rng.integers(0, 1 << n)) if n else 0
        Y = P.members(y_mask)
        sub = P.restrict(Y)
        trace = P.members(itype & y_mask)
        verdict = is_interval_type(sub.subset(trace), sub)
        report.records.append(LawRecord(
            "restriction", rec_seed, "holds" if verdict else "violated",
            None if verdict else {"I": P.members(itype), "Y": Y, "extra": verdict.witness},
        ))

        triples = [(p, q, r) for p, q, r in itertools.product(range(n), repeat=3)
                   if P.leq[p, q] and P.leq[q, r]]
        if triples:
            p, q, r = triples[int(rng.integers(len(triples)))]
            left = P._bracket_mask(p, q) | P._bracket_mask(q, r)
            ok = left & ~P._bracket_mask(p, r) == 0
            report.records.append(LawRecord(
                "bracket-union", rec_seed, "holds" if ok else "violated",
                None if ok else {"p": P.elements[p], "q": P.elements[q], "r": P.elements[r]},
            ))
    return report


def bracket_union_gap(P: FinitePoset, p, q, r) -> frozenset:
    """Elements of ``[p,r]`` missed by ``[p,q] | [q,r]``."""
    full = P.full()
    return bracket(full, p, r) - (bracket(full, p, q) | bracket(full, q, r))
