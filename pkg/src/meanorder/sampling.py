"""Deterministic samplers of strictly positive vectors.

Every vector is a pure function of ``(seed, index)``, so a sampled
counterexample can always be regenerated from its index alone.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DomainError

STRATEGIES = ("uniform-log", "grid", "corners", "mixed")

_GRID_LEVELS = 5


@dataclass(frozen=True)
class DomainSampler:
    """Sampling plan for the domain of positive vectors.

    Parameters
    ----------
    n_min, n_max : int
        Inclusive range of vector lengths.
    lo, hi : float
        Entry bounds, ``0 < lo < hi``.
    strategy : str
        ``"uniform-log"`` draws entries log-uniformly, ``"grid"`` walks a
        geometric lattice, ``"corners"`` emits adversarial shapes
        (near-constant, one dominant entry, geometric progressions,
        two-level vectors) and ``"mixed"`` alternates uniform and corners.
    seed : int
        Non-negative base seed.
    """

    n_min: int = 1
    n_max: int = 6
    lo: float = 1e-4
    hi: float = 1e4
    strategy: str = "mixed"
    seed: int = 0

    def __post_init__(self):
        if not (self.lo > 0 and self.lo < self.hi and np.isfinite(self.hi)):
            raise DomainError(f"entry bounds must satisfy 0 < lo < hi, got ({self.lo}, {self.hi})")
        if not (1 <= self.n_min <= self.n_max):
            raise DomainError(f"empty length range [{self.n_min}, {self.n_max}]")
        if self.strategy not in STRATEGIES:
            raise DomainError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if self.seed < 0:
            raise DomainError("seed must be non-negative")

    def vector(self, index: int) -> np.ndarray:
        rng = np.random.default_rng([self.seed, index])
        n = int(rng.integers(self.n_min, self.n_max + 1))
        strategy = self.strategy
        if strategy == "mixed":
            strategy = "uniform-log" if index % 2 == 0 else "corners"
        if strategy == "uniform-log":
            logs = rng.uniform(np.log(self.lo), np.log(self.hi), size=n)
        elif strategy == "grid":
            logs = self._grid_logs(index)
        else:
            logs = self._corner_logs(rng, n)
        return np.exp(logs)

    def vectors(self, count: int) -> list[np.ndarray]:
        return [self.vector(i) for i in range(count)]

    def __iter__(self) -> Iterator[np.ndarray]:
        i = 0
        while True:
            yield self.vector(i)
            i += 1

    def by_length(self, count: int) -> list[tuple[np.ndarray, np.ndarray]]:
        """Group the first `count` vectors by length.

        Returns a list of ``(indices, rows)`` where ``rows[k]`` is
        ``self.vector(indices[k])``; this is the layout the vectorized
        evaluators want.
        """
        groups: dict[int, list[int]] = {}
        vecs = self.vectors(count)
        for i, v in enumerate(vecs):
            groups.setdefault(len(v), []).append(i)
        return [
            (np.array(idx), np.vstack([vecs[i] for i in idx]))
            for _, idx in sorted(groups.items())
        ]

    def _grid_logs(self, index: int) -> np.ndarray:
        lengths = self.n_max - self.n_min + 1
        n = self.n_min + index % lengths
        k = index // lengths
        levels = np.linspace(np.log(self.lo), np.log(self.hi), _GRID_LEVELS)
        digits = []
        for _ in range(n):
            k, d = divmod(k, _GRID_LEVELS)
            digits.append(d)
        return levels[digits]

    def _corner_logs(self, rng: np.random.Generator, n: int) -> np.ndarray:
        kind = int(rng.integers(4))
        if kind == 0:
            # near-constant, symmetric or single-spike perturbation
            delta = float(rng.choice([1e-3, 1e-2, 1e-1, 3e-1]))
            if rng.random() < 0.5:
                dev = rng.uniform(-1.0, 1.0, size=n)
            else:
                dev = np.zeros(n)
                dev[rng.integers(n)] = rng.choice([-1.0, 1.0])
            dev = delta * dev
        elif kind == 1:
            # one entry dominates (or is dominated by) the rest
            dev = np.zeros(n)
            dev[0] = rng.choice([-1.0, 1.0]) * np.log(10.0) * rng.uniform(0.5, 8.0)
        elif kind == 2:
            dev = np.arange(n) * rng.uniform(-4.0, 4.0)
        else:
            dev = np.zeros(n)
            j = int(rng.integers(1, n)) if n > 1 else 1
            dev[:j] = rng.uniform(-10.0, 10.0)
        return self._fit(rng, dev)

    def _fit(self, rng: np.random.Generator, dev: np.ndarray) -> np.ndarray:
        """Place a log-shape inside ``[log lo, log hi]`` with a random offset."""
        a, b = np.log(self.lo), np.log(self.hi)
        spread = dev.max() - dev.min()
        if spread > b - a:
            dev = dev * ((b - a) / spread)
            spread = b - a
        dev = dev - dev.min()
        offset = rng.uniform(a, max(a, b - spread))
        return np.clip(dev + offset, a, b)
