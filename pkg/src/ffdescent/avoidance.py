"""Finding a point of a finite product that avoids finitely supported obstructions.

An instance consists of functions v_i from prod_{j != i} S_j to finitely
supported functions on prod_j S_j.  Only the values v_i(p_i(s))(s) matter,
so a problem is compiled to boolean arrays ``hits[i][s] = v_i(p_i(s))(s) != 0``
of shape (|S_1|, ..., |S_n|), with coordinate i of the array being S_i.

The greedy solver fixes the last coordinate first: it excludes every value
of s_n that some v_n(s') hits, takes the least survivor, restricts the
remaining functions and recurses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ffdescent import _kernels
from ffdescent.errors import CapExceeded
from ffdescent.modules import IndexSet, proj

EXHAUSTIVE_CAP = 10**6


class AvoidanceProblem:
    def __init__(self, sets: Sequence[IndexSet], hits: Sequence[np.ndarray]):
        self.sets = tuple(sets)
        self.n = len(self.sets)
        if self.n < 1:
            raise ValueError("an avoidance problem needs n >= 1")
        shape = tuple(len(S) for S in self.sets)
        hits = [np.asarray(h, dtype=bool) for h in hits]
        if len(hits) != self.n or any(h.shape != shape for h in hits):
            raise ValueError(f"expected {self.n} hit arrays of shape {shape}")
        self.shape = shape
        self.hits = tuple(hits)

    @classmethod
    def from_arrays(cls, hits: Sequence[np.ndarray]) -> AvoidanceProblem:
        """Index sets {0, ..., |S_i| - 1} read off the array shape."""
        shape = np.asarray(hits[0]).shape
        return cls([IndexSet(range(m)) for m in shape], hits)

    @classmethod
    def from_functions(cls, sets: Sequence[IndexSet], functions: Sequence) -> AvoidanceProblem:
        """``functions[i]`` maps s' (a tuple over the other factors) to a FinVec over the product.

        Each may be a mapping or a callable; missing keys mean the zero function.
        """
        sets = tuple(sets)
        n = len(sets)
        shape = tuple(len(S) for S in sets)
        hits = []
        for i in range(1, n + 1):
            h = np.zeros(shape, dtype=bool)
            rest = IndexSet.product([S for j, S in enumerate(sets, start=1) if j != i])
            v = functions[i - 1]
            for s_rest in rest:
                val = v.get(s_rest) if isinstance(v, Mapping) else v(s_rest)
                if val is None:
                    continue
                for t in val.support():
                    if proj(t, i) == s_rest:
                        h[tuple(S.position(x) for S, x in zip(sets, t))] = True
            hits.append(h)
        return cls(sets, hits)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def position(self, s: tuple) -> tuple:
        return tuple(S.position(x) for S, x in zip(self.sets, s))

    def label(self, pos: Sequence[int]) -> tuple:
        return tuple(S.labels[k] for S, k in zip(self.sets, pos))

    def avoids(self, s: tuple) -> bool:
        """v_i(p_i(s))(s) = 0 for every i."""
        pos = self.position(s)
        return not any(h[pos] for h in self.hits)

    def slice_bound(self) -> int:
        """max over i and s' of |{x in S_i : v_i(s') hits t_i^{s'}(x)}|."""
        return max(int(h.sum(axis=i).max()) for i, h in enumerate(self.hits))


@dataclass
class AvoidanceResult:
    witness: tuple | None
    method: str
    choices: list = field(default_factory=list)  # (level m, chosen s_m), last coordinate first
    excluded: list = field(default_factory=list)  # (level m, |union of V_{s'}|)
    failure_level: int | None = None

    @property
    def found(self) -> bool:
        return self.witness is not None


def find_avoiding_greedy(problem: AvoidanceProblem) -> AvoidanceResult:
    hits = list(problem.hits)
    chosen: list[int] = []
    result = AvoidanceResult(None, "greedy")
    for level in range(problem.n, 0, -1):
        last = hits[level - 1]
        # V = union over s' in prod_{j < level} S_j of V_{s'}
        V = last.reshape(-1, last.shape[-1]).any(axis=0)
        result.excluded.append((level, int(V.sum())))
        free = np.flatnonzero(~V)
        if free.size == 0:
            result.failure_level = level
            return result
        s = int(free[0])
        chosen.append(s)
        result.choices.append((level, problem.sets[level - 1].labels[s]))
        hits = [h[..., s] for h in hits[: level - 1]]
    pos = tuple(reversed(chosen))
    result.witness = problem.label(pos)
    return result


def find_avoiding_exhaustive(problem: AvoidanceProblem, cap: int = EXHAUSTIVE_CAP) -> AvoidanceResult:
    """Least avoiding tuple in lexicographic order, or none."""
    if problem.size > cap:
        raise CapExceeded(f"product of size {problem.size} exceeds the exhaustive cap {cap}")
    stacked = np.ascontiguousarray(np.stack([h.ravel() for h in problem.hits]))
    flat = _kernels.first_uncovered(stacked)
    if flat < 0:
        return AvoidanceResult(None, "exhaustive")
    pos = np.unravel_index(flat, problem.shape)
    return AvoidanceResult(problem.label(tuple(int(k) for k in pos)), "exhaustive")


def threshold_check(problem: AvoidanceProblem, k: int) -> bool:
    """The counting condition |S_m| > k * prod_{j < m} |S_j| at every level.

    Returns False when some slice exceeds the support bound k, since the
    guarantee is then void.
    """
    if problem.slice_bound() > k:
        return False
    return sizes_pass_threshold(problem.shape, k)


def sizes_pass_threshold(sizes: Sequence[int], k: int) -> bool:
    prefix = 1
    for m in sizes:
        if not m > k * prefix:
            return False
        prefix *= m
    return True


def threshold_sizes(n: int, k: int, slack: int = 0) -> tuple[int, ...]:
    """Smallest sizes passing the threshold, each enlarged by ``slack``."""
    sizes = []
    prefix = 1
    for _ in range(n):
        m = k * prefix + 1 + slack
        sizes.append(m)
        prefix *= m
    return tuple(sizes)


def random_problem(sizes: Sequence[int], k: int, rng: np.random.Generator) -> AvoidanceProblem:
    """Each slice of each hit array gets a uniformly random subset of size at most k."""
    shape = tuple(sizes)
    n = len(shape)
    hits = []
    for i in range(n):
        m = shape[i]
        moved = shape[:i] + shape[i + 1 :] + (m,)
        slices = math.prod(moved[:-1])
        counts = rng.integers(0, min(k, m) + 1, size=slices)
        order = np.argsort(rng.random((slices, m)), axis=1)
        ranks = np.empty_like(order)
        np.put_along_axis(ranks, order, np.arange(m)[None, :], axis=1)
        h = (ranks < counts[:, None]).reshape(moved)
        hits.append(np.moveaxis(h, -1, i))
    return AvoidanceProblem.from_arrays(hits)


def covering_problem(n: int) -> AvoidanceProblem:
    """Sizes (n, ..., n), slice bound 1, and every point hit: no witness exists.

    Point s is hit by v_i exactly when i = (s_1 + ... + s_n) mod n (i from 0).
    """
    if n < 1:
        raise ValueError("n >= 1")
    grid = np.indices((n,) * n).sum(axis=0) % n
    return AvoidanceProblem.from_arrays([grid == i for i in range(n)])


def greedy_trap() -> AvoidanceProblem:
    """n = 2, k = 2, sizes (2, 4): greedy excludes all of S_2, yet (0, 2) avoids everything."""
    h1 = np.zeros((2, 4), dtype=bool)
    h2 = np.zeros((2, 4), dtype=bool)
    h2[0, [0, 1]] = True
    h2[1, [2, 3]] = True
    return AvoidanceProblem.from_arrays([h1, h2])


def order_sensitivity(problem: AvoidanceProblem) -> list[bool]:
    """Greedy success for each cyclic rotation of the coordinate order (rotation 0 first)."""
    out = []
    n = problem.n
    for r in range(n):
        perm = [(j + r) % n for j in range(n)]
        hits = [np.transpose(problem.hits[perm[i]], perm) for i in range(n)]
        rotated = AvoidanceProblem([problem.sets[j] for j in perm], hits)
        out.append(find_avoiding_greedy(rotated).found)
    return out
