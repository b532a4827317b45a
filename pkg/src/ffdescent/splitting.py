"""The obstruction diagram of an indivisible sequence and its splittings.

For a spec {(S_i, Psi_i)} over R the bottom map is
F = (+)_i Psi^n_{R,S_i} on (+)_{prod S_i} R, and the left map E sends 1_t
to the subset {t_1, ..., t_n} of R{S_1 u ... u S_n}.  A splitting is an
R-linear r with r o F = E.  Its components are f_i(s') = r(1_{f,i,s'}) and
g_i(s) = r(1_{g,i,s}), and evaluating r o F = E at 1_t reads

    sum_i f_i(p_i(t)) + sum_i Psi_i(t_i) g_i(t) = 1_{{t_1, ..., t_n}}.

Row K of r (one per basis subset) solves y_K o F = (coefficient of 1_K in E),
so only subsets in the image of E need solving; all other rows may be zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ffdescent import linalg
from ffdescent.algebras import AlgElem
from ffdescent.avoidance import AvoidanceProblem
from ffdescent.errors import ConsistencyError
from ffdescent.group_ring import GroupRing, d_extract, tensor_iota
from ffdescent.indivisibility import IndivSpec
from ffdescent.modules import FinVec, IndexSet, LinMap, check_cap, proj, psi_n_map, stack_maps
from ffdescent.retraction import solve_rows

MAX_SOURCE = 512
NOISE_ROWS = 4


class ObstructionDiagram:
    def __init__(self, spec: IndivSpec, truncated: bool = False, cap: int = MAX_SOURCE):
        check_cap(spec.tuple_count, cap, "source rank of the obstruction diagram")
        self.spec = spec
        self.ring = spec.ring
        self.n = spec.n
        self.sets = spec.sets
        self.truncated = truncated
        self.group_ring = GroupRing(self.ring, self.sets)
        self.source = IndexSet.product(self.sets)
        maps = [psi_n_map(self.ring, self.sets, spec.psis, i) for i in range(1, self.n + 1)]
        F = stack_maps(maps)
        if truncated:
            F = _drop_g_part(F)
        self.F = F
        self.E = {t: tensor_iota(self.group_ring, t) for t in self.source}

    @property
    def target(self) -> IndexSet:
        return self.F.target

    def rhs_rows(self) -> dict:
        """Coefficient of each basis subset K in E, as a FinVec over the source."""
        rows: dict = {}
        for t, x in self.E.items():
            for K, c in x.terms.items():
                rows.setdefault(K, {})[t] = c
        return {K: FinVec(self.source, self.ring, ent) for K, ent in sorted(rows.items())}


def _drop_g_part(F: LinMap) -> LinMap:
    tgt = IndexSet([b for b in F.target if b[0] == "f"])
    cols = {a: FinVec(tgt, F.ring, {b: x for b, x in col.entries.items() if b[0] == "f"}) for a, col in F.columns.items()}
    return LinMap(F.source, tgt, F.ring, cols)


def build_obstruction(spec: IndivSpec, truncated: bool = False) -> ObstructionDiagram:
    return ObstructionDiagram(spec, truncated)


@dataclass
class SplitWitness:
    diagram: ObstructionDiagram
    rows: dict  # basis subset K -> FinVec over the target of F
    seed: int | None = None

    @cached_property
    def columns(self) -> dict:
        """r(1_b) for every target label b of F."""
        gr = self.diagram.group_ring
        cols: dict = {b: {} for b in self.diagram.target}
        for K, y in self.rows.items():
            for b, x in y.entries.items():
                cols[b][K] = x
        return {b: AlgElem(gr, c) for b, c in cols.items()}

    def r(self, b) -> AlgElem:
        return self.columns[b]

    def f(self, i: int, s_rest: tuple) -> AlgElem:
        return self.columns[("f", i, s_rest)]

    def g(self, i: int, t: tuple) -> AlgElem:
        return self.columns[("g", i, t)]

    def apply_to_F(self, t: tuple) -> AlgElem:
        out = self.diagram.group_ring.zero()
        for b, x in self.diagram.F.columns[t].entries.items():
            out = out + self.r(b) * x
        return out

    def residual(self) -> list:
        """Source tuples t with r(F(1_t)) != E(1_t)."""
        return [t for t in self.diagram.source if self.apply_to_F(t) != self.diagram.E[t]]

    def verify(self) -> bool:
        return not self.residual()


def solve_obstruction(
    d: ObstructionDiagram,
    seed: int | None = None,
    degree: int | None = None,
    noise_rows: int = NOISE_ROWS,
) -> SplitWitness:
    """A splitting r o F = E, or :class:`linalg.Unsolvable` with a replayable certificate.

    With a seed the elimination runs in a random pivot order with random free
    variables, and a few extra subsets outside the image of E get random
    rows in the kernel direction, so different seeds give different witnesses.
    """
    rng = np.random.default_rng(seed) if seed is not None else None
    rhs = d.rhs_rows()
    if rng is not None and noise_rows:
        total = 1 << d.group_ring.size
        zero = FinVec(d.source, d.ring)
        for K in rng.choice(total, size=min(noise_rows, total), replace=False):
            rhs.setdefault(int(K), zero)
    rows = solve_rows(d.F, rhs, degree if degree is not None else d.spec.degree, rng)
    rows = {K: y for K, y in rows.items() if not y.is_zero()}
    return SplitWitness(d, rows, seed)


def find_splitting(spec: IndivSpec, seed: int | None = None) -> SplitWitness | None:
    """Convenience wrapper returning None when no splitting exists."""
    try:
        return solve_obstruction(ObstructionDiagram(spec), seed)
    except linalg.Unsolvable:
        return None


def star_sides(w: SplitWitness, t: tuple) -> tuple[AlgElem, AlgElem]:
    d = w.diagram
    gr = d.group_ring
    left = gr.zero()
    for i in range(1, d.n + 1):
        left = left + w.f(i, proj(t, i))
        if not d.truncated:
            left = left + w.g(i, t) * d.spec.psis[i - 1][t[i - 1]]
    # prod_i R(iota_{S_i})(1_{t_i}) = 1_{{t_1}} ... 1_{{t_n}}
    right = gr.one()
    for i, s in enumerate(t, start=1):
        right = right * gr.singleton(s, i)
    return left, right


def verify_star(w: SplitWitness, t: tuple) -> bool:
    left, right = star_sides(w, t)
    return left == right


@dataclass
class CoverageReport:
    covered_by: dict  # t -> tuple of i with d_n(f_i(p_i(t)))(t) != 0
    full_coverage: bool
    uncovered: list = field(default_factory=list)


def coverage(w: SplitWitness) -> CoverageReport:
    d = w.diagram
    gr = d.group_ring
    extracted = {}
    covered = {}
    for t in d.source:
        hit = []
        for i in range(1, d.n + 1):
            key = (i, proj(t, i))
            if key not in extracted:
                extracted[key] = d_extract(gr, w.f(*key))
            if not extracted[key][t].is_zero():
                hit.append(i)
        covered[t] = tuple(hit)
    uncovered = [t for t, h in covered.items() if not h]
    return CoverageReport(covered, not uncovered, uncovered)


def support_cost(w: SplitWitness) -> int:
    """sum_i sum_{s'} |supp d_n(f_i(s'))|."""
    d = w.diagram
    gr = d.group_ring
    total = 0
    for b, x in w.columns.items():
        if b[0] == "f":
            total += len(d_extract(gr, x).support())
    return total


def witness_to_avoidance(w: SplitWitness) -> AvoidanceProblem:
    """The avoidance instance v_i = d_n o f_i; an avoiding point is an uncovered t."""
    d = w.diagram
    gr = d.group_ring
    functions = []
    for i in range(1, d.n + 1):
        rest = IndexSet.product([S for j, S in enumerate(d.sets, start=1) if j != i])
        functions.append({s: d_extract(gr, w.f(i, s)) for s in rest})
    return AvoidanceProblem.from_functions(d.sets, functions)


@dataclass
class LevelVerdict:
    m: int
    splits: bool
    witness: SplitWitness | None = None
    certificate: linalg.InfeasibilityCertificate | None = None
    system: tuple | None = field(default=None, repr=False)


@dataclass
class ExponentEstimate:
    value: int
    levels: list


def exponent_estimate(spec: IndivSpec, seed: int | None = None) -> ExponentEstimate:
    """Largest m <= n whose m-fold diagram (first m entries) has no splitting; 0 if all split."""
    if spec.n < 1:
        raise ValueError("exponent_estimate needs n >= 1")
    levels = []
    value = 0
    for m in range(1, spec.n + 1):
        d = ObstructionDiagram(spec.prefix(m))
        try:
            w = solve_obstruction(d, seed)
        except linalg.Unsolvable as exc:
            levels.append(LevelVerdict(m, False, certificate=exc.certificate, system=exc.system))
            value = m
            continue
        if not w.verify():
            raise ConsistencyError("solver returned an invalid splitting")
        levels.append(LevelVerdict(m, True, witness=w))
    return ExponentEstimate(value, levels)
