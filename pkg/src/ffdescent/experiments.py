"""The five standard experiments and the YAML scenario format that drives them.

A scenario is a single YAML mapping with an ``experiment`` key (E1 to E5)
plus experiment parameters.  Every parameter has a default, and the
effective values are echoed into the report so a run can be audited and
re-run.  Rows are deterministic for a fixed scenario; wall-clock time is
kept out of the rows.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from ffdescent import __version__
from ffdescent.avoidance import (
    covering_problem,
    find_avoiding_exhaustive,
    find_avoiding_greedy,
    random_problem,
    sizes_pass_threshold,
)
from ffdescent.functors import FpUnionIso, fp_free, main_map_builder
from ffdescent.group_ring import disjoint_union_iso
from ffdescent.indivisibility import (
    build_polynomial_example,
    idempotent_example,
    idempotent_tower,
    is_n_indivisible,
    tensor_lift,
)
from ffdescent.modules import IndexSet
from ffdescent.rings import ProductFp, make_ring
from ffdescent.serialize import digest, encode_elem, save_witness
from ffdescent.splitting import (
    ObstructionDiagram,
    coverage,
    exponent_estimate,
    solve_obstruction,
    support_cost,
    verify_star,
)

REPORT_SCHEMA = "ffdescent-report/1"

DEFAULTS = {
    "E1": {"primes": [2, 3], "m_max": 4, "lifts": [2, 3], "poly_q": [2, 3, 5], "poly_n_max": 3,
           "tower_N_max": 4, "tower_width": 2, "ring": None},
    "E2": {"primes": [2, 3], "sizes": [1, 2, 3], "n_max": 2, "seeds": 5, "seed": 0, "witness_dir": None},
    "E3": {"n": 2, "k": 1, "sizes": [[2, 3]], "instances": 100, "seed": 0},
    "E4": {"fp_dims": [[2, 6], [3, 4]], "union_total": 4, "flat_primes": [2, 3], "flat_m_max": 3},
    "E5": {"primes": [2, 3], "m_max": 3, "n_max": 2, "poly_q": [2, 3, 5], "poly_n_max": 2, "poly_degree": None,
           "seed": 0},
}
MAX_LIFT_TUPLES = 64
SEEDED = {"E2", "E3", "E5"}
COMMON_KEYS = {"experiment", "output", "caps"}


class ConfigError(ValueError):
    """A scenario file does not validate; the message names the offending line."""


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    columns: list
    rows: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def all_match(self) -> bool:
        return all(r["match"] for r in self.rows)

    def summary(self) -> str:
        ok = sum(1 for r in self.rows if r["match"])
        return f"{self.experiment}: {ok}/{len(self.rows)} cases match expectations"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema {REPORT_SCHEMA} ffdescent {__version__} experiment {self.experiment}\n")
        for k in sorted(self.config):
            buf.write(f"# config {k} = {self.config[k]!r}\n")
        writer = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            writer.writerow({c: _cell(r[c]) for c in self.columns})
        return buf.getvalue()

    def to_table(self) -> str:
        cells = [[str(_cell(r[c])) for c in self.columns] for r in self.rows]
        widths = [max([len(c)] + [len(row[j]) for row in cells]) for j, c in enumerate(self.columns)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(self.columns, widths))]
        lines.append("  ".join("-" * w for w in widths))
        lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
        lines.append(self.summary())
        return "\n".join(lines)


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


# ---------------------------------------------------------------------------
# configuration


def _line(node) -> int:
    return node.start_mark.line + 1


def load_config(text: str, source: str = "<config>") -> dict:
    """Parse and validate a scenario; errors carry ``source:line``."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}" if mark else source
        msg = f"{where}: {getattr(exc, 'problem', None) or exc}"
        ctx = getattr(exc, "context_mark", None)
        if ctx is not None and getattr(exc, "context", None):
            msg += f" ({exc.context} at line {ctx.line + 1})"
        raise ConfigError(msg) from exc
    if root is None:
        raise ConfigError(f"{source}:1: empty scenario")
    if not isinstance(root, yaml.MappingNode):
        raise ConfigError(f"{source}:{_line(root)}: scenario must be a mapping")
    lines = {k.value: _line(k) for k, _ in root.value}
    data = yaml.safe_load(text)
    exp = data.get("experiment")
    if exp not in DEFAULTS:
        where = lines.get("experiment", 1)
        raise ConfigError(f"{source}:{where}: experiment must be one of {sorted(DEFAULTS)}, got {exp!r}")
    allowed = set(DEFAULTS[exp]) | COMMON_KEYS
    for k in data:
        if k not in allowed:
            raise ConfigError(f"{source}:{lines[k]}: unknown key {k!r} for {exp}")
    if exp in SEEDED and "seed" not in data:
        raise ConfigError(f"{source}:1: {exp} is randomized and needs an explicit seed")
    cfg = dict(DEFAULTS[exp])
    cfg.update({k: v for k, v in data.items() if k not in COMMON_KEYS})
    cfg["experiment"] = exp
    for k, default in DEFAULTS[exp].items():
        v = cfg[k]
        if default is None or v is None:
            continue
        if isinstance(default, bool) or not isinstance(v, type(default)):
            if not (isinstance(default, int) and isinstance(v, int) and not isinstance(v, bool)):
                raise ConfigError(
                    f"{source}:{lines.get(k, 1)}: {k} must be {type(default).__name__}, got {type(v).__name__}"
                )
        if isinstance(v, int) and not isinstance(v, bool) and v < 0:
            raise ConfigError(f"{source}:{lines.get(k, 1)}: {k} must be non-negative")
    if exp == "E3":
        for sz in cfg["sizes"]:
            if not isinstance(sz, list) or len(sz) != cfg["n"] or not all(isinstance(m, int) and m > 0 for m in sz):
                raise ConfigError(f"{source}:{lines.get('sizes', 1)}: each entry of sizes needs {cfg['n']} positive sizes")
    if exp == "E1" and cfg["ring"] is not None:
        try:
            make_ring(cfg["ring"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"{source}:{lines.get('ring', 1)}: bad ring descriptor: {exc}") from exc
    output = data.get("output") or {}
    if not isinstance(output, dict):
        raise ConfigError(f"{source}:{lines.get('output', 1)}: output must be a mapping")
    cfg["_output"] = output
    return cfg


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    return load_config(path.read_text(), str(path))


# ---------------------------------------------------------------------------
# experiments


def _row(case: str, check: str, value, expected, **extra) -> dict:
    row = {"case": case, "check": check, "value": value, "expected": expected, "match": value == expected}
    row.update(extra)
    return row


def _report_digest(report) -> str:
    cert = {
        "violating": None if report.violating_tuple is None else list(map(str, report.violating_tuple)),
        "inverses": [
            None if v.left_inverse is None else sorted(
                (str(b), [str(a) + ":" + str(encode_elem(x)) for a, x in col.entries.items()])
                for b, col in v.left_inverse.columns.items()
            )
            for v in report.entries
        ],
    }
    return digest(cert)[:16]


def run_e1(cfg: dict) -> list:
    rows = []
    rings = []
    if cfg["ring"] is not None:
        R = make_ring(cfg["ring"])
        if not isinstance(R, ProductFp):
            raise ConfigError("E1 ring must be a product_fp descriptor")
        rings.append((R.p, R.m))
    else:
        rings = [(p, m) for p in cfg["primes"] for m in range(1, cfg["m_max"] + 1)]
    for p, m in rings:
        spec = idempotent_example(p, m)
        rep = is_n_indivisible(spec)
        rows.append(_row(f"idempotent p={p} m={m}", "1-indivisible", rep.holds, True, digest=_report_digest(rep)))
        for n in cfg["lifts"]:
            if m**n > MAX_LIFT_TUPLES:
                continue
            lift = tensor_lift(spec, n)
            rep = is_n_indivisible(lift.spec)
            ok = rep.holds and lift.kunneth_holds
            rows.append(_row(f"idempotent p={p} m={m} lift n={n}", f"{n}-indivisible", ok, True,
                             digest=_report_digest(rep)))
    for q in cfg["poly_q"]:
        for n in range(1, cfg["poly_n_max"] + 1):
            # Lagrange interpolation on F_q needs degree q - 1 in the retraction
            D = max(1, q - 1)
            spec = build_polynomial_example(q, n, D)
            rep = is_n_indivisible(spec)
            rows.append(_row(f"polynomial q={q} n={n}", f"{n}-indivisible (degree <= {D})", rep.holds, True,
                             digest=_report_digest(rep)))
    for p in cfg["primes"]:
        for N in range(1, cfg["tower_N_max"] + 1):
            for depth in (0, 1):
                tower = idempotent_tower(p, N, depth, cfg["tower_width"])
                rows.append(_row(f"tower p={p} N={N} depth={depth} W={cfg['tower_width']}", "orthogonal",
                                 tower.is_orthogonal(), True, digest=""))
    return rows


def _splitting_specs(cfg: dict):
    for p in cfg["primes"]:
        for m in cfg["sizes"]:
            for n in range(1, cfg["n_max"] + 1):
                if n * m > 6:
                    continue
                base = idempotent_example(p, m)
                spec = base if n == 1 else tensor_lift(base, n).spec
                yield f"p={p} |S|={m} n={n}", spec


def run_e2(cfg: dict) -> list:
    rows = []
    seeds = list(range(cfg["seed"], cfg["seed"] + cfg["seeds"]))
    wdir = Path(cfg["witness_dir"]) if cfg["witness_dir"] else None
    if wdir:
        wdir.mkdir(parents=True, exist_ok=True)
    for name, spec in _splitting_specs(cfg):
        d = ObstructionDiagram(spec)
        free = is_n_indivisible(spec).unit_ideal_free
        for seed in seeds:
            w = solve_obstruction(d, seed)
            valid = w.verify() and all(verify_star(w, t) for t in d.source)
            cov = coverage(w)
            cost = support_cost(w)
            ok = valid and (cov.full_coverage or not free) and cost >= len(d.source)
            dg = ""
            if wdir:
                dg = save_witness(w, wdir / f"{name.replace(' ', '_').replace('|', '')}_seed{seed}.json")[:16]
            rows.append(_row(f"{name} seed={seed}", "splitting + coverage law", ok, True,
                             full_coverage=cov.full_coverage, support_cost=cost, lower_bound=len(d.source),
                             digest=dg))
    return rows


def run_e3(cfg: dict) -> list:
    rows = []
    rng = np.random.default_rng(cfg["seed"])
    k = cfg["k"]
    for sizes in cfg["sizes"]:
        guaranteed = sizes_pass_threshold(sizes, k)
        greedy_ok = exist = disagree = 0
        for _ in range(cfg["instances"]):
            prob = random_problem(sizes, k, rng)
            g = find_avoiding_greedy(prob)
            greedy_ok += g.found
            if g.found and not prob.avoids(g.witness):
                disagree += 1
            if prob.size <= 10**4:
                e = find_avoiding_exhaustive(prob)
                exist += e.found
                if g.found and not e.found:
                    disagree += 1
        expected = cfg["instances"] if guaranteed else greedy_ok
        rows.append(_row(f"n={len(sizes)} k={k} sizes={'x'.join(map(str, sizes))}", "greedy successes",
                         greedy_ok, expected, threshold=guaranteed, exhaustive_found=exist,
                         disagreements=disagree))
        rows[-1]["match"] = rows[-1]["match"] and disagree == 0
    n = cfg["n"]
    cover = covering_problem(n)
    rows.append(_row(f"covering n={n}", "witness exists", find_avoiding_exhaustive(cover).found, False,
                     threshold=False, exhaustive_found=0, disagreements=0))
    return rows


def run_e4(cfg: dict) -> list:
    rows = []
    for p, nmax in cfg["fp_dims"]:
        for n in range(1, nmax + 1):
            A = fp_free(ProductFp(p, 1), IndexSet(range(n)))
            rows.append(_row(f"F^p dim p={p} n={n}", "dim", A.dim, p**n))
    for base in (ProductFp(2, 1), ProductFp(2, 2)):
        for total in range(cfg["union_total"] + 1):
            for a in range(total + 1):
                S = IndexSet([f"s{j}" for j in range(a)])
                T = IndexSet([f"t{j}" for j in range(total - a)])
                rows.append(_row(f"group ring union m={base.m} |S|={a} |T|={total - a}", "ring iso",
                                 disjoint_union_iso(base, S, T).verify(), True))
                if total <= 4:
                    rows.append(_row(f"F^p union m={base.m} |S|={a} |T|={total - a}", "ring iso",
                                     FpUnionIso(base, S, T).verify(), True))
    for p in cfg["flat_primes"]:
        for m in range(1, cfg["flat_m_max"] + 1):
            mm = main_map_builder(idempotent_example(p, m))
            flat = mm.flatness.holds and mm.base_change.faithfully_flat
            rows.append(_row(f"main map p={p} m={m} n=1", "faithfully flat", flat, True))
    return rows


def run_e5(cfg: dict) -> list:
    rows = []
    for p in cfg["primes"]:
        for m in range(1, cfg["m_max"] + 1):
            for n in range(1, cfg["n_max"] + 1):
                if m**n > 27:
                    continue
                base = idempotent_example(p, m)
                spec = base if n == 1 else tensor_lift(base, n).spec
                est = exponent_estimate(spec, cfg["seed"])
                rows.append(_row(f"idempotent p={p} m={m} n={n}", "exponent", est.value, 0))
    for q in cfg["poly_q"]:
        for n in range(1, cfg["poly_n_max"] + 1):
            D = cfg["poly_degree"] or max(1, q - 1)
            spec = build_polynomial_example(q, n, D)
            est = exponent_estimate(spec, cfg["seed"])
            rows.append(_row(f"polynomial q={q} n={n} D={D}", "exponent", est.value, 0))
    return rows


RUNNERS = {"E1": run_e1, "E2": run_e2, "E3": run_e3, "E4": run_e4, "E5": run_e5}
BASE_COLUMNS = ["case", "check", "value", "expected", "match"]
EXTRA_COLUMNS = {
    "E1": ["digest"],
    "E2": ["full_coverage", "support_cost", "lower_bound", "digest"],
    "E3": ["threshold", "exhaustive_found", "disagreements"],
    "E4": [],
    "E5": [],
}


def run(cfg: dict) -> ExperimentReport:
    exp = cfg["experiment"]
    echo = {k: v for k, v in cfg.items() if not k.startswith("_")}
    start = time.perf_counter()
    rows = RUNNERS[exp](cfg)
    rows.sort(key=lambda r: r["case"])
    report = ExperimentReport(exp, echo, BASE_COLUMNS + EXTRA_COLUMNS[exp], rows)
    report.seconds = time.perf_counter() - start
    return report


def demo_config(exp: str) -> dict:
    if exp not in DEFAULTS:
        raise ConfigError(f"unknown experiment {exp!r}")
    text = f"experiment: {exp}\n" + ("seed: 0\n" if exp in SEEDED else "")
    return load_config(text, f"demo:{exp}")
