"""JSON forms for ring elements, maps, specs and splitting witnesses.

Witness files carry a sha256 digest of their canonical JSON (sorted keys, no
whitespace, digest field removed), so ``verify`` can tell a corrupted file
from a wrong one and then re-check every equation without solving anything.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from ffdescent.algebras import AlgElem
from ffdescent.group_ring import GroupRing
from ffdescent.indivisibility import IndivSpec
from ffdescent.modules import FinVec, IndexSet, LinMap, decode_label, encode_label
from ffdescent.polynomials import PolyElem, PolyRing
from ffdescent.rings import make_ring

WITNESS_FORMAT = "ffdescent-witness"
LINMAP_FORMAT = "ffdescent-linmap"
FORMAT_VERSION = 1


class FormatError(ValueError):
    """A serialized object is malformed or has an unsupported version."""


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


# ---------------------------------------------------------------------------
# elements


def encode_elem(x):
    if isinstance(x, PolyElem):
        return [[list(e), int(c)] for e, c in sorted(x.terms.items())]
    return [int(v) for v in x.vec]


def decode_elem(ring, obj):
    if isinstance(ring, PolyRing):
        return ring.elem({tuple(e): c for e, c in obj})
    return ring.elem(obj)


def encode_gr(x: AlgElem) -> list:
    """Group-ring element as (sorted subset of tagged labels, coefficient) pairs."""
    gr = x.alg
    return [[[encode_label(m) for m in gr.members(K)], encode_elem(c)] for K, c in sorted(x.terms.items())]


def decode_gr(gr: GroupRing, obj) -> AlgElem:
    terms = {}
    for members, c in obj:
        K = gr.mask(decode_label(m) for m in members)
        if K in terms:
            raise FormatError(f"subset {members!r} listed twice")
        terms[K] = decode_elem(gr.base, c)
    return AlgElem(gr, terms)


# ---------------------------------------------------------------------------
# maps and specs


def linmap_to_dict(f: LinMap) -> dict:
    return {
        "format": LINMAP_FORMAT,
        "version": FORMAT_VERSION,
        "ring": f.ring.descriptor,
        "source": [encode_label(a) for a in f.source],
        "target": [encode_label(b) for b in f.target],
        "columns": [
            [encode_label(a), [[encode_label(b), encode_elem(x)] for b, x in f.columns[a].entries.items()]]
            for a in f.source
        ],
    }


def _check_header(d: dict, fmt: str) -> None:
    if not isinstance(d, dict) or d.get("format") != fmt:
        raise FormatError(f"not a {fmt} document")
    if d.get("version") != FORMAT_VERSION:
        raise FormatError(f"unsupported {fmt} version {d.get('version')!r}, expected {FORMAT_VERSION}")


def linmap_from_dict(d: dict) -> LinMap:
    _check_header(d, LINMAP_FORMAT)
    ring = make_ring(d["ring"])
    src = IndexSet(decode_label(a) for a in d["source"])
    tgt = IndexSet(decode_label(b) for b in d["target"])
    cols = {}
    for a, entries in d["columns"]:
        cols[decode_label(a)] = FinVec(tgt, ring, {decode_label(b): decode_elem(ring, x) for b, x in entries})
    return LinMap(src, tgt, ring, cols)


def spec_to_dict(spec: IndivSpec) -> dict:
    return {
        "ring": spec.ring.descriptor,
        "degree": spec.degree,
        "entries": [
            {"set": [encode_label(s) for s in S], "psi": [[encode_label(s), encode_elem(psi[s])] for s in S]}
            for S, psi in spec.entries
        ],
    }


def spec_from_dict(d: dict) -> IndivSpec:
    ring = make_ring(d["ring"])
    entries = []
    for e in d["entries"]:
        S = IndexSet(decode_label(s) for s in e["set"])
        psi = {decode_label(s): decode_elem(ring, x) for s, x in e["psi"]}
        entries.append((S, psi))
    return IndivSpec(ring, tuple(entries), d.get("degree"))


# ---------------------------------------------------------------------------
# witnesses


def witness_to_dict(w) -> dict:
    d = w.diagram
    body = {
        "format": WITNESS_FORMAT,
        "version": FORMAT_VERSION,
        "spec": spec_to_dict(d.spec),
        "truncated": d.truncated,
        "seed": w.seed,
        "f": [],
        "g": [],
    }
    for b in d.target:
        x = w.r(b)
        if x.is_zero():
            continue
        part, i, s = b
        body[part].append([i, encode_label(s), encode_gr(x)])
    body["digest"] = digest(body)
    return body


def witness_from_dict(data: dict):
    from ffdescent.splitting import ObstructionDiagram, SplitWitness

    _check_header(data, WITNESS_FORMAT)
    d = ObstructionDiagram(spec_from_dict(data["spec"]), truncated=bool(data.get("truncated", False)))
    gr = d.group_ring
    rows: dict = {}
    for part in ("f", "g"):
        for i, s, x in data.get(part, []):
            b = (part, int(i), decode_label(s))
            if b not in d.target:
                raise FormatError(f"component {part}_{i}({s!r}) does not exist in this diagram")
            for K, c in decode_gr(gr, x).terms.items():
                rows.setdefault(K, {})[b] = c
    rows = {K: FinVec(d.target, d.ring, ent) for K, ent in rows.items()}
    return SplitWitness(d, rows, data.get("seed"))


def save_witness(w, path: str | Path) -> str:
    data = witness_to_dict(w)
    Path(path).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    return data["digest"]


@dataclass
class WitnessCheck:
    ok: bool
    digest_ok: bool
    problems: list = field(default_factory=list)  # human-readable locations


def verify_witness_data(data: dict) -> WitnessCheck:
    """Re-check a serialized witness: digest, r o F = E at every t, the star equation, coverage."""
    from ffdescent.indivisibility import is_n_indivisible
    from ffdescent.splitting import coverage, star_sides, support_cost

    stated = data.get("digest")
    body = {k: v for k, v in data.items() if k != "digest"}
    digest_ok = stated == digest(body)
    problems = [] if digest_ok else ["digest: stored digest does not match the contents"]
    w = witness_from_dict(data)
    d = w.diagram
    for t in d.source:
        if w.apply_to_F(t) != d.E[t]:
            problems.append(f"r o F != E at t = {t!r}")
        left, right = star_sides(w, t)
        if left != right:
            problems.append(f"star equation fails at t = {t!r}")
    if not problems and not d.truncated:
        report = is_n_indivisible(d.spec)
        if report.unit_ideal_free:
            cov = coverage(w)
            if not cov.full_coverage:
                problems.append(f"coverage law fails at t = {cov.uncovered[0]!r}")
            if support_cost(w) < len(d.source):
                problems.append("support cost below |prod S_i|")
    return WitnessCheck(not problems, digest_ok, problems)


def load_json(path: str | Path) -> dict:
    text = Path(path).read_text()
    if not text.strip():
        raise FormatError(f"{path}: empty file")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}: {exc.msg}") from exc


def verify_witness_file(path: str | Path) -> WitnessCheck:
    return verify_witness_data(load_json(path))
