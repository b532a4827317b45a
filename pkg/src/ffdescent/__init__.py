"""Finite models of indivisible sequences, their obstruction diagrams and the F^p functor."""

from __future__ import annotations

__version__ = "0.1.0"

from ffdescent.errors import CapExceeded, ConsistencyError, MixedRings, NotPBoolean
from ffdescent.linalg import InfeasibilityCertificate, Unsolvable
from ffdescent.rings import ProductFp, PBoolPoly, Ring, RingHom, is_pboolean, make_ring, tensor_ring
from ffdescent.modules import FinVec, IndexSet, LinMap, psi_map, psi_n_map
from ffdescent.group_ring import GroupRing, d_extract, disjoint_union_iso, tensor_iota
from ffdescent.indivisibility import (
    IndivSpec,
    build_polynomial_example,
    idempotent_example,
    idempotent_tower,
    is_n_indivisible,
    is_one_indivisible,
    tensor_lift,
)
from ffdescent.splitting import (
    ObstructionDiagram,
    coverage,
    exponent_estimate,
    solve_obstruction,
    support_cost,
    verify_star,
)
from ffdescent.avoidance import (
    AvoidanceProblem,
    find_avoiding_exhaustive,
    find_avoiding_greedy,
    threshold_check,
)
from ffdescent.functors import (
    faithfully_flat_check,
    fp_free,
    fp_map,
    lazard_split_check,
    main_map_builder,
    sym_trunc_map,
)

__all__ = [
    "AvoidanceProblem",
    "CapExceeded",
    "ConsistencyError",
    "FinVec",
    "GroupRing",
    "IndexSet",
    "IndivSpec",
    "InfeasibilityCertificate",
    "LinMap",
    "MixedRings",
    "NotPBoolean",
    "ObstructionDiagram",
    "PBoolPoly",
    "ProductFp",
    "Ring",
    "RingHom",
    "Unsolvable",
    "build_polynomial_example",
    "coverage",
    "d_extract",
    "disjoint_union_iso",
    "exponent_estimate",
    "faithfully_flat_check",
    "find_avoiding_exhaustive",
    "find_avoiding_greedy",
    "fp_free",
    "fp_map",
    "idempotent_example",
    "idempotent_tower",
    "is_n_indivisible",
    "is_one_indivisible",
    "is_pboolean",
    "lazard_split_check",
    "main_map_builder",
    "make_ring",
    "psi_map",
    "psi_n_map",
    "solve_obstruction",
    "support_cost",
    "sym_trunc_map",
    "tensor_iota",
    "tensor_lift",
    "tensor_ring",
    "threshold_check",
    "verify_star",
]
