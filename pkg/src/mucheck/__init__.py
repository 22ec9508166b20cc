"""Modal mu-calculus model checking for linear process equations, with
two-step witness/counterexample generation."""

from .kernel import Bounds, BoundExceeded, DataEnvironment, Sort, StateExplosion
from .model import Lpe, Lts, explore_lts, parse_lpe
from .formula import MuFormula, parse_formula
from .pbes import Instance, Pbes, brute_force_solve, parse_pbes, dump_pbes
from .encode import encode_with_evidence, core_of, strip_for_polarity
from .graphs import (
    EvidenceGraph,
    ParityGame,
    RelevancyGraph,
    instantiate,
    relevancy_proxy,
    validate_evidence_graph,
)
from .solve import extract_evidence_graph, zielonka
from .transform import CheckResult, CombineContext, run_direct, run_pipeline, run_plain
from .evidence import evidence_lts, export_aut

__all__ = [
    "Bounds", "BoundExceeded", "DataEnvironment", "Sort", "StateExplosion",
    "Lpe", "Lts", "explore_lts", "parse_lpe",
    "MuFormula", "parse_formula",
    "Instance", "Pbes", "brute_force_solve", "parse_pbes", "dump_pbes",
    "encode_with_evidence", "core_of", "strip_for_polarity",
    "EvidenceGraph", "ParityGame", "RelevancyGraph",
    "instantiate", "relevancy_proxy", "validate_evidence_graph",
    "extract_evidence_graph", "zielonka",
    "CheckResult", "CombineContext", "run_direct", "run_pipeline", "run_plain",
    "evidence_lts", "export_aut",
]
