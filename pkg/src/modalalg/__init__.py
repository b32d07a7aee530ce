"""Operator-algebra toolkit for definite-valued observable sets in modal interpretations."""
from .algebra import (
    AlgebraRestriction,
    FiniteProjectionSet,
    FullLattice,
    OperatorSpan,
    commutant,
    double_commutant,
    extension_membership,
    is_von_neumann_algebra,
    star_closure_check,
)
from .config import AnalysisConfig, load_config
from .lattice import (
    FiniteLattice,
    atomicity_demo,
    generate_ortholattice,
    join,
    leq,
    meet_exact,
    meet_iterative,
)
from .matrix_core import DEFAULT_CTX, ToleranceContext, norm_limit, spectral_resolution
from .nogo import (
    h2_commutant_counterexample,
    h2_quasiboolean_obstruction,
    positive_existence_demo,
    von_neumann_spin_demo,
)
from .report import AnalysisReport, render_report, run_analysis
from .rules import BubRuleInput, XFormSpec, build_rule, make_density_state
from .valuations import (
    FunctionalValuation,
    TwoValuedHomomorphism,
    build_measure,
    check_countable_additivity,
    check_quasiboolean,
    enumerate_homomorphisms,
    verify_statistics,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraRestriction",
    "AnalysisConfig",
    "AnalysisReport",
    "BubRuleInput",
    "DEFAULT_CTX",
    "FiniteLattice",
    "FiniteProjectionSet",
    "FullLattice",
    "FunctionalValuation",
    "OperatorSpan",
    "ToleranceContext",
    "TwoValuedHomomorphism",
    "XFormSpec",
    "atomicity_demo",
    "build_measure",
    "build_rule",
    "check_countable_additivity",
    "check_quasiboolean",
    "commutant",
    "double_commutant",
    "enumerate_homomorphisms",
    "extension_membership",
    "generate_ortholattice",
    "h2_commutant_counterexample",
    "h2_quasiboolean_obstruction",
    "is_von_neumann_algebra",
    "join",
    "leq",
    "load_config",
    "make_density_state",
    "meet_exact",
    "meet_iterative",
    "norm_limit",
    "positive_existence_demo",
    "render_report",
    "run_analysis",
    "spectral_resolution",
    "star_closure_check",
    "verify_statistics",
    "von_neumann_spin_demo",
]
