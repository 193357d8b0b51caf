"""Finite-dimensional noncommutative L_p spaces.

Block-matrix von Neumann algebras with their L_p norms, modular theory,
state-preserving conditional expectations, tracial-source isometry triples,
and the construction and classification of canonical 2-isometries, together
with seeded verification suites and a small CLI.
"""

from .algebra import (
    Algebra,
    AlgebraElement,
    AlgebraMap,
    HomomorphismReport,
    Projection,
    State,
    hermitian_basis,
    homomorphism_kind,
    make_algebra,
    matrix_units,
    random_faithful_state,
)
from .errors import NclpError
from .expectation import (
    BlockDecomposition,
    ConditionalExpectation,
    Subalgebra,
    complement_projection,
    construct_expectation,
    interpolation_gap,
    lp_expectation,
    lp_inclusion,
    restrict_state,
    subalgebra_lp_norm,
    takesaki_invariant,
)
from .isometry import (
    ClassificationReport,
    IsometryData,
    build_isometry,
    classify,
    extract_pi,
    extract_polar_data,
    isometry_defect,
    star_adjoint_dual,
    transfer_exponent,
    two_isometry_defect,
    verify_state_restriction,
)
from .lp import (
    ClarksonResult,
    LpMap,
    LpVector,
    PolarData,
    amplified_algebra,
    amplify_map,
    clarkson_defect,
    conjugate_exponent,
    lp_norm,
    mazur_map,
    polar_decompose,
    singular_values,
    state_power,
    tensor_embed,
    trace_pairing,
)
from .modular import (
    connes_cocycle,
    density_transport,
    modular_automorphism,
    selfpolar_form,
)
from .suites import SuiteConfig, SuiteReport, run_suite
from .yeadon import (
    YeadonTriple,
    build_yeadon_map,
    jordan_dichotomy_report,
    weighted_lp_norm,
    yeadon_decompose,
)

__version__ = "0.1.0"

__all__ = [
    "Algebra",
    "AlgebraElement",
    "AlgebraMap",
    "BlockDecomposition",
    "ClassificationReport",
    "ClarksonResult",
    "ConditionalExpectation",
    "HomomorphismReport",
    "IsometryData",
    "LpMap",
    "LpVector",
    "NclpError",
    "PolarData",
    "Projection",
    "State",
    "Subalgebra",
    "SuiteConfig",
    "SuiteReport",
    "YeadonTriple",
    "amplified_algebra",
    "amplify_map",
    "build_isometry",
    "build_yeadon_map",
    "clarkson_defect",
    "classify",
    "complement_projection",
    "conjugate_exponent",
    "connes_cocycle",
    "construct_expectation",
    "density_transport",
    "extract_pi",
    "extract_polar_data",
    "hermitian_basis",
    "homomorphism_kind",
    "interpolation_gap",
    "isometry_defect",
    "jordan_dichotomy_report",
    "lp_expectation",
    "lp_inclusion",
    "lp_norm",
    "make_algebra",
    "matrix_units",
    "mazur_map",
    "modular_automorphism",
    "polar_decompose",
    "random_faithful_state",
    "restrict_state",
    "run_suite",
    "selfpolar_form",
    "singular_values",
    "star_adjoint_dual",
    "state_power",
    "subalgebra_lp_norm",
    "takesaki_invariant",
    "tensor_embed",
    "trace_pairing",
    "transfer_exponent",
    "two_isometry_defect",
    "verify_state_restriction",
    "weighted_lp_norm",
    "yeadon_decompose",
]
