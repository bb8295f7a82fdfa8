"""Exact verification toolkit for a cocompact lattice over Q[2^(1/4)]."""

from .errors import (
    ArithLatError,
    DomainError,
    InternalError,
    InvalidInput,
    ParseError,
    PrecisionError,
    ShapeError,
    SingularError,
    SizeError,
    VerificationFailed,
)
from .intersection import (
    SamePositive,
    Unresolved,
    build_star_system,
    orientation_preserving,
    sign_criterion,
    solution_dimension,
    solvable_mod,
)
from .lattice import (
    LatticeElement,
    LatticeSpec,
    a_generator,
    b_generator,
    enumerate_members,
    in_congruence_kernel,
    is_member,
    reduce_matrix,
    symmetric_space_distance,
)
from .liealg import (
    ad,
    conjugated_singular_vector,
    invariant_forms,
    normal_coefficient_vanishes,
    transversality_check,
    wedge_ad,
)
from .linalg import FieldMatrix, det, inverse, kernel
from .modring import ModElement, ModMatrix, all_squares, no_power_hits_minus_one, solve_linear_mod
from .qfield import (
    MINUS,
    PLUS,
    U0,
    Embedding,
    FieldElement,
    field_norm,
    galois_sigma,
    galois_tau,
    is_mth_power,
    unit_decompose,
    verify_fundamental_unit,
)
from .report import Report

__all__ = [
    "ArithLatError",
    "DomainError",
    "InternalError",
    "InvalidInput",
    "ParseError",
    "PrecisionError",
    "ShapeError",
    "SingularError",
    "SizeError",
    "VerificationFailed",
    "SamePositive",
    "Unresolved",
    "build_star_system",
    "orientation_preserving",
    "sign_criterion",
    "solution_dimension",
    "solvable_mod",
    "LatticeElement",
    "LatticeSpec",
    "a_generator",
    "b_generator",
    "enumerate_members",
    "in_congruence_kernel",
    "is_member",
    "reduce_matrix",
    "symmetric_space_distance",
    "ad",
    "conjugated_singular_vector",
    "invariant_forms",
    "normal_coefficient_vanishes",
    "transversality_check",
    "wedge_ad",
    "MINUS",
    "PLUS",
    "U0",
    "Embedding",
    "FieldElement",
    "field_norm",
    "galois_sigma",
    "galois_tau",
    "is_mth_power",
    "unit_decompose",
    "verify_fundamental_unit",
    "FieldMatrix",
    "det",
    "inverse",
    "kernel",
    "ModElement",
    "ModMatrix",
    "all_squares",
    "no_power_hits_minus_one",
    "solve_linear_mod",
    "Report",
]

__version__ = "0.1.0"
