"""framesens: smooth null-space frames and parameter sensitivities of
singular parametrized linear systems.

Building blocks:

- param_system: polynomial matrix families D(eps), b(eps); exact evaluation
  and differentiation; JSON round trip; callable adapter for non-polynomial
  families.
- nullspace: numerical rank with explicit tolerance, pivoted minor
  selection, constructive cofactor null vectors, SVD null bases.
- frame_field: deflation recursion for orthonormal solution frames, basis
  completion, continuous tracking along parameter paths.
- nonhomogeneous: consistency checks, bordered-system particular solutions,
  general-solution decomposition.
- sensitivity: direct (one solve per parameter) and adjoint (one solve per
  objective) derivatives of anchored unit null-direction branches.
- fd_check: independent finite-difference oracle and three-way consistency
  reports.
- generator/corpus/cli: reproducible test families with closed-form
  oracles, built-in example systems, command-line front end.
"""

from .errors import (
    AlignmentAmbiguous,
    CofactorOrderLimit,
    DeficiencyChanged,
    DeficiencyTooHigh,
    DeficiencyZero,
    EvaluationOverflow,
    FramesensError,
    GenerationFailed,
    InconsistentDerivativeSystem,
    InconsistentSystem,
    InvalidAnchor,
    MinorSelectionError,
    NotDeficient,
    NotInKernel,
    SingularAugmented,
    SystemFormatError,
    ToleranceAmbiguity,
    ZeroVector,
)
from .fd_check import (
    ConsistencyReport,
    FDDerivative,
    consistency_report,
    fd_null_derivative,
)
from .frame_field import (
    Frame,
    TrackedFrameSequence,
    complete_frame,
    deflate,
    frame_solutions,
    track_frame,
)
from .generator import GeneratedFamily, family_from_w, generate_family
from .nonhomogeneous import (
    ConsistencyCheck,
    Decomposition,
    GeneralSolution,
    check_consistency,
    decompose,
    general_solution,
    particular_solution,
)
from .nullspace import (
    RankProfile,
    cofactor_null_vector,
    default_tolerance,
    normalize,
    null_basis,
    rank_profile,
)
from .param_system import (
    CallableSystem,
    EvaluatedPair,
    Monomial,
    ParametrizedSystem,
    PolyEntry,
    load_system,
    parse_system,
    save_system,
    serialize_system,
)
from .sensitivity import (
    AdjointSolution,
    JacobianResult,
    Objective,
    SensitivityQuery,
    SensitivityResult,
    adjoint_derivative,
    adjoint_prepare,
    direct_sensitivity,
    full_jacobian,
    min_norm_solve,
)
from .corpus import CorpusCheck, CorpusEntry, corpus, corpus_names

__version__ = "0.1.0"

__all__ = [
    "AdjointSolution",
    "AlignmentAmbiguous",
    "CallableSystem",
    "CofactorOrderLimit",
    "ConsistencyCheck",
    "ConsistencyReport",
    "CorpusCheck",
    "CorpusEntry",
    "Decomposition",
    "DeficiencyChanged",
    "DeficiencyTooHigh",
    "DeficiencyZero",
    "EvaluatedPair",
    "EvaluationOverflow",
    "FDDerivative",
    "Frame",
    "FramesensError",
    "GeneralSolution",
    "GeneratedFamily",
    "GenerationFailed",
    "InconsistentDerivativeSystem",
    "InconsistentSystem",
    "InvalidAnchor",
    "JacobianResult",
    "MinorSelectionError",
    "Monomial",
    "NotDeficient",
    "NotInKernel",
    "Objective",
    "ParametrizedSystem",
    "PolyEntry",
    "RankProfile",
    "SensitivityQuery",
    "SensitivityResult",
    "SingularAugmented",
    "SystemFormatError",
    "ToleranceAmbiguity",
    "TrackedFrameSequence",
    "ZeroVector",
    "adjoint_derivative",
    "adjoint_prepare",
    "check_consistency",
    "cofactor_null_vector",
    "complete_frame",
    "consistency_report",
    "corpus",
    "corpus_names",
    "decompose",
    "default_tolerance",
    "deflate",
    "direct_sensitivity",
    "family_from_w",
    "fd_null_derivative",
    "frame_solutions",
    "full_jacobian",
    "general_solution",
    "generate_family",
    "load_system",
    "min_norm_solve",
    "normalize",
    "null_basis",
    "parse_system",
    "particular_solution",
    "rank_profile",
    "save_system",
    "serialize_system",
    "track_frame",
]
