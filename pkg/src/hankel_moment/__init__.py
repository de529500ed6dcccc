"""Hankel multidimensional moment sequences, strong Hankel tensors and their decompositions."""
from .decomposition import (
    JacobiMatrix,
    ResidualReport,
    VandermondeDecomposition,
    gauss_quadrature,
    jacobi_from_moments,
    strong_hankel_decompose,
    verify_decomposition,
)
from .explorer import (
    ExploreReport,
    FitOptions,
    FitResult,
    TruncatedFamily,
    cd_fit,
    objective_and_gradient,
    preset_family,
    relative_residual,
    search_counterexample,
    truncated_vectors,
)
from .psd import (
    HankelMatrix,
    MomentCheckReport,
    PsdReport,
    StrongHankelCertificate,
    Verdict,
    hankel_matrix,
    leading_principal_minors,
    moment_sequence_check,
    psd_check,
    strong_hankel_check,
)
from .scalars import (
    EXACT,
    FLOAT,
    CoverageError,
    DomainError,
    HankelMomentError,
    InconsistencyError,
    LengthError,
    NumericalFailure,
    PreconditionError,
)
from .sequence import (
    AtomicMeasure,
    GeneratingVector,
    MultidimensionalSequence,
    generating_vector_from_sequence,
    is_hankel_sequence,
    moments_of_measure,
    multidim_moment,
    pushforward_atoms,
    sequence_from_generating_vector,
    weighted_degree,
)
from .tensor import (
    HankelTensor,
    RankOneTerm,
    SymmetricTensor,
    densify,
    hankel_tensor,
    is_hankel,
    moment_curve,
    moment_tensor_from_sequence,
    multinomial_coefficient,
    polynomial_eval,
    rank_one_sum,
    tensor_contract,
)

__version__ = "0.1.0"
