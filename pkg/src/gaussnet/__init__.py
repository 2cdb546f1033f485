"""Genuine Gaussian quantum correlation, Sp(4,R) normal forms and network state generation."""

__version__ = "0.1.0"

from .errors import (
    BoundViolationError,
    CapacityError,
    ClassificationError,
    ConfigError,
    GaussNetError,
    InvalidArgumentError,
    NotPhysicalError,
    NotSymmetricError,
    NotSymplecticError,
    PhysicalityError,
)
from .symplectic import (
    GaussianUnitary,
    apply_unitary,
    embed_two_mode,
    is_symplectic,
    local_symplectic,
    omega,
    random_symplectic,
    symplectic_defect,
    validate_cm,
    williamson_single_mode,
)
from .states import (
    GaussianState,
    permute,
    random_state,
    reduce,
    tensor,
    tritter_state,
    two_mode_pure,
    two_mode_standard,
)
from .measure import Bipartition, GGQCReport, closed_form, enumerate_bipartitions, ggqc, m_value, principal_det
from .classify import (
    CanonicalForm,
    ClassificationResult,
    canonical_matrix,
    classify,
    symplectic_block_identities,
    verify_classification,
)
from .network import (
    Designed,
    NetworkReport,
    NetworkSpec,
    Operation,
    Source,
    Squeezer,
    Standardized,
    attain_threshold,
    chain_example,
    check_sufficiency,
    condition_threshold,
    design_optimal,
    run_protocol,
    star_example,
    table_threshold,
    two_mode_squeezer,
    verify_network,
)
from .search import SearchConfig, SweepRow, random_search_max_ggqc, sweep_lambda
