"""Executable stability analysis for dense complex matrices: semigroup and
power suprema, Kreiss constants, resolvent-to-distance ratio functionals,
triangular and Hermitian stability certificates, region bounds, matrix
families, and an inverse-Laplace Cauchy-problem demo."""

__version__ = "0.1.0"

from .cauchy import (
    CauchyConfig,
    EnvelopeComparison,
    LaplaceReconstruction,
    SourceTerm,
    builtin_source,
    envelope_comparison,
    laplace_reconstruct,
    reference_solution,
)
from .certificates import (
    Condition3Certificate,
    Condition3Verification,
    Condition4Certificate,
    ResolventInequalityReport,
    bound_from_condition3,
    build_condition3,
    build_condition4,
    check_resolvent_inequality,
    miller_region_bound,
    verify_condition3,
)
from .constants import (
    SearchConfig,
    SupSearchResult,
    cal_k_continuous,
    cal_k_discrete,
    kreiss_constant_continuous,
    kreiss_constant_discrete,
    sup_power_norm,
    sup_semigroup_norm,
)
from .errors import (
    BoundaryError,
    ConfigurationError,
    DimensionError,
    FactorizationError,
    KreissError,
    MatrixMarketError,
    NotUnitTriangularError,
    SingularPointError,
)
from .families import (
    FamilyReport,
    FamilySpec,
    MemberRecord,
    family_report,
    generate_family,
    resolve_symbol,
    sample_symbol,
)
from .linalg import (
    SchurForm,
    UnitTriFactorization,
    as_square_matrix,
    direct_sum,
    expm,
    jordan_block,
    schur,
    solve_lyapunov_continuous,
    solve_stein_discrete,
    spectral_norm,
    unit_tri_bound,
    unit_tri_inverse_factored,
)
from .mmio import read_matrix, read_symbol_table, write_matrix, write_symbol_table
from .resolvent import (
    EvalPoint,
    RatioSample,
    ResolventGrid,
    jordan_resolvent,
    ratio_continuous,
    ratio_discrete,
    region_S_membership,
    region_T_membership,
    resolvent_grid,
    resolvent_norm,
)
from .spectra import (
    SpectrumReport,
    StabilityVerdict,
    boundary_excluded_spectrum,
    classify_power_bounded,
    classify_quasi_stable,
    spectrum,
)

__all__ = [name for name in dir() if not name.startswith("_")]
