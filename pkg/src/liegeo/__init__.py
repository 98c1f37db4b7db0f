"""liegeo: geodesics, curvature and conjugate points on matrix Lie groups.

Quadratic Lie groups carry a bi-invariant form <.,.>; every left-invariant
metric is g(u,v) = <u, Lambda v> for a symmetric positive operator Lambda.
This package builds so(n)/su(n) bases, integrates the Euler-Arnold equations,
computes curvature in closed and numeric form, and detects conjugate points
through four independent routes (Jacobi determinant, steady Sylvester
criterion, commuting-block criterion, index-form criteria).
"""

from .algebra import (
    Ad_matrix,
    AlgebraElement,
    GroupElement,
    StructuredBasis,
    ad_matrix,
    biinv_form,
    bracket,
    build_so_basis,
    build_su_basis,
    build_torus_basis,
    group_exp,
    project_h,
    project_h_perp,
)
from .curvature import (
    RicciResult,
    beta_constants,
    block_einstein_constants,
    block_einstein_report,
    cartan_condition_check,
    cheeger_sectional,
    misiolek_scan,
    misiolek_value,
    ricci_matrix,
    ricci_numeric,
    ricci_rigid_closed_form,
    sectional_numerator,
    sectional_numerator_arnold,
)
from .criteria import (
    CommutingBlockData,
    SteadyCriterion,
    cheeger_index_test_field,
    cheeger_nonsteady_condition,
    commuting_block_scan,
    index_form_tau,
    index_form_value,
    nonsteady_frame,
    nonsteady_quadratic_criterion,
    rigid_body_L2_check,
    steady_determinant_scan,
    steady_operators,
)
from .dynamics import (
    GeodesicTrajectory,
    cheeger_geodesic_exact,
    closed_biinvariant_time,
    integrate_euler_arnold,
)
from .errors import (
    BasisMismatchError,
    ConfigError,
    CriterionInapplicableError,
    IntegrationDivergedError,
    InvalidDimensionError,
    LieGeoError,
    MetricConstructionError,
    UnsupportedSplitError,
)
from .jacobi import (
    ConjugateReport,
    JacobiSolution,
    closed_geodesic_conjugacy,
    explicit_closed_field,
    find_conjugate_times,
    integrate_jacobi,
    right_translation_isometry_check,
    solution_operator,
)
from .locus import (
    LocusSlice,
    berger_det,
    berger_first_conjugate_time,
    emit_locus,
    generate_locus_slice,
)
from .metric import MetricOperator

__version__ = "0.1.0"
