"""One-phase Whitham modulation theory of the Camassa-Holm equation.

The package is organized around the spectral curve with branch points
-nu < u1 < u2 < u3.  From it: characteristic speeds by three independent
routes, the diagonal metric family and its constant-curvature geometry,
the negative-KdV side reached by the averaged reciprocal transformation,
and a hodograph solver for the nu = 0 modulation system.
"""

from .ch_modulation import (
    ChDensities,
    ChSpeeds,
    TravelingWave,
    densities,
    density_fit_residual,
    frequency,
    sign_facts,
    speeds,
    speeds_fd,
    traveling_wave,
    wavenumber,
)
from .curve import (
    ChCurve,
    DifferentialKind,
    shifted_curve,
    variational_residuals,
)
from .errors import (
    ConsistencyError,
    DomainError,
    InvalidCurveError,
    NumericalError,
    WhithamChError,
)
from .hodograph_solver import (
    EpdEngine,
    InitialData,
    ModulationSolution,
    SolveResult,
    as_engine,
    boundary_residual,
    commuting_speeds,
    epd_q,
    epd_residual,
    solve,
    solve_field,
    thread_cap,
    tsarev1_residual,
    zone_chart,
)
from .kdv_modulation import (
    FitReport,
    KdvCurve,
    KdvHamiltonians,
    casimir_gradient,
    gradient_identity_residual,
    hamiltonian_fit_report,
    kdv_curvature,
    kdv_hamiltonians,
    kdv_metric,
    kdv_metric_signed,
    neg_speeds,
    neg_speeds_fd,
    pos_speeds,
    varj0_residual,
)
from .metric_geometry import (
    AffinorReport,
    CurvatureReport,
    PencilReport,
    affinor_match,
    curvature,
    egorov_defect,
    expected_curvature,
    metric,
    metric_signed,
    pencil_check,
    rotation_coefficients,
    tsarev_check,
)
from .reciprocal import (
    FerapontovReport,
    ReciprocalPair,
    Table1Row,
    alpha_identity_residuals,
    casimir_dual_residual,
    casimir_identity_residuals,
    casimir_quadrature,
    ferapontov_check,
    ferapontov_transform,
    metricbeta_residuals,
    nu_dual_residual,
    table1,
    tilde_speeds,
    velocity_identity_residual,
)
from .special_functions import elliptic_E, elliptic_K, elliptic_Pi_complete

__version__ = "0.1.0"

__all__ = [
    "AffinorReport",
    "ChCurve",
    "ChDensities",
    "ChSpeeds",
    "ConsistencyError",
    "CurvatureReport",
    "DifferentialKind",
    "DomainError",
    "EpdEngine",
    "FerapontovReport",
    "FitReport",
    "InitialData",
    "InvalidCurveError",
    "KdvCurve",
    "KdvHamiltonians",
    "ModulationSolution",
    "NumericalError",
    "PencilReport",
    "ReciprocalPair",
    "SolveResult",
    "Table1Row",
    "TravelingWave",
    "WhithamChError",
    "alpha_identity_residuals",
    "affinor_match",
    "as_engine",
    "boundary_residual",
    "casimir_dual_residual",
    "casimir_gradient",
    "casimir_identity_residuals",
    "casimir_quadrature",
    "commuting_speeds",
    "curvature",
    "densities",
    "density_fit_residual",
    "egorov_defect",
    "elliptic_E",
    "elliptic_K",
    "elliptic_Pi_complete",
    "epd_q",
    "epd_residual",
    "expected_curvature",
    "ferapontov_check",
    "ferapontov_transform",
    "frequency",
    "gradient_identity_residual",
    "hamiltonian_fit_report",
    "kdv_curvature",
    "kdv_hamiltonians",
    "kdv_metric",
    "kdv_metric_signed",
    "metric",
    "metric_signed",
    "metricbeta_residuals",
    "neg_speeds",
    "neg_speeds_fd",
    "nu_dual_residual",
    "pencil_check",
    "pos_speeds",
    "rotation_coefficients",
    "shifted_curve",
    "sign_facts",
    "solve",
    "solve_field",
    "speeds",
    "speeds_fd",
    "table1",
    "thread_cap",
    "tilde_speeds",
    "traveling_wave",
    "tsarev_check",
    "tsarev1_residual",
    "varj0_residual",
    "variational_residuals",
    "velocity_identity_residual",
    "wavenumber",
    "zone_chart",
]
