"""Volume-fraction recovery for particulate composites from dielectric measurements.

The forward model is the Mori-Tanaka estimate of the effective complex
permittivity; the inverse problem is posed as a linear program over the
volume-fraction simplex.
"""

from .diagnostics import SensitivityReport, error_bound, sensitivity, tangent_basis
from .errors import (
    ConfigError,
    DegenerateScale,
    EmptyMinimizerSet,
    InfeasibleMeasurement,
    MTInverseError,
    NonPositiveFrequency,
    SingularDenominator,
    SingularSensitivity,
)
from .formulations import (
    MeasurementSet,
    RecoveryReport,
    assemble_cc,
    assemble_multifreq,
    invert,
    solve_cc,
    solve_multifreq,
)
from .forward import (
    SPHERE,
    PQVectors,
    SpheroidShape,
    build_pq,
    concentration_R,
    contrasts,
    depolarization_Q,
    depolarization_tensor,
    effective_permittivity,
    normalized_pq,
)
from .harness import (
    NoiseSpec,
    RunResult,
    run_campaign,
    sample_phi_true,
    select_frequencies,
    synthesize_measurement,
)
from .lp import LPProblem, LPSolution, LPStatus, solve_lp
from .minimizers import (
    MinimizerSet,
    build_u,
    ordered_edges,
    ordered_simplex_minimizers,
    ordered_vertices,
    sign_partition,
    simplex_minimizers,
)
from .permittivity import ColeCole, ColeColeUDR, Constant, Debye, evaluate, evaluate_hz
from .systems import MaterialSystem, builtin_system, load_system

__version__ = "0.1.0"
