"""Deformed phase-space dynamics engine.

Algebra catalog with Poisson structure matrices, gravitational dynamics
under deformed brackets, closed-form oracles, mass-scaling rules that
restore the universality of free fall, composite-system reductions, and a
config-driven reporting harness.
"""

from .algebra import (
    CanonicalNC2D,
    CanonicalNC3D,
    Gup1D,
    Gup3D,
    LieGeneral,
    LieMiaoVariant1,
    LieMiaoVariant2,
    LieTimeCommuting,
    Ordinary,
    PhasePoint,
    RotInvEffective,
    SnyderKempfGeneral,
    StructureMatrix,
    antisym3,
    jacobi_max_residual,
    jacobi_residual,
    kempf_family,
    poisson_bracket,
    snyder_family,
    snyder_kempf_constraint_residual,
    structure_matrix,
)
from .closedforms import (
    gup_acceleration_first_order,
    gup_eotvos,
    gup_eotvos_planck,
    gup_exact_kinetic,
    gup_kinetic_series,
    gup_kinetic_series_equal_parts,
    gup_kinetic_series_scaled,
    gup_kinetic_series_sum_over_parts,
    nc2d_uniform_trajectory,
    nc2d_uniform_trajectory_scaled,
    rotinv_uniform_trajectory,
    rotinv_uniform_trajectory_scaled,
)
from .composite import (
    CompositeSystem,
    Particle,
    com_cross_brackets,
    composite_eom,
    effective_canonical_params,
    effective_lie_general_params,
    effective_lie_time_params,
    kinetic_energy_report,
    soccer_ball_scaling,
)
from .dynamics import (
    AdaptiveRK45,
    FixedRK4,
    Free,
    PointSource,
    RotInvEffectivePoint,
    RotInvEffectiveUniform,
    Trajectory,
    UniformField,
    eom_vector_field,
    gup_velocity_to_scaled_momentum,
    integrate,
    velocity_to_momentum,
)
from .functions import DeformationFunction, get_deformation, get_deformation_3d
from .sem import SunEarthMoonParams, parameter_bounds_from_llr, sem_accelerations, sem_eotvos
from .wep import (
    CanonicalScaling,
    EotvosReport,
    GupScaling,
    LieGeneralScaling,
    LieScaling,
    PointSourceScenario,
    RotInvScaling,
    UniformFallScenario,
    apply_scaling,
    eotvos_from_accelerations,
    wep_divergence,
)

__version__ = "0.1.0"
