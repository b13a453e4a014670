"""Pseudo-spectral laboratory for the reduced Zakharov system.

Periodic-box Fourier calculus (dyadic and angular frequency projections),
exact linear flows with Duhamel quadrature, mixed space-time norms, the
Picard iteration with contraction diagnostics, and ensemble verification of
the dispersive, directional Strichartz, div-curl, and bilinear interaction
estimates.
"""

from .grid import Field, Grid, apply_multiplier, lambda_power, make_grid, plane_wave, transform
from .bands import (
    AngularPartition,
    DyadicLadder,
    bony_split,
    project_angular,
    project_dyadic,
    project_low,
)
from .propagators import (
    SourceTerm,
    Trajectory,
    dispersive_kernel,
    duhamel,
    free_trajectory,
    half_wave_flow,
    schrodinger_flow,
    wave_energy,
    wave_flow,
)
from .norms import (
    IterationNormFamily,
    NormSpec,
    mixed_norm,
    n1_norm,
    n2_norm,
    s1_norm,
    s2_norm,
    sobolev_norm,
    sobolev_norm_dyadic,
    x_norm,
)
from .ensembles import EnsembleSpec, SupportSpec, generate_ensemble, sample_field
from .picard import (
    IterationConfig,
    IterationReport,
    ZakharovData,
    difference_system_check,
    from_first_order,
    lipschitz_probe,
    picard_step,
    random_zakharov_data,
    run_iteration,
    to_first_order,
    tune_horizon,
)
from .verifier import (
    BilinearReport,
    DecayFit,
    RatioReport,
    ResidualReport,
    bilinear_slope_study,
    check_bernstein,
    check_bilinear,
    check_bilinear_inhomogeneous,
    check_dispersive_decay,
    check_divcurl,
    check_flux_identities,
    check_refined_strichartz,
    fit_scaling_exponent,
    interaction_horizon,
)

__version__ = "0.1.0"
