"""Heuristic design of photonic crystal waveguides for Purcell enhancement.

The package maps a target emitter wavelength onto triangular-lattice
waveguide geometries (period ``a``, hole radius ``r``) using closed-form
interference and diffraction estimates, and evaluates compound crystals
built from two differently designed halves under random hole-radius errors.

Lengths are in nanometres and angles in radians throughout the library;
the command-line layer accepts degrees.
"""

from pcwdesign.errors import (
    BracketError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    ExtrapolationError,
    GeometryError,
    InfeasibleDesignError,
    PCWError,
    QuadratureError,
)
from pcwdesign.numerics import (
    ConvergenceTrace,
    Tolerance,
    find_root,
    fixed_point,
    fresnel_cs,
    integrate,
)
from pcwdesign.radiometry import (
    AngularBand,
    average_emission_angle,
    bragg_family_fractions,
    dipole_band_fraction,
)
from pcwdesign.slab_optics import (
    GAAS,
    MaterialModel,
    VerticalCavity,
    load_material,
    refractive_index,
    verify_veff_prefactor,
    vertical_cavity,
)
from pcwdesign.heuristic import (
    BraggAngle,
    BraggIntercept,
    Conventions,
    CurvePoint,
    DesignResult,
    FresnelWavelength,
    LatticeSpec,
    MeanXUnits,
    ModeVolumeEstimate,
    beta_factor,
    bragg_intercept,
    design_curve,
    design_radius,
    mode_volume,
    pcw_purcell,
    peak_wavelength,
    solve_theta_wg,
    theta_wg_to_ratio,
    theta_wg_to_ratio_negated,
)
from pcwdesign.compound import (
    CompoundDesign,
    PerturbationConfig,
    PerturbationReport,
    build_compound,
    compensate_bias,
    compound_peak,
    run_perturbation,
    sensitivity,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
