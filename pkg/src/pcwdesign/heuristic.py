"""Closed-form waveguide design model.

The model relates the hole lattice of a line-defect photonic crystal
waveguide to the wavelength where its Purcell factor peaks. Three estimates
feed one fixed-point loop:

* leakage out of the membrane through the vertical Fabry-Perot resonance;
* coupling into the guided mode, from a diffraction-limited unit-cell mode
  volume, which fixes the acceptance angle ``theta_wg`` and the slope
  ``c2``;
* Bragg blocking by the sloped and parallel hole rows, which fixes the
  intercept ``c1``.

A design satisfies ``a = c1 + c2 * r``. Because ``c2`` depends on ``r``
through the mode volume, the radius is found iteratively.

Some steps of the model admit more than one reading. :class:`Conventions`
names each choice so that results stay reproducible and the choices can be
compared without editing code.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

from pcwdesign.constants import LATTICE_ANGLE_DEFAULT, SPEED_OF_LIGHT, nm_to_m
from pcwdesign.errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    GeometryError,
    InfeasibleDesignError,
)
from pcwdesign.numerics import ConvergenceTrace, Tolerance, find_root, fixed_point, fresnel_cs
from pcwdesign.radiometry import (
    average_emission_angle,
    bragg_family_fractions,
)
from pcwdesign.slab_optics import (
    GAAS,
    MaterialModel,
    VerticalCavity,
    refractive_index,
    vertical_cavity,
)

__all__ = [
    "MeanXUnits",
    "FresnelWavelength",
    "BraggAngle",
    "Conventions",
    "DEFAULT_CONVENTIONS",
    "DESIGN_TOL",
    "PEAK_TOL",
    "LatticeSpec",
    "ModeVolumeEstimate",
    "BraggIntercept",
    "DesignResult",
    "CurvePoint",
    "pcw_purcell",
    "beta_factor",
    "mode_volume",
    "solve_theta_wg",
    "theta_wg_to_ratio",
    "theta_wg_to_ratio_negated",
    "bragg_intercept",
    "design_step",
    "design_radius",
    "design_curve",
    "peak_wavelength",
]


class MeanXUnits(str, enum.Enum):
    """Length unit of the axial coordinate in the ``1/(x+1)^2`` intensity falloff.

    ``PERIOD`` measures ``x`` in lattice periods, which keeps the model
    homogeneous in length. ``MICROMETERS`` measures it in micrometres.
    """

    PERIOD = "period"
    MICROMETERS = "um"


class FresnelWavelength(str, enum.Enum):
    """Wavelength used in the Fresnel-zone count: vacuum ``lambda`` or ``lambda/n``."""

    VACUUM = "vacuum"
    MEDIUM = "medium"


class BraggAngle(str, enum.Enum):
    """Angle entering the sloped-row incidence angle and the row-family split.

    ``HALF`` uses ``theta_gr / 2``. For the 60 degree lattice this is the
    30 degree tilt of the sloped-row normals from the transverse axis.
    ``FULL`` uses ``theta_gr`` itself. Interplanar spacings always use the
    full lattice angle.
    """

    HALF = "half"
    FULL = "full"


@dataclass(frozen=True)
class Conventions:
    mean_x_units: MeanXUnits = MeanXUnits.PERIOD
    fresnel_wavelength: FresnelWavelength = FresnelWavelength.VACUUM
    bragg_angle: BraggAngle = BraggAngle.HALF
    # v_g = c / group_index; None means the material index (free-space dispersion)
    group_index: float | None = None
    clamp_intensity: bool = True

    def __post_init__(self):
        object.__setattr__(self, "mean_x_units", MeanXUnits(self.mean_x_units))
        object.__setattr__(
            self, "fresnel_wavelength", FresnelWavelength(self.fresnel_wavelength)
        )
        object.__setattr__(self, "bragg_angle", BraggAngle(self.bragg_angle))
        if self.group_index is not None and not self.group_index > 0:
            raise DomainError(f"group index must be positive, got {self.group_index}")

    def to_dict(self) -> dict:
        return {
            "mean_x_units": self.mean_x_units.value,
            "fresnel_wavelength": self.fresnel_wavelength.value,
            "bragg_angle": self.bragg_angle.value,
            "group_index": self.group_index,
            "clamp_intensity": self.clamp_intensity,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Conventions":
        unknown = set(d) - {
            "mean_x_units",
            "fresnel_wavelength",
            "bragg_angle",
            "group_index",
            "clamp_intensity",
        }
        if unknown:
            raise DomainError(f"unknown convention keys: {sorted(unknown)}")
        return cls(**d)


DEFAULT_CONVENTIONS = Conventions()

DESIGN_TOL = Tolerance(abs_tol=1e-6, rel_tol=1e-9, max_iter=200)
PEAK_TOL = Tolerance(abs_tol=1e-9, rel_tol=1e-12, max_iter=100)


@dataclass(frozen=True)
class LatticeSpec:
    """Geometry of a triangular-lattice waveguide (lengths in nm, angle in rad)."""

    a: float
    r: float
    h: float
    theta_gr: float = LATTICE_ANGLE_DEFAULT
    material: MaterialModel = GAAS

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"period a must be positive, got {self.a}")
        if not self.h > 0:
            raise DomainError(f"membrane thickness h must be positive, got {self.h}")
        if not 0.0 < self.theta_gr < 0.5 * math.pi:
            raise DomainError(f"lattice angle must lie in (0, pi/2), got {self.theta_gr}")
        if not 0.0 < self.r < 0.5 * self.a:
            raise GeometryError(
                f"hole radius r={self.r} nm must lie in (0, a/2) for a={self.a} nm",
                quantity="r",
            )
        if self.slit_width <= 0:
            raise GeometryError(
                f"unit-cell entrance is closed: a*tan(theta_gr) - 2r = {self.slit_width:.6g} nm",
                quantity="slit_width",
            )

    @property
    def slit_width(self) -> float:
        return self.a * math.tan(self.theta_gr) - 2.0 * self.r

    @property
    def cell_volume(self) -> float:
        """Rectangle ``a x a*tan(theta_gr)`` minus four quarter holes, times ``h``."""
        return (self.a * self.a * math.tan(self.theta_gr) - math.pi * self.r**2) * self.h

    def with_radius(self, r: float) -> "LatticeSpec":
        return replace(self, r=r)

    def to_dict(self) -> dict:
        return {
            "a_nm": self.a,
            "r_nm": self.r,
            "h_nm": self.h,
            "theta_gr_deg": math.degrees(self.theta_gr),
            "material": self.material.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LatticeSpec":
        return cls(
            a=d["a_nm"],
            r=d["r_nm"],
            h=d["h_nm"],
            theta_gr=math.radians(d.get("theta_gr_deg", 60.0)),
            material=MaterialModel.from_dict(d["material"]) if "material" in d else GAAS,
        )


def pcw_purcell(
    spec: LatticeSpec,
    lam: float,
    V_eff: float,
    v_g: float | None = None,
    n: float | None = None,
) -> float:
    """Waveguide Purcell factor ``3 pi c^3 a / (V_eff w^2 eps^1.5 v_g)``.

    ``v_g`` in m/s defaults to ``c/n``. Lengths are in nm and ``V_eff`` in nm^3.
    """
    if not lam > 0:
        raise DomainError(f"wavelength must be positive, got {lam}")
    if not V_eff > 0:
        raise DomainError(f"mode volume must be positive, got {V_eff}")
    if n is None:
        n = refractive_index(spec.material, lam)
    c = SPEED_OF_LIGHT
    if v_g is None:
        v_g = c / n
    if v_g == 0:
        raise DomainError("group velocity is zero: the Purcell factor is singular")
    if v_g < 0:
        raise DomainError(f"group velocity must be positive, got {v_g}")
    omega = 2.0 * math.pi * c / nm_to_m(lam)
    eps = n * n
    V_m3 = V_eff * 1e-27
    return 3.0 * math.pi * c**3 * nm_to_m(spec.a) / (V_m3 * omega**2 * eps**1.5 * v_g)


def beta_factor(F: float) -> float:
    """Probability ``F / (1 + F)`` of emitting into the enhanced mode."""
    if math.isnan(F) or F < 0:
        raise DomainError(f"Purcell factor must be >= 0, got {F}")
    if math.isinf(F):
        return 1.0
    return F / (1.0 + F)


@dataclass(frozen=True)
class ModeVolumeEstimate:
    """Diffraction estimate of the guided-mode volume in one unit cell.

    ``mean_x`` is in the units selected by :class:`MeanXUnits`.
    ``intensity_ratio`` is the value used for ``V_eff``, clamped to 1 when
    clamping is enabled. ``raw_intensity_ratio`` is the unclamped Cornu-spiral
    value, which can exceed 1 when the slit holds about one Fresnel zone.
    """

    mean_x: float
    mean_x_nm: float
    fresnel_zones_m: float
    cornu_u: float
    raw_intensity_ratio: float
    intensity_ratio: float
    cell_volume: float
    V_eff: float

    def to_dict(self) -> dict:
        return {
            "mean_x": self.mean_x,
            "mean_x_nm": self.mean_x_nm,
            "fresnel_zones_m": self.fresnel_zones_m,
            "cornu_u": self.cornu_u,
            "raw_intensity_ratio": self.raw_intensity_ratio,
            "intensity_ratio": self.intensity_ratio,
            "cell_volume_nm3": self.cell_volume,
            "V_eff_nm3": self.V_eff,
        }


def _mean_x(a: float, units: MeanXUnits) -> tuple[float, float]:
    # mean of 1/(x+1)^2 over [0, L] equals its value at sqrt(L+1) - 1
    if units is MeanXUnits.PERIOD:
        x = math.sqrt(2.0) - 1.0
        return x, x * a
    x = math.sqrt(a * 1e-3 + 1.0) - 1.0
    return x, x * 1e3


def mode_volume(
    spec: LatticeSpec,
    lam: float,
    conventions: Conventions = DEFAULT_CONVENTIONS,
    n: float | None = None,
) -> ModeVolumeEstimate:
    """Unit-cell mode volume from Fresnel diffraction at the cell entrance."""
    if not lam > 0:
        raise DomainError(f"wavelength must be positive, got {lam}")
    slit = spec.slit_width
    if slit <= 0:
        raise GeometryError(f"closed unit-cell entrance (slit width {slit})", "slit_width")
    mean_x, mean_x_nm = _mean_x(spec.a, conventions.mean_x_units)
    if conventions.fresnel_wavelength is FresnelWavelength.MEDIUM:
        if n is None:
            n = refractive_index(spec.material, lam)
        lam_eff = lam / n
    else:
        lam_eff = lam
    m = slit * slit / (4.0 * lam_eff * mean_x_nm)
    u = math.sqrt(2.0 * m)
    C, S = fresnel_cs(u)
    raw = (C * C + S * S) / 0.5  # C(inf)^2 + S(inf)^2 = 1/2
    ratio = min(raw, 1.0) if conventions.clamp_intensity else raw
    cell = spec.cell_volume
    return ModeVolumeEstimate(mean_x, mean_x_nm, m, u, raw, ratio, cell, ratio * cell)


def solve_theta_wg(F_FP: float, F_PCW: float) -> float:
    """Acceptance half-angle ``theta_wg`` balancing leakage and guided coupling.

    Solves ``(3 sin t - sin^3 t) / 2 = beta(F_PCW) * (1 + F_FP)``. With
    ``s = 2 sin(phi)`` the left side equals ``sin(3 phi)``, so the cubic
    inverts in closed form.
    """
    if math.isnan(F_FP) or F_FP < 0:
        raise DomainError(f"F_FP must be >= 0, got {F_FP}")
    target = beta_factor(F_PCW)
    stay = 1.0 - beta_factor(F_FP)
    y = target / stay
    if y > 1.0:
        raise InfeasibleDesignError(
            f"waveguide coupling beta={target:.6g} exceeds the in-plane share "
            f"{stay:.6g} left by the vertical cavity; no acceptance angle exists",
            quantity="theta_wg",
        )
    if y == 1.0:
        # asin is infinitely steep here; 2 sin(pi/6) rounds just below 1
        return 0.5 * math.pi
    s = 2.0 * math.sin(math.asin(y) / 3.0)
    return math.asin(min(s, 1.0))


def _check_angles(theta_wg: float, theta_gr: float) -> None:
    if not 0.0 < theta_wg < 0.5 * math.pi:
        raise DomainError(f"theta_wg must lie in (0, pi/2), got {theta_wg}")
    if not 0.0 < theta_gr < 0.5 * math.pi:
        raise DomainError(f"theta_gr must lie in (0, pi/2), got {theta_gr}")


def theta_wg_to_ratio(theta_wg: float, theta_gr: float) -> float:
    """Slope ``c2`` from the acceptance angle and the lattice angle."""
    _check_angles(theta_wg, theta_gr)
    half = 0.25 * math.pi - 0.5 * theta_wg
    t = math.tan(theta_wg)
    den = 0.5 * (math.tan(theta_gr) - t)
    if abs(den) <= 1e-12 * max(1.0, abs(t)):
        raise GeometryError("theta_wg coincides with the lattice angle (pole of c2)", "c2")
    return (math.cos(half) - t * math.sin(half)) / den


def theta_wg_to_ratio_negated(theta_wg: float, theta_gr: float) -> float:
    """Same slope written with numerator and denominator negated."""
    _check_angles(theta_wg, theta_gr)
    half = 0.25 * math.pi - 0.5 * theta_wg
    t = math.tan(theta_wg)
    den = 0.5 * t - 0.5 * math.tan(theta_gr)
    if abs(den) <= 1e-12 * max(1.0, abs(t)):
        raise GeometryError("theta_wg coincides with the lattice angle (pole of c2)", "c2")
    return (t * math.sin(half) - math.cos(half)) / den


class BraggIntercept(NamedTuple):
    c1: float
    a_slp: float
    a_par: float
    eta_slp: float
    eta_par: float
    alpha_avg: float
    incidence_angle: float

    def to_dict(self) -> dict:
        return {
            "c1_nm": self.c1,
            "a_slp_nm": self.a_slp,
            "a_par_nm": self.a_par,
            "eta_slp": self.eta_slp,
            "eta_par": self.eta_par,
            "alpha_avg_rad": self.alpha_avg,
            "incidence_angle_rad": self.incidence_angle,
        }


def bragg_intercept(
    lam: float,
    n: float,
    theta_gr: float,
    convention: BraggAngle = BraggAngle.HALF,
) -> BraggIntercept:
    """Intercept ``c1`` as the emission-weighted mix of two Bragg periods.

    Sloped rows (spacing ``a sin(theta_gr)``) are hit at the incidence angle
    ``theta_b - alpha_avg``; parallel rows (spacing ``a tan(theta_gr) / 2``)
    at ``alpha_avg``. ``theta_b`` is fixed by ``convention``.
    """
    if not lam > 0 or not n > 0:
        raise DomainError("wavelength and index must be positive")
    if not 0.0 < theta_gr < 0.5 * math.pi:
        raise DomainError(f"lattice angle must lie in (0, pi/2), got {theta_gr}")
    convention = BraggAngle(convention)
    theta_b = 0.5 * theta_gr if convention is BraggAngle.HALF else theta_gr
    alpha_avg = average_emission_angle()
    incidence = theta_b - alpha_avg
    cos_inc = math.cos(incidence)
    if cos_inc <= 0:
        raise GeometryError(f"sloped-row incidence angle {incidence} rad is grazing", "c1")
    a_slp = lam / (2.0 * n * math.sin(theta_gr) * cos_inc)
    a_par = lam / (n * math.tan(theta_gr) * math.cos(alpha_avg))
    eta_slp, eta_par = bragg_family_fractions(theta_b)
    c1 = eta_par * a_par + eta_slp * a_slp
    return BraggIntercept(c1, a_slp, a_par, eta_slp, eta_par, alpha_avg, incidence)


class _Step(NamedTuple):
    r_new: float
    theta_wg: float
    c2: float
    F_PCW: float
    mode: ModeVolumeEstimate


def _step(a, r, lam, h, theta_gr, material, n, F_FP, c1, conv) -> _Step:
    spec = LatticeSpec(a, r, h, theta_gr, material)
    mv = mode_volume(spec, lam, conv, n)
    if mv.V_eff <= 0:
        raise GeometryError("mode volume vanished (closed slit)", "V_eff")
    v_g = SPEED_OF_LIGHT / (conv.group_index or n)
    F = pcw_purcell(spec, lam, mv.V_eff, v_g=v_g, n=n)
    theta_wg = solve_theta_wg(F_FP, F)
    if theta_wg <= 0.0:
        raise InfeasibleDesignError("acceptance angle collapsed to zero", "theta_wg")
    c2 = theta_wg_to_ratio(theta_wg, theta_gr)
    return _Step((a - c1) / c2, theta_wg, c2, F, mv)


def design_step(
    a: float,
    r: float,
    lam: float,
    h: float,
    material: MaterialModel = GAAS,
    theta_gr: float = LATTICE_ANGLE_DEFAULT,
    conventions: Conventions = DEFAULT_CONVENTIONS,
) -> float:
    """One pass of the design loop: the radius ``(a - c1) / c2`` implied by ``r``.

    No bounds are imposed on the returned value. A radius is self-consistent
    exactly when ``design_step(a, r, lam, ...) == r``.
    """
    n = refractive_index(material, lam)
    F_FP = vertical_cavity(h, n, lam).F_FP
    c1 = bragg_intercept(lam, n, theta_gr, conventions.bragg_angle).c1
    return _step(a, r, lam, h, theta_gr, material, n, F_FP, c1, conventions).r_new


@dataclass
class DesignResult:
    """Self-consistent geometry and all intermediate model quantities."""

    spec: LatticeSpec
    lam: float
    theta_wg: float
    c1: float
    c2: float
    F_PCW: float
    F_FP: float
    beta: float
    trace: ConvergenceTrace
    mode_volume: ModeVolumeEstimate
    a_slp: float
    a_par: float
    cavity: VerticalCavity
    bragg: BraggIntercept
    conventions: Conventions
    diagnostics: dict = field(default_factory=dict)

    @property
    def r(self) -> float:
        return self.spec.r

    @property
    def a(self) -> float:
        return self.spec.a

    @property
    def locus_residual(self) -> float:
        """``a - (c1 + c2 r)``; vanishes at the fixed point."""
        return self.spec.a - (self.c1 + self.c2 * self.spec.r)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "lambda_nm": self.lam,
            "r_nm": self.spec.r,
            "theta_wg_rad": self.theta_wg,
            "c1_nm": self.c1,
            "c2": self.c2,
            "F_PCW": self.F_PCW,
            "F_FP": self.F_FP,
            "beta": self.beta,
            "a_slp_nm": self.a_slp,
            "a_par_nm": self.a_par,
            "locus_residual_nm": self.locus_residual,
            "mode_volume": self.mode_volume.to_dict(),
            "cavity": self.cavity.to_dict(),
            "bragg": self.bragg.to_dict(),
            "conventions": self.conventions.to_dict(),
            "diagnostics": dict(self.diagnostics),
            "trace": self.trace.to_dict(),
        }


def design_radius(
    a: float,
    lam: float,
    h: float,
    material: MaterialModel = GAAS,
    theta_gr: float = LATTICE_ANGLE_DEFAULT,
    r0: float | None = None,
    tol: Tolerance = DESIGN_TOL,
    conventions: Conventions = DEFAULT_CONVENTIONS,
    damping: float = 0.5,
) -> DesignResult:
    """Hole radius putting the Purcell peak of period ``a`` at ``lam``.

    Iterates radius -> mode volume -> F_PCW -> theta_wg -> c2 ->
    ``(a - c1) / c2`` until the radius reproduces itself to ``tol.abs_tol``
    nm. ``r0`` defaults to ``a/3``.
    """
    if not a > 0 or not lam > 0 or not h > 0:
        raise DomainError("a, lambda and h must be positive")
    if not 0.0 < theta_gr < 0.5 * math.pi:
        raise DomainError(f"lattice angle must lie in (0, pi/2), got {theta_gr}")
    if r0 is None:
        r0 = a / 3.0
    if not 0.0 < r0 < 0.5 * a:
        raise DomainError(f"initial radius r0={r0} must lie in (0, a/2)")

    n = refractive_index(material, lam)
    cavity = vertical_cavity(h, n, lam)
    bragg = bragg_intercept(lam, n, theta_gr, conventions.bragg_angle)
    if bragg.c1 >= a:
        raise InfeasibleDesignError(
            f"Bragg intercept c1={bragg.c1:.4f} nm is not below the period a={a} nm; "
            "no positive radius satisfies a = c1 + c2 r",
            quantity="c1",
        )

    visited: list[float] = []

    def g(r: float) -> float:
        visited.append(r)
        try:
            r_new = _step(a, r, lam, h, theta_gr, material, n, cavity.F_FP, bragg.c1, conventions).r_new
        except InfeasibleDesignError as exc:
            exc.trace = list(visited)
            raise
        if not 0.0 < r_new < 0.5 * a:
            raise InfeasibleDesignError(
                f"updated radius r={r_new:.4f} nm falls outside (0, a/2) for a={a} nm",
                quantity="r",
                trace=list(visited),
            )
        return r_new

    r, trace = fixed_point(g, r0, tol, damping)
    st = _step(a, r, lam, h, theta_gr, material, n, cavity.F_FP, bragg.c1, conventions)
    spec = LatticeSpec(a, r, h, theta_gr, material)
    diagnostics = {
        "n": n,
        "bragg_angle_convention": conventions.bragg_angle.value,
        "mean_x_units": conventions.mean_x_units.value,
        "fresnel_wavelength": conventions.fresnel_wavelength.value,
        "intensity_clamped": st.mode.raw_intensity_ratio > st.mode.intensity_ratio,
        # c2 is a slope beside a nonzero intercept, so c2 <= 2 does not by itself
        # violate r < a/2; recorded for inspection only
        "c2_le_2": st.c2 <= 2.0,
        "iterations": trace.n_iter,
    }
    return DesignResult(
        spec=spec,
        lam=lam,
        theta_wg=st.theta_wg,
        c1=bragg.c1,
        c2=st.c2,
        F_PCW=st.F_PCW,
        F_FP=cavity.F_FP,
        beta=beta_factor(st.F_PCW),
        trace=trace,
        mode_volume=st.mode,
        a_slp=bragg.a_slp,
        a_par=bragg.a_par,
        cavity=cavity,
        bragg=bragg,
        conventions=conventions,
        diagnostics=diagnostics,
    )


@dataclass
class CurvePoint:
    a: float
    r: float | None
    result: DesignResult | None
    error: str | None = None

    @property
    def feasible(self) -> bool:
        return self.result is not None


def design_curve(
    lam: float,
    h: float,
    material: MaterialModel = GAAS,
    theta_gr: float = LATTICE_ANGLE_DEFAULT,
    a_grid: Sequence[float] = (),
    r0: float | None = None,
    tol: Tolerance = DESIGN_TOL,
    conventions: Conventions = DEFAULT_CONVENTIONS,
) -> list[CurvePoint]:
    """Design locus ``r(a)`` at fixed wavelength over a sorted period grid.

    Each point warm-starts from the last feasible radius. Points where the
    model has no solution are returned with ``result=None`` and the reason.
    """
    a_grid = [float(a) for a in a_grid]
    if not a_grid:
        raise DomainError("a_grid must not be empty")
    if any(b < a for a, b in zip(a_grid, a_grid[1:])):
        raise DomainError("a_grid must be sorted in increasing order")

    points: list[CurvePoint] = []
    warm = r0
    for a in a_grid:
        start = warm if warm is not None and 0.0 < warm < 0.5 * a else None
        try:
            res = design_radius(a, lam, h, material, theta_gr, start, tol, conventions)
        except (InfeasibleDesignError, ConvergenceError, DomainError) as exc:
            points.append(CurvePoint(a, None, None, f"{type(exc).__name__}: {exc}"))
            continue
        points.append(CurvePoint(a, res.r, res))
        warm = res.r
    if not any(p.feasible for p in points):
        raise InfeasibleDesignError(
            f"no feasible design on the whole grid; first failure: {points[0].error}",
            quantity="curve",
        )
    return points


def _feasible_bracket(f, lo: float, hi: float, max_halvings: int = 60) -> tuple[float, float]:
    """Pull an infeasible bracket end inwards until a sign change is enclosed."""
    ends = []
    for x in (lo, hi):
        try:
            ends.append(f(x))
        except InfeasibleDesignError:
            ends.append(None)
    if ends[0] is not None and ends[1] is not None:
        return lo, hi
    if ends[0] is None and ends[1] is None:
        raise BracketError(
            f"the model is infeasible at both ends of [{lo}, {hi}] nm; try a different scan range"
        )
    good, bad = (lo, hi) if ends[0] is not None else (hi, lo)
    f_good = ends[0] if ends[0] is not None else ends[1]
    for _ in range(max_halvings):
        mid = 0.5 * (good + bad)
        try:
            f_mid = f(mid)
        except InfeasibleDesignError:
            bad = mid
            continue
        if f_mid == 0.0 or (f_mid > 0) != (f_good > 0):
            return (good, mid) if good < mid else (mid, good)
        good, f_good = mid, f_mid
    raise BracketError(
        f"no sign change inside the feasible part of [{lo}, {hi}] nm (edge near {good:.3f} nm); "
        "try a wider scan range"
    )


def peak_wavelength(
    spec: LatticeSpec,
    lambda_bracket: tuple[float, float] = (800.0, 1050.0),
    tol: Tolerance = PEAK_TOL,
    conventions: Conventions = DEFAULT_CONVENTIONS,
    verify: bool = True,
) -> float:
    """Wavelength at which the fixed geometry ``spec`` is the self-consistent design.

    Finds the root in ``lambda`` of ``design_step(a, r, lambda) - r``. The
    design map contracts with negative slope, so this residual has the same
    root and sign as ``design_radius(a, lambda).r - r`` and needs no inner
    iteration. With ``verify`` the root is confirmed by a full
    :func:`design_radius` solve started from ``spec.r``.
    """
    lo, hi = lambda_bracket
    if not 0 < lo < hi:
        raise DomainError(f"invalid wavelength bracket {lambda_bracket}")
    material, theta_gr = spec.material, spec.theta_gr

    def residual(lam: float) -> float:
        n = refractive_index(material, lam)
        F_FP = vertical_cavity(spec.h, n, lam).F_FP
        c1 = bragg_intercept(lam, n, theta_gr, conventions.bragg_angle).c1
        st = _step(spec.a, spec.r, lam, spec.h, theta_gr, material, n, F_FP, c1, conventions)
        return st.r_new - spec.r

    lo, hi = _feasible_bracket(residual, lo, hi)
    lam_star = find_root(residual, lo, hi, tol)
    if verify:
        res = design_radius(
            spec.a, lam_star, spec.h, material, theta_gr, r0=spec.r, conventions=conventions
        )
        if abs(res.r - spec.r) > 10 * DESIGN_TOL.abs_tol:
            raise ConvergenceError(
                f"inverse check failed: design at {lam_star:.6f} nm gives r={res.r:.6f}, "
                f"expected {spec.r:.6f}",
                trace=res.trace,
            )
    return lam_star
