"""Angular integrals of the in-plane dipole radiation pattern.

All band fractions weight emission by ``sin^3(theta)`` (a ``sin^2`` dipole
lobe times the spherical Jacobian) and use its antiderivative
``-cos(theta) + cos(theta)**3 / 3``; quadrature is only used by the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from pcwdesign.errors import DomainError

__all__ = [
    "AngularBand",
    "sin3_integral",
    "dipole_band_fraction",
    "symmetric_band_fraction",
    "average_emission_angle",
    "bragg_family_fractions",
    "AVERAGE_EMISSION_ANGLE",
]


@dataclass(frozen=True)
class AngularBand:
    """Polar-angle interval ``[lo, hi]`` in radians, within ``[0, pi]``."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi <= math.pi):
            raise DomainError(
                f"angular band must satisfy 0 <= lo <= hi <= pi, got [{self.lo}, {self.hi}]"
            )


def _sin3_antiderivative(theta: float) -> float:
    c = math.cos(theta)
    return -c + c * c * c / 3.0


def sin3_integral(lo: float, hi: float) -> float:
    """Closed-form ``integral of sin^3`` over ``[lo, hi]``."""
    return _sin3_antiderivative(hi) - _sin3_antiderivative(lo)


_FULL_SPHERE = 4.0 / 3.0
_QUARTER = 2.0 / 3.0


def dipole_band_fraction(band: AngularBand) -> float:
    """Share of dipole emission falling into ``band`` (1 for ``[0, pi]``)."""
    if not isinstance(band, AngularBand):
        band = AngularBand(*band)
    frac = sin3_integral(band.lo, band.hi) / _FULL_SPHERE
    return min(max(frac, 0.0), 1.0)


def symmetric_band_fraction(half_width: float) -> float:
    """Band fraction for ``[pi/2 - x, pi/2 + x]``, i.e. ``(3 sin x - sin^3 x) / 2``."""
    if not 0.0 <= half_width <= 0.5 * math.pi:
        raise DomainError(f"half-width must lie in [0, pi/2], got {half_width}")
    s = math.sin(half_width)
    return 0.5 * (3.0 * s - s * s * s)


AVERAGE_EMISSION_ANGLE = 1.0 / (2.0 * math.pi)


def average_emission_angle() -> float:
    """Power-weighted mean emission angle, ``(2/pi) * 1/4 = 1/(2 pi)`` rad."""
    return AVERAGE_EMISSION_ANGLE


def bragg_family_fractions(theta_gr: float) -> tuple[float, float]:
    """Split of quarter-space emission between sloped and parallel hole rows.

    Returns ``(eta_slp, eta_par)``: the ``sin^3`` weight of
    ``[pi/2 - theta_gr, pi/2]`` and of ``[0, pi/2 - theta_gr]`` relative to
    ``[0, pi/2]``. The two always sum to one.
    """
    if not 0.0 < theta_gr < 0.5 * math.pi:
        raise DomainError(f"lattice angle must lie in (0, pi/2), got {theta_gr}")
    edge = 0.5 * math.pi - theta_gr
    eta_par = sin3_integral(0.0, edge) / _QUARTER
    return 1.0 - eta_par, eta_par
