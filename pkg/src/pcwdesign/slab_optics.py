"""Membrane material dispersion and the vertical Fabry-Perot resonance.

The membrane's top and bottom faces form a low-Q resonator at normal
incidence. Only the first (m = 1) resonance is modelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from pcwdesign.constants import SPEED_OF_LIGHT, nm_to_m
from pcwdesign.errors import DomainError, ExtrapolationError
from pcwdesign.numerics import Tolerance, integrate

__all__ = [
    "MaterialModel",
    "GAAS",
    "refractive_index",
    "load_material",
    "VerticalCavity",
    "vertical_cavity",
    "fp_effective_lengths",
    "verify_veff_prefactor",
    "FP_VOLUME_PREFACTOR",
]


@dataclass(frozen=True)
class MaterialModel:
    """Refractive index table ``(wavelength_nm, n)`` with a constant fallback.

    The table is interpolated linearly and never extrapolated; an empty table
    means the material is dispersionless with index ``fallback_n``.
    """

    name: str
    index_samples: tuple[tuple[float, float], ...] = ()
    fallback_n: float = 3.46

    def __post_init__(self):
        samples = tuple((float(w), float(n)) for w, n in self.index_samples)
        object.__setattr__(self, "index_samples", samples)
        if not self.fallback_n > 1.0:
            raise DomainError(f"fallback index must exceed 1, got {self.fallback_n}")
        for w, n in samples:
            if not n > 1.0:
                raise DomainError(f"refractive index must exceed 1, got n={n} at {w} nm")
        wl = [w for w, _ in samples]
        if any(b <= a for a, b in zip(wl, wl[1:])):
            raise DomainError("material wavelengths must be strictly increasing")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "index_samples": [list(s) for s in self.index_samples],
            "fallback_n": self.fallback_n,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MaterialModel":
        return cls(
            name=d["name"],
            index_samples=tuple(tuple(s) for s in d.get("index_samples", ())),
            fallback_n=d.get("fallback_n", 3.46),
        )


GAAS = MaterialModel("GaAs", ((925.0, 3.46),), fallback_n=3.46)


def refractive_index(material: MaterialModel, lam: float) -> float:
    if not lam > 0:
        raise DomainError(f"wavelength must be positive, got {lam}")
    samples = material.index_samples
    if not samples:
        return material.fallback_n
    lo, hi = samples[0][0], samples[-1][0]
    if not lo <= lam <= hi:
        if len(samples) == 1:
            # a single sample carries no dispersion information
            return material.fallback_n
        raise ExtrapolationError(
            f"{lam} nm lies outside the {material.name} table range [{lo}, {hi}] nm"
        )
    wl, n = zip(*samples)
    return float(np.interp(lam, wl, n))


def load_material(path: str | Path, name: str | None = None, fallback_n: float = 3.46):
    """Read a two-column ``wavelength_nm n`` text table.

    Blank lines and ``#`` comments are skipped; a single non-numeric first
    line is treated as a header. Columns may be separated by whitespace or
    commas.
    """
    path = Path(path)
    rows = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        try:
            w, n = float(parts[0]), float(parts[1])
        except (ValueError, IndexError):
            if rows:
                raise DomainError(f"{path}:{lineno}: expected 'wavelength_nm n', got {raw!r}")
            continue
        rows.append((w, n))
    return MaterialModel(name or path.stem, tuple(rows), fallback_n)


@dataclass(frozen=True)
class VerticalCavity:
    """Fabry-Perot quantities of the membrane at the emitter wavelength."""

    h: float
    n: float
    lam: float
    R: float
    omega_1: float
    d_omega: float
    Q: float
    V_eff: float
    lorentzian: float
    F_FP: float

    def to_dict(self) -> dict:
        return {
            "h_nm": self.h,
            "n": self.n,
            "lambda_nm": self.lam,
            "R": self.R,
            "omega_1_rad_s": self.omega_1,
            "d_omega_rad_s": self.d_omega,
            "Q": self.Q,
            "V_eff_nm3": self.V_eff,
            "lorentzian": self.lorentzian,
            "F_FP": self.F_FP,
        }


FP_VOLUME_PREFACTOR = 2.0 / 3.0


def vertical_cavity(h: float, n: float, lam: float) -> VerticalCavity:
    """Purcell factor of the membrane's first vertical Fabry-Perot resonance."""
    if not h > 0:
        raise DomainError("h must be positive")
    if not n > 1:
        raise DomainError("n must exceed 1")
    if not lam > 0:
        raise DomainError("lambda must be positive")
    c = SPEED_OF_LIGHT
    h_m = nm_to_m(h)
    R = ((n - 1.0) / (n + 1.0)) ** 2
    omega_1 = math.pi * c / (n * h_m)
    d_omega = c * (1.0 - R) / (n * math.sqrt(R) * h_m)
    Q = omega_1 / d_omega
    V_eff = FP_VOLUME_PREFACTOR * h**3
    omega = 2.0 * math.pi * c / nm_to_m(lam)
    lorentz = d_omega**2 / (4.0 * (omega - omega_1) ** 2 + d_omega**2)
    F = 3.0 * Q * (lam / n) ** 3 / (4.0 * math.pi**2 * V_eff) * lorentz
    return VerticalCavity(h, n, lam, R, omega_1, d_omega, Q, V_eff, lorentz, F)


def fp_effective_lengths(h: float = 1.0) -> tuple[float, float]:
    """Effective mode lengths ``(l_theta, l_phi)`` of the vertical cavity.

    The peak intensity sits at distance ``h/2``; along the polar direction
    the falloff is weighted by the dipole lobe and the projection on the
    membrane normal (``sin^3``), along the azimuth by ``sin`` alone.
    """
    if not h > 0:
        raise DomainError("h must be positive")
    half = 0.5 * h
    i_max = 1.0 / half**2
    tol = Tolerance(abs_tol=1e-14, rel_tol=1e-13)
    l_theta = integrate(lambda t: math.sin(t) ** 3 / half, 0.0, math.pi, tol) / i_max
    l_phi = integrate(lambda p: math.sin(p) / half, 0.0, math.pi, tol) / i_max
    return l_theta, l_phi


def verify_veff_prefactor() -> float:
    """Numerical prefactor of ``h^3`` in the vertical-cavity mode volume (2/3)."""
    l_theta, l_phi = fp_effective_lengths(1.0)
    return l_theta * l_phi * 1.0
