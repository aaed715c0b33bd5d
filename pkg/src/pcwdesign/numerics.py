"""Scalar numerical kernels: quadrature, Fresnel integrals, root and fixed-point solvers.

Everything here works on plain Python floats. The design loop calls these
routines tens of thousands of times per Monte Carlo ensemble, so the inner
loops avoid numpy array overhead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from pcwdesign.errors import (
    BracketError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    QuadratureError,
)

__all__ = [
    "Tolerance",
    "ConvergenceTrace",
    "integrate",
    "fresnel_cs",
    "find_root",
    "fixed_point",
    "FRESNEL_LIMIT",
]


@dataclass(frozen=True)
class Tolerance:
    """Stopping criteria shared by the iterative kernels.

    For :func:`integrate`, ``max_iter`` bounds the number of subintervals.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass
class ConvergenceTrace:
    """Ordered record of ``(iteration, value, residual)`` triples."""

    iterates: list[tuple[int, float, float]] = field(default_factory=list)
    converged: bool = False

    def record(self, k: int, value: float, residual: float) -> None:
        self.iterates.append((k, value, residual))

    @property
    def n_iter(self) -> int:
        return len(self.iterates)

    @property
    def final_residual(self) -> float:
        return self.iterates[-1][2] if self.iterates else math.inf

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iterates": [
                {"iteration": k, "value": v, "residual": res} for k, v, res in self.iterates
            ],
        }


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15).
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def _gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = f(center)
    resk = fc * _WGK[7]
    resg = fc * _WG[3]
    for j in range(7):
        dx = half * _XGK[j]
        fsum = f(center - dx) + f(center + dx)
        resk += _WGK[j] * fsum
        if j % 2 == 1:
            resg += _WG[j // 2] * fsum
    return resk * half, abs((resk - resg) * half)


def integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance = Tolerance(),
) -> float:
    """Globally adaptive Gauss-Kronrod (7, 15) quadrature of ``f`` over ``[lo, hi]``.

    The interval with the largest error estimate is bisected until the summed
    estimate drops below ``max(abs_tol, rel_tol * |I|)``. Raises
    :class:`QuadratureError` once ``tol.max_iter`` subintervals are in use.
    """
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError("integration limits must be finite")
    if lo > hi:
        raise DomainError(f"lo must not exceed hi (lo={lo}, hi={hi})")
    if lo == hi:
        return 0.0

    value, err = _gk15(f, lo, hi)
    if not math.isfinite(value):
        raise DomainError("integrand is not finite on the interval")
    pieces = [(err, lo, hi, value)]
    total, total_err = value, err
    while total_err > max(tol.abs_tol, tol.rel_tol * abs(total)):
        if len(pieces) >= tol.max_iter:
            raise QuadratureError(
                f"no convergence with {len(pieces)} subintervals "
                f"(estimate {total!r}, error {total_err:.3g})",
                estimate=total,
                error=total_err,
            )
        k = max(range(len(pieces)), key=lambda i: pieces[i][0])
        e0, a, b, v0 = pieces.pop(k)
        m = 0.5 * (a + b)
        v1, e1 = _gk15(f, a, m)
        v2, e2 = _gk15(f, m, b)
        pieces.append((e1, a, m, v1))
        pieces.append((e2, m, b, v2))
        total += v1 + v2 - v0
        total_err += e1 + e2 - e0
    # re-sum to shed the round-off accumulated by incremental updates
    return math.fsum(p[3] for p in pieces)


FRESNEL_LIMIT = (0.5, 0.5)
_FRESNEL_TOL = Tolerance(abs_tol=1e-13, rel_tol=1e-12, max_iter=5000)
# beyond this argument the asymptotic series is exact to double precision
# while the integrand oscillates too fast for cheap quadrature
_FRESNEL_ASYMPTOTIC_U = 6.0


def _fresnel_asymptotic(u: float) -> tuple[float, float]:
    """Auxiliary-function expansion ``C = 1/2 + f sin(z) - g cos(z)``, ``S = 1/2 - f cos(z) - g sin(z)``."""
    x = math.pi * u * u
    inv2 = 1.0 / (x * x)
    f_sum, g_sum = 0.0, 0.0
    f_term, g_term = 1.0, 1.0
    k = 0
    while True:
        f_sum += f_term
        g_sum += g_term
        # successive ratios (4k+1)(4k+3)/x^2 and (4k+3)(4k+5)/x^2, with alternating sign
        f_next = -f_term * (4 * k + 1) * (4 * k + 3) * inv2
        g_next = -g_term * (4 * k + 3) * (4 * k + 5) * inv2
        if abs(f_next) >= abs(f_term) or abs(f_next) < 1e-17:
            break
        f_term, g_term = f_next, g_next
        k += 1
    f = f_sum / (math.pi * u)
    g = g_sum / (math.pi * math.pi * u * u * u)
    z = 0.5 * x
    sz, cz = math.sin(z), math.cos(z)
    return 0.5 + f * sz - g * cz, 0.5 - f * cz - g * sz


def fresnel_cs(u: float) -> tuple[float, float]:
    """Fresnel integrals ``C(u), S(u)``.

    Direct quadrature of the defining integrals for ``u < 6``; the
    convergent-to-round-off asymptotic expansion above that. ``u = inf``
    returns the exact limit ``(1/2, 1/2)``.
    """
    if math.isnan(u) or u < 0:
        raise DomainError(f"Fresnel argument must be >= 0, got {u}")
    if math.isinf(u):
        return FRESNEL_LIMIT
    if u == 0.0:
        return 0.0, 0.0
    if u >= _FRESNEL_ASYMPTOTIC_U:
        return _fresnel_asymptotic(u)
    half_pi = 0.5 * math.pi
    c = integrate(lambda t: math.cos(half_pi * t * t), 0.0, u, _FRESNEL_TOL)
    s = integrate(lambda t: math.sin(half_pi * t * t), 0.0, u, _FRESNEL_TOL)
    return c, s


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance = Tolerance(),
) -> float:
    """Bracketing root finder: bisection safeguarding Illinois-style false position.

    The secant-type step is used while it keeps shrinking the bracket quickly;
    otherwise the midpoint is taken, so the bracket always holds a sign change.
    Stops when ``|f(x)| <= abs_tol`` or the bracket is narrower than
    ``abs_tol + rel_tol * |x|``.
    """
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not (math.isfinite(flo) and math.isfinite(fhi)):
        raise BracketError(f"f is not finite at the bracket ends ({flo}, {fhi})")
    if flo * fhi > 0:
        raise BracketError(
            f"no sign change on [{lo}, {hi}]: f(lo)={flo:.6g}, f(hi)={fhi:.6g}"
        )

    trace = ConvergenceTrace()
    a, b, fa, fb = lo, hi, flo, fhi
    last = None
    checkpoint, stalled = b - a, 0
    for k in range(tol.max_iter):
        x = (a * fb - b * fa) / (fb - fa)
        if stalled >= 3 or not a < x < b:
            x = 0.5 * (a + b)
        fx = f(x)
        trace.record(k, x, abs(fx))
        if abs(fx) <= tol.abs_tol:
            return x
        # Illinois: halve the stale end value when one side keeps moving
        if fa * fx < 0:
            b, fb = x, fx
            if last == "b":
                fa *= 0.5
            last = "b"
        else:
            a, fa = x, fx
            if last == "a":
                fb *= 0.5
            last = "a"
        if b - a <= tol.abs_tol + tol.rel_tol * abs(x):
            return x
        if b - a <= 0.5 * checkpoint:
            checkpoint, stalled = b - a, 0
        else:
            stalled += 1
    raise ConvergenceError(
        f"root not isolated within {tol.max_iter} iterations (bracket [{a}, {b}])",
        trace=trace,
    )


def fixed_point(
    g: Callable[[float], float],
    x0: float,
    tol: Tolerance = Tolerance(),
    damping: float = 0.5,
    bounds: tuple[float, float] | None = None,
) -> tuple[float, ConvergenceTrace]:
    """Damped fixed-point iteration ``x <- (1 - damping) * x + damping * g(x)``.

    Converges when successive iterates differ by at most ``tol.abs_tol``.
    ``bounds`` is an open interval the iterates must stay in; leaving it, or
    producing a non-finite value, raises :class:`DivergenceError`.
    """
    if not math.isfinite(x0):
        raise DomainError(f"initial value must be finite, got {x0}")
    if not 0.0 < damping <= 1.0:
        raise DomainError(f"damping must lie in (0, 1], got {damping}")

    trace = ConvergenceTrace()
    x = x0
    for k in range(1, tol.max_iter + 1):
        x_new = (1.0 - damping) * x + damping * g(x)
        residual = abs(x_new - x)
        trace.record(k, x_new, residual)
        if not math.isfinite(x_new) or (
            bounds is not None and not bounds[0] < x_new < bounds[1]
        ):
            raise DivergenceError(
                f"iterate {x_new!r} left the admissible region {bounds} at step {k}",
                trace=trace,
            )
        x = x_new
        if residual <= tol.abs_tol:
            trace.converged = True
            return x, trace
    raise ConvergenceError(
        f"no convergence in {tol.max_iter} iterations (last residual {residual:.3g})",
        trace=trace,
    )
