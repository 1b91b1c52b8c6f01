"""Expected interference-to-noise ratios from interferers outside the reserved area.

All values are linear.  The toroidal terms have closed forms; the crescent
terms are adaptive quadratures.  Every quantity is linear in the density, so
the crescent integrals are computed once at unit density and cached.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

from scipy import integrate

from .geometry import ParameterError, SystemParams

# reject r0 this close to r_n: the toroidal and crescent terms at the end node diverge
R0_MARGIN = 1e-6
NEGATIVE_TOL = 1e-9


class QuadratureError(ArithmeticError):
    """Adaptive quadrature stopped without meeting its tolerance."""


class ConsistencyError(ArithmeticError):
    """A composite INR came out negative beyond floating-point residue."""


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subintervals: int = 50

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ParameterError("quadrature tolerances must be positive")
        if self.max_subintervals < 1:
            raise ParameterError("max_subintervals must be at least 1")


DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class InrBreakdown:
    toro_at_relay: float
    toro_at_end: float
    cre_at_end_own: float
    cre_at_relay: float
    cre_at_far_end: float
    cr_at_relay: float
    cr_at_end: float
    plnc_at_relay: float
    plnc_at_end: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def require_reservation(params: SystemParams):
    """Reserved radius must strictly exceed the link distance."""
    if not params.r0 > params.r_n * (1.0 + R0_MARGIN):
        raise ParameterError(
            f"r0 must exceed r_n = {params.r_n:.4f} (minimum radius of reserved area), got r0 = {params.r0:.6g}"
        )


def _quad(func, a, b, quad: QuadratureSpec) -> float:
    out = integrate.quad(func, a, b, epsabs=quad.abs_tol, epsrel=quad.rel_tol,
                         limit=quad.max_subintervals, full_output=1)
    if len(out) == 4:
        value, err, _, msg = out
        raise QuadratureError(f"quadrature on [{a:.6g}, {b:.6g}] failed (est. error {err:.3g}): {msg}")
    return out[0]


def inr_toroidal_at_relay(params: SystemParams) -> float:
    r0, big_r = params.r0, params.big_r
    return params.lam * (math.pi * (1.0 / r0**2 - 1.0 / big_r**2))


def inr_toroidal_at_relay_unbounded(params: SystemParams) -> float:
    return params.lam * (math.pi / params.r0**2)


def inr_toroidal_at_end(params: SystemParams) -> float:
    if not params.r0 > params.r_n:
        raise ParameterError(f"r0 must exceed r_n = {params.r_n:.4f}, got r0 = {params.r0:.6g}")
    r0sq, rsq, dsq = params.r0**2, params.big_r**2, params.r_n**2
    return params.lam * (math.pi * (r0sq / (r0sq - dsq) ** 2 - rsq / (rsq - dsq) ** 2))


@functools.lru_cache(maxsize=4096)
def _crescent_unit(r_n: float, r0: float, quad: QuadratureSpec) -> tuple[float, float, float]:
    """Crescent INRs at A, B, C for unit density.

    Integrands are scalar ``math`` transcriptions of ``crescent_half_angle`` and
    the crescent distance helpers; quad calls them tens of thousands of times.
    """
    lo, hi = r0 - r_n, r0
    c0 = r0 * r0 - r_n * r_n

    def phi(r_a):
        arg = (c0 - r_a * r_a) / (2.0 * r_a * r_n)
        return math.acos(min(1.0, max(-1.0, arg)))

    # n_cre * f_rA(r_A) / r_A^4 reduces to 2 r_A phi(r_A) / r_A^4
    at_a = _quad(lambda r_a: 2.0 * phi(r_a) / r_a**3, lo, hi, quad)

    def iterated(offset):
        # node sits `offset` from A in the theta_A = pi direction (B: r_n, C: 2 r_n)
        off_sq = offset * offset

        def inner(r_a):
            half = phi(r_a)
            if half == 0.0:
                return 0.0
            base = r_a * r_a + off_sq
            lin = 2.0 * offset * r_a

            def integrand(t):
                d_sq = base + lin * math.cos(t)
                return r_a / (d_sq * d_sq)

            return _quad(integrand, -half, half, quad)

        return _quad(inner, lo, hi, quad)

    at_b = iterated(r_n)
    at_c = iterated(2.0 * r_n)
    return at_a, at_b, at_c


def _crescent(params: SystemParams, quad: QuadratureSpec):
    require_reservation(params)
    return _crescent_unit(float(params.r_n), float(params.r0), quad)


def inr_crescent_at_end_own(params: SystemParams, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """INR at A from interferers that would sit in A's crescent."""
    return params.lam * _crescent(params, quad)[0]


def inr_crescent_at_relay(params: SystemParams, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    return params.lam * _crescent(params, quad)[1]


def inr_crescent_at_far_end(params: SystemParams, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    return params.lam * _crescent(params, quad)[2]


def _nonnegative(value: float, label: str) -> float:
    if value < -NEGATIVE_TOL:
        raise ConsistencyError(f"{label} is negative ({value:.3g}); crescent term exceeds toroidal term")
    return max(value, 0.0)


def composite_inr_cr(params: SystemParams, quad: QuadratureSpec = DEFAULT_QUAD) -> tuple[float, float]:
    """(at_relay, at_end) with the two-disc CR reservation."""
    require_reservation(params)
    at_relay = inr_toroidal_at_relay(params) - inr_crescent_at_relay(params, quad)
    at_end = inr_toroidal_at_end(params) - inr_crescent_at_end_own(params, quad)
    return _nonnegative(at_relay, "CR INR at relay"), _nonnegative(at_end, "CR INR at end node")


def composite_inr_plnc(params: SystemParams, quad: QuadratureSpec = DEFAULT_QUAD) -> tuple[float, float]:
    """(at_relay, at_end) with the three-disc PLNC reservation.

    Both crescents sit outside the relay disc; the C-side crescent seen from A
    equals the A-side crescent seen from C by mirror symmetry.
    """
    require_reservation(params)
    at_relay = inr_toroidal_at_relay(params) - 2.0 * inr_crescent_at_relay(params, quad)
    at_end = (inr_toroidal_at_end(params) - inr_crescent_at_end_own(params, quad)
              - inr_crescent_at_far_end(params, quad))
    return _nonnegative(at_relay, "PLNC INR at relay"), _nonnegative(at_end, "PLNC INR at end node")


def inr_breakdown(params: SystemParams, quad: QuadratureSpec = DEFAULT_QUAD) -> InrBreakdown:
    cr = composite_inr_cr(params, quad)
    plnc = composite_inr_plnc(params, quad)
    return InrBreakdown(
        toro_at_relay=inr_toroidal_at_relay(params),
        toro_at_end=inr_toroidal_at_end(params),
        cre_at_end_own=inr_crescent_at_end_own(params, quad),
        cre_at_relay=inr_crescent_at_relay(params, quad),
        cre_at_far_end=inr_crescent_at_far_end(params, quad),
        cr_at_relay=cr[0],
        cr_at_end=cr[1],
        plnc_at_relay=plnc[0],
        plnc_at_end=plnc[1],
    )
