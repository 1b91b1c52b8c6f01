"""Sweeps over network radius, reserved radius and interferer density.

All drivers return plain record lists in a fixed order (grid index, then CR
before PLNC) so they can be written straight to CSV/JSON.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ParameterError, Scheme, SystemParams
from .interference import (
    DEFAULT_QUAD,
    R0_MARGIN,
    QuadratureSpec,
    inr_toroidal_at_relay,
    inr_toroidal_at_relay_unbounded,
)
from .ratemodel import RateResult, distance_from_snr_db, end_to_end_rate

SCHEMES = (Scheme.CR, Scheme.PLNC)
DEFAULT_R0_STEP = 0.005
DEFAULT_R0_MAX = 1.0
R0_START_FACTOR = 1.02
GOLDEN_XTOL = 1e-7
CROSSOVER_TOL = 0.01


@dataclass(frozen=True)
class SweepGrid:
    """Arithmetic grid start, start + step, ... up to stop (inclusive within half a step)."""

    start: float
    stop: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise ParameterError(f"grid step must be positive, got {self.step}")
        if not self.stop >= self.start:
            raise ParameterError(f"grid stop ({self.stop}) must not be below start ({self.start})")

    @property
    def count(self) -> int:
        return int(math.floor((self.stop - self.start) / self.step + 0.5)) + 1

    def values(self) -> np.ndarray:
        vals = self.start + self.step * np.arange(self.count)
        # trim float residue such as 0.30000000000000004
        return np.round(vals, 12)


@dataclass(frozen=True)
class RadiusRecord:
    big_r: float
    inr_finite: float
    inr_unbounded: float

    @property
    def relative_gap(self) -> float:
        if self.inr_unbounded == 0:
            return 0.0
        return (self.inr_unbounded - self.inr_finite) / self.inr_unbounded


@dataclass(frozen=True)
class SweepRecord:
    x: float
    scheme: Scheme
    rate_per_area: float
    inr_at_relay: float
    inr_at_end: float
    reserved_area: float
    best_r0: float | None = None

    @classmethod
    def from_rate(cls, x: float, rate: RateResult, best_r0: float | None = None) -> "SweepRecord":
        return cls(x, rate.scheme, rate.rate_per_area, rate.inr_at_relay, rate.inr_at_end,
                   rate.reserved_area, best_r0)


@dataclass(frozen=True)
class Crossover:
    """Result of a crossover search; ``lam_star`` is None when the sign never changes.

    ``dominant`` names the scheme ahead at the low end of the range (or over
    the whole range when there is no crossover).
    """

    lam_star: float | None
    dominant: Scheme
    lam_low: float
    lam_high: float


def min_reserved_radius(snr_db: float) -> float:
    """Smallest admissible r0: the link distance itself."""
    return distance_from_snr_db(snr_db)


def default_r0_grid(snr_db: float) -> SweepGrid:
    return SweepGrid(R0_START_FACTOR * min_reserved_radius(snr_db), DEFAULT_R0_MAX, DEFAULT_R0_STEP)


def _check_r0_floor(lo: float, r_n: float):
    if not lo > r_n * (1.0 + R0_MARGIN):
        raise ParameterError(
            f"r0 must exceed r_n = {r_n:.4f} (minimum radius of reserved area); grid starts at {lo:.6g}"
        )


def validate_radius_sweep(r0: float, lam: float, big_r_grid: SweepGrid) -> list[RadiusRecord]:
    """Toroidal INR at the relay for a finite network radius against its unbounded limit."""
    out = []
    for big_r in big_r_grid.values():
        if not big_r > r0:
            raise ParameterError(f"network radius must exceed r0 = {r0:.4g}, got {big_r:.6g}")
        # the link distance does not enter the relay's toroidal INR
        params = SystemParams(r_n=r0 / 2.0, r0=r0, big_r=float(big_r), lam=lam)
        out.append(RadiusRecord(float(big_r), inr_toroidal_at_relay(params),
                                inr_toroidal_at_relay_unbounded(params)))
    return out


def _rate(scheme: Scheme, r_n: float, r0: float, big_r: float, lam: float, quad: QuadratureSpec) -> RateResult:
    return end_to_end_rate(scheme, SystemParams(r_n=r_n, r0=float(r0), big_r=big_r, lam=lam), quad)


def sweep_reserved_radius(snr_db: float, lam: float, big_r: float = 10.0, grid: SweepGrid | None = None,
                          quad: QuadratureSpec = DEFAULT_QUAD) -> list[SweepRecord]:
    r_n = distance_from_snr_db(snr_db)
    grid = grid or default_r0_grid(snr_db)
    _check_r0_floor(grid.start, r_n)
    return [SweepRecord.from_rate(float(r0), _rate(s, r_n, r0, big_r, lam, quad))
            for r0 in grid.values() for s in SCHEMES]


def _golden_max(f, a: float, b: float, xtol: float = GOLDEN_XTOL) -> tuple[float, float]:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def optimize_r0(snr_db: float, lam: float, big_r: float, scheme: Scheme,
                search: tuple[float, float] | None = None, step: float = DEFAULT_R0_STEP,
                quad: QuadratureSpec = DEFAULT_QUAD) -> tuple[float, RateResult]:
    """Reserved radius maximizing rate per area: dense grid, then golden-section
    refinement inside the bracket around the best grid point.  Ties go to the
    smaller radius; the refined point replaces the grid optimum only if it is
    strictly better."""
    r_n = distance_from_snr_db(snr_db)
    lo, hi = search if search is not None else (R0_START_FACTOR * r_n, DEFAULT_R0_MAX)
    if not hi >= lo:
        raise ParameterError(f"empty r0 search range [{lo}, {hi}]")
    _check_r0_floor(lo, r_n)
    grid = SweepGrid(lo, hi, step).values()
    grid = grid[grid <= hi]
    rates = [_rate(scheme, r_n, r0, big_r, lam, quad) for r0 in grid]
    values = np.array([r.rate_per_area for r in rates])
    i = int(np.argmax(values))
    best_r0, best = float(grid[i]), rates[i]
    if len(grid) > 1:
        a = float(grid[max(i - 1, 0)])
        b = float(grid[min(i + 1, len(grid) - 1)])
        x, fx = _golden_max(lambda r0: _rate(scheme, r_n, r0, big_r, lam, quad).rate_per_area, a, b)
        if fx > best.rate_per_area:
            best_r0, best = float(x), _rate(scheme, r_n, x, big_r, lam, quad)
    return best_r0, best


def optimized_rates(snr_db: float, lam: float, big_r: float = 10.0,
                    search: tuple[float, float] | None = None, step: float = DEFAULT_R0_STEP,
                    quad: QuadratureSpec = DEFAULT_QUAD) -> dict:
    return {s: optimize_r0(snr_db, lam, big_r, s, search, step, quad) for s in SCHEMES}


def sweep_density(snr_db: float, big_r: float = 10.0, lam_grid: SweepGrid | None = None,
                  search: tuple[float, float] | None = None, step: float = DEFAULT_R0_STEP,
                  quad: QuadratureSpec = DEFAULT_QUAD) -> list[SweepRecord]:
    lam_grid = lam_grid or SweepGrid(0.1, 10.0, 0.1)
    records = []
    for lam in lam_grid.values():
        best = optimized_rates(snr_db, float(lam), big_r, search, step, quad)
        for s in SCHEMES:
            r0, rate = best[s]
            records.append(SweepRecord.from_rate(float(lam), rate, best_r0=r0))
    return records


def _plnc_advantage(snr_db, lam, big_r, search, step, quad) -> float:
    best = optimized_rates(snr_db, lam, big_r, search, step, quad)
    return best[Scheme.PLNC][1].rate_per_area - best[Scheme.CR][1].rate_per_area


def find_crossover_density(snr_db: float, big_r: float = 10.0, lam_range: tuple[float, float] = (0.1, 10.0),
                           tol: float = CROSSOVER_TOL, search: tuple[float, float] | None = None,
                           step: float = DEFAULT_R0_STEP, quad: QuadratureSpec = DEFAULT_QUAD) -> Crossover:
    """Density where the optimized PLNC and CR rates per area cross, by bisection.

    The returned ``lam_star`` is within ``tol`` of the sign change.
    """
    lo, hi = lam_range
    if not (0 <= lo <= hi):
        raise ParameterError(f"invalid density range [{lo}, {hi}]")

    def adv(lam):
        return _plnc_advantage(snr_db, lam, big_r, search, step, quad)

    f_lo = adv(lo)
    dominant = Scheme.PLNC if f_lo > 0 else Scheme.CR
    if hi == lo:
        return Crossover(None, dominant, lo, hi)
    f_hi = adv(hi)
    if (f_lo > 0) == (f_hi > 0):
        return Crossover(None, dominant, lo, hi)
    a, b = lo, hi
    while b - a > tol:
        mid = 0.5 * (a + b)
        if (adv(mid) > 0) == (f_lo > 0):
            a = mid
        else:
            b = mid
    return Crossover(0.5 * (a + b), dominant, lo, hi)
