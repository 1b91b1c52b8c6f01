"""Seeded Monte Carlo oracle for the interference and rate model.

Interferers are scattered uniformly (Poisson count by default) over a legal
region: the disc of radius ``big_r`` around B minus the reserved discs, or one
of the auxiliary regions used by the analytic decomposition (the toroidal
annulus and the A-side crescent).  Each placement ("draw") has its own random
stream derived from ``(seed, draw_index)``, so results do not depend on how
draws are split across worker threads.
"""
from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .geometry import (
    NodeId,
    ParameterError,
    Scheme,
    SlotRole,
    SystemParams,
    crescent_area,
    node_position,
    reserved_area,
)
from .interference import inr_breakdown, require_reservation
from .ratemodel import RateResult, rate_from_inr, shannon_rate, sinr

BLOCK_SIZE = 1024
COUNT_MODELS = ("poisson", "fixed-expected")
RATE_MODES = ("mean-inr", "per-realization")


class Region(enum.Enum):
    TOROIDAL = "toroidal"  # annulus r0 <= |p - B| <= big_r
    CRESCENT = "crescent"  # disc(A, r0) minus disc(B, r0)
    CR_RELAY_RECEIVES = "cr-relay-receives"
    CR_END_RECEIVES = "cr-end-receives"
    PLNC = "plnc"


def region_for(scheme: Scheme, role: SlotRole = SlotRole.RELAY_RECEIVES) -> Region:
    if scheme is Scheme.PLNC:
        return Region.PLNC
    return Region.CR_RELAY_RECEIVES if role is SlotRole.RELAY_RECEIVES else Region.CR_END_RECEIVES


_REGION_SLOTS = {
    Region.CR_RELAY_RECEIVES: (Scheme.CR, SlotRole.RELAY_RECEIVES),
    Region.CR_END_RECEIVES: (Scheme.CR, SlotRole.END_RECEIVES),
    Region.PLNC: (Scheme.PLNC, SlotRole.RELAY_RECEIVES),
}


@dataclass(frozen=True)
class McConfig:
    trials: int = 100_000
    seed: int = 42
    count_model: str = "poisson"

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be at least 1")
        if self.seed < 0:
            raise ParameterError("seed must be non-negative")
        if self.count_model not in COUNT_MODELS:
            raise ParameterError(f"count_model must be one of {COUNT_MODELS}")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int


def region_area(params: SystemParams, region: Region) -> float:
    if region is Region.TOROIDAL:
        return math.pi * (params.big_r**2 - params.r0**2)
    if region is Region.CRESCENT:
        return crescent_area(params)
    scheme, _ = _REGION_SLOTS[region]
    return math.pi * params.big_r**2 - reserved_area(scheme, params)


# Every sampling region is a bounding disc minus the r0-discs around some of
# the nodes A, B, C.  Regions are encoded as (bounding center, bounding radius,
# excluded-node mask) so one compiled kernel serves all of them.
_EXCLUDED = {
    Region.TOROIDAL: (False, True, False),
    Region.CRESCENT: (False, True, False),
    Region.CR_RELAY_RECEIVES: (True, True, False),
    Region.CR_END_RECEIVES: (False, True, True),
    Region.PLNC: (True, True, True),
}


def _bounding_disc(params: SystemParams, region: Region) -> tuple[float, float]:
    if region is Region.CRESCENT:
        return 0.0, params.r0
    return params.r_n, params.big_r


@njit(cache=True, nogil=True)
def _scan(u, sizes, counts, cx, radius, node_x, r0sq, base_excl, target_excl, keep_points):
    """Accept candidates draw by draw and accumulate INR sums.

    u holds each draw's uniforms back to back (sizes[d] rows for draw d).  A
    candidate maps to the bounding square, is kept if it lies in the bounding
    disc and outside every excluded disc, and only the first counts[d] kept
    candidates of a draw are used.  For each target (an extra exclusion mask)
    the sums of 1/d^4 at the three nodes are accumulated.
    """
    n_draws = sizes.shape[0]
    n_targets = target_excl.shape[0]
    sums = np.zeros((n_draws, n_targets, 3))
    accepted = np.zeros(n_draws, dtype=np.int64)
    n_out = np.sum(counts) if keep_points else 0
    pts = np.empty((n_out, 2))
    owner = np.empty(n_out, dtype=np.int64)
    r_sq = radius * radius
    row = 0
    w = 0
    for d in range(n_draws):
        for _ in range(sizes[d]):
            x = radius * (2.0 * u[row, 0] - 1.0)
            y = radius * (2.0 * u[row, 1] - 1.0)
            row += 1
            if accepted[d] >= counts[d] or x * x + y * y > r_sq:
                continue
            x += cx
            y_sq = y * y
            dx = x - node_x[0]
            da = dx * dx + y_sq
            dx = x - node_x[1]
            db = dx * dx + y_sq
            dx = x - node_x[2]
            dc = dx * dx + y_sq
            if ((base_excl[0] and da <= r0sq) or (base_excl[1] and db <= r0sq)
                    or (base_excl[2] and dc <= r0sq)):
                continue
            accepted[d] += 1
            if keep_points:
                pts[w, 0] = x
                pts[w, 1] = y
                owner[w] = d
                w += 1
            ia = 1.0 / (da * da)
            ib = 1.0 / (db * db)
            ic = 1.0 / (dc * dc)
            for t in range(n_targets):
                if ((target_excl[t, 0] and da <= r0sq) or (target_excl[t, 1] and db <= r0sq)
                        or (target_excl[t, 2] and dc <= r0sq)):
                    continue
                sums[d, t, 0] += ia
                sums[d, t, 1] += ib
                sums[d, t, 2] += ic
    return sums, accepted, pts[:w], owner[:w]


def _scan_draws(params: SystemParams, base: Region, seed: int, draws, count_model: str,
                target_excl: np.ndarray, keep_points: bool = False):
    """Run the acceptance kernel for the given draws, topping up short draws."""
    area = region_area(params, base)
    mean = params.lam * area
    cx, radius = _bounding_disc(params, base)
    acceptance = area / (4.0 * radius**2)
    node_x = np.array([0.0, params.r_n, 2.0 * params.r_n])
    base_excl = np.array(_EXCLUDED[base])
    r0sq = params.r0**2

    def batch(n):
        return int(n / acceptance * 1.05) + 8 if n > 0 else 0

    rngs, counts, raw = [], [], []
    for i in draws:
        rng = np.random.default_rng([seed, int(i)])
        n = int(rng.poisson(mean)) if count_model == "poisson" else int(round(mean))
        rngs.append(rng)
        counts.append(n)
        raw.append(rng.random((batch(n), 2)))
    counts = np.asarray(counts, dtype=np.int64)
    sizes = np.array([len(a) for a in raw], dtype=np.int64)
    u = np.concatenate(raw) if len(raw) else np.empty((0, 2))
    sums, accepted, pts, owner = _scan(u, sizes, counts, cx, radius, node_x, r0sq,
                                       base_excl, target_excl, keep_points)
    extra_pts, extra_owner = [pts], [owner]
    for d in np.flatnonzero(accepted < counts):
        while accepted[d] < counts[d]:
            need = counts[d] - accepted[d]
            more = rngs[d].random((batch(need), 2))
            s_d, a_d, p_d, _ = _scan(more, np.array([len(more)]), np.array([need]), cx, radius,
                                     node_x, r0sq, base_excl, target_excl, keep_points)
            sums[d] += s_d[0]
            accepted[d] += a_d[0]
            extra_pts.append(p_d)
            extra_owner.append(np.full(len(p_d), d))
    if keep_points:
        pts = np.concatenate(extra_pts)
        owner = np.concatenate(extra_owner)
        order = np.argsort(owner, kind="stable")
        pts, owner = pts[order], owner[order]
    return sums, pts, owner


def sample_interferers(params: SystemParams, region: Region, draw_index: int, seed: int,
                       count_model: str = "poisson") -> np.ndarray:
    """Interferer positions for one placement, shape (N, 2).

    The count has mean ``lam * region_area``; points are uniform on the region,
    obtained by rejection from its bounding square.
    """
    if region is not Region.TOROIDAL:
        require_reservation(params)
    _, pts, _ = _scan_draws(params, region, seed, [draw_index], count_model,
                            np.zeros((0, 3), dtype=bool), keep_points=True)
    return pts


_NODE_INDEX = {NodeId.A: 0, NodeId.B: 1, NodeId.C: 2}


def _contains(outer: Region, inner: Region) -> bool:
    if outer is inner:
        return True
    return outer is Region.TOROIDAL and inner is not Region.CRESCENT


def _region_sums(params: SystemParams, base: Region, targets, mc: McConfig, threads: int = 1) -> list:
    """Per-draw summed INR for several (region, receivers) targets from one placement on ``base``.

    A target region other than ``base`` must lie inside it; its points are the
    base points that fall in it.  Under the Poisson count model that
    restriction is again a Poisson placement on the target region.
    """
    for region, _ in targets:
        if not _contains(base, region):
            raise ParameterError(f"{region.value} is not a subregion of {base.value}")
        if region is not base and mc.count_model != "poisson":
            raise ParameterError("thinning a placement requires the poisson count model")
    if base is not Region.TOROIDAL:
        require_reservation(params)
    sums = np.zeros((mc.trials, len(targets), 3))
    if params.lam > 0:
        target_excl = np.array([_EXCLUDED[region] for region, _ in targets], dtype=bool)

        def fill(start):
            stop = min(start + BLOCK_SIZE, mc.trials)
            block, _, _ = _scan_draws(params, base, mc.seed, range(start, stop), mc.count_model, target_excl)
            sums[start:stop] = block

        starts = range(0, mc.trials, BLOCK_SIZE)
        if threads <= 1:
            for s0 in starts:
                fill(s0)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(fill, starts))
    return [sums[:, t, [_NODE_INDEX[n] for n in receivers]] for t, (_, receivers) in enumerate(targets)]


def _per_draw_inr(params, region, receivers, mc: McConfig, threads: int = 1) -> np.ndarray:
    """Matrix of summed per-draw INRs, shape (trials, len(receivers)), row i from draw i."""
    return _region_sums(params, region, [(region, tuple(receivers))], mc, threads)[0]


def _summarize(samples: np.ndarray, mc: McConfig) -> McEstimate:
    mean = float(np.mean(samples))
    if mc.trials == 1:
        se = math.inf
    else:
        se = float(np.std(samples, ddof=1) / math.sqrt(mc.trials))
    return McEstimate(mean=mean, std_error=se, trials=mc.trials, seed=mc.seed)


def estimate_region_inrs(params: SystemParams, region: Region, receivers, mc: McConfig,
                         threads: int = 1) -> dict:
    """Mean summed INR at each receiver over ``mc.trials`` placements on ``region``."""
    receivers = tuple(receivers)
    sums = _per_draw_inr(params, region, receivers, mc, threads)
    return {node: _summarize(sums[:, k], mc) for k, node in enumerate(receivers)}


def estimate_inr(params: SystemParams, scheme: Scheme, receiver: NodeId,
                 role: SlotRole = SlotRole.RELAY_RECEIVES, mc: McConfig = McConfig(),
                 threads: int = 1) -> McEstimate:
    region = region_for(scheme, role)
    return estimate_region_inrs(params, region, (receiver,), mc, threads)[receiver]


def _directional_rates(scheme: Scheme, params: SystemParams, relay, end):
    """Per-direction rates for arrays of relay/end INRs; mirrors the analytic rate algebra."""
    snr = params.link_snr
    if scheme is Scheme.CR:
        r = np.minimum(shannon_rate(sinr(snr, relay)), shannon_rate(sinr(snr, end)))
        return r, r
    up, down = sinr(snr, relay), sinr(snr, end)
    # symmetric links: gamma_ab = gamma_cb = up, gamma_ba = gamma_bc = down;
    # same operation order as af_end_to_end_sinrs
    gamma_c = up * down / (1.0 + up + down + up)
    gamma_a = down * up / (1.0 + down + up + up)
    return shannon_rate(gamma_c), shannon_rate(gamma_a)


def estimate_rates(params: SystemParams, scheme: Scheme, mc: McConfig = McConfig(),
                   mode: str = "mean-inr", threads: int = 1) -> tuple[RateResult, dict]:
    """Monte Carlo counterpart of the analytic end-to-end rate.

    ``mean-inr`` averages each composite INR over placements and runs the means
    through the analytic rate algebra.  ``per-realization`` evaluates the rate
    per placement and averages; both INRs of a placement come from the same
    interferer realization.  Returns the rate and a dict of McEstimates keyed by
    ``inr_at_relay``, ``inr_at_end`` and ``rate_per_area``.
    """
    if mode not in RATE_MODES:
        raise ParameterError(f"mode must be one of {RATE_MODES}")
    require_reservation(params)
    if params.lam == 0:
        result = rate_from_inr(scheme, params, 0.0, 0.0)
        zero = McEstimate(0.0, 0.0, mc.trials, mc.seed)
        return result, {"inr_at_relay": zero, "inr_at_end": zero,
                        "rate_per_area": McEstimate(result.rate_per_area, 0.0, mc.trials, mc.seed)}
    sums = _per_draw_inr(params, region_for(scheme), (NodeId.B, NodeId.A), mc, threads)
    est = {"inr_at_relay": _summarize(sums[:, 0], mc), "inr_at_end": _summarize(sums[:, 1], mc)}
    if mode == "mean-inr":
        result = rate_from_inr(scheme, params, est["inr_at_relay"].mean, est["inr_at_end"].mean)
        est["rate_per_area"] = McEstimate(result.rate_per_area, math.nan, mc.trials, mc.seed)
        return result, est
    first, second = _directional_rates(scheme, params, sums[:, 0], sums[:, 1])
    area = reserved_area(scheme, params)
    est["rate_per_area"] = _summarize((first + second) / (scheme.slots_per_exchange * area), mc)
    result = RateResult(scheme, (float(np.mean(first)), float(np.mean(second))), area,
                        est["rate_per_area"].mean,
                        (est["inr_at_relay"].mean, est["inr_at_end"].mean))
    return result, est


QUANTITIES = (
    "toro_at_relay", "toro_at_end",
    "cre_at_end_own", "cre_at_relay", "cre_at_far_end",
    "cr_at_relay", "cr_at_end",
    "plnc_at_relay", "plnc_at_end",
)

# (region, receiver) realizing each analytic quantity
_ORACLE_REGIONS = {
    Region.TOROIDAL: {NodeId.B: "toro_at_relay", NodeId.A: "toro_at_end"},
    Region.CRESCENT: {NodeId.A: "cre_at_end_own", NodeId.B: "cre_at_relay", NodeId.C: "cre_at_far_end"},
    Region.CR_RELAY_RECEIVES: {NodeId.B: "cr_at_relay", NodeId.A: "cr_at_end"},
    Region.PLNC: {NodeId.B: "plnc_at_relay", NodeId.A: "plnc_at_end"},
}


@dataclass(frozen=True)
class ComparisonRow:
    params: SystemParams
    quantity: str
    analytic: float
    mc_mean: float
    mc_stderr: float
    z: float
    passed: bool


def _z_score(analytic: float, est: McEstimate) -> float:
    diff = est.mean - analytic
    if est.std_error > 0:
        return diff / est.std_error
    return 0.0 if diff == 0 else math.copysign(math.inf, diff)


def oracle_grid(snr_dbs=(20.0, 30.0), lams=(0.2, 7.0), r0_factors=(1.2, 2.0), big_r=10.0,
                limit: int | None = 6) -> list[SystemParams]:
    """Validation grid over (link SNR, density, r0 / r_n).

    With the default two levels per factor, the eight combinations are ordered
    so that any prefix of six still covers both levels of every factor three
    times each.
    """
    from .ratemodel import distance_from_snr_db

    combos = []
    for f, lam, snr in itertools.product(r0_factors, lams, snr_dbs):
        r_n = distance_from_snr_db(snr)
        combos.append(SystemParams(r_n=r_n, r0=f * r_n, big_r=big_r, lam=lam))
    if len(combos) == 8:
        combos = [combos[i] for i in (0, 7, 2, 5, 4, 3, 6, 1)]
    return combos if limit is None else combos[:limit]


def _oracle_estimates(params: SystemParams, mc: McConfig, threads: int) -> dict:
    found = {}
    if mc.count_model == "poisson":
        # one toroidal placement, thinned to the CR and PLNC regions
        regions = [r for r in _ORACLE_REGIONS if r is not Region.CRESCENT]
        targets = [(r, tuple(_ORACLE_REGIONS[r])) for r in regions]
        blocks = _region_sums(params, Region.TOROIDAL, targets, mc, threads)
        for (region, receivers), sums in zip(targets, blocks):
            for k, node in enumerate(receivers):
                found[_ORACLE_REGIONS[region][node]] = _summarize(sums[:, k], mc)
        pending = [Region.CRESCENT]
    else:
        pending = list(_ORACLE_REGIONS)
    for region in pending:
        mapping = _ORACLE_REGIONS[region]
        for node, est in estimate_region_inrs(params, region, tuple(mapping), mc, threads).items():
            found[mapping[node]] = est
    return found


def compare_with_analytic(grid, mc: McConfig = McConfig(), threads: int = 1,
                          analytic=None, z_threshold: float = 3.0) -> list[ComparisonRow]:
    """Analytic vs Monte Carlo for every INR quantity at each grid point.

    ``analytic`` maps params to a dict of quantity values; it defaults to the
    quadrature/closed-form breakdown and exists so the harness can be fed a
    deliberately wrong reference.
    """
    rows = []
    for params in grid:
        ref = analytic(params) if analytic is not None else inr_breakdown(params).as_dict()
        found = _oracle_estimates(params, mc, threads)
        for q in QUANTITIES:
            est = found[q]
            z = _z_score(ref[q], est)
            rows.append(ComparisonRow(params, q, float(ref[q]), est.mean, est.std_error, z,
                                      bool(abs(z) <= z_threshold)))
    return rows
