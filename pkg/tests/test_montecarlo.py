import math

import numpy as np
import pytest
from scipy import stats

import plnc_spatial.montecarlo as mc_mod
from plnc_spatial.geometry import NodeId, ParameterError, Scheme, SlotRole, SystemParams, in_reserved_region
from plnc_spatial.interference import composite_inr_cr, inr_breakdown
from plnc_spatial.montecarlo import (
    McConfig,
    Region,
    compare_with_analytic,
    estimate_inr,
    estimate_rates,
    estimate_region_inrs,
    oracle_grid,
    region_area,
    sample_interferers,
)
from plnc_spatial.ratemodel import end_to_end_rate

REF = SystemParams(r_n=0.25, r0=0.5, big_r=10.0, lam=0.2)


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(trials=0), dict(seed=-1), dict(count_model="binomial")])
    def test_rejects_invalid(self, kw):
        with pytest.raises(ParameterError):
            McConfig(**kw)


class TestSampler:
    def test_zero_density(self):
        for region in Region:
            assert sample_interferers(REF.with_(lam=0.0), region, 0, 42).shape == (0, 2)

    @pytest.mark.parametrize("region", [Region.CR_RELAY_RECEIVES, Region.CR_END_RECEIVES, Region.PLNC])
    def test_points_respect_region(self, region):
        scheme, role = mc_mod._REGION_SLOTS[region]
        for i in range(20):
            pts = sample_interferers(REF.with_(lam=2.0), region, i, 9)
            assert len(pts) > 0
            assert not np.any(in_reserved_region(pts, scheme, REF, role))
            assert np.all(np.hypot(pts[:, 0] - REF.r_n, pts[:, 1]) <= REF.big_r)

    def test_crescent_points(self):
        pts = np.concatenate([sample_interferers(REF.with_(lam=50.0), Region.CRESCENT, i, 1) for i in range(50)])
        assert np.all(np.hypot(pts[:, 0], pts[:, 1]) <= REF.r0)
        assert np.all(np.hypot(pts[:, 0] - REF.r_n, pts[:, 1]) > REF.r0)

    def test_poisson_mean(self):
        n = 10_000
        counts = np.array([len(sample_interferers(REF, Region.PLNC, i, 42)) for i in range(n)])
        expected = REF.lam * region_area(REF, Region.PLNC)
        assert abs(counts.mean() - expected) <= 3 * math.sqrt(expected / n)
        # Poisson dispersion: variance equals the mean
        assert counts.var(ddof=1) == pytest.approx(expected, rel=0.05)

    def test_fixed_expected_count(self):
        expected = REF.lam * region_area(REF, Region.PLNC)
        for i in range(10):
            assert len(sample_interferers(REF, Region.PLNC, i, 42, "fixed-expected")) == round(expected)

    def test_stream_depends_only_on_seed_and_index(self):
        a = sample_interferers(REF, Region.PLNC, 17, 5)
        b = sample_interferers(REF, Region.PLNC, 17, 5)
        c = sample_interferers(REF, Region.PLNC, 18, 5)
        np.testing.assert_array_equal(a, b)
        assert a.shape != c.shape or not np.array_equal(a, c)

    def test_density_in_probe_discs(self):
        lam, draws = 1.0, 1000
        p = REF.with_(lam=lam)
        pts = np.concatenate([sample_interferers(p, Region.PLNC, i, 3) for i in range(draws)])
        probes = [(3.0, 0.0), (-4.0, 4.0), (0.25, -6.0), (6.0, 5.0), (-7.0, -2.0), (0.25, 2.0)]
        radius = 1.0
        expected = lam * math.pi * radius**2 * draws
        observed = np.array([np.sum(np.hypot(pts[:, 0] - x, pts[:, 1] - y) <= radius) for x, y in probes])
        assert np.all(np.abs(observed - expected) <= 3 * math.sqrt(expected))
        chi2 = np.sum((observed - expected) ** 2 / expected)
        assert stats.chi2.sf(chi2, len(probes)) > 1e-3


class TestEstimates:
    def test_zero_density(self):
        est = estimate_inr(REF.with_(lam=0.0), Scheme.CR, NodeId.B, mc=McConfig(trials=100))
        assert est.mean == 0.0 and est.std_error == 0.0

    def test_cr_relay_against_analytic(self):
        est = estimate_inr(REF, Scheme.CR, NodeId.B, SlotRole.RELAY_RECEIVES, McConfig(trials=100_000))
        assert abs(est.mean - composite_inr_cr(REF)[0]) <= 3 * est.std_error

    def test_plnc_end_symmetry(self):
        got = estimate_region_inrs(REF.with_(lam=2.0), Region.PLNC, (NodeId.A, NodeId.C), McConfig(trials=20_000))
        a, c = got[NodeId.A], got[NodeId.C]
        assert abs(a.mean - c.mean) <= 3 * math.hypot(a.std_error, c.std_error)

    def test_cr_end_slot_mirrors_relay_slot(self):
        mc = McConfig(trials=20_000)
        p = REF.with_(lam=2.0)
        a = estimate_inr(p, Scheme.CR, NodeId.A, SlotRole.RELAY_RECEIVES, mc)
        c = estimate_inr(p, Scheme.CR, NodeId.C, SlotRole.END_RECEIVES, mc)
        assert abs(a.mean - c.mean) <= 3 * math.hypot(a.std_error, c.std_error)

    def test_single_trial_has_infinite_error(self):
        est = estimate_inr(REF, Scheme.CR, NodeId.B, mc=McConfig(trials=1))
        assert math.isinf(est.std_error)


class TestDeterminism:
    def test_repeatable(self):
        mc = McConfig(trials=3000, seed=123)
        assert estimate_inr(REF, Scheme.PLNC, NodeId.A, mc=mc) == estimate_inr(REF, Scheme.PLNC, NodeId.A, mc=mc)

    def test_thread_count_invariant(self):
        mc = McConfig(trials=5000, seed=7)
        one = estimate_region_inrs(REF, Region.PLNC, (NodeId.A, NodeId.B), mc, threads=1)
        four = estimate_region_inrs(REF, Region.PLNC, (NodeId.A, NodeId.B), mc, threads=4)
        assert one == four

    def test_block_size_invariant(self, monkeypatch):
        mc = McConfig(trials=2500, seed=7)
        before = estimate_region_inrs(REF, Region.PLNC, (NodeId.B,), mc)
        monkeypatch.setattr(mc_mod, "BLOCK_SIZE", 97)
        assert estimate_region_inrs(REF, Region.PLNC, (NodeId.B,), mc) == before

    def test_seed_changes_result(self):
        a = estimate_inr(REF, Scheme.PLNC, NodeId.B, mc=McConfig(trials=1000, seed=1))
        b = estimate_inr(REF, Scheme.PLNC, NodeId.B, mc=McConfig(trials=1000, seed=2))
        assert a.mean != b.mean

    def test_thinned_matches_direct_statistically(self):
        # the CR region sampled directly and as a thinned toroidal placement
        mc = McConfig(trials=20_000)
        p = REF.with_(lam=1.0)
        direct = estimate_inr(p, Scheme.CR, NodeId.B, mc=mc)
        thinned = mc_mod._region_sums(p, Region.TOROIDAL, [(Region.CR_RELAY_RECEIVES, (NodeId.B,))], mc)[0]
        t = mc_mod._summarize(thinned[:, 0], mc)
        assert abs(direct.mean - t.mean) <= 3 * math.hypot(direct.std_error, t.std_error)

    def test_thinning_requires_poisson(self):
        with pytest.raises(ParameterError):
            mc_mod._region_sums(REF, Region.TOROIDAL, [(Region.PLNC, (NodeId.B,))],
                                McConfig(trials=10, count_model="fixed-expected"))


@pytest.mark.slow
def test_standard_error_scaling():
    p = SystemParams(r_n=0.316228, r0=0.632, lam=0.02)
    small = estimate_inr(p, Scheme.PLNC, NodeId.B, mc=McConfig(trials=10_000))
    large = estimate_inr(p, Scheme.PLNC, NodeId.B, mc=McConfig(trials=1_000_000))
    assert small.std_error / large.std_error == pytest.approx(10.0, rel=0.2)


class TestRates:
    @pytest.mark.parametrize("scheme", list(Scheme))
    def test_zero_density_matches_analytic(self, scheme):
        p = SystemParams(r_n=0.316228, r0=0.5, lam=0.0)
        for mode in mc_mod.RATE_MODES:
            res, _ = estimate_rates(p, scheme, McConfig(trials=50), mode)
            assert res == end_to_end_rate(scheme, p)

    @pytest.mark.slow
    @pytest.mark.parametrize("scheme, snr_r0", [
        (Scheme.CR, (0.316228, 0.6)), (Scheme.PLNC, (0.316228, 0.6)),
        (Scheme.CR, (0.177828, 0.5)), (Scheme.PLNC, (0.177828, 0.5)),
    ])
    def test_mean_inr_mode_within_two_percent(self, scheme, snr_r0):
        r_n, r0 = snr_r0
        p = SystemParams(r_n=r_n, r0=r0, big_r=10.0, lam=7.0)
        res, est = estimate_rates(p, scheme, McConfig(trials=100_000))
        assert res.rate_per_area == pytest.approx(end_to_end_rate(scheme, p).rate_per_area, rel=0.02)
        assert math.isnan(est["rate_per_area"].std_error)

    def test_per_realization_reported(self):
        p = SystemParams(r_n=0.316228, r0=0.6, lam=7.0)
        res, est = estimate_rates(p, Scheme.PLNC, McConfig(trials=2000), "per-realization")
        assert est["rate_per_area"].std_error > 0
        assert res.rate_per_area == est["rate_per_area"].mean
        analytic = end_to_end_rate(Scheme.PLNC, p).rate_per_area
        assert res.rate_per_area == pytest.approx(analytic, rel=0.1)

    def test_unknown_mode(self):
        with pytest.raises(ParameterError):
            estimate_rates(REF, Scheme.CR, McConfig(trials=10), "median")


class TestComparison:
    def test_empty_grid(self):
        assert compare_with_analytic([], McConfig(trials=10)) == []

    def test_corrupted_reference_fails(self):
        def wrong(params):
            ref = inr_breakdown(params).as_dict()
            ref["cr_at_relay"] *= 1.5
            return ref

        rows = compare_with_analytic([REF], McConfig(trials=20_000), analytic=wrong)
        bad = [r for r in rows if not r.passed]
        assert [r.quantity for r in bad] == ["cr_at_relay"]

    def test_row_layout(self):
        rows = compare_with_analytic([REF], McConfig(trials=2000))
        assert [r.quantity for r in rows] == list(mc_mod.QUANTITIES)
        for r in rows:
            assert r.z == pytest.approx((r.mc_mean - r.analytic) / r.mc_stderr)

    def test_zero_density_exact(self):
        rows = compare_with_analytic([REF.with_(lam=0.0)], McConfig(trials=100))
        assert all(r.analytic == r.mc_mean == 0.0 and r.z == 0.0 and r.passed for r in rows)

    def test_oracle_grid_balanced(self):
        grid = oracle_grid()
        assert len(grid) == 6
        assert sorted(round(p.lam, 3) for p in grid) == [0.2] * 3 + [7.0] * 3
        assert sorted(round(p.r_n, 4) for p in grid) == [0.1778] * 3 + [0.3162] * 3
        assert sorted(round(p.r0 / p.r_n, 3) for p in grid) == [1.2] * 3 + [2.0] * 3
        assert len({(p.r_n, p.r0, p.lam) for p in grid}) == 6
