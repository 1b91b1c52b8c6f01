"""Acceptance suite: one test per criterion, each at its stated tolerance.

A PASS/FAIL line per criterion is printed in the pytest terminal summary.
"""
import io
import math
import time

import numpy as np
import pytest

from plnc_spatial.cli import run
from plnc_spatial.experiments import (
    SCHEMES,
    SweepGrid,
    find_crossover_density,
    optimize_r0,
    sweep_density,
    sweep_reserved_radius,
    validate_radius_sweep,
)
from plnc_spatial.geometry import NodeId, Scheme, SystemParams, crescent_area, reserved_area_cr, reserved_area_plnc
from plnc_spatial.interference import inr_breakdown
from plnc_spatial.montecarlo import McConfig, compare_with_analytic, estimate_rates, oracle_grid
from plnc_spatial.ratemodel import distance_from_snr_db, end_to_end_rate


def criterion(number, text):
    return pytest.mark.criterion(number, text)


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    return run(list(argv), stdout=out, stderr=err), out.getvalue(), err.getvalue()


def by_scheme(records):
    return {s: np.array([r.rate_per_area for r in records if r.scheme is s]) for s in SCHEMES}


@criterion(1, "union areas equal pi r0^2 + k crescent to 1e-12 on a 50-point grid, < 1 s")
def test_geometry_identities():
    t0 = time.perf_counter()
    worst = 0.0
    grid = [(r_n, r0) for r_n in np.linspace(0.05, 1.0, 10) for r0 in np.linspace(0.55, 3.0, 5)]
    assert len(grid) == 50
    for r_n, r0 in grid:
        p = SystemParams(r_n=float(r_n), r0=float(r0))
        s = crescent_area(p)
        for got, want in ((reserved_area_cr(p), math.pi * r0**2 + s), (reserved_area_plnc(p), math.pi * r0**2 + 2 * s)):
            worst = max(worst, abs(got - want) / want)
    elapsed = time.perf_counter() - t0
    print(f"max relative error {worst:.2e}, {elapsed * 1e3:.1f} ms")
    assert worst <= 1e-12
    assert elapsed < 1.0


@criterion(2, "finite-R relay INR within 0.25% +- 1e-6 of unbounded at R = 10; monotone in R, < 1 s")
def test_radius_anchor():
    t0 = time.perf_counter()
    records = validate_radius_sweep(0.5, 0.2, SweepGrid(0.6, 10.0, 0.1))
    elapsed = time.perf_counter() - t0
    last = records[-1]
    assert last.big_r == 10.0
    assert abs(last.relative_gap - 0.0025) <= 1e-6
    finite = np.array([r.inr_finite for r in records])
    assert np.all(np.diff(finite) > 0)
    assert elapsed < 1.0


@criterion(3, "distance_from_snr_db(20) = 0.3162 and (30) = 0.1778, +- 0.0005")
def test_path_loss_anchors():
    assert abs(distance_from_snr_db(20) - 0.3162) <= 5e-4
    assert abs(distance_from_snr_db(30) - 0.1778) <= 5e-4


@criterion(4, "every INR quantity within 3 SE of Monte Carlo on the 6-point grid at 1e5 placements, < 2 min")
def test_oracle_equivalence():
    grid = oracle_grid()
    assert len(grid) == 6
    t0 = time.perf_counter()
    rows = compare_with_analytic(grid, McConfig(trials=100_000, seed=42))
    elapsed = time.perf_counter() - t0
    worst = max(rows, key=lambda r: abs(r.z))
    print(f"{len(rows)} rows, max |z| = {abs(worst.z):.2f} ({worst.quantity}), {elapsed:.1f} s")
    assert len(rows) == 6 * 9
    assert all(r.passed for r in rows), [(r.params, r.quantity, r.z) for r in rows if not r.passed]
    assert elapsed < 120.0


@criterion(5, "20 dB, lambda 7: CR >= PLNC for every r0 in [0.33, 1.0], < 30 s")
def test_cr_dominates_at_20db():
    t0 = time.perf_counter()
    rates = by_scheme(sweep_reserved_radius(20, 7.0, 10.0, SweepGrid(0.33, 1.0, 0.005)))
    elapsed = time.perf_counter() - t0
    assert len(rates[Scheme.CR]) == 135
    assert np.all(rates[Scheme.CR] >= rates[Scheme.PLNC])
    assert elapsed < 30.0


@criterion(6, "30 dB, lambda 7: exactly one sign change, CR below and PLNC above")
def test_single_crossover_at_30db():
    rates = by_scheme(sweep_reserved_radius(30, 7.0))
    diff = rates[Scheme.PLNC] - rates[Scheme.CR]
    sign = np.sign(diff)
    assert np.all(sign != 0)
    changes = np.flatnonzero(np.diff(sign))
    assert len(changes) == 1
    assert sign[0] < 0 and sign[-1] > 0


@criterion(7, "best r0: PLNC > CR at 20 dB; 30 dB < 20 dB for each scheme")
def test_optimum_radius_ordering():
    best = {(snr, s): optimize_r0(snr, 7.0, 10.0, s)[0] for snr in (20, 30) for s in SCHEMES}
    print({f"{snr} dB {s.value}": round(r0, 5) for (snr, s), r0 in best.items()})
    assert best[20, Scheme.PLNC] > best[20, Scheme.CR]
    for s in SCHEMES:
        assert best[30, s] < best[20, s]


@criterion(8, "10 dB: optimized CR >= optimized PLNC for lambda in [0.5, 10] step 0.5")
def test_cr_dominates_at_10db():
    rates = by_scheme(sweep_density(10, 10.0, SweepGrid(0.5, 10.0, 0.5)))
    assert len(rates[Scheme.CR]) == 20
    assert np.all(rates[Scheme.CR] >= rates[Scheme.PLNC])


@criterion(9, "20 dB: PLNC wins at lambda 0.1, CR at lambda 10, crossover in between")
def test_density_crossover_at_20db():
    rates = by_scheme(sweep_density(20, 10.0, SweepGrid(0.1, 10.0, 9.9)))
    assert rates[Scheme.PLNC][0] > rates[Scheme.CR][0]
    assert rates[Scheme.CR][1] > rates[Scheme.PLNC][1]
    c = find_crossover_density(20, 10.0, (0.1, 10.0))
    print(f"lambda* = {c.lam_star:.4f}")
    assert c.lam_star is not None and 0.1 < c.lam_star < 10.0


@criterion(10, "lambda*(30 dB) > lambda*(20 dB); 40 dB larger still or PLNC throughout")
def test_crossover_grows_with_snr():
    c = {snr: find_crossover_density(snr, 10.0, (0.1, 10.0)) for snr in (20, 30, 40)}
    print({snr: c[snr].lam_star for snr in c})
    assert c[20].lam_star is not None and c[30].lam_star is not None
    assert c[30].lam_star > c[20].lam_star
    if c[40].lam_star is None:
        assert c[40].dominant is Scheme.PLNC
    else:
        assert c[40].lam_star > c[30].lam_star


@criterion(11, "mc-validate output is byte-identical across --threads values")
def test_threads_do_not_change_output():
    base = ("mc-validate", "--seed", "42", "--trials", "20000")
    code1, out1, _ = cli(*base, "--threads", "1")
    code3, out3, _ = cli(*base, "--threads", "3")
    assert code1 == code3 == 0
    assert out1.count("\n") == 6 * 9 + out1.count("# ") + 1
    assert out1 == out3


@criterion(12, "lambda = 0 gives zero INR and exact analytic/MC agreement; r0 <= r_n exits 2 naming the minimum radius")
def test_degenerate_inputs():
    for snr in (10, 20, 30):
        r_n = distance_from_snr_db(snr)
        p = SystemParams(r_n=r_n, r0=1.5 * r_n, lam=0.0)
        assert all(v == 0.0 for v in inr_breakdown(p).as_dict().values())
        rows = compare_with_analytic([p], McConfig(trials=500))
        assert all(r.analytic == 0.0 and r.mc_mean == 0.0 and r.mc_stderr == 0.0 and r.passed for r in rows)
        for s in SCHEMES:
            assert estimate_rates(p, s, McConfig(trials=500))[0] == end_to_end_rate(s, p)
    for r0 in ("0.3162", "0.3", "0.1"):
        code, out, err = cli("rate", "--snr-db", "20", "--lambda", "7", "--r0", r0)
        assert code == 2 and out == ""
        assert "minimum radius" in err and "0.3162" in err
