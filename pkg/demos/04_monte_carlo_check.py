"""Cross-check the closed-form and quadrature INRs against seeded Monte Carlo placements."""
import sys

from plnc_spatial.montecarlo import McConfig, compare_with_analytic, estimate_rates, oracle_grid
from plnc_spatial import Scheme, SystemParams

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000
rows = compare_with_analytic(oracle_grid(), McConfig(trials=trials, seed=42))

print(f"{'r_n':>7} {'r0':>7} {'lam':>4}  {'quantity':15s} {'analytic':>10} {'mc':>10} {'z':>6}")
for r in rows:
    p = r.params
    print(f"{p.r_n:7.4f} {p.r0:7.4f} {p.lam:4.1f}  {r.quantity:15s} {r.analytic:10.4f} {r.mc_mean:10.4f} "
          f"{r.z:6.2f}{'' if r.passed else '  <-- outside 3 SE'}")
print(f"{sum(r.passed for r in rows)}/{len(rows)} within 3 standard errors")

# rates: averaging INR first versus averaging per-placement rates
p = SystemParams(r_n=0.316228, r0=0.6, lam=7.0)
for mode in ("mean-inr", "per-realization"):
    res, _ = estimate_rates(p, Scheme.PLNC, McConfig(trials=trials // 4), mode)
    print(f"PLNC rate/area, {mode}: {res.rate_per_area:.5f}")
