"""How large must the network be before the finite-radius INR matches the unbounded one?"""
import numpy as np

from plnc_spatial.experiments import SweepGrid, validate_radius_sweep

r0, lam = 0.5, 0.2
records = validate_radius_sweep(r0, lam, SweepGrid(1.0, 20.0, 1.0))

print(f"relay INR for r0={r0}, lambda={lam}")
print(f"{'R':>5} {'finite':>10} {'unbounded':>10} {'gap':>9}")
for rec in records:
    print(f"{rec.big_r:5.1f} {rec.inr_finite:10.6f} {rec.inr_unbounded:10.6f} {rec.relative_gap:9.2e}")

# the gap is exactly (r0/R)^2, so R = 10 leaves 0.25%
gaps = np.array([r.relative_gap for r in records])
radii = np.array([r.big_r for r in records])
print("max deviation from (r0/R)^2:", np.max(np.abs(gaps - (r0 / radii) ** 2)))
