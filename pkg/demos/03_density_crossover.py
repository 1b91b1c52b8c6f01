"""Optimized rates against interferer density, and where PLNC stops paying off."""
from plnc_spatial import Scheme
from plnc_spatial.experiments import SweepGrid, find_crossover_density, sweep_density

for snr_db in (10, 20, 30, 40):
    records = sweep_density(snr_db, lam_grid=SweepGrid(1.0, 10.0, 3.0))
    print(f"\n{snr_db} dB")
    for i in range(0, len(records), 2):
        cr, plnc = records[i], records[i + 1]
        assert cr.scheme is Scheme.CR and plnc.scheme is Scheme.PLNC
        print(f"  lambda={cr.x:4.1f}  CR={cr.rate_per_area:.4f} (r0 {cr.best_r0:.3f})"
              f"  PLNC={plnc.rate_per_area:.4f} (r0 {plnc.best_r0:.3f})")
    c = find_crossover_density(snr_db, lam_range=(0.1, 10.0))
    if c.lam_star is None:
        print(f"  no crossover in [0.1, 10]; {c.dominant.value} ahead throughout")
    else:
        print(f"  crossover near lambda*={c.lam_star:.3f} ({c.dominant.value} ahead below it)")
