"""Rate per unit area against the reserved radius, at 20 dB and 30 dB link SNR, lambda = 7."""
import numpy as np

from plnc_spatial import Scheme
from plnc_spatial.experiments import optimize_r0, sweep_reserved_radius

lam = 7.0
for snr_db in (20, 30):
    records = sweep_reserved_radius(snr_db, lam)
    r0 = np.array([r.x for r in records if r.scheme is Scheme.CR])
    cr = np.array([r.rate_per_area for r in records if r.scheme is Scheme.CR])
    plnc = np.array([r.rate_per_area for r in records if r.scheme is Scheme.PLNC])

    print(f"\n{snr_db} dB, lambda={lam}: r0 from {r0[0]:.4f} to {r0[-1]:.4f}")
    for i in range(0, len(r0), 20):
        print(f"  r0={r0[i]:.3f}  CR={cr[i]:.4f}  PLNC={plnc[i]:.4f}")

    flips = np.flatnonzero(np.diff(np.sign(plnc - cr)))
    if len(flips):
        print(f"  PLNC overtakes CR between r0={r0[flips[0]]:.3f} and {r0[flips[0] + 1]:.3f}")
    else:
        print("  CR stays ahead over the whole grid")

    for scheme in (Scheme.CR, Scheme.PLNC):
        best_r0, best = optimize_r0(snr_db, lam, 10.0, scheme)
        print(f"  best {scheme.value:4s}: r0={best_r0:.4f}, rate/area={best.rate_per_area:.4f}")
