"""Four weighted composition operators on H^2, three criteria each.

The identity and a weighted automorphism are bounded below. Shrinking the disk by a half pushes
all mass away from the circle, so normalized kernels collapse near the
boundary. The map (1+z)/2 touches the circle only at z = 1, which is enough
for the boundary density to vanish on a set of positive measure.
"""

import numpy as np

from ktlab.diagnostics import ScanGrid, kernel_scan, test_function_scan
from ktlab.measure import ess_inf_criterion, pushforward_measure, rn_density_boundary
from ktlab.operators import WcoSpec

grid = ScanGrid.disk((0, 0.5, 0.9, 0.99, 0.999), 32)
rng = np.random.default_rng(0)

for h, psi in [("1", "z"), ("2+z", "blaschke(0.5)"), ("1", "z/2"), ("1", "(1+z)/2")]:
    spec = WcoSpec(h, psi)
    ks = kernel_scan(spec, grid)
    ts = test_function_scan(spec, grid)
    mu = pushforward_measure(spec.h, spec.psi, 2, "hardy", 2**18, rng=rng)
    dens = ess_inf_criterion(rn_density_boundary(mu, 512))
    print(f"h={h:4s} psi={psi:14s}")
    for r in (ks, ts, dens):
        print(f"    {r.id:20s} {r.verdict:18s} c={r.constant_estimate:.4g}")
