"""Bergman space A^2: Berezin transform and the disc condition side by side.

For psi(z) = z^2 the pullback of area measure has density 1/(2|w|), which is
bounded below, so both criteria agree on a positive verdict. For psi(z) = z/2
the measure lives on the disk of radius 1/2 and both criteria fail.
"""

from ktlab.diagnostics import berezin_scan, luecking_criterion
from ktlab.operators import WcoSpec
from ktlab.spaces import SpaceSpec

A2 = SpaceSpec("bergman-disk")
for h, psi in [("1", "z^2"), ("1", "z/2"), ("2+z", "blaschke(0.3)")]:
    spec = WcoSpec(h, psi, A2)
    b = berezin_scan(spec, radii=(0, 0.5, 0.9, 0.99), n_angles=16)
    lue = luecking_criterion(spec, source_shape=(256, 2048))
    print(f"h={h:4s} psi={psi:14s} berezin {b.verdict:18s} luecking {lue.verdict}")
    vals = b.details["values"]
    print(f"    Berezin minimum per radius: {[float(round(min(vals[i:i + 16]), 4)) for i in range(1, len(vals), 16)]}")
