"""Composition operators on the right half-plane, checked two ways.

Each map is analysed directly with half-plane kernels and again after the
Cayley transfer to a weighted composition operator on the disk. The two
verdicts should match.
"""

from ktlab.diagnostics import halfplane_transfer

for phi, space in [("s", "H2+"), ("2*s", "H2+"), ("s + 1", "H2+"), ("s + 1", "A2+")]:
    tr = halfplane_transfer(phi, space)
    print(f"{space} phi={phi:6s} half-plane {tr.halfplane.verdict:18s} disk {tr.disk.verdict:18s} agree={tr.agree}")
