"""Toeplitz operators with nonnegative symbols.

A symbol bounded away from zero gives finite sections whose smallest singular
value stays put. A smoothed arc indicator vanishes on an arc; the smallest
singular value of the n x n section then decays with n.
"""

from ktlab.analytic import sample_boundary
from ktlab.diagnostics import toeplitz_criterion
from ktlab.operators import smallest_singular, smooth_arc, toeplitz_matrix

for label, fn in [("2 + cos", lambda z: 2 + z.real), ("smoothed arc", smooth_arc())]:
    hb = sample_boundary(fn, 2**14)
    sig = [smallest_singular(toeplitz_matrix(hb, n)) for n in (32, 64, 128, 256)]
    res = toeplitz_criterion(hb, (64, 128, 256))
    print(f"{label:14s} sigma_min {['%.3g' % s for s in sig]} -> {res.verdict}")
