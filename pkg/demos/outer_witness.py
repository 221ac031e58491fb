"""Constructing functions that W = C_psi shrinks.

For psi(z) = (1+z)/2 the boundary density of the pullback measure vanishes on
an arc. An outer function whose modulus is small on that arc and 1 elsewhere
makes ||W f|| / ||f|| as small as we like; the ratios below show it.
"""

from ktlab.diagnostics import lemma_witness
from ktlab.operators import WcoSpec

w = lemma_witness(WcoSpec("1", "(1+z)/2"), n_max=64)
print(f"status: {w.status}  arc measure m(E) = {w.m_E:.3f}")
for n, r in zip(w.n_values, w.ratios):
    print(f"    n = {n:3d}   ||W F_n|| / ||F_n|| = {r:.3e}")
