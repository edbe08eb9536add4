"""The covariance form H_G and its tree limit.

H_G(f, g) = E[T_G(f) T_G(g)] is a finite sum over walks.  On graphs of large
girth the coefficients alpha_ij agree with those of the infinite tree.
"""

import numpy as np

from girthlab import PowerSeries, alpha_table, build_cycle, build_lcf, h_form, make_sampler
from girthlab.covariance import tree_alpha_table

np.set_printoptions(precision=4, suppress=True)

cyc = alpha_table(build_cycle(200), make_sampler("antisym", 2), cap=6)
print("alpha on C_200 (i, j = 2..6)")
print(cyc.values[2:, 2:])
print("Var T(z^2) on any cycle:", h_form(cyc, PowerSeries.monomial(2), PowerSeries.monomial(2)))

foster = build_lcf("foster")
s = make_sampler("permvec", 3)
fa = alpha_table(foster, s, cap=8)
ta = tree_alpha_table(3, s, 8)
print("\nFoster graph (girth 10) vs 3-regular tree, entries with i + j <= 8:")
print("max difference:", np.abs(fa.values - ta.values)[fa.exact].max())
print("first entry past the girth gate, alpha[4, 6]:", fa[4, 6], "tree:", ta[4, 6])
