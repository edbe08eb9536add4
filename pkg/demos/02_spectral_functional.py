"""The spectral functional T_G(f) and its finite-epsilon approximation.

T_G(f) is the limit of n^{-1/2} eps^{-2} (Tr f(M + eps B) - Tr f(M)).  We
compute it exactly from walk traces and watch m_eps approach it.
"""

import numpy as np

from girthlab import PowerSeries, build_cycle, make_sampler, m_eps, sample, t_function

g = build_cycle(12)
b = sample(make_sampler("antisym", 2), g, seed=7)
f = PowerSeries.monomial(4)

t = t_function(g, b, f)
print(f"T_G(z^4) = {t:.12f}")
print(" eps        m_eps             |m_eps - T|")
for eps in (1e-1, 1e-2, 1e-3, 1e-4):
    v = m_eps(g, b, f, eps)
    print(f" {eps:.0e}  {v:.12f}  {abs(v - t):.3e}")

# the error shrinks at least linearly in eps; for a cycle with +-1 signs
# the odd-order term vanishes and the decay is quadratic
errs = [abs(m_eps(g, b, f, e) - t) for e in (1e-1, 1e-2, 1e-3)]
print("log-log slope:", np.polyfit(np.log([1e-1, 1e-2, 1e-3]), np.log(errs), 1)[0])

# on a cycle T(z^2) has a closed form in the signs: -2/sqrt(n) sum sigma_u sigma_{u+1}
sigma = b.entries[:, 1]
print("T(z^2) =", t_function(g, b, PowerSeries.monomial(2)),
      " hand formula:", -2 / np.sqrt(g.n) * np.sum(sigma * np.roll(sigma, -1)))
