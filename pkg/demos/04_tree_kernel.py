"""The limiting covariance kernel on the d-regular tree and its localization.

beta_d(x, y) is the covariance density of the noise in the squared spectrum.
As d decreases to 2 it concentrates on the diagonal.  This script writes the
grids used for the surface plots; plotting is left to any external tool.
"""

import numpy as np

from girthlab import PowerSeries, TreeModel, kernel_beta, localization_ratio, tree_covariance
from girthlab.treeform import limit_density

for d in (2.1, 2.5, 3, 4):
    print(f"d={d:<4} rho={TreeModel(d).rho:.4f}  diagonal/off-diagonal ratio R={localization_ratio(d):9.3f}")

t = TreeModel(3)
print("\nbeta_3 at (rho/2, rho/2):", kernel_beta(t, t.rho / 2, t.rho / 2), "= 162/pi^2 =", 162 / np.pi ** 2)

z = PowerSeries([0, 1])
for d in (2, 3, 4):
    print(f"limiting Var T~(z) for d={d}:", round(tree_covariance(d, z, z), 10))

x = (np.arange(200) + 0.5) / 200 * t.rho
X, Y = np.meshgrid(x, x)
np.savetxt("beta3_grid.csv", np.column_stack([X.ravel(), Y.ravel(), kernel_beta(t, X, Y).ravel()]),
           delimiter=",", header="x,y,beta", comments="")
np.savetxt("density3.csv", np.column_stack([x, limit_density(t, x)]), delimiter=",",
           header="x,density", comments="")
print("wrote beta3_grid.csv and density3.csv")
