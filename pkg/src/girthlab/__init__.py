"""girthlab: spectral noise of random walks in mildly random environments.

Exact spectral functionals T_G(f) on finite transitive graphs, the covariance
form H_G, closed forms on the d-regular tree, and Monte Carlo campaigns that
compare the three.
"""

__version__ = "0.1.0"

from .errors import (GateViolation, GirthlabError, InvalidArgument, InvalidCode,
                     OutOfDomain)
from .graphs import (LCF_CATALOG, LcfCode, TransitiveGraph, build_cayley,
                     build_cycle, build_lcf, girth, transition_matrix)
from .environment import (EnvironmentSampler, Perturbation, derive_seed,
                          make_sampler, sample)
from .functionals import (PowerSeries, m_eps, t_function, t_monomial,
                          zero_entry_check)
from .covariance import (AlphaTable, alpha, alpha_table, h_form, tree_alpha,
                         tree_alpha_table)
from .treeform import (TreeModel, green_coeffs, kernel_beta, lhs_closed,
                       limit_density, localization_ratio, stieltjes_residual,
                       tree_covariance)
from .experiments import (CampaignResult, ExperimentConfig, FunctionSpec,
                          covariance_comparison, normality_report, run_campaign)

__all__ = [name for name in dir() if not name.startswith("_")]
