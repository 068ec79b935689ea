"""Best orthogonal trigonometric approximation of (psi, beta)-differentiable functions.

Weight functions and their characteristics live in :mod:`orthotrig.psi`,
trigonometric polynomials and norms in :mod:`orthotrig.fourier`, kernels in
:mod:`orthotrig.kernels`, extremal polynomials in :mod:`orthotrig.extremal`,
the approximation engines in :mod:`orthotrig.approx` and the sweep harness
in :mod:`orthotrig.harness`.
"""

from .approx import (ApproxResult, IndexSet, best_orthogonal_exact, best_orthogonal_greedy,
                     i1_closed_form, i2_closed_form, i3_closed_form, lower_bound_via_pairing,
                     pairing_inf)
from .exceptions import CapacityError, DomainError, NumericRangeError, PreconditionError
from .extremal import (BoundConstants, build_constants, build_fdoublestar_m, build_fstar_m,
                       build_fstar_pn)
from .fourier import (ClassSpec, QuadratureSpec, TrigPoly, gamma_sum, lp_norm, membership_report,
                      partial_sum, psi_beta_derivative, psi_beta_integral, rho_n)
from .harness import (BoundReport, ExperimentConfig, RatioTable, emit, load_report, sweep_corollary,
                      verify, verify_theorem1, verify_theorem2, verify_theorem3)
from .kernels import dirichlet_beta, dirichlet_bound_check, kernel_l1_check, vallee_poussin
from .psi import (CATALOG, PsiSpec, classify, eta, mu, psi_eval, psi_index, tail_bound_check,
                  tail_integral)

__all__ = [name for name in dir() if not name.startswith("_")]
