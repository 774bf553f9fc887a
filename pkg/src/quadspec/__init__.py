"""quadspec: classification, normal forms, spectral projections, and
resolvent sweeps for non-selfadjoint quadratic differential operators."""

from .matcore import Tolerance, DEFAULT_TOL
from .symplectic import (QuadraticForm, HamiltonMap, Classification, Kind,
                         hamilton_map, evaluate, classify, uhp_count)
from .normalform import (NormalFormResult, LagrangianGraph, stable_manifolds,
                         straighten_kappa, cplus_from_aplus, aplus_from_cplus,
                         jordan_reduce, gaussian_transport, reduce)
from .weights import (QuadraticWeight, phi0, weight_from_gc, gc_from_weight,
                      dual_weight, norm_one, monomial_norm, monomial_gram,
                      dual_basis, adjoint_symbols, is_strictly_convex)
from .spectral import (LatticePoint, ProjectionNormReport, mu,
                       enumerate_lattice, taylor_projection, tau_norm_oracle,
                       projection_norm_formula, tau_bound, exact_J_bound,
                       asymptotics_1d, growth_rate, eigen_projection_norm,
                       orthogonality_test)
from .resolvent import (ShellMatrix, shell_matrix, restricted_resolvent,
                        resolvent_sweep)
from . import fixtures

__version__ = "0.1.0"
