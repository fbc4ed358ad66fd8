"""Discounted VAW online regression in reproducing-kernel Hilbert spaces."""
from .dvaw import DVAW
from .ensemble import VEDVAW, DiscountGrid, DyadicAggregator, build_grid, dyadic_dims, meta_regret_bound
from .errors import *  # noqa: F401,F403
from .features import ExplicitFeatureMap, fast_regime_dimension, truncation_error_bound
from .kernels import DotProductAnalytic, Domain, Gaussian, Matern, Polynomial, kappa, pseudometric
from .sections import SectionBasis, build_section_basis, farthest_point_net, power_function

__version__ = "0.1.0"
