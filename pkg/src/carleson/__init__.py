"""Beurling-Carleson sets, singular inner functions and the numerics around them."""

from .circle import (Arc, AtomicMeasure, ClosedSet, DyadicArc, GENERATION_CAP, format_closed_set,
                     format_measure, parse_closed_set, parse_measure, whitney_decompose)
from .errors import CarlesonError, GridError, ParseError, RangeError, ShootingError
from .gauge import CustomLambda, EntropyLog, PowerAlpha, build_grid, check_regularity, parse_gauge
from .bcnorm import comparability_report, diffuse_criterion, local_criterion
from .roberts import roberts_decompose
from .corona import corona_decompose, extract_bc_sets, sublevel_area_integral
from .inner import (besov_integral, hp_norm_boundary, hp_test_sum, nevanlinna_norm, poisson, s_mu,
                    s_mu_deriv)
from .constructions import (CantorSpec, cantor_measure, cantor_set, equally_spaced_atoms,
                            independent_copies, pruned_cantor)
from .pde import maximal_solution_radial, restoring_constant, restoring_iteration
from .pipelines import nevanlinna_pipeline, hardy_pipeline
from .numerics import CONVERGES, DIVERGES, INCONCLUSIVE, classify_series

__version__ = "0.1.0"
