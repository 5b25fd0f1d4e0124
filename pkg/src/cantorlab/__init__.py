"""Numerical laboratory for regular Cantor sets: dimensions, limit geometries,
renormalization of relative scales, projection overlap statistics and images of
products of Cantor sets."""

__version__ = "0.1.0"

from .dimension import DimensionBracket, box_dimension_estimate, mass_distribution_certify, pressure_dimension
from .errors import CantorLabError
from .jets import Affine, Branch, Jet2, Moebius, PerturbedAffine, compose_jets, derivative_range, eval_jet
from .limit_geometry import (
    check_affine_relation,
    eigenvalue_ratio_report,
    h_prime_one_profile,
    limit_geometry,
)
from .marstrand import (
    count_overlaps,
    delta_rectangles,
    integral_estimate,
    overlap_lambda_measure,
    projection_union_measure,
    sublemma_union_bounds,
)
from .scale_space import (
    RelativeScale,
    empirical_recurrence_map,
    good_scale_indicator,
    relative_projection,
    renormalize,
)
from .subcantor import extract_subcantor
from .sum_image import LinearProjection, Quadratic, Sum, dimension_scan, gradient_condition_check, image_cover_counts
from .symbolic import enumerate_words, validate_subshift, words_at_scale
from .system import (
    CantorSystem,
    address_prefix_to_interval,
    cylinder_interval,
    derivative_bounds_on_cylinder,
    gauss_digits,
    make_system,
    middle_alpha,
    periodic_point,
    perturbed,
    two_ratio,
)
