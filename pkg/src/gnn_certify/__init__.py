"""Certified Gaussian-approximation bounds for random Gaussian neural networks."""

from .activations import ActivationSpec, Polynomial, make_activation, p_l2_norm, p_polynomial
from .bounds import (
    BoundReport,
    bff_bounds,
    convex_from_w1,
    deep_convex_bound,
    deep_w1_bound,
    gamma_bounds,
    shallow_bounds,
)
from .errors import CertifyError, DeepBoundUnavailable, DomainError, ResourceLimitError
from .recursion import Architecture, LayerStats, collective_bound, layer_stats

__version__ = "0.1.0"
