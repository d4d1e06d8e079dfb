"""Exact square volumes of infinitesimal simplices on coordinatized manifolds."""

from .errors import ConfigError, InfvolError, StructuralError, UsageError, ValidationError
from .metric import (
    ExtensionPerturbation,
    MetricSpec,
    eval_G,
    eval_g,
    eval_g_extended,
    random_metric,
    random_perturbation,
    validate_metric,
)
from .quotient import EXTENDED, MUTUAL, QuotientRing, SimplexSpec, build_ideal, normal_form, ring_equal
from .ring import Poly, PolyMatrix, VarTable
from .volumes import (
    SimplexInstance,
    bullet,
    det_ring,
    gram_matrix,
    heron_square_area,
    multilinear_component,
    omega_squared,
    square_volume,
)

__version__ = "0.1.0"
