"""Classical and absolute summability methods with finite-prefix theorem checks."""

__version__ = "0.1.0"

from .errors import DomainError, InvalidInputError, NumericalError, SummatrixError
from .sequences import (
    FactorProfile,
    SequencePrefix,
    WeightSystem,
    build_weight_system,
    check_quasi_monotone,
    forward_difference,
    partial_sums,
    total_variation,
)
from .means import CesaroMeans, cesaro_coefficient, cesaro_means, riesz_mean
from .matrices import (
    AssociatedMatrices,
    MatrixTransformResult,
    NormalMatrix,
    WeightedMeanMatrix,
    apply,
    apply_series_form,
    associate,
    weighted_mean_matrix,
)
from .indices import (
    AbsoluteIndexTrace,
    BoundednessVerdict,
    assess_boundedness,
    cesaro_index,
    matrix_index,
    riesz_index,
)
from .reports import CheckReport, Thresholds

__all__ = [
    "AbsoluteIndexTrace",
    "AssociatedMatrices",
    "BoundednessVerdict",
    "CesaroMeans",
    "CheckReport",
    "DomainError",
    "FactorProfile",
    "InvalidInputError",
    "MatrixTransformResult",
    "NormalMatrix",
    "NumericalError",
    "SequencePrefix",
    "SummatrixError",
    "Thresholds",
    "WeightSystem",
    "WeightedMeanMatrix",
    "apply",
    "apply_series_form",
    "assess_boundedness",
    "associate",
    "build_weight_system",
    "cesaro_coefficient",
    "cesaro_index",
    "cesaro_means",
    "check_quasi_monotone",
    "forward_difference",
    "matrix_index",
    "partial_sums",
    "riesz_index",
    "riesz_mean",
    "total_variation",
    "weighted_mean_matrix",
]
