"""Rank-one non-Hermitian perturbations of random matrices: simulation and checks."""

from rmtlab.ensembles import (
    SeedSpec,
    sample_ginibre,
    sample_gue,
    sample_haar_unitary,
    sample_unit_vector,
)
from rmtlab.linalg import EigenSystem, eigen_decompose, resolvent_bilinear, sylvester_check
from rmtlab.models import (
    ModelConfig,
    ModelKind,
    build_matrix,
    level_target,
    predicted_outlier,
    spectral_function,
)
from rmtlab.overlaps import overlap_matrix
from rmtlab.trajectories import TrajectoryBundle, track

__version__ = "0.1.0"

__all__ = [
    "EigenSystem",
    "ModelConfig",
    "ModelKind",
    "SeedSpec",
    "TrajectoryBundle",
    "build_matrix",
    "eigen_decompose",
    "level_target",
    "overlap_matrix",
    "predicted_outlier",
    "resolvent_bilinear",
    "sample_ginibre",
    "sample_gue",
    "sample_haar_unitary",
    "sample_unit_vector",
    "spectral_function",
    "sylvester_check",
    "track",
]
