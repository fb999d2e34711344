"""Gaussian RBF and linear CKA, and their large-bandwidth agreement."""

__version__ = "0.1.0"

from .alignment import AlignmentValue, cka, hsic, non_centered_alignment  # noqa: E402
from .asymptotics import (  # noqa: E402
    GeometryReport,
    SweepConfig,
    SweepResult,
    convergence_onset,
    eccentricity,
    predicted_asymptote,
    sweep,
    tail_slope,
)
from .kernels import (  # noqa: E402
    Centering,
    DistanceMatrix,
    Family,
    FeatureMatrix,
    GramMatrix,
    KernelSpec,
    center,
    gram,
    pairwise_distances,
)
from .stats import RunSummary, summarize  # noqa: E402
from .synth import SynthSpec, generate_pair  # noqa: E402

__all__ = [
    "AlignmentValue",
    "Centering",
    "DistanceMatrix",
    "Family",
    "FeatureMatrix",
    "GeometryReport",
    "GramMatrix",
    "KernelSpec",
    "RunSummary",
    "SweepConfig",
    "SweepResult",
    "SynthSpec",
    "center",
    "cka",
    "convergence_onset",
    "eccentricity",
    "generate_pair",
    "gram",
    "hsic",
    "non_centered_alignment",
    "pairwise_distances",
    "predicted_asymptote",
    "summarize",
    "sweep",
    "tail_slope",
]
