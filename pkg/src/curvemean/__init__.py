"""curvemean: template-free mean shapes of noisy, time-deformed signals.

The package aligns a stack of equal-length periodic signals by minimizing
a template-free energy over warp parameters (shifts, or diffeomorphisms of
the unit interval generated by B-spline velocity fields), averages the
back-transformed denoised curves, and ships a Procrustes baseline, a
synthetic benchmark and a peak-centered segmentation front end.
"""

__version__ = "0.1.0"

from .core import (
    AlignmentResult,
    FourierCurve,
    GridCurve,
    as_signal,
    as_signal_matrix,
    grid_points,
    is_zero_mean,
    project_zero_mean,
)
from .criterion import (
    AlignmentCriterion,
    DiffeoFamily,
    TranslationFamily,
    make_family,
)
from .deformation import BSplineVelocityBasis, DiffeoWarp, warp_translation
from .estimators import (
    EuclideanMean,
    FourierSmoother,
    FrechetMean,
    ProcrustesMean,
    WaveletSmoother,
    euclidean_mean,
    frechet_mean,
    mse,
    procrustes_mean,
)
from .optimizer import OptimizerConfig, descend, minimize_alignment
from .smoothing import (
    dwt,
    fourier_smooth,
    gcv_select_cutoff,
    idwt,
    mad_noise_estimate,
    make_smoother,
    wavelet_smooth,
)
from .synthetic import (
    SimulationConfig,
    bump_shape,
    default_mean_shape,
    run_benchmark,
    sample_gp,
    simulate_dataset,
    two_bump_shape,
)

__all__ = [
    "__version__",
    "AlignmentResult",
    "FourierCurve",
    "GridCurve",
    "as_signal",
    "as_signal_matrix",
    "grid_points",
    "is_zero_mean",
    "project_zero_mean",
    "AlignmentCriterion",
    "DiffeoFamily",
    "TranslationFamily",
    "make_family",
    "BSplineVelocityBasis",
    "DiffeoWarp",
    "warp_translation",
    "EuclideanMean",
    "FourierSmoother",
    "FrechetMean",
    "ProcrustesMean",
    "WaveletSmoother",
    "euclidean_mean",
    "frechet_mean",
    "mse",
    "procrustes_mean",
    "OptimizerConfig",
    "descend",
    "minimize_alignment",
    "dwt",
    "fourier_smooth",
    "gcv_select_cutoff",
    "idwt",
    "mad_noise_estimate",
    "make_smoother",
    "wavelet_smooth",
    "SimulationConfig",
    "bump_shape",
    "default_mean_shape",
    "run_benchmark",
    "sample_gp",
    "simulate_dataset",
    "two_bump_shape",
]
