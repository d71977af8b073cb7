"""Entropy-based shape congruity measures on voxel volumes.

A shape is represented as a binary voxel grid. Two smooth interior fields
(screened Poisson solutions at a large and a small smoothness parameter)
are sampled on two loci equidistant from the boundary; the Shannon
entropies of the sampled value histograms quantify how far the shape
deviates from a ball, moderated by how congruent its parts are.
"""
from .distance import Band, EmptyBandError, distance_transform, extract_band, max_thickness
from .estimator import CongruityMeasure
from .field import (
    ConvergenceError,
    ScreenedPoissonProblem,
    assemble_system,
    normalize,
    relative_residual,
    solve_screened_poisson,
    solve_with_residual,
)
from .grid import (
    ScalarField,
    ValidationReport,
    VoxelVolume,
    interior_measure,
    require_valid,
    validate,
)
from .measure import (
    CongruityResult,
    Histogram,
    MeasureConfig,
    Ordering,
    PipelineParameters,
    build_histogram,
    congruity_measure,
    derive_parameters,
    order_shapes,
    sample_band,
    shannon_entropy,
)
from .shapes import (
    CompositeCubeSpec,
    composite_cube_set,
    deviation_set,
    make_composite_cube,
    make_concave_face,
    make_cube,
    make_cube_with_attachment,
    make_sphere,
    matched_ball_radius,
)
from .voxl import VoxlFormatError, load_voxl, read_voxl, save_voxl, write_voxl

__version__ = "0.1.0"

__all__ = [
    "Band",
    "CompositeCubeSpec",
    "CongruityMeasure",
    "CongruityResult",
    "ConvergenceError",
    "EmptyBandError",
    "Histogram",
    "MeasureConfig",
    "Ordering",
    "PipelineParameters",
    "ScalarField",
    "ScreenedPoissonProblem",
    "ValidationReport",
    "VoxelVolume",
    "VoxlFormatError",
    "assemble_system",
    "build_histogram",
    "composite_cube_set",
    "congruity_measure",
    "derive_parameters",
    "deviation_set",
    "distance_transform",
    "extract_band",
    "interior_measure",
    "load_voxl",
    "make_composite_cube",
    "make_concave_face",
    "make_cube",
    "make_cube_with_attachment",
    "make_sphere",
    "matched_ball_radius",
    "max_thickness",
    "normalize",
    "order_shapes",
    "read_voxl",
    "relative_residual",
    "require_valid",
    "sample_band",
    "save_voxl",
    "shannon_entropy",
    "solve_screened_poisson",
    "solve_with_residual",
    "validate",
    "write_voxl",
    "__version__",
]
