"""Entropy measures of shape congruity.

The pipeline: derive two smoothness parameters from the interior volume
(``rho1 = interior measure``, ``rho2 = rho1**rho_exponent``) and two
sampling distances from the maximum thickness (``delta_k = fraction *
thickness``); solve the screened Poisson field for each rho and normalize
it to [0, 1]; sample each field on the band of voxels equidistant from the
boundary at each delta; histogram the samples and take Shannon entropies.
The four entropies and their mean form the congruity measure: lowest for a
ball, rising with deviation from it, and dipping again when deviations
form mutually congruent parts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .distance import Band, distance_transform, extract_band, max_thickness
from .field import (
    ScreenedPoissonProblem,
    normalize,
    solve_with_residual,
)
from .grid import ScalarField, VoxelVolume, interior_measure, require_valid

DEFAULT_BIN_COUNT = 256
DEFAULT_RHO_EXPONENT = 0.3
DEFAULT_DELTA_FRACTIONS = (0.05, 0.1)


@dataclass(frozen=True)
class Histogram:
    """Counts over ``bin_count`` equal bins of [0, 1]."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or counts.size < 1:
            raise ValueError("counts must be a nonempty 1D array")
        if (counts < 0).any():
            raise ValueError("counts must be nonnegative")
        if counts.sum() < 1:
            raise ValueError("histogram must contain at least one sample")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @property
    def bin_count(self) -> int:
        return int(self.counts.size)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def probabilities(self) -> np.ndarray:
        return self.counts / self.total


def build_histogram(values: Sequence[float] | np.ndarray, bin_count: int) -> Histogram:
    """Histogram values from [0, 1] into ``floor(v * bin_count)`` bins,
    with v = 1 clamped into the last bin."""
    if bin_count < 2:
        raise ValueError(f"bin_count must be >= 2, got {bin_count}")
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("cannot histogram an empty value list")
    if values.min() < 0 or values.max() > 1:
        raise ValueError(
            f"values must lie in [0, 1], got range "
            f"[{values.min()}, {values.max()}]"
        )
    bins = np.minimum((values * bin_count).astype(np.int64), bin_count - 1)
    return Histogram(np.bincount(bins, minlength=bin_count))


def shannon_entropy(hist: Histogram) -> float:
    """Shannon entropy ``-sum(p * log2 p)`` in bits; empty bins contribute 0.

    Ranges over [0, log2(bin_count)]: 0 when one bin holds everything,
    the maximum when all bins are equally full.
    """
    p = hist.counts[hist.counts > 0] / hist.total
    return float(-(p * np.log2(p)).sum())


@dataclass(frozen=True)
class MeasureConfig:
    """Knobs of the congruity pipeline; defaults give the reference behavior.

    ``band_tolerance`` of None means half a voxel. Solver settings pass
    through to the field solves.
    """

    bin_count: int = DEFAULT_BIN_COUNT
    rho_exponent: float = DEFAULT_RHO_EXPONENT
    delta_fractions: tuple[float, float] = DEFAULT_DELTA_FRACTIONS
    band_tolerance: float | None = None
    solver_tolerance: float = 1e-10
    max_iterations: int = 20000
    direct_solver_limit: int = 5000

    def __post_init__(self) -> None:
        if self.bin_count < 2:
            raise ValueError(f"bin_count must be >= 2, got {self.bin_count}")
        if not 0 < self.rho_exponent < 1:
            raise ValueError(f"rho_exponent must be in (0, 1), got {self.rho_exponent}")
        fractions = tuple(float(f) for f in self.delta_fractions)
        if len(fractions) != 2:
            raise ValueError(f"expected two delta fractions, got {fractions}")
        if not all(0 < f < 1 for f in fractions):
            raise ValueError(f"delta fractions must lie in (0, 1), got {fractions}")
        if not fractions[0] < fractions[1]:
            raise ValueError(f"delta fractions must increase, got {fractions}")
        if self.band_tolerance is not None and not self.band_tolerance > 0:
            raise ValueError(f"band_tolerance must be positive, got {self.band_tolerance}")
        object.__setattr__(self, "delta_fractions", fractions)


class PipelineParameters(NamedTuple):
    """The (rho1, rho2, delta1, delta2) derived for one volume."""

    rho1: float
    rho2: float
    delta1: float
    delta2: float


def derive_parameters(volume: VoxelVolume, dist: ScalarField,
                      config: MeasureConfig | None = None) -> PipelineParameters:
    """Smoothness and sampling parameters for one volume.

    ``rho1`` equals the interior measure (volume in 3D, area in 2D) and
    must exceed 1 so that ``rho2 = rho1**exponent`` stays below it.
    """
    config = config or MeasureConfig()
    rho1 = interior_measure(volume)
    if rho1 <= 1:
        raise ValueError(
            f"interior measure {rho1} must exceed 1 for a usable parameter pair"
        )
    rho2 = rho1**config.rho_exponent
    thickness = max_thickness(dist)
    return PipelineParameters(
        rho1, rho2,
        config.delta_fractions[0] * thickness,
        config.delta_fractions[1] * thickness,
    )


def sample_band(field: ScalarField, band: Band) -> np.ndarray:
    """Values of a normalized field at the band's voxels, in row-major
    index order."""
    if field.extents != band.extents or field.spacing != band.spacing:
        raise ValueError(
            f"grid mismatch: field {field.extents} h={field.spacing}, "
            f"band {band.extents} h={band.spacing}"
        )
    return field.values.ravel()[band.indices]


@dataclass(frozen=True)
class CongruityResult:
    """The 2x2 entropy collection for one volume, with provenance.

    ``entropies[i, k]`` is the entropy for smoothness ``rho[i]`` sampled at
    distance ``delta[k]``; ``mean_entropy`` is their arithmetic mean.
    """

    entropies: np.ndarray
    mean_entropy: float
    rho: tuple[float, float]
    delta: tuple[float, float]
    thickness: float
    band_sizes: tuple[int, int]
    residuals: tuple[float, float]
    config: MeasureConfig
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        entropies = np.asarray(self.entropies, dtype=np.float64)
        if entropies.shape != (2, 2):
            raise ValueError(f"entropies must be 2x2, got {entropies.shape}")
        cap = math.log2(self.config.bin_count)
        if (entropies < 0).any() or (entropies > cap + 1e-12).any():
            raise ValueError(f"entropies must lie in [0, {cap}]")
        entropies.flags.writeable = False
        object.__setattr__(self, "entropies", entropies)

    def entropy(self, i: int, k: int) -> float:
        """Entropy for rho index ``i`` and delta index ``k`` (1-based)."""
        return float(self.entropies[i - 1, k - 1])


def congruity_measure(volume: VoxelVolume,
                      config: MeasureConfig | None = None) -> CongruityResult:
    """Run the full pipeline on one volume.

    Deterministic: identical volumes and configuration produce bit-identical
    results. Requires that both sampling distances yield non-empty bands;
    if the two bands select the same voxel layer (very thin shapes) the
    result carries a warning instead of failing.
    """
    config = config or MeasureConfig()
    require_valid(volume)
    dist = distance_transform(volume)
    params = derive_parameters(volume, dist, config)

    tolerance = config.band_tolerance
    if tolerance is None:
        tolerance = volume.spacing / 2.0
    bands = []
    for k, delta in enumerate((params.delta1, params.delta2), start=1):
        try:
            bands.append(extract_band(dist, delta, tolerance))
        except ValueError as exc:
            raise type(exc)(f"band k={k} (delta={delta:.6g}): {exc}") from exc

    warnings = ()
    if np.array_equal(bands[0].indices, bands[1].indices):
        warnings = (
            "degenerate bands: both sampling distances select the same voxel layer",
        )

    entropies = np.zeros((2, 2))
    residuals = []
    for i, rho in enumerate((params.rho1, params.rho2), start=1):
        problem = ScreenedPoissonProblem(
            volume, rho,
            solver_tolerance=config.solver_tolerance,
            max_iterations=config.max_iterations,
            direct_solver_limit=config.direct_solver_limit,
        )
        try:
            solution, residual = solve_with_residual(problem)
        except Exception as exc:
            raise type(exc)(f"field solve i={i} (rho={rho:.6g}): {exc}") from exc
        residuals.append(residual)
        normalized = normalize(solution)
        for k, band in enumerate(bands, start=1):
            samples = sample_band(normalized, band)
            entropies[i - 1, k - 1] = shannon_entropy(
                build_histogram(samples, config.bin_count)
            )

    return CongruityResult(
        entropies=entropies,
        mean_entropy=float(entropies.mean()),
        rho=(params.rho1, params.rho2),
        delta=(params.delta1, params.delta2),
        thickness=max_thickness(dist),
        band_sizes=(len(bands[0]), len(bands[1])),
        residuals=(residuals[0], residuals[1]),
        config=config,
        warnings=warnings,
    )


MEASURE_KEYS = ((1, 1), (1, 2), (2, 1), (2, 2))


@dataclass(frozen=True)
class Ordering:
    """Shape orderings by entropy, ascending.

    ``by_mean`` orders by mean entropy; ``by_measure[(i, k)]`` orders by the
    single entropy ``e[i, k]``. ``consensus`` is True when all four
    per-measure orderings agree. Ties are broken by name and reported in
    ``ties`` as groups sharing a mean entropy.
    """

    by_mean: tuple[str, ...]
    by_measure: dict[tuple[int, int], tuple[str, ...]]
    consensus: bool
    ties: tuple[tuple[str, ...], ...] = ()


def order_shapes(results: Sequence[tuple[str, CongruityResult]]) -> Ordering:
    """Order named results by mean entropy and by each of the four measures."""
    if len(results) < 2:
        raise ValueError(f"need at least two results to order, got {len(results)}")
    names = [name for name, _ in results]
    if len(set(names)) != len(names):
        raise ValueError("result names must be unique")

    by_mean = tuple(name for name, r in sorted(results, key=lambda nr: (nr[1].mean_entropy, nr[0])))
    by_measure = {
        (i, k): tuple(name for name, r in sorted(results, key=lambda nr: (nr[1].entropy(i, k), nr[0])))
        for i, k in MEASURE_KEYS
    }
    orders = list(by_measure.values())
    consensus = all(order == orders[0] for order in orders[1:])

    groups: dict[float, list[str]] = {}
    for name, r in results:
        groups.setdefault(r.mean_entropy, []).append(name)
    ties = tuple(tuple(sorted(g)) for g in groups.values() if len(g) > 1)
    return Ordering(by_mean, by_measure, consensus, ties)
