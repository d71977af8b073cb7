"""Scikit-learn style front end for the congruity measure.

``CongruityMeasure`` is a stateless transformer: ``transform`` maps a
sequence of :class:`~congruity.grid.VoxelVolume` objects to a numeric
feature matrix with one row per volume and five columns (the four
entropies followed by their mean), so the measure drops into sklearn
pipelines, grid searches and feature unions via the usual ``get_params`` /
``set_params`` machinery.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .grid import VoxelVolume, require_valid
from .measure import CongruityResult, MeasureConfig, congruity_measure

FEATURE_NAMES = (
    "entropy_rho1_delta1",
    "entropy_rho1_delta2",
    "entropy_rho2_delta1",
    "entropy_rho2_delta2",
    "entropy_mean",
)


class CongruityMeasure(BaseEstimator, TransformerMixin):
    """Entropy-based congruity features for voxel volumes.

    Parameters
    ----------
    bins : int, default=256
        Histogram bin count over [0, 1].
    rho_exponent : float, default=0.3
        Exponent mapping the large smoothness parameter to the small one.
    delta_fractions : tuple of float, default=(0.05, 0.1)
        Sampling distances as fractions of the maximum thickness.
    band_tolerance : float or None, default=None
        Half-width of the band distance window; None means half a voxel.
    solver_tolerance : float, default=1e-10
        Relative residual bound for the field solves.
    max_iterations : int, default=20000
        Iteration cap for the conjugate-gradient solver path.
    direct_solver_limit : int, default=5000
        Largest unknown count solved by direct factorization.
    """

    def __init__(self, bins: int = 256, rho_exponent: float = 0.3,
                 delta_fractions: tuple[float, float] = (0.05, 0.1),
                 band_tolerance: float | None = None,
                 solver_tolerance: float = 1e-10,
                 max_iterations: int = 20000,
                 direct_solver_limit: int = 5000):
        self.bins = bins
        self.rho_exponent = rho_exponent
        self.delta_fractions = delta_fractions
        self.band_tolerance = band_tolerance
        self.solver_tolerance = solver_tolerance
        self.max_iterations = max_iterations
        self.direct_solver_limit = direct_solver_limit

    def fit(self, X: Iterable[VoxelVolume], y=None) -> "CongruityMeasure":
        """Validate inputs and configuration; nothing is learned."""
        self._config()
        self._checked(X)
        return self

    def transform(self, X: Iterable[VoxelVolume]) -> np.ndarray:
        """Measure each volume; rows are (e11, e12, e21, e22, mean)."""
        config = self._config()
        rows = []
        for volume in self._checked(X):
            result = congruity_measure(volume, config)
            rows.append(np.append(result.entropies.ravel(), result.mean_entropy))
        return np.asarray(rows).reshape(-1, len(FEATURE_NAMES))

    def measure(self, volume: VoxelVolume) -> CongruityResult:
        """Full result with provenance for a single volume."""
        checked = list(self._checked([volume]))
        return congruity_measure(checked[0], self._config())

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        return np.asarray(FEATURE_NAMES, dtype=object)

    def _config(self) -> MeasureConfig:
        return MeasureConfig(
            bin_count=self.bins,
            rho_exponent=self.rho_exponent,
            delta_fractions=tuple(self.delta_fractions),
            band_tolerance=self.band_tolerance,
            solver_tolerance=self.solver_tolerance,
            max_iterations=self.max_iterations,
            direct_solver_limit=self.direct_solver_limit,
        )

    @staticmethod
    def _checked(X: Iterable[VoxelVolume]) -> Sequence[VoxelVolume]:
        volumes = list(X)
        for pos, volume in enumerate(volumes):
            if not isinstance(volume, VoxelVolume):
                raise TypeError(
                    f"X[{pos}] is {type(volume).__name__}, expected VoxelVolume"
                )
            require_valid(volume)
        return volumes
