"""Obstacle imaging from far-field data through interior resonant modes.

Pipeline: synthesize far-field data (:mod:`forward`), locate interior
Dirichlet eigenvalues from the blow-up of factorization-method solutions
(:mod:`spectral_probe`), recover approximate eigenfunctions as Herglotz
waves (:mod:`modes`) and image the boundary as their common nodal set
(:mod:`imaging`).
"""

from .forward import FarFieldDataset, FarFieldMatrix, add_noise, disk_farfield, nystrom_farfield, synthesize_dataset
from .geometry import BoundaryCurve, DirectionSet, SamplingGrid, default_grid, make_shape
from .imaging import IndicatorGrid, boundary_contrast, emit, indicator_multi, indicator_single
from .modes import HerglotzKernel, ftls_recover, gtls_recover, herglotz_eval
from .spectral_probe import (EigenvalueEstimate, SweepResult, Truncation, interior_eigenvalue_oracle,
                             pick_peaks, picard_norm, sweep)

__version__ = "0.1.0"
