"""Topology certification for networks of GHZ sources.

Estimate GHZ fidelities of arbitrary qubit subsets from one sigma_z setting
plus M x-y plane settings, and decide between candidate network topologies
with Hoeffding p-value bounds.
"""
from .errors import (ConfigError, CoverError, DimensionCapError, EmptyBlockError, ExclusivityError,
                     GridError, MissingSettingError, OverlapError, ShapeError, TopoCertError)
from .estimator import (coefficients_via_dft, estimate_antidiagonal, estimate_diagonal,
                        estimate_fidelity, min_norm_coefficients)
from .hypotheses import Candidate, build_hypotheses, certify
from .simulator import Dataset, ExactData, MeasurementSetting, sample_dataset
from .topology import NetworkSpec, NoiseSpec, Phase, QubitSet, Source, validate_partition

__version__ = "0.1.0"

__all__ = [
    "Candidate", "ConfigError", "CoverError", "Dataset", "DimensionCapError", "EmptyBlockError",
    "ExactData", "ExclusivityError", "GridError", "MeasurementSetting", "MissingSettingError",
    "NetworkSpec", "NoiseSpec", "OverlapError", "Phase", "QubitSet", "ShapeError", "Source",
    "TopoCertError", "build_hypotheses", "certify", "coefficients_via_dft", "estimate_antidiagonal",
    "estimate_diagonal", "estimate_fidelity", "min_norm_coefficients", "sample_dataset",
    "validate_partition",
]
