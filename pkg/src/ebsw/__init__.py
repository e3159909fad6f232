"""Sliced Wasserstein distances with energy-weighted slicing distributions.

The package computes the classic Monte Carlo sliced distance, its
best-direction variant, and four estimators that reweight or resample
projection directions by an increasing energy of the projected transport
cost. It ships analytic support-point gradients, Euler gradient flows on
point clouds and color palettes, exact reference oracles, and a CLI.
"""

__version__ = "0.1.0"

from .energy import EnergyFunction, exponential, parse_energy, polynomial
from .errors import (
    DegenerateWeightsError,
    EbswError,
    EmptyInputError,
    FlowDivergedError,
    MeasureFormatError,
    MeasureValidationError,
    PpmFormatError,
)
from .estimators import (
    METHODS,
    EstimatorConfig,
    SliceBatch,
    estimate,
    imh_ebsw,
    is_ebsw,
    max_sw,
    rmh_ebsw,
    sir_ebsw,
    slice_values,
    sw,
)
from .flows import FlowConfig, FlowTrace, color_transfer, run_flow
from .gradients import grad_is_ebsw, grad_resampled, grad_slice_pp, grad_sw
from .measures import EmpiricalMeasure, load_measure, save_measure
from .onedim import wasserstein_1d, wasserstein_1d_pp
from .reference import DensityGrid, brute_force_1d, exact_w2, finite_diff_grad, slicing_density_grid
from .slicing import project, sample_uniform_sphere, sample_vmf

__all__ = [
    "__version__",
    "DegenerateWeightsError",
    "DensityGrid",
    "EbswError",
    "EmpiricalMeasure",
    "EmptyInputError",
    "EnergyFunction",
    "EstimatorConfig",
    "FlowConfig",
    "FlowDivergedError",
    "FlowTrace",
    "METHODS",
    "MeasureFormatError",
    "MeasureValidationError",
    "PpmFormatError",
    "SliceBatch",
    "brute_force_1d",
    "color_transfer",
    "estimate",
    "exact_w2",
    "exponential",
    "finite_diff_grad",
    "grad_is_ebsw",
    "grad_resampled",
    "grad_slice_pp",
    "grad_sw",
    "imh_ebsw",
    "is_ebsw",
    "load_measure",
    "max_sw",
    "parse_energy",
    "polynomial",
    "project",
    "rmh_ebsw",
    "run_flow",
    "sample_uniform_sphere",
    "sample_vmf",
    "save_measure",
    "sir_ebsw",
    "slice_values",
    "slicing_density_grid",
    "sw",
    "wasserstein_1d",
    "wasserstein_1d_pp",
]
