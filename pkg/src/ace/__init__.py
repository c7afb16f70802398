"""Hierarchical pixel-density estimation and texture anomaly imaging.

A multilayer network of 1-D topographic mappings transforms an image into
progressively coarser code layers; joint histograms of each layer's clique
pairs combine into a per-pixel log-probability image that highlights
statistically anomalous regions.
"""

from ace.backend import backend_name
from ace.errors import ContractError, PgmParseError
from ace.histogram import CliqueHistogram, accumulate, bin_of, log_clique_factor, marginals
from ace.image import QuantizedImage, load_pgm, requantize, save_pgm, wedge_correct
from ace.model import (
    AceModel,
    LogProbImage,
    anomaly_image,
    full_mask,
    log_q_direct,
    render,
    train,
)
from ace.network import (
    LayerSchedule,
    LayerStep,
    Orientation,
    apply_layer,
    clique_pairs,
    make_schedule,
    pair_values,
)
from ace.topomap import (
    Lut,
    TopoMap,
    TrainConfig,
    compile_lut,
    distortion,
    interpolate_generation,
    train_modified,
    train_standard,
    update_step,
    winner,
)

__version__ = "0.1.0"

__all__ = [
    "AceModel",
    "CliqueHistogram",
    "ContractError",
    "LayerSchedule",
    "LayerStep",
    "LogProbImage",
    "Lut",
    "Orientation",
    "PgmParseError",
    "QuantizedImage",
    "TopoMap",
    "TrainConfig",
    "accumulate",
    "anomaly_image",
    "apply_layer",
    "backend_name",
    "bin_of",
    "clique_pairs",
    "compile_lut",
    "distortion",
    "full_mask",
    "interpolate_generation",
    "load_pgm",
    "log_clique_factor",
    "log_q_direct",
    "make_schedule",
    "marginals",
    "pair_values",
    "render",
    "requantize",
    "save_pgm",
    "train",
    "train_modified",
    "train_standard",
    "update_step",
    "wedge_correct",
    "winner",
]
