"""Deep and shallow boolean rule networks with greedy flip training."""

from .bitcore import BitMatrix, BitVector, bool_multiply, negate, nor_layer
from .data import Attribute, OneHotDataset, Schema, load_nominal_csv
from .network import (
    NetworkConfig,
    RuleNetwork,
    RuleSet,
    count_weights,
    extract_dnf,
    initialize,
    load_network,
    load_network_file,
    save_network,
    save_network_file,
    to_prolog,
)
from .training import Flip, TrainParams, accuracy, enumerate_flips, fit, optimize_coefs

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "BitVector",
    "negate",
    "bool_multiply",
    "nor_layer",
    "Schema",
    "Attribute",
    "OneHotDataset",
    "load_nominal_csv",
    "NetworkConfig",
    "RuleNetwork",
    "RuleSet",
    "initialize",
    "count_weights",
    "extract_dnf",
    "to_prolog",
    "save_network",
    "load_network",
    "save_network_file",
    "load_network_file",
    "TrainParams",
    "Flip",
    "fit",
    "optimize_coefs",
    "enumerate_flips",
    "accuracy",
    "__version__",
]
