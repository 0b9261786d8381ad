"""Producers of v(x_S): masking, synthetic functions, MLPs, external processes."""

from .external import SubprocessBackend, SubprocessOracle
from .masking import (
    DEFAULT_BATCH,
    LOG_ODDS_EPS,
    BaselineVector,
    FunctionOracle,
    ModelOracle,
    Sample,
    TableOracle,
    ValueOracle,
    evaluate_table,
    log_odds,
    mask_sample,
    masked_inputs,
    sigmoid,
)
from .mlp import Layer, MlpModel, load_mlp, random_mlp
from .synthetic import (
    KINDS,
    SyntheticFunction,
    Term,
    generate_synthetic_suite,
    ground_truth_patterns,
    load_function,
    parse_polynomial,
)

__all__ = [
    "DEFAULT_BATCH",
    "KINDS",
    "LOG_ODDS_EPS",
    "BaselineVector",
    "FunctionOracle",
    "Layer",
    "MlpModel",
    "ModelOracle",
    "Sample",
    "SubprocessBackend",
    "SubprocessOracle",
    "SyntheticFunction",
    "TableOracle",
    "Term",
    "ValueOracle",
    "evaluate_table",
    "generate_synthetic_suite",
    "ground_truth_patterns",
    "load_function",
    "load_mlp",
    "log_odds",
    "mask_sample",
    "masked_inputs",
    "parse_polynomial",
    "random_mlp",
    "sigmoid",
]
