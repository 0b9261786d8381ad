"""Harsanyi-dividend concept extraction and And-Or graph explanations for black-box models."""

from .aog import AndOrGraph, build_aog, build_from_explanation, description_length, evaluate_aog, to_dot, to_json
from .errors import AogError, CapacityError, ConfigError, IntegrityError, OracleError
from .harsanyi import (
    EffectSpectrum,
    compute_spectrum,
    marginal_benefit,
    shapley_interaction_index,
    shapley_taylor_index,
    shapley_values,
    spectrum_from_table,
)
from .lattice import SubsetTable, VariableSet, mobius_transform, superset_sum, zeta_transform
from .metrics import build_assignment, iou_top_m, jaccard, rho_unfaith, sorted_strength_curve
from .oracle import BaselineVector, ModelOracle, Sample, TableOracle, load_mlp
from .sparsify import (
    BaselineOptConfig,
    PruneConfig,
    SparseExplanation,
    explained_ratio,
    greedy_prune,
    learn_baseline,
    unfaithfulness,
)

__version__ = "0.1.0"

__all__ = [
    "AndOrGraph",
    "AogError",
    "BaselineOptConfig",
    "BaselineVector",
    "CapacityError",
    "ConfigError",
    "EffectSpectrum",
    "IntegrityError",
    "ModelOracle",
    "OracleError",
    "PruneConfig",
    "Sample",
    "SparseExplanation",
    "SubsetTable",
    "TableOracle",
    "VariableSet",
    "build_aog",
    "build_assignment",
    "build_from_explanation",
    "compute_spectrum",
    "description_length",
    "evaluate_aog",
    "explained_ratio",
    "greedy_prune",
    "iou_top_m",
    "jaccard",
    "learn_baseline",
    "load_mlp",
    "marginal_benefit",
    "mobius_transform",
    "rho_unfaith",
    "shapley_interaction_index",
    "shapley_taylor_index",
    "shapley_values",
    "sorted_strength_curve",
    "spectrum_from_table",
    "superset_sum",
    "to_dot",
    "to_json",
    "unfaithfulness",
    "zeta_transform",
]
