"""Relation-aware graph networks for social rating prediction."""

from ._core import (
    ConfigError,
    ContractError,
    DataError,
    Dataset,
    Model,
    NumericalError,
    Ratings,
    TrainConfig,
    Trust,
    load_matrix,
    load_ratings,
    load_trust,
    normalized_adjacency,
    planted,
    pretrain_social,
    save_matrix,
    sparsity_report,
    train,
)

__all__ = [
    "ConfigError",
    "ContractError",
    "DataError",
    "Dataset",
    "Model",
    "NumericalError",
    "Ratings",
    "TrainConfig",
    "Trust",
    "load_matrix",
    "load_ratings",
    "load_trust",
    "normalized_adjacency",
    "planted",
    "pretrain_social",
    "save_matrix",
    "sparsity_report",
    "train",
]
