"""Sparse sensor placement and low-rank reconstruction of gridded fields."""

from ._fieldsense import (
    Basis,
    FieldsenseError,
    GridGeometry,
    SvdFactorization,
    TrainingSet,
    brute_force_placement,
    compute_svd,
    condition_number,
    gamma_criterion,
    noise_std_for_snr,
    optimize_placement,
    placement_mse,
    projection_error,
    qdeim_placement,
    random_placement,
    reconstruct,
    svht_rank,
    synth_field,
    truncate,
)

__all__ = [
    "Basis",
    "FieldsenseError",
    "GridGeometry",
    "SvdFactorization",
    "TrainingSet",
    "brute_force_placement",
    "compute_svd",
    "condition_number",
    "gamma_criterion",
    "noise_std_for_snr",
    "optimize_placement",
    "placement_mse",
    "projection_error",
    "qdeim_placement",
    "random_placement",
    "reconstruct",
    "svht_rank",
    "synth_field",
    "truncate",
]
