"""Multi-label classification with an explicit high-order label-correlation matrix.

A linear predictor and a label self-representation matrix are learned
jointly under a graph-Laplacian regularizer by alternating closed-form
updates.  The package also ships the evaluation metrics, rank-based
comparison statistics (Friedman test and Holm's procedure), a MULAN-style
ARFF loader, and a command-line interface around all of it.
"""

from .data import (
    Dataset,
    DatasetStats,
    FoldPlan,
    dataset_stats,
    dump_arff,
    kfold_split,
    parse_arff,
    read_label_xml,
    standardize,
)
from .graph import NeighborGraph, build_graph, laplacian, pearson_matrix, snn_adjacency
from .linalg import SymEig, matrix_rank, solve_linear, solve_w_system, sym_eig
from .metrics import (
    EvalReport,
    MetricSummary,
    hamming_loss,
    macro_auc,
    one_error,
    ranking_loss,
)
from .model import (
    FitOptions,
    HomiModel,
    HyperParams,
    decision_values,
    fit,
    load_model,
    model_from_json,
    model_to_json,
    normalized_correlations,
    objective,
    predict,
    save_model,
    update_b,
    update_t,
    update_w,
    update_z,
)
from .pipeline import cross_validate
from .stats import (
    RankSummary,
    f_cdf,
    f_quantile,
    friedman,
    holm,
    normal_cdf,
    ranks_from_scores,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DatasetStats",
    "EvalReport",
    "FitOptions",
    "FoldPlan",
    "HomiModel",
    "HyperParams",
    "MetricSummary",
    "NeighborGraph",
    "RankSummary",
    "SymEig",
    "build_graph",
    "cross_validate",
    "dataset_stats",
    "decision_values",
    "dump_arff",
    "f_cdf",
    "f_quantile",
    "fit",
    "friedman",
    "hamming_loss",
    "holm",
    "kfold_split",
    "laplacian",
    "load_model",
    "macro_auc",
    "matrix_rank",
    "model_from_json",
    "model_to_json",
    "normal_cdf",
    "normalized_correlations",
    "objective",
    "one_error",
    "parse_arff",
    "pearson_matrix",
    "predict",
    "ranking_loss",
    "ranks_from_scores",
    "read_label_xml",
    "save_model",
    "snn_adjacency",
    "solve_linear",
    "solve_w_system",
    "standardize",
    "sym_eig",
    "update_b",
    "update_t",
    "update_w",
    "update_z",
]
