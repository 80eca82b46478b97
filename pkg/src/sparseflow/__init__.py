"""sparseflow: sparse correlation volumes for optical-flow-style matching.

Exact top-k correlation search over all pairs, a {value, coordinates}
sparse volume that is correlated once and shifted thereafter, a multi-scale
bilinear-splatting encoder, and an iterative non-learned flow estimator,
with dense brute-force oracles and memory accounting alongside.
"""

from .backend import active_backend
from .encoder import EncoderConfig, MotionTensor, bilinear_splat, encode, scale_to_level, window_filter
from .estimator import (
    EstimatorConfig,
    SoftArgmaxOperator,
    UpdateOperator,
    estimate_flow,
    soft_argmax_update,
)
from .features import census_features
from .formats import (
    FormatError,
    read_flo,
    read_scv,
    read_sfm,
    read_smt,
    read_stk,
    write_flo,
    write_scv,
    write_sfm,
    write_smt,
    write_stk,
)
from .grid import (
    Coord2,
    FeatureMap,
    FlowField,
    bilinear_sample,
    dot_features,
    endpoint_error,
    f1_all,
    sequence_loss,
    upsample_flow,
)
from .knn import TopKMatches, correlation_eval_count, reset_correlation_eval_count, topk_search, topk_select
from .update import accumulate_flow, shift_volume
from .viz import flow_to_color
from .volume import (
    BudgetExceededError,
    DenseCorrelationVolume,
    MemoryReport,
    SparseCorrelationVolume,
    build_dense,
    build_sparse,
    densify,
    memory_report,
    size_table,
    sparsify_topk,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "Coord2",
    "DenseCorrelationVolume",
    "EncoderConfig",
    "EstimatorConfig",
    "FeatureMap",
    "FlowField",
    "FormatError",
    "MemoryReport",
    "MotionTensor",
    "SoftArgmaxOperator",
    "SparseCorrelationVolume",
    "TopKMatches",
    "UpdateOperator",
    "accumulate_flow",
    "active_backend",
    "bilinear_sample",
    "bilinear_splat",
    "build_dense",
    "build_sparse",
    "census_features",
    "correlation_eval_count",
    "densify",
    "dot_features",
    "encode",
    "endpoint_error",
    "estimate_flow",
    "f1_all",
    "flow_to_color",
    "memory_report",
    "read_flo",
    "read_scv",
    "read_sfm",
    "read_smt",
    "read_stk",
    "reset_correlation_eval_count",
    "scale_to_level",
    "sequence_loss",
    "shift_volume",
    "size_table",
    "soft_argmax_update",
    "sparsify_topk",
    "topk_search",
    "topk_select",
    "upsample_flow",
    "window_filter",
    "write_flo",
    "write_scv",
    "write_sfm",
    "write_smt",
    "write_stk",
]
