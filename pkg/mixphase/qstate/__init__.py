"""Complex linear-algebra substrate: geometries, states, local operators and norms."""

from mixphase.qstate.geometry import LatticeGeometry, LatticeKind
from mixphase.qstate.io import (
    MatrixPayload,
    load_matrix,
    matrix_from_json,
    matrix_to_json,
    save_matrix,
)
from mixphase.qstate.linalg import (
    DEFAULT_POLICY,
    NumericPolicy,
    operator_norm,
    partial_trace_array,
    trace_distance,
    trace_norm,
)
from mixphase.qstate.operators import (
    LocalOperator,
    ProductOperator,
    apply_local,
    conditional_expectation,
    embed,
    embed_matrix,
)
from mixphase.qstate.states import DensityMatrix, Ket, partial_trace

__all__ = [
    "DEFAULT_POLICY",
    "DensityMatrix",
    "Ket",
    "LatticeGeometry",
    "LatticeKind",
    "LocalOperator",
    "MatrixPayload",
    "NumericPolicy",
    "ProductOperator",
    "apply_local",
    "conditional_expectation",
    "embed",
    "embed_matrix",
    "load_matrix",
    "matrix_from_json",
    "matrix_to_json",
    "operator_norm",
    "partial_trace",
    "partial_trace_array",
    "save_matrix",
    "trace_distance",
    "trace_norm",
]
