"""Matrix import/export in the ``{dims, real, imag}`` JSON layout."""

import json
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from mixphase.qstate.linalg import dims_product
from mixphase.utils.errors import ValidationError


class MatrixPayload(BaseModel):
    """JSON form of a complex square matrix acting on sites with local ``dims``."""

    model_config = ConfigDict(extra="forbid")

    dims: List[int] = Field(min_length=1)
    real: List[List[float]]
    imag: List[List[float]]

    @model_validator(mode="after")
    def _check_shape(self) -> "MatrixPayload":
        size = dims_product(self.dims)
        for name, rows in (("real", self.real), ("imag", self.imag)):
            if len(rows) != size or any(len(r) != size for r in rows):
                raise ValueError(f"'{name}' must be a {size}x{size} array for dims {self.dims}")
        return self

    def to_array(self) -> np.ndarray:
        return np.asarray(self.real, dtype=float) + 1j * np.asarray(self.imag, dtype=float)

    @classmethod
    def from_array(cls, matrix: np.ndarray, dims: Sequence[int]) -> "MatrixPayload":
        matrix = np.asarray(matrix, dtype=complex)
        return cls(dims=list(dims), real=matrix.real.tolist(), imag=matrix.imag.tolist())


def matrix_to_json(matrix: np.ndarray, dims: Sequence[int]) -> dict:
    """Serialize ``matrix`` to a plain dict."""
    return MatrixPayload.from_array(matrix, dims).model_dump()


def matrix_from_json(data: dict) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """
    Parse a matrix payload.

    Raises:
        ValidationError: If the payload is malformed
    """
    try:
        payload = MatrixPayload.model_validate(data)
    except Exception as e:
        raise ValidationError(f"Invalid matrix payload: {e}")
    return payload.to_array(), tuple(payload.dims)


def save_matrix(path: Path, matrix: np.ndarray, dims: Sequence[int]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(matrix_to_json(matrix, dims), indent=2))


def load_matrix(path: Path) -> Tuple[np.ndarray, Tuple[int, ...]]:
    return matrix_from_json(json.loads(Path(path).read_text()))
