"""Qubit Paulis and the qudit clock/shift algebra."""

from functools import lru_cache

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def omega(n: int) -> complex:
    """Primitive n-th root of unity exp(2 pi i / n)."""
    return complex(np.exp(2j * np.pi / n))


@lru_cache(maxsize=None)
def _shift(n: int) -> np.ndarray:
    return np.roll(np.eye(n, dtype=complex), 1, axis=0)


@lru_cache(maxsize=None)
def _clock(n: int) -> np.ndarray:
    return np.diag([omega(n) ** j for j in range(n)])


def shift(n: int, power: int = 1) -> np.ndarray:
    """X|j> = |j+1 mod n>, raised to ``power`` (negative powers allowed)."""
    return np.linalg.matrix_power(_shift(n), power % n).copy()


def clock(n: int, power: int = 1) -> np.ndarray:
    """Z|j> = omega^j |j>, raised to ``power``."""
    return np.linalg.matrix_power(_clock(n), power % n).copy()


def fourier(n: int) -> np.ndarray:
    """F|j> = sum_k omega^{jk} |k> / sqrt(n); F X F^dag = Z."""
    w = omega(n)
    return np.array([[w ** (j * k) for j in range(n)] for k in range(n)]) / np.sqrt(n)


def basis_projector(n: int, level: int) -> np.ndarray:
    proj = np.zeros((n, n), dtype=complex)
    proj[level % n, level % n] = 1.0
    return proj
