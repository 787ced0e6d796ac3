"""Dense linear-algebra kernel for the small matrices used everywhere else.

Norms, spectra, powers and stability predicates on plain numpy arrays.
Matrices here are tiny (state dimension 2 in the shipped benchmark), so
robustness wins over asymptotics throughout.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "as_matrix",
    "as_square",
    "spectral_norm",
    "spectral_radius",
    "is_schur",
    "mat_power_norm",
]


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D float array, rejecting empty or non-finite input."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("empty matrix")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def as_square(a) -> np.ndarray:
    arr = as_matrix(a)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def spectral_norm(a) -> float:
    """Largest singular value, i.e. the induced Euclidean norm."""
    return float(np.linalg.norm(as_matrix(a), 2))


def spectral_radius(a) -> float:
    """Largest eigenvalue magnitude of a square matrix."""
    return float(np.max(np.abs(np.linalg.eigvals(as_square(a)))))


def is_schur(a) -> bool:
    """True iff every eigenvalue lies strictly inside the unit disk.

    The comparison is strict with no tolerance slack; a spectral radius of
    exactly 1 fails. Callers that want slack apply it themselves.
    """
    return spectral_radius(a) < 1.0


def mat_power_norm(a, p: int) -> float:
    """Induced norm of the p-th matrix power, with the 0-th power the identity.

    Accumulated by plain repeated multiplication; the exponents used here
    stay small (a few hundred at most).
    """
    arr = as_square(a)
    if not isinstance(p, (int, np.integer)) or p < 0:
        raise ValueError("exponent must be a nonnegative integer")
    acc = np.eye(arr.shape[0])
    for _ in range(int(p)):
        acc = acc @ arr
    return float(np.linalg.norm(acc, 2))
