"""Sparse-approximation distance, Comp/Incomp classification, and the
spectral quantities used by the column-selection pipeline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

UNIT_TOL = 1e-10


@dataclass(frozen=True)
class VectorClass:
    label: str  # "comp" | "incomp"
    delta: float
    rho: float
    distance: float  # achieved distance to the floor(delta * n)-sparse set


def _check_unit(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise InputError("vector must be nonempty")
    if abs(float(np.linalg.norm(x)) - 1.0) > UNIT_TOL:
        raise InputError(f"vector is not unit-norm within {UNIT_TOL:g}")
    return x


def distance_to_sparse(x: np.ndarray, s: int) -> float:
    """Euclidean distance from a unit vector to the s-sparse set.

    Equals the norm of x after zeroing its s largest-magnitude entries;
    ties broken by index order.
    """
    x = _check_unit(x)
    n = x.size
    if not 0 <= s <= n:
        raise InputError(f"sparsity level must be in [0, {n}]")
    if s == 0:
        return float(np.linalg.norm(x))
    keep = np.argsort(-np.abs(x), kind="stable")[s:]
    return float(np.linalg.norm(x[keep]))


def classify_vector(x: np.ndarray, delta: float, rho: float) -> VectorClass:
    """Compressible iff within distance rho of the floor(delta*n)-sparse set.

    The boundary (distance exactly rho) is compressible: the defining
    condition is closed.
    """
    if not 0 < delta < 1 or not 0 < rho < 1:
        raise InputError("delta and rho must lie in (0, 1)")
    x = _check_unit(x)
    s = int(np.floor(delta * x.size))
    dist = distance_to_sparse(x, s)
    label = "comp" if dist <= rho else "incomp"
    return VectorClass(label, float(delta), float(rho), dist)


def smallest_singular_value(a: np.ndarray) -> float:
    """sigma_k of a k x m matrix (k <= m), via the symmetric eigenproblem
    of a a^T."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    k, m = a.shape
    if k > m:
        raise InputError("need at least as many columns as rows")
    eigs = np.linalg.eigvalsh(a @ a.T)
    return float(np.sqrt(max(float(eigs[0]), 0.0)))


def restricted_operator_norm(m: np.ndarray) -> float:
    """Spectral norm of m restricted to the mean-zero hyperplane.

    Composition with the projection I - J/n amounts to centering each
    row, so the all-ones direction is annihilated.
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    centered = m - m.mean(axis=1, keepdims=True)
    return float(np.linalg.svd(centered, compute_uv=False)[0])


__all__ = [
    "VectorClass",
    "classify_vector",
    "distance_to_sparse",
    "restricted_operator_norm",
    "smallest_singular_value",
]
