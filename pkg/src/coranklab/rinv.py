"""Constructive column selection behind the restricted-invertibility
guarantee: for a rank-n matrix U (n x m) there is a size-n column set S
with ||U_S^{-1}||_HS^2 <= (m - n + 1) * Tr[(U U^T)^{-1}].

The guarantee is an existence theorem; this module realizes it by
exhaustive search (ground truth at desk scale) or a trace-greedy
heuristic for larger m, and always reports the bound for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import InputError, ResourceRefusal
from .geometry import smallest_singular_value

SIGMA_TOL = 1e-8
EXHAUSTIVE_BUDGET = 1_000_000


@dataclass(frozen=True)
class ColumnSelection:
    subset: tuple  # 0-based column indices, sorted, size = row count
    hs_inv_sq: float  # ||U_S^{-1}||_HS^2
    bound: float  # (m - n + 1) * Tr[(U U^T)^{-1}]
    mode: str  # "exhaustive" | "greedy"


def _hs_inv_sq(square: np.ndarray) -> float:
    return float(np.sum(np.linalg.inv(square) ** 2))


def _trace_inv_gram(a: np.ndarray) -> float:
    return float(np.trace(np.linalg.inv(a @ a.T)))


def select_columns(u: np.ndarray, mode: str = "exhaustive") -> ColumnSelection:
    """Pick n columns of the n x m rank-n matrix u minimizing (exhaustive)
    or greedily controlling ||U_S^{-1}||_HS^2.

    Exhaustive mode scans all invertible size-n subsets (near-singular
    ones, sigma_min <= 1e-8, are skipped, never selected) and breaks
    objective ties lexicographically by index set.  Greedy mode removes,
    one at a time, the column whose removal least increases
    Tr[(U_R U_R^T)^{-1}] until n columns remain.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    n, m = u.shape
    if n > m:
        raise InputError("u must have at least as many columns as rows")
    if smallest_singular_value(u) <= SIGMA_TOL:
        raise InputError("u must have full row rank (sigma_min > 1e-8)")
    bound = (m - n + 1) * _trace_inv_gram(u)
    if mode == "exhaustive":
        if comb(m, n) > EXHAUSTIVE_BUDGET:
            raise ResourceRefusal(f"C({m},{n}) subsets exceed the exhaustive budget")
        best = None
        for s in combinations(range(m), n):
            us = u[:, s]
            if smallest_singular_value(us) <= SIGMA_TOL:
                continue
            key = (_hs_inv_sq(us), s)
            if best is None or key < best:
                best = key
        if best is None:
            raise InputError("no invertible size-n column subset found")
        return ColumnSelection(best[1], best[0], bound, "exhaustive")
    if mode == "greedy":
        remaining = list(range(m))
        while len(remaining) > n:
            best_j = None
            best_tr = None
            for j in remaining:
                rest = [c for c in remaining if c != j]
                a = u[:, rest]
                if smallest_singular_value(a) <= SIGMA_TOL:
                    continue
                tr = _trace_inv_gram(a)
                if best_tr is None or tr < best_tr:
                    best_tr, best_j = tr, j
            if best_j is None:
                raise InputError("greedy removal stuck: every removal is singular")
            remaining.remove(best_j)
        s = tuple(remaining)
        return ColumnSelection(s, _hs_inv_sq(u[:, s]), bound, "greedy")
    raise InputError(f"unknown mode {mode!r}")


__all__ = ["ColumnSelection", "select_columns", "SIGMA_TOL", "EXHAUSTIVE_BUDGET"]
