"""Constructive small-ball radius for orthonormal-row images of a
Bernoulli vector.

Given a k x n matrix M with orthonormal rows and x with i.i.d. Ber(p)
coordinates, the pipeline produces a radius theta with
L(Mx, theta) <= (1-p)^k, via a two-case analysis:

* collect per row the indices of the floor(C^2 * 25^k / p) largest
  |M_ij| (ties by index order; capped at n), union them into T;
* Case I: some row keeps tail mass sum_{j not in T} M_ij^2 >= 4^-k, and
  a one-row LKR bound already spreads that row's sum;
* Case II: all tails are small, so U = M_T has Tr[(U U^T)^{-1}] < 2k
  and column selection yields S (|S| = k) with sigma_k(M_S) >=
  sqrt(p) / (2 C k 5^k); distinct Bernoulli patterns then map at least
  sigma_k apart, capping every small ball by the largest pattern mass
  (1-p)^k.

Either way the published radius is theta = sqrt(p) / (5 C k 5^k); the
Case I intermediate radius is recorded for transparency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .anticoncentration import (
    DEFAULT_LKR_CONSTANT,
    ENUMERATION_CAP,
    _check_orthonormal_rows,
    vector_levy_bracket,
)
from .errors import InputError, InvariantViolation
from .geometry import smallest_singular_value
from .matrix import Probability, _check_p
from .rinv import select_columns

TAIL_SLACK = 1e-9


@dataclass(frozen=True)
class ThetaCertificate:
    k: int
    n: int
    p: Probability
    C: float
    T_i: tuple  # per-row index tuples
    T: tuple  # sorted union
    case: str  # "I" | "II"
    theta: float
    caseI_row: Optional[int] = None
    caseI_radius: Optional[float] = None
    caseII_subset: Optional[tuple] = None
    caseII_sigma_k: Optional[float] = None
    caseII_trace_bound: Optional[float] = None
    caseII_hs_inv_sq: Optional[float] = None


@dataclass(frozen=True)
class ThetaVerification:
    upper: Probability  # certified upper bracket for L(Mx, theta)
    target: Probability  # (1-p)^k
    ok: bool


def top_set_size(k: int, n: int, p: Probability, C: float) -> int:
    return min(n, int(math.floor(C * C * 25.0**k / float(p))))


def build_top_index_sets(
    m: np.ndarray,
    p: Probability,
    C: float = DEFAULT_LKR_CONSTANT,
    size_override: Optional[int] = None,
) -> tuple[tuple, tuple]:
    """Per-row top-|entry| index sets and their union.

    ``size_override`` shrinks the per-row set size for tie-break and
    cap experiments; the production size is min(n, floor(C^2 25^k / p)).
    When the production size is used, every column outside the union
    must satisfy |M_ij| <= 5^-k sqrt(p) / C (a consequence of the rows
    having unit norm), and this is asserted.
    """
    m = np.asarray(m, dtype=float)
    _check_orthonormal_rows(m)
    p = _check_p(p)
    if C <= 0:
        raise InputError("C must be positive")
    k, n = m.shape
    size = top_set_size(k, n, p, C) if size_override is None else int(size_override)
    if not 1 <= size <= n:
        raise InputError(f"per-row set size must be in [1, {n}]")
    t_sets = []
    for i in range(k):
        order = np.argsort(-np.abs(m[i]), kind="stable")
        t_sets.append(tuple(sorted(int(j) for j in order[:size])))
    union = tuple(sorted(set().union(*map(set, t_sets))))
    if size_override is None and len(union) < n:
        tail_cap = 5.0 ** (-k) * math.sqrt(float(p)) / C + TAIL_SLACK
        outside = [j for j in range(n) if j not in set(union)]
        if np.max(np.abs(m[:, outside])) > tail_cap:
            raise InvariantViolation("tail entry above 5^-k sqrt(p)/C")
    return tuple(t_sets), union


def compute_theta(
    m: np.ndarray, p: Probability, C: float = DEFAULT_LKR_CONSTANT
) -> ThetaCertificate:
    """Run the two-case pipeline and emit a certificate.

    Case II failure to find a qualifying column subset contradicts the
    restricted-invertibility guarantee combined with the trace bound,
    so it raises InvariantViolation rather than returning.
    """
    m = np.asarray(m, dtype=float)
    _check_orthonormal_rows(m)
    p = _check_p(p)
    k, n = m.shape
    t_sets, union = build_top_index_sets(m, p, C)
    pf = float(p)
    theta = math.sqrt(pf) / (5.0 * C * k * 5.0**k)
    outside = [j for j in range(n) if j not in set(union)]
    tails = (
        np.sum(m[:, outside] ** 2, axis=1) if outside else np.zeros(k)
    )
    case_rows = np.nonzero(tails >= 4.0 ** (-k))[0]
    if case_rows.size:
        return ThetaCertificate(
            k, n, p, float(C), t_sets, union, "I", theta,
            caseI_row=int(case_rows[0]),
            caseI_radius=5.0 ** (-k) * math.sqrt(pf) / (3.0 * C),
        )
    u = m[:, list(union)]
    gram = u @ u.T
    trace_bound = float(np.trace(np.linalg.inv(gram)))
    if trace_bound >= 2.0 * k:
        raise InvariantViolation(
            f"Tr[(UU^T)^-1] = {trace_bound:.6g} >= 2k despite small tails"
        )
    hs_cap = 2.0 * C * C * k * k * 25.0**k / pf
    sel = select_columns(u, mode="exhaustive")
    if sel.hs_inv_sq > hs_cap * (1.0 + 1e-8):
        raise InvariantViolation(
            f"selected subset has ||M_S^-1||_HS^2 = {sel.hs_inv_sq:.6g} > {hs_cap:.6g}"
        )
    subset = tuple(union[j] for j in sel.subset)
    sigma = smallest_singular_value(m[:, list(subset)])
    sigma_floor = math.sqrt(pf) / (2.0 * C * k * 5.0**k)
    if sigma < sigma_floor * (1.0 - 1e-8):
        raise InvariantViolation(
            f"sigma_k(M_S) = {sigma:.6g} below floor {sigma_floor:.6g}"
        )
    return ThetaCertificate(
        k, n, p, float(C), t_sets, union, "II", theta,
        caseII_subset=subset,
        caseII_sigma_k=sigma,
        caseII_trace_bound=trace_bound,
        caseII_hs_inv_sq=sel.hs_inv_sq,
    )


def verify_theta(
    cert: ThetaCertificate, m: np.ndarray, p: Probability, cap: int = ENUMERATION_CAP
) -> ThetaVerification:
    """Check the certified radius against the (1-p)^k target.

    ``ok`` uses the upper end of the Levy bracket at radius theta; a
    False here with a valid certificate is a reportable finding (the
    2-theta recentering can overshoot the true concentration), not an
    assertion failure.
    """
    p = _check_p(p)
    _, upper = vector_levy_bracket(m, p, cert.theta, cap)
    if isinstance(p, Fraction):
        target = (1 - p) ** cert.k
    else:
        target = (1.0 - float(p)) ** cert.k
    return ThetaVerification(upper, target, bool(upper <= target))


__all__ = [
    "ThetaCertificate",
    "ThetaVerification",
    "build_top_index_sets",
    "compute_theta",
    "top_set_size",
    "verify_theta",
]
