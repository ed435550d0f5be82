"""Exact representation, sampling and rank computation for 0/1 matrices.

Rank over the rationals is computed by fraction-free (Bareiss)
elimination on Python integers, so no rounding can ever occur; rank
over a prime field is a cheap one-sided screen (it can only undercount
the rational rank).  Corank is always reported for the right kernel,
``cols - rank``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import InputError
from .rng import GENERATOR_VERSION, bernoulli_bits, generator

Probability = Union[Fraction, float]

# Mersenne prime 2^31 - 1, the fixed screening prime for fast corank
# decisions.  For an n x n 0/1 matrix every minor is bounded by the
# Hadamard bound n^(n/2), which stays below 2^31 - 1 for n <= 15, so up
# to that size the screen is provably exact, not just one-sided.
SCREEN_PRIME = 2_147_483_647


def _check_p(p: Probability) -> Probability:
    if isinstance(p, Fraction):
        if not Fraction(0) < p <= Fraction(1, 2):
            raise InputError(f"p must lie in (0, 1/2], got {p}")
        return p
    p = float(p)
    if not 0.0 < p <= 0.5:
        raise InputError(f"p must lie in (0, 1/2], got {p}")
    return p


@dataclass(frozen=True)
class BernoulliMatrix:
    """An m x n 0/1 matrix plus the sampling metadata that produced it."""

    rows: int
    cols: int
    entries: tuple  # row-major 0/1 ints, length rows * cols
    p: Probability
    seed: Optional[int] = None
    provenance: str = "explicit"  # "sampled" | "explicit"

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InputError("matrix dimensions must be at least 1 x 1")
        if len(self.entries) != self.rows * self.cols:
            raise InputError("entry count does not match rows * cols")
        if any(e not in (0, 1) for e in self.entries):
            raise InputError("entries must be 0 or 1")
        _check_p(self.p)
        if self.provenance not in ("sampled", "explicit"):
            raise InputError(f"unknown provenance {self.provenance!r}")

    def as_array(self) -> np.ndarray:
        a = np.array(self.entries, dtype=np.int64).reshape(self.rows, self.cols)
        a.setflags(write=False)
        return a

    def row_lists(self) -> list[list[int]]:
        e = self.entries
        c = self.cols
        return [list(e[i * c : (i + 1) * c]) for i in range(self.rows)]


@dataclass(frozen=True)
class RankResult:
    rank: int
    corank: int  # right-kernel dimension, cols - rank
    method: str  # "rational-elimination" | "modular"
    prime: Optional[int] = None


def from_entries(
    entries: Iterable[Iterable[int]], p: Probability = Fraction(1, 2)
) -> BernoulliMatrix:
    """Wrap explicit row data (list of rows) as a BernoulliMatrix."""
    rows = [list(r) for r in entries]
    if not rows:
        raise InputError("matrix needs at least one row")
    cols = len(rows[0])
    if any(len(r) != cols for r in rows):
        raise InputError("rows have unequal lengths")
    flat = tuple(int(v) for r in rows for v in r)
    return BernoulliMatrix(len(rows), cols, flat, p, None, "explicit")


def sample_matrix(rows: int, cols: int, p: Probability, seed: int) -> BernoulliMatrix:
    """Sample i.i.d. Ber(p) entries; a pure function of (rows, cols, p, seed)."""
    if rows < 1 or cols < 1:
        raise InputError("matrix dimensions must be at least 1 x 1")
    p = _check_p(p)
    bits = bernoulli_bits(generator(seed), (rows, cols), float(p))
    return BernoulliMatrix(rows, cols, tuple(int(b) for b in bits.ravel()), p, int(seed), "sampled")


def bareiss_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q of an integer matrix by fraction-free elimination.

    One-step Bareiss: every intermediate entry is (up to sign) a minor
    of the input, and each division by the previous pivot is exact.
    Python integers make overflow impossible by construction.  Pivot:
    first nonzero below the current row in column order; ties cannot
    occur in exact arithmetic.
    """
    m = [list(map(int, r)) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    rank = 0
    prev = 1
    for c in range(nc):
        piv = None
        for i in range(rank, nr):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != rank:
            m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][c]
        for i in range(rank + 1, nr):
            mic = m[i][c]
            row_i = m[i]
            row_r = m[rank]
            for j in range(c + 1, nc):
                row_i[j] = (row_i[j] * pv - mic * row_r[j]) // prev
            row_i[c] = 0
        prev = pv
        rank += 1
        if rank == nr:
            break
    return rank


def rank_rational(m: BernoulliMatrix) -> RankResult:
    """Exact rank over the rationals; corank reported for the right kernel."""
    r = bareiss_rank(m.row_lists())
    return RankResult(rank=r, corank=m.cols - r, method="rational-elimination")


def _is_prime(q: int) -> bool:
    # Deterministic Miller-Rabin, valid for all q < 3.3e24 with this base set.
    if q < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if q % sp == 0:
            return q == sp
    d, s = q - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, q)
        if x in (1, q - 1):
            continue
        for _ in range(s - 1):
            x = x * x % q
            if x == q - 1:
                break
        else:
            return False
    return True


def modular_rank(a: np.ndarray, q: int) -> int:
    """Rank of an integer matrix over F_q (q prime, q < 2^31)."""
    a = np.array(a, dtype=np.int64) % q
    nr, nc = a.shape
    rank = 0
    for c in range(nc):
        piv = None
        for i in range(rank, nr):
            if a[i, c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, c]), -1, q)
        a[rank] = a[rank] * inv % q
        col = a[rank + 1 :, c].copy()
        if col.any():
            # products stay below (q-1)^2 < 2^62, safe in int64
            a[rank + 1 :] = (a[rank + 1 :] - col[:, None] * a[rank][None, :]) % q
        rank += 1
        if rank == nr:
            break
    return rank


def rank_mod_prime(m: BernoulliMatrix, q: int) -> RankResult:
    """Rank over F_q; always <= the rational rank (fast screen only)."""
    if not _is_prime(q):
        raise InputError(f"{q} is not prime")
    r = modular_rank(m.as_array(), q)
    return RankResult(rank=r, corank=m.cols - r, method="modular", prime=q)


def corank_at_least(rows: Sequence[Sequence[int]], k: int) -> bool:
    """Decide corank >= k exactly: modular screen, rational confirmation.

    The screen is one-sided (modular rank <= rational rank), so a
    matrix screened full enough is rejected without exact work and no
    false decision can enter either way.
    """
    n_cols = len(rows[0])
    if k <= 0:
        return True
    if k > n_cols:
        return False
    if modular_rank(np.asarray(rows, dtype=np.int64), SCREEN_PRIME) > n_cols - k:
        return False
    return bareiss_rank(rows) <= n_cols - k


def to_text(m: BernoulliMatrix) -> str:
    """Text format: first line "rows cols", then one 0/1 string per row."""
    e = m.entries
    c = m.cols
    lines = [f"{m.rows} {m.cols}"]
    lines += ["".join(str(v) for v in e[i * c : (i + 1) * c]) for i in range(m.rows)]
    return "\n".join(lines) + "\n"


def from_text(text: str, p: Probability = Fraction(1, 2)) -> BernoulliMatrix:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty matrix text")
    head = lines[0].split()
    if len(head) != 2:
        raise InputError('matrix text must start with a "rows cols" line')
    try:
        rows, cols = int(head[0]), int(head[1])
    except ValueError as exc:
        raise InputError("rows/cols must be integers") from exc
    if len(lines) - 1 != rows:
        raise InputError(f"expected {rows} data lines, got {len(lines) - 1}")
    flat: list[int] = []
    for ln in lines[1:]:
        if len(ln) != cols or any(ch not in "01" for ch in ln):
            raise InputError(f"bad matrix row {ln!r}")
        flat.extend(int(ch) for ch in ln)
    return BernoulliMatrix(rows, cols, tuple(flat), p, None, "explicit")


__all__ = [
    "BernoulliMatrix",
    "RankResult",
    "GENERATOR_VERSION",
    "SCREEN_PRIME",
    "bareiss_rank",
    "corank_at_least",
    "from_entries",
    "from_text",
    "modular_rank",
    "rank_mod_prime",
    "rank_rational",
    "sample_matrix",
    "to_text",
]
