"""Exact and modular rank/nullspace backends.

Matrices are assembled as sparse rational rows (``dict[col] -> mpq``).  Small
systems go through fraction-free Bareiss elimination over the integers, which
is exact.  Larger systems use Gaussian elimination over Z/p on numpy int64
buffers for several primes from ``scalarfield.PRIMES``; a modular rank is a
lower bound on the rational rank, so a claim is *certified* only when at
least two primes agree on the maximum observed value (callers additionally
match theorem-predicted counts where available).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm
from typing import Callable, Iterable, Sequence

import numpy as np
from gmpy2 import mpq, mpz

from .scalarfield import MATMUL_CHUNK, PRIMES, BadPrimeError, mod_project

SparseRow = dict[int, "mpq"]


class UncertifiedRankError(RuntimeError):
    """No two primes agreed on a modular rank."""


@dataclass
class RankReport:
    ncols: int
    rank: int
    backend: str
    primes: tuple[int, ...] = ()
    expected: int | None = None

    @property
    def nullity(self) -> int:
        return self.ncols - self.rank

    @property
    def matches_expected(self) -> bool:
        return self.expected is None or self.rank == self.expected

    def __str__(self):
        exp = "" if self.expected is None else f", expected {self.expected}"
        return (
            f"rank {self.rank} of {self.ncols} cols via {self.backend}"
            f"{exp} (primes {list(self.primes)})"
        )


@dataclass
class RankConfig:
    bareiss_threshold: int = 400
    min_agree: int = 2
    primes: tuple[int, ...] = PRIMES


DEFAULT_CONFIG = RankConfig()


def _clear_row(row: SparseRow) -> dict[int, "mpz"]:
    if not row:
        return {}
    den = lcm(*[int(v.denominator) for v in row.values()])
    return {c: mpz(v * den) for c, v in row.items()}


def bareiss_rank(rows: Sequence[SparseRow], ncols: int) -> int:
    """Exact rank by fraction-free elimination on the integer-cleared matrix."""
    mat = []
    for row in rows:
        cleared = _clear_row(row)
        if cleared:
            mat.append([int(cleared.get(c, 0)) for c in range(ncols)])
    m = len(mat)
    if m == 0:
        return 0
    mat = [[mpz(x) for x in r] for r in mat]
    prev = mpz(1)
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, m) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        pr = mat[r]
        for i in range(r + 1, m):
            ri = mat[i]
            fi = ri[c]
            for j in range(c + 1, ncols):
                ri[j] = (pr[c] * ri[j] - fi * pr[j]) // prev
            ri[c] = mpz(0)
        prev = pr[c]
        r += 1
        if r == m:
            break
    return r


def rational_rref(rows: Sequence[SparseRow], ncols: int):
    """Reduced row echelon form over mpq.  Returns (pivot_cols, rref_rows)."""
    mat = [[mpq(row.get(c, 0)) for c in range(ncols)] for row in rows if row]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return pivots, mat[: len(pivots)]


def rational_nullspace(rows: Sequence[SparseRow], ncols: int) -> list[SparseRow]:
    """Exact rational nullspace basis (sparse vectors), one per free column."""
    pivots, rref = rational_rref(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        vec: SparseRow = {f: mpq(1)}
        for i, c in enumerate(pivots):
            v = rref[i][f]
            if v != 0:
                vec[c] = -v
        basis.append(vec)
    return basis


def rows_to_mod(rows: Sequence[SparseRow], ncols: int, p: int) -> np.ndarray:
    mat = np.zeros((len(rows), ncols), dtype=np.int64)
    for i, row in enumerate(rows):
        for c, v in row.items():
            mat[i, c] = mod_project(v, p)
    return mat


def mod_echelon(A: np.ndarray, p: int, reduced: bool = False):
    """In-place row echelon of an int64 matrix mod p; returns (rank, pivots)."""
    m, n = A.shape
    r = 0
    pivots: list[int] = []
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        a = int(A[r, c])
        if a != 1:
            A[r, c:] = A[r, c:] * pow(a, p - 2, p) % p
        if r + 1 < m:
            f = A[r + 1 :, c].copy()
            if np.any(f):
                block = A[r + 1 :, c:]
                block -= np.outer(f, A[r, c:])
                block %= p
        pivots.append(c)
        r += 1
    if reduced:
        for idx in range(len(pivots) - 1, 0, -1):
            c = pivots[idx]
            f = A[:idx, c].copy()
            if np.any(f):
                block = A[:idx, c:]
                block -= np.outer(f, A[idx, c:])
                block %= p
    return r, pivots


def mod_rank(A: np.ndarray, p: int) -> int:
    work = np.array(A, dtype=np.int64, copy=True)
    rank, _ = mod_echelon(work, p)
    return rank


def mod_nullspace(A: np.ndarray, p: int) -> np.ndarray:
    """Nullspace basis mod p, columns of the returned (ncols x nullity) array."""
    work = np.array(A, dtype=np.int64, copy=True)
    rank, pivots = mod_echelon(work, p, reduced=True)
    n = A.shape[1]
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        basis[f, j] = 1
        for i, c in enumerate(pivots):
            v = int(work[i, f])
            if v:
                basis[c, j] = (-v) % p
    return basis


def mod_matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Exact (A @ B) mod p with int64 accumulation, chunked on the inner dim."""
    k = A.shape[1]
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    step = int(MATMUL_CHUNK)
    for s in range(0, k, step):
        out += A[:, s : s + step] @ B[s : s + step, :]
        out %= p
    return out


def _usable_primes(config: RankConfig) -> tuple[int, ...]:
    return config.primes


def certify(
    compute: Callable[[int], int],
    config: RankConfig = DEFAULT_CONFIG,
    what: str = "rank",
) -> tuple[int, tuple[int, ...]]:
    """Run a per-prime integer-valued computation until two primes agree.

    Modular values are lower bounds, so agreement is sought on the maximum.
    Raises UncertifiedRankError with diagnostics when all primes disagree.
    """
    seen: dict[int, int] = {}
    for p in _usable_primes(config):
        try:
            seen[p] = compute(p)
        except BadPrimeError:
            continue
        best = max(seen.values())
        witnesses = tuple(q for q, v in seen.items() if v == best)
        if len(witnesses) >= config.min_agree:
            return best, witnesses
    raise UncertifiedRankError(f"no {config.min_agree}-prime agreement on {what}: {seen}")


def certified_rank(
    rows: Sequence[SparseRow],
    ncols: int,
    expected: int | None = None,
    config: RankConfig = DEFAULT_CONFIG,
    force_modular: bool = False,
) -> RankReport:
    """Rank of a sparse rational matrix with the configured certification."""
    rows = [r for r in rows if r]
    if not rows or ncols == 0:
        return RankReport(ncols=ncols, rank=0, backend="empty", expected=expected)
    if ncols <= config.bareiss_threshold and not force_modular:
        rank = bareiss_rank(rows, ncols)
        p = config.primes[0]
        try:
            crosscheck = mod_rank(rows_to_mod(rows, ncols, p), p)
        except BadPrimeError:
            crosscheck = rank
        if crosscheck > rank:
            raise UncertifiedRankError(
                f"modular rank {crosscheck} exceeds exact rank {rank}"
            )
        return RankReport(ncols, rank, "bareiss", (p,), expected)

    def compute(p: int) -> int:
        return mod_rank(rows_to_mod(rows, ncols, p), p)

    rank, primes = certify(compute, config)
    return RankReport(ncols, rank, "modular", primes, expected)


def stack_rows(*groups: Iterable[SparseRow]) -> list[SparseRow]:
    out: list[SparseRow] = []
    for g in groups:
        out.extend(g)
    return out
