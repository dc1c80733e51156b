"""
Rank and nullspace of integer interpolation matrices.

The modular rank (numpy, int64, prime below 2^31 so products stay below
2^62) never exceeds the rank over Q, so a full modular rank already
certifies that the nullspace is trivial. Nonzero nullspaces are confirmed
by exact elimination over QQ with ``sympy``'s DomainMatrix.
"""

import logging
import math
from fractions import Fraction
from typing import List, Sequence

import numpy as np
from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)


def to_mod_array(rows: Sequence[Sequence[int]], ncols: int, p: int) -> np.ndarray:
    if not rows:
        return np.zeros((0, ncols), dtype=np.int64)
    return np.array([[v % p for v in row] for row in rows], dtype=np.int64)


def rank_mod(A: np.ndarray, p: int) -> int:
    """Rank over GF(p) by Gaussian elimination."""
    A = np.asarray(A % p, dtype=np.int64).copy()
    m, n = A.shape
    rank = 0
    for col in range(n):
        if rank == m:
            break
        nz = np.nonzero(A[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        inv = pow(int(A[rank, col]), p - 2, p)
        A[rank] = (A[rank] * inv) % p
        below = A[rank + 1 :, col]
        targets = np.nonzero(below)[0]
        if targets.size:
            rows = rank + 1 + targets
            A[rows] = (A[rows] - (np.outer(A[rows, col], A[rank]) % p)) % p
        rank += 1
    return rank


def _domain_matrix(rows: Sequence[Sequence[int]], ncols: int) -> DomainMatrix:
    data = [[ZZ(int(v)) for v in row] for row in rows]
    return DomainMatrix(data, (len(rows), ncols), ZZ).convert_to(QQ)


def exact_rank(rows: Sequence[Sequence[int]], ncols: int) -> int:
    if not rows:
        return 0
    return int(_domain_matrix(rows, ncols).rank())


def exact_nullspace(rows: Sequence[Sequence[int]], ncols: int) -> List[List[Fraction]]:
    """Basis of the right nullspace over Q, one vector per entry."""
    if not rows:
        basis = []
        for j in range(ncols):
            vec = [Fraction(0)] * ncols
            vec[j] = Fraction(1)
            basis.append(vec)
        return basis
    null = _domain_matrix(rows, ncols).nullspace()
    out = []
    for vec in null.to_list():
        out.append([Fraction(int(QQ.numer(c)), int(QQ.denom(c))) for c in vec])
    logger.debug(f"exact nullspace: {len(rows)}x{ncols} -> dimension {len(out)}")
    return out


def rational_rows_to_integer(rows: Sequence[Sequence[Fraction]]) -> List[List[int]]:
    """Clear denominators row by row (rank and nullspace are unchanged)."""
    out = []
    for row in rows:
        lcm = 1
        for v in row:
            den = Fraction(v).denominator
            lcm = math.lcm(lcm, den)
        out.append([int(Fraction(v) * lcm) for v in row])
    return out
