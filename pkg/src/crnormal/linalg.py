"""Exact Gaussian elimination over the rationals and Gaussian rationals."""
from __future__ import annotations

from typing import Sequence

from gmpy2 import mpq

from .errors import InternalInvariantError, NonUniquenessError
from .scalars import ONE, ZERO, GaussianRational

__all__ = ["solve_sparse", "invert_matrix", "matmul"]


def solve_sparse(rows: Sequence[dict], rhs: Sequence[Sequence], ncols: int) -> list[list]:
    """Solve ``A x = b`` exactly for several right-hand sides at once.

    ``rows[i]`` maps column index to a nonzero rational; ``rhs[i]`` is the tuple of
    right-hand-side values of row ``i`` (one per system).  Rows may outnumber columns.
    Returns ``x[c][s]``.  Raises NonUniquenessError for rank deficiency and
    InternalInvariantError for an inconsistent system.
    """
    nrhs = len(rhs[0]) if rhs else 0
    pivots: dict[int, tuple[dict, list]] = {}
    for row, b in zip(rows, rhs):
        row = {c: mpq(v) for c, v in row.items() if v != 0}
        b = [mpq(v) for v in b]
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                inv = 1 / row[c]
                row = {k: v * inv for k, v in row.items()}
                b = [v * inv for v in b]
                pivots[c] = (row, b)
                break
            prow, pb = piv
            factor = row[c]
            for k, v in prow.items():
                nv = row.get(k, 0) - factor * v
                if nv == 0:
                    row.pop(k, None)
                else:
                    row[k] = nv
            b = [x - factor * y for x, y in zip(b, pb)]
        else:
            if any(v != 0 for v in b):
                raise InternalInvariantError("inconsistent linear system")
    missing = [c for c in range(ncols) if c not in pivots]
    if missing:
        raise NonUniquenessError(
            f"linear system has rank {len(pivots)} < {ncols} unknowns (free columns {missing[:8]})"
        )
    x: list[list] = [None] * ncols  # type: ignore[list-item]
    for c in range(ncols - 1, -1, -1):
        prow, pb = pivots[c]
        vals = list(pb)
        for k, v in prow.items():
            if k != c:
                xk = x[k]
                for s in range(nrhs):
                    vals[s] -= v * xk[s]
        x[c] = vals
    return x


def matmul(a: Sequence[Sequence[GaussianRational]], b: Sequence[Sequence[GaussianRational]]):
    return [
        [sum((a[i][k] * b[k][j] for k in range(len(b))), ZERO) for j in range(len(b[0]))]
        for i in range(len(a))
    ]


def invert_matrix(a: Sequence[Sequence]) -> list[list[GaussianRational]]:
    """Gauss-Jordan inverse of a square Gaussian-rational matrix; ZeroDivisionError if singular."""
    n = len(a)
    m = [[GaussianRational.coerce(v) for v in row] + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not m[r][col].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        inv = ONE / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and not m[r][col].is_zero():
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]
