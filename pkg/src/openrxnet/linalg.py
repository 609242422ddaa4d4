"""Exact linear algebra over the rationals.

Matrices are lists of :class:`fractions.Fraction` rows.  Sizes here are
tiny (boundary points and species of desk-scale networks), so clarity
beats asymptotics: plain Gauss-Jordan elimination throughout.
"""

from __future__ import annotations

from fractions import Fraction

Vector = tuple[Fraction, ...]
Matrix = list[list[Fraction]]


def _clone(rows) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows, ncols: int) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    m = _clone(rows)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = next((k for k in range(r, len(m)) if m[k][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        scale = m[r][c]
        m[r] = [x / scale for x in m[r]]
        for k in range(len(m)):
            if k != r and m[k][c] != 0:
                factor = m[k][c]
                m[k] = [a - factor * b for a, b in zip(m[k], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows, ncols: int) -> list[Vector]:
    """A basis of ``{x : rows @ x = 0}`` (free variables set to 1 in turn)."""
    reduced, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis: list[Vector] = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            vec[p] = -row[f]
        basis.append(tuple(vec))
    return basis


def solve_particular(rows, rhs) -> Vector | None:
    """One solution of ``rows @ x = rhs`` with free variables at 0, or None."""
    ncols = len(rows[0]) if rows else 0
    augmented = [list(row) + [Fraction(b)] for row, b in zip(rows, rhs)]
    reduced, pivots = rref(augmented, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(reduced, pivots):
        x[p] = row[-1]
    return tuple(x)


def span_rref(vectors, ncols: int) -> tuple[Vector, ...]:
    """Canonical (RREF) basis of the span of the given vectors.

    Two subspaces are equal iff their canonical bases are equal, so this
    doubles as the normal form for subspace comparison.
    """
    reduced, _ = rref(list(vectors), ncols)
    return tuple(tuple(row) for row in reduced)


def annihilator(vectors, ncols: int) -> list[Vector]:
    """Basis of the space of linear constraints vanishing on the span."""
    return nullspace(list(vectors), ncols)
