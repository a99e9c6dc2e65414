"""Exact linear algebra over the rationals.

Everything here works on tuples of Fraction.  Subspaces are stored as
reduced row echelon bases, which makes equality and membership testing
canonical.  Dimensions stay small (a few hundred at most), so plain
dense Gaussian elimination is fine.
"""

from __future__ import annotations

from fractions import Fraction


def rref(rows):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    rows = [list(map(Fraction, r)) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        f = rows[rank][col]
        rows[rank] = [a / f for a in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                g = rows[r][col]
                rows[r] = [a - g * b for a, b in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(rows):
            break
    basis = [tuple(r) for r in rows[:rank]]
    return basis, pivots


class Subspace:
    """A linear subspace of Q^d in canonical (RREF basis) form."""

    __slots__ = ("ambient_dim", "basis", "pivots")

    def __init__(self, ambient_dim, vectors=()):
        self.ambient_dim = ambient_dim
        vectors = [tuple(map(Fraction, v)) for v in vectors]
        for v in vectors:
            if len(v) != ambient_dim:
                raise ValueError("vector length != ambient dimension")
        self.basis, self.pivots = rref(vectors)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        return (isinstance(other, Subspace)
                and self.ambient_dim == other.ambient_dim
                and self.basis == other.basis)

    def __hash__(self):
        return hash((self.ambient_dim, tuple(self.basis)))

    def __repr__(self):
        return f"Subspace(dim={self.dim} in Q^{self.ambient_dim})"

    def contains(self, vector) -> bool:
        """Membership test by reduction against the RREF basis."""
        v = list(map(Fraction, vector))
        if len(v) != self.ambient_dim:
            raise ValueError("vector length != ambient dimension")
        for row, piv in zip(self.basis, self.pivots):
            c = v[piv]
            if c != 0:
                v = [a - c * b for a, b in zip(v, row)]
        return all(a == 0 for a in v)

    def coordinates_of(self, vector):
        """Coefficients of vector in the RREF basis, or None."""
        v = list(map(Fraction, vector))
        coeffs = []
        for row, piv in zip(self.basis, self.pivots):
            c = v[piv]
            coeffs.append(c)
            if c != 0:
                v = [a - c * b for a, b in zip(v, row)]
        if any(a != 0 for a in v):
            return None
        return tuple(coeffs)

    def add(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimensions differ")
        return Subspace(self.ambient_dim, list(self.basis) + list(other.basis))

    def intersect(self, other: "Subspace") -> "Subspace":
        """Zassenhaus: row-reduce [[u|u],[w|0]]; intersection basis shows
        up in the right half of rows whose left half is zero."""
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimensions differ")
        d = self.ambient_dim
        zero = (Fraction(0),) * d
        block = [u + u for u in self.basis] + [w + zero for w in other.basis]
        reduced, _ = rref(block)
        inter = [row[d:] for row in reduced if all(a == 0 for a in row[:d])]
        return Subspace(d, inter)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)


def solve_linear(matrix_rows, rhs):
    """One solution of A x = b over Q, or None if inconsistent.

    matrix_rows is a list of rows of A; free variables are set to zero.
    """
    rows = [list(map(Fraction, r)) + [Fraction(b)]
            for r, b in zip(matrix_rows, rhs)]
    ncols = len(matrix_rows[0]) if matrix_rows else 0
    reduced, pivots = rref(rows)
    x = [Fraction(0)] * ncols
    for row, piv in zip(reduced, pivots):
        if piv == ncols:
            return None  # pivot in the rhs column: inconsistent
        x[piv] = row[-1]
    return tuple(x)
