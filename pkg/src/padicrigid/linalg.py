"""Exact linear algebra over the rationals.

Provides the small dense :class:`MatrixQ` (exact Fraction entries), the
Jordan decomposition for matrices whose spectrum is rational, the block
data type :class:`JordanType`, centralizer dimension counts, and the
induced exponent multiset of the endomorphism object.

Jordan computation factors the characteristic polynomial over Q by the
rational root theorem; an irrational spectrum is an input error here,
never a fallback path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, InconsistencyError
from .padics import parse_rational


class MatrixQ:
    """Immutable square matrix with exact rational entries."""

    __slots__ = ("rows", "n")

    def __init__(self, rows):
        self.rows = tuple(tuple(Fraction(v) for v in row) for row in rows)
        self.n = len(self.rows)
        for row in self.rows:
            if len(row) != self.n:
                raise InputError("matrix must be square")

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, n):
        return cls([[0] * n for _ in range(n)])

    @classmethod
    def parse(cls, rows):
        return cls([[parse_rational(v) for v in row] for row in rows])

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def __add__(self, other):
        return MatrixQ(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ]
        )

    def __sub__(self, other):
        return MatrixQ(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ]
        )

    def __mul__(self, other):
        if isinstance(other, MatrixQ):
            n = self.n
            return MatrixQ(
                [
                    [
                        sum(self.rows[i][k] * other.rows[k][j] for k in range(n))
                        for j in range(n)
                    ]
                    for i in range(n)
                ]
            )
        return MatrixQ([[v * other for v in row] for row in self.rows])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        return isinstance(other, MatrixQ) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def apply(self, vec):
        return tuple(
            sum(r * v for r, v in zip(row, vec)) for row in self.rows
        )

    def transpose(self):
        return MatrixQ(list(zip(*self.rows)))

    def trace(self):
        return sum(self.rows[i][i] for i in range(self.n))

    def is_zero(self):
        return all(v == 0 for row in self.rows for v in row)

    def power(self, k):
        out = MatrixQ.identity(self.n)
        for _ in range(k):
            out = out * self
        return out

    def inverse(self):
        n = self.n
        work = [
            list(row) + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(self.rows)
        ]
        for col in range(n):
            pivot = next(
                (r for r in range(col, n) if work[r][col] != 0), None
            )
            if pivot is None:
                raise InputError("matrix is singular")
            work[col], work[pivot] = work[pivot], work[col]
            inv = 1 / work[col][col]
            work[col] = [v * inv for v in work[col]]
            for r in range(n):
                if r != col and work[r][col] != 0:
                    f = work[r][col]
                    work[r] = [a - f * b for a, b in zip(work[r], work[col])]
        return MatrixQ([row[n:] for row in work])

    def charpoly(self):
        """Coefficients [c_0, ..., c_n] of det(xI - A), Faddeev-LeVerrier."""
        n = self.n
        coeffs = [Fraction(0)] * (n + 1)
        coeffs[n] = Fraction(1)
        b = MatrixQ.identity(n)
        for k in range(1, n + 1):
            m = self * b
            c = -m.trace() / k
            coeffs[n - k] = c
            b = m + c * MatrixQ.identity(n)
        return coeffs

    def __str__(self):
        return "[" + ", ".join(
            "[" + ", ".join(str(v) for v in row) + "]" for row in self.rows
        ) + "]"

    __repr__ = __str__


def rref(rows):
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    rows = [list(r) for r in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next(
            (i for i in range(r, len(rows)) if rows[i][c] != 0), None
        )
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def nullspace(rows, ncols):
    """Basis of the kernel of the linear map given by ``rows``."""
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for r, p in enumerate(pivots):
            vec[p] = -reduced[r][f]
        basis.append(tuple(vec))
    return basis


def rational_roots(coeffs):
    """Rational roots with multiplicity of sum c_k x^k, by root theorem."""
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise InputError("zero polynomial")
    scale = math.lcm(*(c.denominator for c in coeffs))
    ints = [int(c * scale) for c in coeffs]
    g = math.gcd(*ints)
    ints = [c // g for c in ints]

    def divisors(n):
        n = abs(n)
        out = set()
        d = 1
        while d * d <= n:
            if n % d == 0:
                out.update((d, n // d))
            d += 1
        return out

    def eval_at(poly, x):
        acc = Fraction(0)
        for c in reversed(poly):
            acc = acc * x + c
        return acc

    def deflate(poly, root):
        # synthetic division by (x - root); remainder is zero by choice of root
        d = len(poly) - 1
        quot = [Fraction(0)] * d
        carry = poly[d]
        for i in range(d - 1, -1, -1):
            quot[i] = carry
            carry = poly[i] + root * carry
        return quot

    roots = {}
    poly = [Fraction(c) for c in ints]
    while len(poly) > 1:
        if poly[0] == 0:
            roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
            poly = poly[1:]
            continue
        found = None
        for num in sorted(divisors(int(poly[0]))):
            for den in sorted(divisors(int(poly[-1]))):
                for sign in (1, -1):
                    cand = Fraction(sign * num, den)
                    if eval_at(poly, cand) == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots[found] = roots.get(found, 0) + 1
        poly = deflate(poly, found)
    degree_left = len(poly) - 1
    return roots, degree_left


@dataclass(frozen=True)
class JordanType:
    """Eigenvalues with block sizes, in canonical order.

    Canonical order: eigenvalues ascending, sizes descending within an
    eigenvalue.  Total size is the ambient rank.
    """

    blocks: tuple

    def __init__(self, blocks):
        blocks = tuple(
            (Fraction(ev), int(size)) for ev, size in blocks
        )
        if any(size < 1 for _, size in blocks):
            raise InputError("Jordan block sizes must be >= 1")
        object.__setattr__(
            self,
            "blocks",
            tuple(sorted(blocks, key=lambda b: (b[0], -b[1]))),
        )

    @property
    def rank(self):
        return sum(size for _, size in self.blocks)

    def eigenvalues(self):
        """Eigenvalues with algebraic multiplicity (one per dimension)."""
        return [ev for ev, size in self.blocks for _ in range(size)]

    def distinct_eigenvalues(self):
        return sorted({ev for ev, _ in self.blocks})

    def matrix(self):
        """The Jordan matrix realization (1s on the superdiagonal)."""
        n = self.rank
        rows = [[Fraction(0)] * n for _ in range(n)]
        pos = 0
        for ev, size in self.blocks:
            for i in range(size):
                rows[pos + i][pos + i] = ev
                if i + 1 < size:
                    rows[pos + i][pos + i + 1] = Fraction(1)
            pos += size
        return MatrixQ(rows)

    def is_resonant(self):
        """Two blocks whose eigenvalues differ by a nonzero integer."""
        evs = self.distinct_eigenvalues()
        return any(
            (a - b).denominator == 1 and a != b
            for a, b in itertools.combinations(evs, 2)
        )

    def __str__(self):
        groups = {}
        for ev, size in self.blocks:
            groups.setdefault(ev, []).append(size)
        return "".join(
            f"({ev}: {','.join(str(s) for s in sizes)})"
            for ev, sizes in sorted(groups.items())
        )


def jordan_form(matrix):
    """(JordanType, T) with T invertible and T^-1 A T the Jordan matrix.

    Requires the characteristic polynomial to split over Q; otherwise a
    "non-rational spectrum" error is raised (such inputs violate the
    rational-exponent hypothesis upstream).
    """
    n = matrix.n
    roots, left = rational_roots(matrix.charpoly())
    if left != 0 or sum(roots.values()) != n:
        raise InputError(
            "non-rational spectrum: characteristic polynomial does not "
            "split over the rationals"
        )
    blocks = []
    columns = []
    for ev in sorted(roots):
        mult = roots[ev]
        m = matrix - ev * MatrixQ.identity(n)
        powers = [MatrixQ.identity(n)]
        kernels = [[]]
        # kernel filtration of (A - ev)^j until it saturates
        while True:
            powers.append(powers[-1] * m)
            kernels.append(nullspace(powers[-1].rows, n))
            if len(kernels[-1]) == mult:
                break
            if len(powers) > n + 1:
                raise InconsistencyError("kernel filtration failed to saturate")
        s = len(kernels) - 1

        # chain tops per level, longest chains first
        chains = []
        for j in range(s, 0, -1):
            span_j = _SpanTracker(n)
            for vec in kernels[j - 1]:
                span_j.add(vec)
            inherited = []
            for top, length in chains:
                if length > j:
                    inherited.append(powers[length - j].apply(top))
            for vec in inherited:
                span_j.add(vec)
            for vec in kernels[j]:
                if span_j.add(vec):
                    chains.append((vec, j))
        for top, length in chains:
            blocks.append((ev, length))
            for i in range(length - 1, -1, -1):
                columns.append(powers[i].apply(top))

    jtype = JordanType(blocks)
    # re-order columns to match the canonical block order
    order = sorted(
        range(len(blocks)), key=lambda i: (blocks[i][0], -blocks[i][1])
    )
    sizes = [b[1] for b in blocks]
    offsets = [sum(sizes[:i]) for i in range(len(blocks))]
    permuted = []
    for i in order:
        permuted.extend(columns[offsets[i] : offsets[i] + sizes[i]])
    transform = MatrixQ(list(zip(*permuted)))
    return jtype, transform


class _SpanTracker:
    """Incremental rational span membership via running row reduction."""

    def __init__(self, dim):
        self.dim = dim
        self.rows = []  # reduced rows with leading-1 pivots
        self.pivots = []

    def add(self, vec):
        """Insert vec; True iff it enlarged the span."""
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            if v[p] != 0:
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        pivot = next((i for i, a in enumerate(v) if a != 0), None)
        if pivot is None:
            return False
        inv = 1 / v[pivot]
        v = [a * inv for a in v]
        self.rows.append(v)
        self.pivots.append(pivot)
        return True


def _eigenvalue_classes(jtype, mode):
    """Group block eigenvalues: equal, or equal mod Z in mode mod-integers."""
    if mode not in ("exact", "mod-integers"):
        raise InputError(f"unknown centralizer mode {mode!r}")
    classes = {}
    for ev, size in jtype.blocks:
        key = ev if mode == "exact" else ev - math.floor(ev)
        classes.setdefault(key, []).append(size)
    return classes


def centralizer_dim(jtype, mode="exact"):
    """Dimension of the commutant of the Jordan realization.

    Blocks with equivalent eigenvalues contribute min(size_i, size_j)
    per ordered pair; in mode "mod-integers" eigenvalues differing by an
    integer are equivalent (their monodromy eigenvalues coincide).
    """
    total = 0
    for sizes in _eigenvalue_classes(jtype, mode).values():
        total += sum(min(a, b) for a in sizes for b in sizes)
    return total


def end_exponents(exponents):
    """Multiset of pairwise differences (n^2 of them, i = j included)."""
    exponents = [Fraction(e) for e in exponents]
    if not exponents:
        raise InputError("end_exponents of an empty list")
    return [a - b for a in exponents for b in exponents]
