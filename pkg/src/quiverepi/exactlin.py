"""Exact scalars and dense linear algebra over QQ and GF(p).

Scalars are plain Python values (fractions.Fraction for QQ, canonical
residues 0..p-1 for GF(p)); a Field object supplies the arithmetic so the
same matrix code runs over either field.  Everything is exact: no floats,
no pivoting heuristics.  The elimination pivot rule is fixed (first nonzero
entry scanning rows top to bottom, columns left to right) so every result
is deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


class NonSquare(Exception):
    """Raised when a square matrix was required."""


class NotInvertible(Exception):
    """Raised by solve_or_invert on singular input."""


class NotIdempotentFamily(Exception):
    """Raised when an alleged orthogonal idempotent family fails a check."""


class RationalField:
    """The field QQ; values are fractions.Fraction in lowest terms."""

    name = "q"

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into QQ")

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in QQ")
        return a / b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in QQ")
        return 1 / Fraction(a)

    def is_zero(self, a):
        return a == 0

    def to_str(self, a):
        return str(a)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("q")

    def __repr__(self):
        return "QQ"


class PrimeField:
    """The field GF(p) for a prime p; values are ints in [0, p)."""

    def __init__(self, p: int):
        if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.name = f"fp:{p}"

    def coerce(self, x):
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            return self.mul(x.numerator % self.p, self.inv(x.denominator % self.p))
        if isinstance(x, str):
            return self.coerce(Fraction(x))
        raise TypeError(f"cannot coerce {x!r} into GF({self.p})")

    def zero(self):
        return 0

    def one(self):
        return 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"inverse of zero in GF({self.p})")
        return pow(a, self.p - 2, self.p)

    def is_zero(self, a):
        return a % self.p == 0

    def to_str(self, a):
        return str(a % self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("fp", self.p))

    def __repr__(self):
        return f"GF({self.p})"


QQ = RationalField()

_prime_fields: dict[int, PrimeField] = {}


def GF(p: int) -> PrimeField:
    if p not in _prime_fields:
        _prime_fields[p] = PrimeField(p)
    return _prime_fields[p]


def parse_field(spec: str):
    """Parse a field spec: "q" for QQ, "fp:<p>" for GF(p)."""
    if spec == "q":
        return QQ
    if spec.startswith("fp:"):
        return GF(int(spec[3:]))
    raise ValueError(f"unknown field spec {spec!r} (expected 'q' or 'fp:<p>')")


class ExactMatrix:
    """Dense matrix over an exact field, immutable after construction.

    0xN and Nx0 matrices are valid and behave as the empty map; products
    with an inner dimension of zero are zero matrices.
    """

    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field, entries: Sequence[Sequence], cols: int | None = None):
        self.field = field
        rows = [tuple(field.coerce(x) for x in row) for row in entries]
        self.rows = len(rows)
        if self.rows:
            self.cols = len(rows[0])
            if any(len(r) != self.cols for r in rows):
                raise ValueError("ragged rows in matrix literal")
        else:
            self.cols = 0 if cols is None else cols
        if cols is not None and self.cols != cols:
            raise ValueError(f"expected {cols} columns, got {self.cols}")
        self.entries = tuple(rows)

    @classmethod
    def zeros(cls, field, rows: int, cols: int) -> "ExactMatrix":
        z = field.zero()
        return cls(field, [[z] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, field, n: int) -> "ExactMatrix":
        z, o = field.zero(), field.one()
        return cls(field, [[o if i == j else z for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_columns(cls, field, columns: Sequence[Sequence], rows: int) -> "ExactMatrix":
        cols = len(columns)
        return cls(field, [[columns[j][i] for j in range(cols)] for i in range(rows)], cols=cols)

    def entry(self, i: int, j: int):
        return self.entries[i][j]

    def column(self, j: int) -> list:
        return [self.entries[i][j] for i in range(self.rows)]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        f = self.field
        return all(f.is_zero(x) for row in self.entries for x in row)

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.field == other.field
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.field, self.rows, self.cols, self.entries))

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_shape(other)
        f = self.field
        return ExactMatrix(
            f,
            [
                [f.add(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
            cols=self.cols,
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_shape(other)
        f = self.field
        return ExactMatrix(
            f,
            [
                [f.sub(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
            cols=self.cols,
        )

    def __neg__(self) -> "ExactMatrix":
        f = self.field
        return ExactMatrix(f, [[f.neg(x) for x in row] for row in self.entries], cols=self.cols)

    def __mul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.field != other.field:
            raise ValueError("product across different fields")
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} * {other.rows}x{other.cols}")
        f = self.field
        z = f.zero()
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = z
                for k in range(self.cols):
                    acc = f.add(acc, f.mul(self.entries[i][k], other.entries[k][j]))
                row.append(acc)
            out.append(row)
        return ExactMatrix(f, out, cols=other.cols)

    def scale(self, c) -> "ExactMatrix":
        f = self.field
        c = f.coerce(c)
        return ExactMatrix(f, [[f.mul(c, x) for x in row] for row in self.entries], cols=self.cols)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.field,
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows,
        )

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows:
            raise ValueError("hstack row mismatch")
        if self.field != other.field:
            raise ValueError("hstack across different fields")
        return ExactMatrix(
            self.field,
            [list(a) + list(b) for a, b in zip(self.entries, other.entries)],
            cols=self.cols + other.cols,
        )

    def submatrix(self, row_idx: Iterable[int], col_idx: Iterable[int]) -> "ExactMatrix":
        ri, ci = list(row_idx), list(col_idx)
        return ExactMatrix(
            self.field, [[self.entries[i][j] for j in ci] for i in ri], cols=len(ci)
        )

    def convert(self, field) -> "ExactMatrix":
        """Coerce entries into another exact field (e.g. QQ -> GF(p))."""
        return ExactMatrix(field, [[field.coerce(x) for x in row] for row in self.entries], cols=self.cols)

    def _check_same_shape(self, other: "ExactMatrix"):
        if self.field != other.field:
            raise ValueError("operation across different fields")
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError(
                f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def __repr__(self):
        body = "; ".join(" ".join(self.field.to_str(x) for x in row) for row in self.entries)
        return f"ExactMatrix({self.rows}x{self.cols}: {body})"


def rref(m: ExactMatrix) -> tuple[ExactMatrix, list[int]]:
    """Reduced row echelon form and pivot column list (fixed pivot rule)."""
    f = m.field
    a = [list(row) for row in m.entries]
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        pivot_row = -1
        for i in range(r, m.rows):
            if not f.is_zero(a[i][c]):
                pivot_row = i
                break
        if pivot_row < 0:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        inv = f.inv(a[r][c])
        a[r] = [f.mul(inv, x) for x in a[r]]
        for i in range(m.rows):
            if i != r and not f.is_zero(a[i][c]):
                factor = a[i][c]
                a[i] = [f.sub(x, f.mul(factor, y)) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m.rows:
            break
    return ExactMatrix(f, a, cols=m.cols), pivots


def rank(m: ExactMatrix) -> int:
    """Row rank, by exact Gaussian elimination."""
    return len(rref(m)[1])


def nullspace_basis(m: ExactMatrix) -> list[ExactMatrix]:
    """Basis of {x : m x = 0} as a list of column vectors (cols x 1).

    One basis vector per free column, with the pivot entries
    back-substituted from the RREF; each vector is normalized so its first
    nonzero entry is 1, and the basis size is cols - rank(m) exactly.
    """
    f = m.field
    reduced, pivots = rref(m)
    pivot_set = set(pivots)
    free_cols = [j for j in range(m.cols) if j not in pivot_set]
    basis = []
    for fc in free_cols:
        v = [f.zero()] * m.cols
        v[fc] = f.one()
        for r, pc in enumerate(pivots):
            v[pc] = f.neg(reduced.entries[r][fc])
        lead = next(x for x in v if not f.is_zero(x))
        inv = f.inv(lead)
        v = [f.mul(inv, x) for x in v]
        basis.append(ExactMatrix(f, [[x] for x in v], cols=1))
    return basis


def column_space_basis(m: ExactMatrix) -> list[ExactMatrix]:
    """Basis of the column space: the original columns at the pivot indices."""
    _, pivots = rref(m)
    return [ExactMatrix(m.field, [[x] for x in m.column(j)], cols=1) for j in pivots]


def solve_or_invert(m: ExactMatrix) -> ExactMatrix:
    """Exact inverse of a square matrix.

    Raises NonSquare when rows != cols and NotInvertible when the rank is
    deficient.
    """
    if not m.is_square():
        raise NonSquare(f"cannot invert a {m.rows}x{m.cols} matrix")
    f = m.field
    n = m.rows
    aug = [list(row) + [f.one() if i == j else f.zero() for j in range(n)]
           for i, row in enumerate(m.entries)]
    r = 0
    for c in range(n):
        pivot_row = -1
        for i in range(r, n):
            if not f.is_zero(aug[i][c]):
                pivot_row = i
                break
        if pivot_row < 0:
            raise NotInvertible(f"matrix has rank < {n}")
        aug[r], aug[pivot_row] = aug[pivot_row], aug[r]
        inv = f.inv(aug[r][c])
        aug[r] = [f.mul(inv, x) for x in aug[r]]
        for i in range(n):
            if i != r and not f.is_zero(aug[i][c]):
                factor = aug[i][c]
                aug[i] = [f.sub(x, f.mul(factor, y)) for x, y in zip(aug[i], aug[r])]
        r += 1
    return ExactMatrix(f, [row[n:] for row in aug], cols=n)


def idempotent_diagonalize(idems: Sequence[ExactMatrix]) -> tuple[ExactMatrix, list[int]]:
    """Conjugate a full orthogonal idempotent family to 0/1 block diagonals.

    Given n x n matrices E_1..E_m with E_i^2 = E_i, E_i E_j = 0 for i != j
    and sum E_i = I, returns (U, block_ranks) with U invertible such that
    U^-1 E_i U is the 0/1 diagonal matrix whose identity block of size
    block_ranks[i] sits at the i-th consecutive block position.  The columns
    of U are the concatenated column-space bases of the E_i (pivot-column
    bases, so the output is deterministic); rank-0 summands contribute
    zero-width column groups.

    Raises NotIdempotentFamily naming the first violated precondition.
    """
    if not idems:
        raise NotIdempotentFamily("empty idempotent family")
    n = idems[0].rows
    field = idems[0].field
    for k, e in enumerate(idems):
        if e.rows != n or e.cols != n:
            raise NotIdempotentFamily(
                f"matrix {k} is {e.rows}x{e.cols}, expected {n}x{n}"
            )
        if e.field != field:
            raise NotIdempotentFamily(f"matrix {k} lives over a different field")
        if e * e != e:
            raise NotIdempotentFamily(f"matrix {k} is not idempotent")
    for i in range(len(idems)):
        for j in range(len(idems)):
            if i != j and not (idems[i] * idems[j]).is_zero():
                raise NotIdempotentFamily(f"matrices {i} and {j} are not orthogonal")
    total = idems[0]
    for e in idems[1:]:
        total = total + e
    if total != ExactMatrix.identity(field, n):
        raise NotIdempotentFamily("family does not sum to the identity")

    columns: list[list] = []
    block_ranks = []
    for e in idems:
        basis = column_space_basis(e)
        block_ranks.append(len(basis))
        for v in basis:
            columns.append(v.column(0))
    u = ExactMatrix.from_columns(field, columns, n)
    return u, block_ranks
