"""Exact dense matrices over the rationals or the Laurent scalars.

Everything here is immutable and pure.  Sizes stay at desk scale (at most
a few tens of rows), so the algorithms favour exactness and clarity:

* rank over Q: ordinary Gaussian elimination with Fraction pivots;
* rank over Q(e): fraction-free Bareiss elimination on Laurent-polynomial
  entries (rows are first scaled by e^(-min exponent) so every entry is an
  ordinary polynomial; the Bareiss division by the previous pivot is then
  exact and intermediates never leave the ring);
* inverse over Q: Gauss-Jordan; over the Laurent scalars: adjugate over
  determinant, rejecting inverses whose entries fall outside the ring.
"""

from fractions import Fraction

from .scalars import Laurent, as_laurent, is_zero


class Matrix:
    """Immutable dense matrix; entries are Fraction or Laurent scalars."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data):
        data = tuple(tuple(row) for row in data)
        if not data or not data[0]:
            raise ValueError("matrix needs at least one row and one column")
        if any(len(row) != len(data[0]) for row in data):
            raise ValueError("ragged rows")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "rows", len(data))
        object.__setattr__(self, "cols", len(data[0]))

    def __setattr__(self, name, value):
        raise AttributeError("matrices are immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zeros(rows, cols, zero=Fraction(0)):
        return Matrix([[zero] * cols for _ in range(rows)])

    @staticmethod
    def identity(n, one=Fraction(1), zero=Fraction(0)):
        return Matrix([[one if i == j else zero for j in range(n)] for i in range(n)])

    @staticmethod
    def unit(rows, cols, i, j, value=Fraction(1), zero=Fraction(0)):
        """Single nonzero entry at 0-based (i, j)."""
        return Matrix(
            [[value if (r, c) == (i, j) else zero for c in range(cols)] for r in range(rows)]
        )

    # -- basic structure ----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(
            a == b for ra, rb in zip(self.data, other.data) for a, b in zip(ra, rb)
        )

    def __hash__(self):
        return hash(self.data)

    def __getitem__(self, key):
        i, j = key
        return self.data[i][j]

    def __repr__(self):
        return "Matrix(%r)" % (list(map(list, self.data)),)

    def is_zero(self):
        return all(is_zero(x) for row in self.data for x in row)

    def nonzero_entries(self):
        """Yield (i, j, value) over nonzero entries, row-major."""
        for i, row in enumerate(self.data):
            for j, x in enumerate(row):
                if not is_zero(x):
                    yield i, j, x

    def has_laurent(self):
        return any(isinstance(x, Laurent) for row in self.data for x in row)

    def map(self, fn):
        return Matrix([[fn(x) for x in row] for row in self.data])

    def lifted(self):
        """Copy with every entry lifted to a Laurent scalar."""
        return self.map(as_laurent)

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        self._check_same_shape(other)
        return Matrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ]
        )

    def __sub__(self, other):
        self._check_same_shape(other)
        return Matrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ]
        )

    def __neg__(self):
        return self.map(lambda x: -x)

    def scale(self, s):
        return self.map(lambda x: s * x)

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(
                "shape mismatch for product: %dx%d @ %dx%d"
                % (self.rows, self.cols, other.rows, other.cols)
            )
        ot = other.transpose()
        return Matrix(
            [
                [_dot(row, col) for col in ot.data]
                for row in self.data
            ]
        )

    def transpose(self):
        return Matrix(list(zip(*self.data)))

    def frobenius_inner(self, other):
        """<M, N> = Trace(M^T N) = entrywise product sum."""
        self._check_same_shape(other)
        total = None
        for ra, rb in zip(self.data, other.data):
            for a, b in zip(ra, rb):
                total = a * b if total is None else total + a * b
        return total

    def kron(self, other):
        """Kronecker product; big row index = (outer row)*(inner rows) + inner row."""
        out = []
        for ra in self.data:
            for rb in other.data:
                out.append([a * b for a in ra for b in rb])
        return Matrix(out)

    def _check_same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError(
                "shape mismatch: %dx%d vs %dx%d"
                % (self.rows, self.cols, other.rows, other.cols)
            )

    # -- elimination ------------------------------------------------------------

    def rank(self):
        """Exact rank over Q (rational entries) or over the field Q(e)."""
        if self.has_laurent():
            return _rank_laurent(self)
        return _rank_rational(self)

    def inverse(self):
        """Exact inverse of a square matrix.

        Raises ValueError when singular, and for Laurent entries also when
        the inverse exists over Q(e) but leaves the Laurent-polynomial ring.
        """
        if self.rows != self.cols:
            raise ValueError("only square matrices invert")
        if self.has_laurent():
            return _inverse_laurent(self)
        return _inverse_rational(self)

    def determinant(self):
        if self.rows != self.cols:
            raise ValueError("determinant needs a square matrix")
        if self.has_laurent():
            return _bareiss_determinant(_cleared_polynomial_rows(self)[0])
        return _det_rational(self)


def _dot(row, col):
    total = None
    for a, b in zip(row, col):
        total = a * b if total is None else total + a * b
    return total


# -- rational elimination ----------------------------------------------------


def _rank_rational(m):
    a = [list(row) for row in m.data]
    rows, cols = m.rows, m.cols
    rank = 0
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if a[r][c]), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        inv = Fraction(1) / a[rank][c]
        a[rank] = [x * inv for x in a[rank]]
        for r in range(rows):
            if r != rank and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def _inverse_rational(m):
    n = m.rows
    a = [list(row) + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
         for i, row in enumerate(m.data)]
    for c in range(n):
        pivot = next((r for r in range(c, n) if a[r][c]), None)
        if pivot is None:
            raise ValueError("singular matrix")
        a[c], a[pivot] = a[pivot], a[c]
        inv = Fraction(1) / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return Matrix([row[n:] for row in a])


def _det_rational(m):
    n = m.rows
    a = [list(row) for row in m.data]
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if a[r][c]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            det = -det
        det *= a[c][c]
        inv = Fraction(1) / a[c][c]
        for r in range(c + 1, n):
            if a[r][c]:
                f = a[r][c] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


# -- Laurent elimination -------------------------------------------------------
#
# Rank over the field Q(e).  Rows are scaled by e^(-min exponent) (a unit,
# so the rank is unchanged) to land in the polynomial subring, then Bareiss
# elimination keeps every intermediate entry a polynomial: after step k the
# entries are k+1 minors of the original matrix, and the division by the
# previous pivot is exact.  Pivot choice: lowest e-order, then smallest
# coefficient height, to curb expression growth.


def _cleared_polynomial_rows(m):
    rows = []
    for row in m.data:
        vals = [as_laurent(x) for x in row]
        low = min((v.order() for v in vals if v), default=0)
        if low != 0 and low != float("inf"):
            vals = [v.shift(-low) for v in vals]
        rows.append(vals)
    return rows, m.rows, m.cols


def _height(poly):
    return max(
        (max(abs(q.numerator), q.denominator) for q in poly.terms.values()),
        default=0,
    )


def _pivot_key(poly):
    return (poly.order(), _height(poly))


def _rank_laurent(m):
    a, rows, cols = _cleared_polynomial_rows(m)
    rank = 0
    prev = Laurent.monomial(1)
    for _ in range(min(rows, cols)):
        best = None
        for r in range(rank, rows):
            for c in range(cols):
                if a[r][c]:
                    key = _pivot_key(a[r][c])
                    if best is None or key < best[0]:
                        best = (key, r, c)
        if best is None:
            break
        _, pr, pc = best
        a[rank], a[pr] = a[pr], a[rank]
        pivot = a[rank][pc]
        for r in range(rank + 1, rows):
            # rows are rescaled even where the eliminated entry is already
            # zero; the minor-determinant invariant needs it
            fac = a[r][pc]
            row_new = []
            for c in range(cols):
                num = pivot * a[r][c] - fac * a[rank][c]
                row_new.append(num.exact_div(prev))
            a[r] = row_new
            a[r][pc] = Laurent.zero
        prev = pivot
        rank += 1
    return rank


def _bareiss_determinant(a):
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("determinant needs a square matrix")
    a = [list(row) for row in a]
    sign = 1
    prev = Laurent.monomial(1)
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((r for r in range(k + 1, n) if a[r][k]), None)
            if swap is None:
                return Laurent.zero
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = num.exact_div(prev)
            a[i][k] = Laurent.zero
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def _inverse_laurent(m):
    n = m.rows
    lifted = m.lifted()
    # Row scaling by units e^(-low) keeps the inverse expressible: undo after.
    rows, lows = [], []
    for row in lifted.data:
        vals = list(row)
        low = min((v.order() for v in vals if v), default=0)
        if low == float("inf"):
            raise ValueError("singular matrix")
        if low != 0:
            vals = [v.shift(-low) for v in vals]
        rows.append(vals)
        lows.append(low)
    det = _bareiss_determinant(rows)
    if not det:
        raise ValueError("singular matrix")
    cof = []
    for i in range(n):
        cof_row = []
        for j in range(n):
            minor = [
                [rows[r][c] for c in range(n) if c != j]
                for r in range(n) if r != i
            ]
            d = _bareiss_determinant(minor) if n > 1 else Laurent.monomial(1)
            if (i + j) % 2:
                d = -d
            cof_row.append(d)
        cof.append(cof_row)
    # inverse = adjugate / det; undo the row scaling on the adjugate columns
    out = []
    for i in range(n):
        out_row = []
        for j in range(n):
            try:
                q = cof[j][i].exact_div(det)
            except ValueError:
                raise ValueError(
                    "inverse exists over Q(e) but leaves the Laurent scalars"
                ) from None
            out_row.append(q.shift(-lows[j]))
        out.append(out_row)
    return Matrix(out)


def matrix_rank(m):
    """Exact rank of a Matrix (over Q, or over Q(e) for Laurent entries)."""
    return m.rank()
