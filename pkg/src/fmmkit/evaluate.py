"""Run verified schemes as algorithms.

apply_bilinear evaluates one scheme on exact matrices; multiply_recursive
threads a schedule of schemes blockwise, so an r1-term scheme over an
r2-term scheme performs r1*r2 base scalar multiplications; the counter
verifies that claim at runtime.  epsilon_error_scan instantiates an
approximate scheme at concrete epsilon values in floating point and fits
the error decay slope.
"""

import math
from dataclasses import dataclass

import numpy as np

from .matrices import Matrix
from .scalars import Laurent
from .tensor import RATIONAL, FmmTensor


class MultiplicationCounter:
    """Counts base scalar multiplications during evaluation."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def tick(self, k=1):
        self.count += k


def _check_mask_zeros(t, A):
    if t.support is None:
        return
    for r in range(A.rows):
        for c in range(A.cols):
            if not t.support[r][c] and A[(r, c)]:
                raise ValueError(
                    "A[%d,%d] must be zero under the support mask" % (r, c))


def apply_bilinear(t, A, B, counter=None):
    """C = sum_i <P_i,A> <Q_i,B> S_i^T, equal to A*B for a verified scheme.

    Exactly rank(t) products of linear-form values are taken; when a
    counter is supplied it advances by that amount.
    """
    if t.field_mode != RATIONAL:
        raise ValueError("apply_bilinear evaluates exact schemes only")
    m, n, p = t.dims
    if (A.rows, A.cols) != (m, n) or (B.rows, B.cols) != (n, p):
        raise ValueError("expected A %dx%d and B %dx%d" % (m, n, n, p))
    _check_mask_zeros(t, A)
    cells = [[0] * p for _ in range(m)]
    for term in t.terms:
        v = term.P.frobenius_inner(A) * term.Q.frobenius_inner(B)
        if counter is not None:
            counter.tick()
        if not v:
            continue
        for k, i, s in term.S.nonzero_entries():
            cells[i][k] = cells[i][k] + s * v
    return Matrix(cells)


def _schedule_dims(levels):
    M = N = P = 1
    for t in levels:
        M *= t.dims.m
        N *= t.dims.n
        P *= t.dims.p
    return M, N, P


def _check_schedule(levels):
    if not levels:
        raise ValueError("a schedule needs at least one scheme")
    for idx, t in enumerate(levels, start=1):
        if not isinstance(t, FmmTensor):
            raise ValueError("schedule level %d is not a tensor" % idx)
        if t.field_mode != RATIONAL:
            raise ValueError("schedule level %d must be exact" % idx)
        if t.support is not None:
            raise ValueError("schedule level %d is masked" % idx)


def _block(mat, r0, c0, rows, cols):
    return Matrix([[mat[(r0 + r, c0 + c)] for c in range(cols)]
                   for r in range(rows)])


def _recurse(levels, A, B, counter):
    if not levels:
        # base scalar product
        if counter is not None:
            counter.tick()
        return Matrix([[A[(0, 0)] * B[(0, 0)]]])
    t = levels[0]
    rest = levels[1:]
    m, n, p = t.dims
    Mi, Ni, Pi = _schedule_dims(rest)
    c_cells = [[None] * (p * Pi) for _ in range(m * Mi)]
    a_blocks = [[_block(A, i * Mi, j * Ni, Mi, Ni) for j in range(n)]
                for i in range(m)]
    b_blocks = [[_block(B, j * Ni, k * Pi, Ni, Pi) for k in range(p)]
                for j in range(n)]
    for term in t.terms:
        a_lin = None
        for i, j, v in term.P.nonzero_entries():
            piece = a_blocks[i][j].scale(v)
            a_lin = piece if a_lin is None else a_lin + piece
        b_lin = None
        for j, k, v in term.Q.nonzero_entries():
            piece = b_blocks[j][k].scale(v)
            b_lin = piece if b_lin is None else b_lin + piece
        prod = _recurse(rest, a_lin, b_lin, counter)
        for k, i, s in term.S.nonzero_entries():
            scaled = prod.scale(s)
            for r in range(Mi):
                for c in range(Pi):
                    cur = c_cells[i * Mi + r][k * Pi + c]
                    val = scaled[(r, c)]
                    c_cells[i * Mi + r][k * Pi + c] = (
                        val if cur is None else cur + val)
    zero = 0
    return Matrix([[zero if v is None else v for v in row] for row in c_cells])


def multiply_recursive(levels, A, B, counter=None):
    """Blockwise product through a schedule of exact schemes.

    A and B must have exactly the composite dimensions (componentwise
    products over the levels); the result equals A*B.
    """
    _check_schedule(levels)
    M, N, P = _schedule_dims(levels)
    if (A.rows, A.cols) != (M, N) or (B.rows, B.cols) != (N, P):
        raise ValueError("schedule computes <%d,%d,%d>; got A %dx%d, B %dx%d"
                         % (M, N, P, A.rows, A.cols, B.rows, B.cols))
    return _recurse(list(levels), A, B, counter)


def count_multiplications(levels):
    """Base scalar multiplications of the schedule: the product of ranks."""
    _check_schedule(levels)
    total = 1
    for t in levels:
        total *= t.rank
    return total


@dataclass(frozen=True)
class ErrorScan:
    samples: tuple  # ((eps, relative_error), ...) eps strictly decreasing
    fitted_slope: object  # float, or None when under two usable samples

    def __str__(self):
        lines = ["eps %.3e  rel_error %.6e" % s for s in self.samples]
        slope = ("%.4f" % self.fitted_slope
                 if self.fitted_slope is not None else "undefined")
        lines.append("fitted slope %s" % slope)
        return "\n".join(lines)


def _factor_at(mat, eps):
    out = np.empty((mat.rows, mat.cols), dtype=float)
    for r in range(mat.rows):
        for c in range(mat.cols):
            v = mat[(r, c)]
            out[r, c] = v.evaluate(eps) if isinstance(v, Laurent) else float(v)
    return out


def epsilon_error_scan(t, A, B, eps_values):
    """Relative error of the scheme at concrete epsilon values.

    For each eps the Laurent factors are evaluated numerically and the
    bilinear scheme applied to A and B; the sample records the Frobenius
    error relative to the true product.  The slope of log(error) against
    log(eps) is fitted over samples above 100x machine epsilon, where
    rounding noise does not drown the signal; for a valid scheme it
    approximates the discrepancy order.  Non-finite evaluations (the
    negative-power coefficients overflow for tiny eps) yield an inf
    sample that the fit ignores.
    """
    eps_values = [float(e) for e in eps_values]
    if not eps_values:
        raise ValueError("need at least one epsilon value")
    if any(e <= 0 for e in eps_values):
        raise ValueError("epsilon values must be positive")
    if any(a <= b for a, b in zip(eps_values, eps_values[1:])):
        raise ValueError("epsilon values must be strictly decreasing")
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    m, n, p = t.dims
    if A.shape != (m, n) or B.shape != (n, p):
        raise ValueError("expected A %dx%d and B %dx%d" % (m, n, n, p))
    if t.support is not None:
        for r in range(m):
            for c in range(n):
                if not t.support[r][c] and A[r, c] != 0.0:
                    raise ValueError(
                        "A[%d,%d] must be zero under the support mask" % (r, c))
    lifted = t.as_laurent()
    target = A @ B
    target_norm = float(np.linalg.norm(target))
    if target_norm == 0.0:
        target_norm = 1.0

    samples = []
    with np.errstate(over="ignore", invalid="ignore"):
        for eps in eps_values:
            C = np.zeros((m, p))
            for term in lifted.terms:
                vp = float(np.sum(_factor_at(term.P, eps) * A))
                vq = float(np.sum(_factor_at(term.Q, eps) * B))
                C += vp * vq * _factor_at(term.S, eps).T
            err = float(np.linalg.norm(C - target)) / target_norm
            if not math.isfinite(err):
                err = math.inf
            samples.append((eps, err))

    floor = 100.0 * np.finfo(float).eps
    xs = [math.log(e) for e, r in samples if math.isfinite(r) and r > floor]
    ys = [math.log(r) for e, r in samples if math.isfinite(r) and r > floor]
    slope = None
    if len(xs) >= 2:
        slope = float(np.polyfit(xs, ys, 1)[0])
    return ErrorScan(tuple(samples), slope)
