"""Constructions and transformations on multiplication schemes.

Everything here is a pure function from tensors to tensors: block direct
sums, Kronecker products, the cyclic and transpose symmetries, the
sandwiching isotropy action, detection and recombination of terms that
share a factor, completion of a masked scheme by an embedded block, and
the ceil((3mn+max(m,n))/2) rank bound for <m,2,n> products.
"""

from collections import namedtuple
from dataclasses import dataclass

from .matrices import Matrix
from .scalars import Laurent
from .tensor import LAURENT, RATIONAL, Dims, FmmTensor, Term

AXIS_M = "M"
AXIS_N = "N"
AXIS_P = "P"
_AXES = (AXIS_M, AXIS_N, AXIS_P)

SLOT_P = "P"
SLOT_Q = "Q"
SLOT_S = "S"
_SLOTS = (SLOT_P, SLOT_Q, SLOT_S)

IsotropyElement = namedtuple("IsotropyElement", ["U", "V", "W"])


@dataclass(frozen=True)
class SerendipityGroup:
    """Terms (0-based positions) whose factor in one slot is identical."""
    slot: str
    shared_factor: Matrix
    term_indices: tuple


@dataclass(frozen=True)
class BlockEmbedding:
    """Index maps placing a small scheme inside a larger one.

    a_rows/a_cols locate the block inside the host A matrix, b_cols the
    block's B columns inside the host B.  All indices are 0-based,
    strictly increasing, and the block's B-row indices reuse a_cols (the
    inner dimension is shared).
    """
    a_rows: tuple
    a_cols: tuple
    b_cols: tuple

    def __post_init__(self):
        for name, idx in (("a_rows", self.a_rows), ("a_cols", self.a_cols),
                          ("b_cols", self.b_cols)):
            idx = tuple(int(i) for i in idx)
            object.__setattr__(self, name, idx)
            if not idx:
                raise ValueError("%s must be non-empty" % name)
            if any(i < 0 for i in idx):
                raise ValueError("%s indices must be >= 0" % name)
            if any(a >= b for a, b in zip(idx, idx[1:])) and len(idx) > 1:
                raise ValueError("%s must be strictly increasing" % name)


def _check_unmasked(t, op):
    if t.support is not None:
        raise ValueError("%s does not accept a masked tensor" % op)


def _stack_m(t1, t2):
    """Direct sum along the output-row axis."""
    m1, n, p = t1.dims
    m2 = t2.dims.m
    m = m1 + m2
    terms = []
    for term in t1.terms:
        P = Matrix([[term.P[(r, c)] for c in range(n)] for r in range(m1)]
                   + [[0] * n for _ in range(m2)])
        S = Matrix([[term.S[(r, c)] for c in range(m1)] + [0] * m2
                    for r in range(p)])
        terms.append(Term(P, term.Q, S))
    for term in t2.terms:
        P = Matrix([[0] * n for _ in range(m1)]
                   + [[term.P[(r, c)] for c in range(n)] for r in range(m2)])
        S = Matrix([[0] * m1 + [term.S[(r, c)] for c in range(m2)]
                    for r in range(p)])
        terms.append(Term(P, term.Q, S))
    return FmmTensor((m, n, p), t1.field_mode, terms)


def _rotate_once(t):
    m, n, p = t.dims
    return FmmTensor((n, p, m), t.field_mode,
                     [Term(term.Q, term.S, term.P) for term in t.terms])


def direct_sum(t1, t2, axis=AXIS_M):
    """Block sum <..+..> along one axis; ranks add.

    The two schemes must agree on the other two dimensions and on the
    scalar domain.  Sums along N or P reuse the M code path via the
    cyclic symmetry.
    """
    if axis not in _AXES:
        raise ValueError("axis must be one of %s" % (_AXES,))
    _check_unmasked(t1, "direct_sum")
    _check_unmasked(t2, "direct_sum")
    if t1.field_mode != t2.field_mode:
        raise ValueError("direct_sum needs matching scalar domains "
                         "(lift the exact one first)")
    d1, d2 = t1.dims, t2.dims
    fixed = {AXIS_M: (1, 2), AXIS_N: (0, 2), AXIS_P: (0, 1)}[axis]
    for k in fixed:
        if d1[k] != d2[k]:
            raise ValueError(
                "direct_sum along %s needs equal %s dimensions (%d vs %d)"
                % (axis, "mnp"[k], d1[k], d2[k]))
    if axis == AXIS_M:
        return _stack_m(t1, t2)
    if axis == AXIS_N:
        return _rotate_once(_rotate_once(
            _stack_m(_rotate_once(t1), _rotate_once(t2))))
    return _rotate_once(
        _stack_m(_rotate_once(_rotate_once(t1)), _rotate_once(_rotate_once(t2))))


def kronecker(t1, t2):
    """Tensor product: <m,n,p;r> x <u,v,w;s> -> <mu,nv,pw;rs>.

    Big matrix index = (outer index) * inner_size + inner index, the
    same convention the recursive evaluator uses for blocking.
    """
    _check_unmasked(t1, "kronecker")
    _check_unmasked(t2, "kronecker")
    if t1.field_mode != t2.field_mode:
        raise ValueError("kronecker needs matching scalar domains "
                         "(lift the exact one first)")
    m, n, p = t1.dims
    u, v, w = t2.dims
    terms = [Term(a.P.kron(b.P), a.Q.kron(b.Q), a.S.kron(b.S))
             for a in t1.terms for b in t2.terms]
    return FmmTensor((m * u, n * v, p * w), t1.field_mode, terms)


def symmetry_apply(t, rotation=0, transpose=False):
    """Cyclic and transpose symmetries of the matrix-product tensor.

    rotation 1: (P,Q,S) -> (Q,S,P) on <n,p,m>; applied `rotation` times.
    transpose: (P,Q,S) -> (S^T,Q^T,P^T) on <m,p,n>, applied after the
    rotation.  Both preserve verification; a masked tensor admits only
    the identity.
    """
    if rotation not in (0, 1, 2):
        raise ValueError("rotation must be 0, 1 or 2")
    if t.support is not None and (rotation != 0 or transpose):
        raise ValueError("symmetry_apply on a masked tensor must be the identity")
    out = t
    for _ in range(rotation):
        out = _rotate_once(out)
    if transpose:
        m, n, p = out.dims
        out = FmmTensor((m, p, n), out.field_mode,
                        [Term(term.S.transpose(), term.Q.transpose(),
                              term.P.transpose())
                         for term in out.terms])
    if out is t:
        out = FmmTensor(t.dims, t.field_mode, list(t.terms), t.support)
    return out


def _inverse_transpose(mat, mode):
    if mode == LAURENT:
        mat = mat.lifted()
    return mat.inverse().transpose()


def isotropy_apply(t, g):
    """Sandwich the factors by an invertible triple (U, V, W).

    The output represents the same bilinear map conjugated by basis
    changes: contract(out, U A V^-1, V B W^-1, W C U^-1) equals
    contract(t, A, B, C), and verification status is preserved.
    """
    _check_unmasked(t, "isotropy_apply")
    m, n, p = t.dims
    U, V, W = g
    for name, mat, size in (("U", U, m), ("V", V, n), ("W", W, p)):
        if (mat.rows, mat.cols) != (size, size):
            raise ValueError("%s must be %dx%d" % (name, size, size))
    mode = t.field_mode
    try:
        U_it = _inverse_transpose(U, mode)
        V_it = _inverse_transpose(V, mode)
        W_it = _inverse_transpose(W, mode)
    except ValueError as exc:
        raise ValueError("isotropy element is singular or leaves the scalar "
                         "domain: %s" % exc) from None
    if mode == LAURENT:
        U, V, W = U.lifted(), V.lifted(), W.lifted()
    Ut, Vt, Wt = U.transpose(), V.transpose(), W.transpose()
    terms = [Term(U_it @ term.P @ Vt, V_it @ term.Q @ Wt, W_it @ term.S @ Ut)
             for term in t.terms]
    return FmmTensor(t.dims, mode, terms)


def _slot_of(term, slot):
    return {SLOT_P: term.P, SLOT_Q: term.Q, SLOT_S: term.S}[slot]


def serendipity_find(t, up_to_scale=False):
    """All maximal groups of terms sharing a factor in one slot.

    Detection is exact entrywise equality, the hypothesis the rewrite in
    serendipity_transform needs.  With up_to_scale, factors that differ
    by a nonzero scalar multiple are grouped too (detection only; the
    rewrite still requires literal sharing).
    """
    groups = []
    for slot in _SLOTS:
        seen = {}
        for idx, term in enumerate(t.terms):
            factor = _slot_of(term, slot)
            key = factor
            if up_to_scale:
                anchor = next(v for _, _, v in factor.nonzero_entries())
                key = factor.map(lambda x: _divide(x, anchor))
            seen.setdefault(key, []).append(idx)
        for key in seen:
            members = seen[key]
            if len(members) >= 2:
                shared = _slot_of(t.terms[members[0]], slot)
                groups.append(SerendipityGroup(slot, shared, tuple(members)))
    groups.sort(key=lambda g: (_SLOTS.index(g.slot), g.term_indices[0]))
    return groups


def _divide(x, y):
    if isinstance(x, Laurent) or isinstance(y, Laurent):
        num = x if isinstance(x, Laurent) else Laurent.from_rational(x)
        den = y if isinstance(y, Laurent) else Laurent.from_rational(y)
        if not num:
            return num
        if den.is_monomial():
            k, c = next(iter(den.terms.items()))
            return num.shift(-k) * Laurent.from_rational(1 / c)
        return num.exact_div(den)
    return x / y


def serendipity_transform(t, group, M):
    """Recombine terms sharing one factor by an invertible change of basis.

    For shared slot X with partner slots (Y, Z) in cyclic order, the
    grouped Y factors are mixed by M^T and the Z factors by M^-1, which
    telescopes to the identity inside the sum: the output expands to the
    same coefficient array, term for term positions preserved.
    """
    idxs = tuple(group.term_indices)
    q = len(idxs)
    if q < 2:
        raise ValueError("a serendipity group needs at least two terms")
    if len(set(idxs)) != q or not all(0 <= i < t.rank for i in idxs):
        raise ValueError("group indices out of range")
    for i in idxs:
        if _slot_of(t.terms[i], group.slot) != group.shared_factor:
            raise ValueError("stale group: term %d no longer carries the "
                             "shared factor" % i)
    if (M.rows, M.cols) != (q, q):
        raise ValueError("mixing matrix must be %dx%d" % (q, q))
    if t.field_mode == LAURENT:
        M = M.lifted()
    try:
        M_inv = M.inverse()
    except ValueError as exc:
        raise ValueError("mixing matrix: %s" % exc) from None
    Mt = M.transpose()

    partner = {SLOT_P: (SLOT_Q, SLOT_S),
               SLOT_Q: (SLOT_S, SLOT_P),
               SLOT_S: (SLOT_P, SLOT_Q)}[group.slot]
    ys = [_slot_of(t.terms[i], partner[0]) for i in idxs]
    zs = [_slot_of(t.terms[i], partner[1]) for i in idxs]

    def mix(mixer, j, mats, by_row):
        acc = None
        for k, mat in enumerate(mats):
            coeff = mixer[(j, k)] if by_row else mixer[(k, j)]
            piece = mat.scale(coeff)
            acc = piece if acc is None else acc + piece
        return acc

    new_terms = list(t.terms)
    for j, i in enumerate(idxs):
        # alpha_j = sum_k (M^T)_{jk} Y_k ; beta_j = sum_k (M^-1)_{jk} Z_k
        alpha = mix(Mt, j, ys, True)
        beta = mix(M_inv, j, zs, True)
        if alpha.is_zero() or beta.is_zero():
            raise ValueError("recombination would zero a factor of term %d "
                             "(dependent factors under this mixing matrix)" % i)
        parts = {group.slot: group.shared_factor,
                 partner[0]: alpha, partner[1]: beta}
        new_terms[i] = Term(parts[SLOT_P], parts[SLOT_Q], parts[SLOT_S])
    return FmmTensor(t.dims, t.field_mode, new_terms, t.support)


def embed_and_add(partial, block, embedding):
    """Complete a masked scheme by a block scheme for the missing product.

    The embedding must cover exactly the zero region of the mask: the
    block's A sits at rows a_rows x cols a_cols of the host A, its B
    spans rows a_cols x cols b_cols of the host B, and its C lands at
    rows b_cols x cols a_rows of the host C.  Terms are the union; the
    output is unmasked.
    """
    if partial.support is None:
        raise ValueError("embed_and_add needs a masked tensor to complete")
    _check_unmasked(block, "embed_and_add block")
    m, n, p = partial.dims
    bm, bn, bp = block.dims
    e = embedding
    if (len(e.a_rows), len(e.a_cols), len(e.b_cols)) != (bm, bn, bp):
        raise ValueError("embedding sizes %s do not match block dims <%d,%d,%d>"
                         % ((len(e.a_rows), len(e.a_cols), len(e.b_cols)),
                            bm, bn, bp))
    if e.a_rows[-1] >= m or e.a_cols[-1] >= n or e.b_cols[-1] >= p:
        raise ValueError("embedding indices exceed host dimensions")

    covered = {(r, c) for r in e.a_rows for c in e.a_cols}
    complement = {(r, c) for r in range(m) for c in range(n)
                  if not partial.support[r][c]}
    if covered != complement:
        raise ValueError("embedding must cover exactly the masked-out "
                         "A-entries (%d covered, %d masked)"
                         % (len(covered), len(complement)))

    mode = LAURENT if LAURENT in (partial.field_mode, block.field_mode) else RATIONAL
    host = partial if partial.field_mode == mode else partial.as_laurent()
    blk = block if block.field_mode == mode else block.as_laurent()

    def scatter(mat, rows, cols, big_rows, big_cols):
        cells = [[0] * big_cols for _ in range(big_rows)]
        for i, j, v in mat.nonzero_entries():
            cells[rows[i]][cols[j]] = v
        return Matrix(cells)

    terms = list(host.terms)
    for term in blk.terms:
        terms.append(Term(
            scatter(term.P, e.a_rows, e.a_cols, m, n),
            scatter(term.Q, e.a_cols, e.b_cols, n, p),
            scatter(term.S, e.b_cols, e.a_rows, p, m),
        ))
    return FmmTensor(partial.dims, mode, terms)


def mask_embedding(t):
    """The canonical embedding completing t's mask, if it is a rectangle.

    Returns a BlockEmbedding over the full B column range; raises when
    the masked-out region is not a row-set x column-set product.
    """
    if t.support is None:
        raise ValueError("tensor has no support mask")
    m, n, p = t.dims
    holes = [(r, c) for r in range(m) for c in range(n) if not t.support[r][c]]
    if not holes:
        raise ValueError("support mask has an empty complement")
    rows = tuple(sorted({r for r, _ in holes}))
    cols = tuple(sorted({c for _, c in holes}))
    if len(holes) != len(rows) * len(cols):
        raise ValueError("masked-out region is not a full rectangle")
    return BlockEmbedding(rows, cols, tuple(range(p)))


def hopcroft_rank_bound(m, n):
    """ceil((3mn + max(m,n)) / 2): multiplications for an <m,2,n> product."""
    if m < 1 or n < 1:
        raise ValueError("dimensions must be positive")
    return -(-(3 * m * n + max(m, n)) // 2)
