"""Line-oriented tensor and matrix file formats.

Tensor files ('#' starts a comment anywhere, blank lines are cosmetic):

    fmm 1
    dims <m> <n> <p>
    rank <r>
    field rational | field laurent
    support            # optional, then m lines of n chars from {0,1}
    term 1
    <m rows of n entries>          (P)
    <n rows of p entries>          (Q)
    <p rows of m entries>          (S)
    term 2
    ...

Row entries are comma-separated in canonical output (one space after the
comma, ' + ' around monomial sums); whitespace-separated compact tokens
such as `1/2*e^-3+2` are accepted on input.  Matrix files carry a
`rows cols` header and then row-major rational entries.
"""

from fractions import Fraction

from .matrices import Matrix
from .scalars import ScalarParseError, format_rational, format_scalar, parse_scalar
from .tensor import LAURENT, RATIONAL, FmmTensor, Term


class TensorFormatError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class _Cursor:
    """Significant-line reader over comment-stripped text."""

    def __init__(self, text):
        self.lines = []
        for no, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].strip()
            if body:
                self.lines.append((no, body))
        self.pos = 0

    def peek(self):
        return self.lines[self.pos] if self.pos < len(self.lines) else (None, None)

    def next(self, what):
        if self.pos >= len(self.lines):
            raise TensorFormatError("unexpected end of file, expected %s" % what)
        item = self.lines[self.pos]
        self.pos += 1
        return item

    def done(self):
        return self.pos >= len(self.lines)


def _split_row(body):
    if "," in body:
        return [cell.strip() for cell in body.split(",")]
    return body.split()


def _parse_row(cursor, width, laurent, what):
    no, body = cursor.next(what)
    cells = _split_row(body)
    if width == 1 and "," not in body:
        # a single scalar may contain spaces (' + ' joined monomials)
        cells = [body]
    if len(cells) != width:
        raise TensorFormatError(
            "%s: expected %d entries, got %d" % (what, width, len(cells)), no)
    out = []
    for cell in cells:
        try:
            out.append(parse_scalar(cell, laurent=laurent))
        except ScalarParseError as exc:
            raise TensorFormatError("%s: %s" % (what, exc), no) from None
    return out


def _parse_factor(cursor, rows, cols, laurent, what):
    data = [_parse_row(cursor, cols, laurent, "%s row %d" % (what, r + 1))
            for r in range(rows)]
    return Matrix(data)


def parse_tensor(text):
    cursor = _Cursor(text)

    no, body = cursor.next("'fmm 1' header")
    if body.split() != ["fmm", "1"]:
        raise TensorFormatError("expected 'fmm 1', got %r" % body, no)

    no, body = cursor.next("dims header")
    parts = body.split()
    if len(parts) != 4 or parts[0] != "dims":
        raise TensorFormatError("expected 'dims <m> <n> <p>'", no)
    try:
        m, n, p = (int(x) for x in parts[1:])
    except ValueError:
        raise TensorFormatError("non-integer dimension in %r" % body, no) from None
    if min(m, n, p) < 1:
        raise TensorFormatError("dimensions must be positive", no)

    no, body = cursor.next("rank header")
    parts = body.split()
    if len(parts) != 2 or parts[0] != "rank" or not parts[1].isdigit():
        raise TensorFormatError("expected 'rank <r>'", no)
    rank = int(parts[1])
    if rank < 1:
        raise TensorFormatError("rank must be positive", no)

    no, body = cursor.next("field header")
    parts = body.split()
    if len(parts) != 2 or parts[0] != "field" or parts[1] not in (RATIONAL, LAURENT):
        raise TensorFormatError("expected 'field rational' or 'field laurent'", no)
    mode = parts[1]

    support = None
    no, body = cursor.peek()
    if body == "support":
        cursor.next("support keyword")
        mask = []
        for r in range(m):
            no, body = cursor.next("support row %d" % (r + 1))
            if len(body) != n or any(ch not in "01" for ch in body):
                raise TensorFormatError(
                    "support row %d must be %d characters of 0/1" % (r + 1, n), no)
            mask.append(tuple(ch == "1" for ch in body))
        support = tuple(mask)

    laurent = mode == LAURENT
    terms = []
    for idx in range(1, rank + 1):
        no, body = cursor.next("'term %d'" % idx)
        if body.split() != ["term", str(idx)]:
            if body.startswith("term"):
                raise TensorFormatError(
                    "expected 'term %d', got %r (term blocks are consecutive)"
                    % (idx, body), no)
            raise TensorFormatError(
                "rank mismatch: header says %d terms, found %d" % (rank, idx - 1), no)
        P = _parse_factor(cursor, m, n, laurent, "term %d P" % idx)
        Q = _parse_factor(cursor, n, p, laurent, "term %d Q" % idx)
        S = _parse_factor(cursor, p, m, laurent, "term %d S" % idx)
        terms.append(Term(P, Q, S))

    if not cursor.done():
        no, body = cursor.peek()
        if body.split()[:1] == ["term"]:
            raise TensorFormatError(
                "rank mismatch: header says %d terms but more follow" % rank, no)
        raise TensorFormatError("trailing content %r" % body, no)

    try:
        return FmmTensor((m, n, p), mode, terms, support)
    except ValueError as exc:
        raise TensorFormatError(str(exc)) from None


def write_tensor(t):
    out = []
    out.append("fmm 1")
    out.append("dims %d %d %d" % t.dims)
    out.append("rank %d" % t.rank)
    out.append("field %s" % t.field_mode)
    if t.support is not None:
        out.append("support")
        for row in t.support:
            out.append("".join("1" if v else "0" for v in row))
    for idx, term in enumerate(t.terms, start=1):
        out.append("term %d" % idx)
        for factor in (term.P, term.Q, term.S):
            for r in range(factor.rows):
                out.append(", ".join(
                    format_scalar(factor[(r, c)]) for c in range(factor.cols)))
            out.append("")
    if out[-1] == "":
        out.pop()
    return "\n".join(out) + "\n"


def load_tensor(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_tensor(fh.read())


def save_tensor(t, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_tensor(t))


def parse_matrix(text):
    """Rational matrix file: `rows cols` header then row-major entries."""
    tokens = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens.extend((no, tok) for tok in body.split())
    if len(tokens) < 2:
        raise TensorFormatError("matrix file needs a 'rows cols' header")
    (no_r, rtok), (no_c, ctok) = tokens[0], tokens[1]
    if not rtok.isdigit() or not ctok.isdigit():
        raise TensorFormatError("malformed 'rows cols' header", no_r)
    rows, cols = int(rtok), int(ctok)
    if rows < 1 or cols < 1:
        raise TensorFormatError("matrix dimensions must be positive", no_r)
    body = tokens[2:]
    if len(body) != rows * cols:
        raise TensorFormatError(
            "expected %d entries, got %d" % (rows * cols, len(body)))
    values = []
    for no, tok in body:
        try:
            values.append(parse_scalar(tok, laurent=False))
        except ScalarParseError as exc:
            raise TensorFormatError(str(exc), no) from None
    data = [values[r * cols:(r + 1) * cols] for r in range(rows)]
    return Matrix(data)


def write_matrix(mat):
    if mat.has_laurent():
        raise ValueError("matrix files hold rational entries only")
    lines = ["%d %d" % (mat.rows, mat.cols)]
    for r in range(mat.rows):
        lines.append(" ".join(
            format_rational(mat[(r, c)]) for c in range(mat.cols)))
    return "\n".join(lines) + "\n"


def load_matrix(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def save_matrix(mat, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_matrix(mat))
