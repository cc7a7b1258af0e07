"""Exact rational linear algebra: sparse matrices, ranks, chain-complex homology.

Matrices are sparse maps (row, col) -> Fraction with no stored zeros.  Ranks
are exact: small or dense matrices go through fraction-free Bareiss
elimination with magnitude pivoting; large sparse matrices go through a
sparse elimination with Markowitz-style pivot selection (the Cech-De Rham
matrices are far too large to densify wholesale but nearly block diagonal,
so fill-in stays local).
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import CompositeNotZero, SingularMatrix

_DENSE_LIMIT = 48  # min dimension up to which dense Bareiss is used


class RationalMatrix:
    """Sparse rows x cols matrix over Q.  Treated as immutable after construction."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries=None):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise IndexError(f"entry ({i},{j}) outside {rows}x{cols}")
                v = Fraction(v)
                if v:
                    self.entries[i, j] = v

    @classmethod
    def from_rows(cls, data):
        rows = len(data)
        cols = len(data[0]) if rows else 0
        entries = {}
        for i, row in enumerate(data):
            for j, v in enumerate(row):
                if v:
                    entries[i, j] = Fraction(v)
        return cls(rows, cols, entries)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): Fraction(1) for i in range(n)})

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols)

    def __getitem__(self, key):
        return self.entries.get(key, Fraction(0))

    def __eq__(self, other):
        return (isinstance(other, RationalMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.entries.items())))

    def is_zero(self):
        return not self.entries

    def transpose(self):
        return RationalMatrix(self.cols, self.rows,
                              {(j, i): v for (i, j), v in self.entries.items()})

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        other_rows = {}
        for (j, k), v in other.entries.items():
            other_rows.setdefault(j, []).append((k, v))
        out = {}
        for (i, j), v in self.entries.items():
            for k, w in other_rows.get(j, ()):
                key = (i, k)
                s = out.get(key, Fraction(0)) + v * w
                if s:
                    out[key] = s
                elif key in out:
                    del out[key]
        return RationalMatrix(self.rows, other.cols, out)

    def __add__(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")
        out = dict(self.entries)
        for key, v in other.entries.items():
            s = out.get(key, Fraction(0)) + v
            if s:
                out[key] = s
            elif key in out:
                del out[key]
        return RationalMatrix(self.rows, self.cols, out)

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return RationalMatrix.zero(self.rows, self.cols)
        return RationalMatrix(self.rows, self.cols,
                              {k: c * v for k, v in self.entries.items()})

    def to_dense(self):
        data = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            data[i][j] = v
        return data

    def row_dicts(self):
        rows = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def __repr__(self):
        return f"RationalMatrix({self.rows}x{self.cols}, {len(self.entries)} entries)"


def _integer_rows(dense):
    """Scale each row by the lcm of denominators; rank-preserving."""
    out = []
    for row in dense:
        l = 1
        for v in row:
            if v:
                d = v.denominator
                l = l * d // gcd(l, d)
        out.append([int(v * l) for v in row])
    return out


def rank_bareiss(m):
    """Fraction-free Bareiss elimination; pivots chosen with smallest nonzero magnitude."""
    a = _integer_rows(m.to_dense())
    rows, cols = m.rows, m.cols
    r = 0
    prev = 1
    for c in range(cols):
        if r >= rows:
            break
        piv_row = -1
        piv_abs = None
        for i in range(r, rows):
            v = a[i][c]
            if v and (piv_abs is None or abs(v) < piv_abs):
                piv_row, piv_abs = i, abs(v)
        if piv_row < 0:
            continue
        a[r], a[piv_row] = a[piv_row], a[r]
        piv = a[r][c]
        for i in range(r + 1, rows):
            vic = a[i][c]
            if not vic and prev == 1:
                continue
            ai, ar = a[i], a[r]
            for j in range(c + 1, cols):
                ai[j] = (ai[j] * piv - vic * ar[j]) // prev
            ai[c] = 0
        prev = piv
        r += 1
    return r


def rank_sparse(m):
    """Sparse exact elimination with Markowitz-style pivoting."""
    rows = {}
    col_rows = {}
    for (i, j), v in m.entries.items():
        rows.setdefault(i, {})[j] = v
        col_rows.setdefault(j, set()).add(i)
    r = 0
    while col_rows:
        # pivot column with fewest rows; within it the sparsest row
        pc = min(col_rows, key=lambda j: (len(col_rows[j]), j))
        candidates = col_rows[pc]
        pr = min(candidates, key=lambda i: (len(rows[i]),
                                            abs(rows[i][pc].numerator) * rows[i][pc].denominator, i))
        prow = rows.pop(pr)
        piv = prow[pc]
        for j in prow:
            col_rows[j].discard(pr)
        targets = [i for i in col_rows.get(pc, ()) if i in rows]
        for i in targets:
            row = rows[i]
            factor = row[pc] / piv
            for j, v in prow.items():
                cur = row.get(j)
                nv = (cur if cur is not None else Fraction(0)) - factor * v
                if nv:
                    if cur is None:
                        col_rows.setdefault(j, set()).add(i)
                    row[j] = nv
                elif cur is not None:
                    del row[j]
                    s = col_rows.get(j)
                    if s is not None:
                        s.discard(i)
                        if not s:
                            del col_rows[j]
            if not row:
                del rows[i]
        for j in list(prow):
            s = col_rows.get(j)
            if s is not None and not s:
                del col_rows[j]
        r += 1
    return r


def rank(m):
    """Rank over Q, computed exactly."""
    if not m.entries:
        return 0
    if min(m.rows, m.cols) <= _DENSE_LIMIT:
        return rank_bareiss(m)
    return rank_sparse(m)


def _rref(dense):
    """Reduced row echelon form in place; returns pivot column list."""
    rows = len(dense)
    cols = len(dense[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        piv = -1
        for i in range(r, rows):
            if dense[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        dense[r], dense[piv] = dense[piv], dense[r]
        inv = 1 / dense[r][c]
        dense[r] = [v * inv for v in dense[r]]
        for i in range(rows):
            if i != r and dense[i][c]:
                f = dense[i][c]
                dense[i] = [a - f * b for a, b in zip(dense[i], dense[r])]
        pivots.append(c)
        r += 1
    return pivots


def inverse(m):
    if m.rows != m.cols:
        raise SingularMatrix("only square matrices can be inverted")
    n = m.rows
    aug = [row + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m.to_dense())]
    pivots = _rref(aug)
    if pivots != list(range(n)):
        raise SingularMatrix("matrix is singular")
    return RationalMatrix.from_rows([row[n:] for row in aug])


def solve(m, b):
    """One solution x of m @ x = b, or None if inconsistent."""
    aug = [row + [Fraction(v)] for row, v in zip(m.to_dense(), b)]
    if m.rows == 0:
        return [Fraction(0)] * m.cols
    pivots = _rref(aug)
    if m.cols in pivots:
        return None
    x = [Fraction(0)] * m.cols
    for r, c in enumerate(pivots):
        x[c] = aug[r][m.cols]
    return x


def kernel_basis(m):
    """Basis vectors (length cols) of the right kernel."""
    dense = m.to_dense()
    if m.rows == 0:
        return [[Fraction(int(i == j)) for i in range(m.cols)] for j in range(m.cols)]
    pivots = _rref(dense)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * m.cols
        v[free] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -dense[r][free]
        basis.append(v)
    return basis


def column_space_basis(m):
    """Columns of m forming a basis for the image, as coordinate vectors."""
    if m.rows == 0 or m.cols == 0:
        return []
    work = m.to_dense()
    pivots = _rref([list(row) for row in work])
    return [[work[i][j] for i in range(m.rows)] for j in pivots]


@dataclass(frozen=True)
class ChainComplex:
    """Spaces d_0..d_m with differentials[i]: space_{i+1} -> space_i.

    differential_i in the mathematical sense (space_i -> space_{i-1}) is
    ``differentials[i-1]``; shapes are validated eagerly, d o d = 0 lazily.
    """

    spaces: tuple
    differentials: tuple

    def __post_init__(self):
        if len(self.differentials) != max(0, len(self.spaces) - 1):
            raise ValueError("need exactly one differential per adjacent pair of spaces")
        for i, d in enumerate(self.differentials):
            if d.rows != self.spaces[i] or d.cols != self.spaces[i + 1]:
                raise ValueError(
                    f"differential {i + 1} has shape {d.rows}x{d.cols}, "
                    f"expected {self.spaces[i]}x{self.spaces[i + 1]}")

    def check_composites(self):
        for i in range(len(self.differentials) - 1):
            if not (self.differentials[i] @ self.differentials[i + 1]).is_zero():
                raise CompositeNotZero(f"d_{i + 1} o d_{i + 2} != 0")


def homology_dims(c):
    """h_i = dim space_i - rank d_i - rank d_{i+1}; asserts the Euler identity."""
    c.check_composites()
    ranks = [rank(d) for d in c.differentials]
    padded = [0] + ranks + [0]
    dims = [c.spaces[i] - padded[i] - padded[i + 1] for i in range(len(c.spaces))]
    euler_h = sum((-1) ** i * h for i, h in enumerate(dims))
    euler_d = sum((-1) ** i * d for i, d in enumerate(c.spaces))
    assert euler_h == euler_d, "Euler characteristic mismatch"
    return dims
