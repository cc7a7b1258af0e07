"""Sparse multivariate polynomials over Q.

A polynomial is a map from exponent tuples (length = ambient variable count)
to nonzero Fractions.  Values are immutable: every operation returns a new
normalized polynomial.  Variable indices are 0-based throughout.
"""

from fractions import Fraction

from . import linalg
from .errors import (AmbientMismatch, IndexOutOfRange, SingularChange,
                     ZeroDivisor, ZeroInput)
from .orders import degrevlex

#: degree of the zero polynomial
DEGREE_OF_ZERO = float("-inf")

_DEFAULT_ORDER_CACHE = {}


def _default_order(n):
    order = _DEFAULT_ORDER_CACHE.get(n)
    if order is None:
        order = _DEFAULT_ORDER_CACHE[n] = degrevlex(n)
    return order


class Polynomial:
    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        self.terms = {}
        if terms:
            for exps, c in terms.items():
                c = Fraction(c)
                if not c:
                    continue
                if len(exps) != n:
                    raise AmbientMismatch(f"monomial {exps} has {len(exps)} exponents, ambient is {n}")
                self.terms[tuple(exps)] = c

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def constant(cls, n, c):
        return cls(n, {(0,) * n: Fraction(c)})

    @classmethod
    def variable(cls, n, i):
        if not 0 <= i < n:
            raise IndexOutOfRange(f"variable {i} outside 0..{n - 1}")
        exps = [0] * n
        exps[i] = 1
        return cls(n, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, n, exps, c=1):
        return cls(n, {tuple(exps): Fraction(c)})

    # -- ring structure ----------------------------------------------------

    def _check(self, other):
        if self.n != other.n:
            raise AmbientMismatch(f"ambient sizes differ: {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.n, other)
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, Fraction(0)) + c
            if s:
                terms[m] = s
            elif m in terms:
                del terms[m]
        out = Polynomial.__new__(Polynomial)
        out.n, out.terms = self.n, terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Polynomial.__new__(Polynomial)
        out.n = self.n
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            out = Polynomial.__new__(Polynomial)
            out.n = self.n
            out.terms = {m: c * v for m, v in self.terms.items()} if c else {}
            return out
        self._check(other)
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = terms.get(m, Fraction(0)) + c1 * c2
                if s:
                    terms[m] = s
                elif m in terms:
                    del terms[m]
        out = Polynomial.__new__(Polynomial)
        out.n, out.terms = self.n, terms
        return out

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.n, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and self.n == other.n
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        from .parsing import format_polynomial
        return f"Polynomial({format_polynomial(self)!r})"

    # -- queries -----------------------------------------------------------

    def degree(self):
        if not self.terms:
            return DEGREE_OF_ZERO
        return max(sum(m) for m in self.terms)

    def is_homogeneous(self):
        degs = {sum(m) for m in self.terms}
        return len(degs) <= 1

    def is_constant(self):
        return all(sum(m) == 0 for m in self.terms)

    def leading(self, order=None):
        """(monomial, coefficient) of the largest term under the order."""
        if not self.terms:
            raise ZeroInput("zero polynomial has no leading term")
        order = order or _default_order(self.n)
        m = max(self.terms, key=order.key)
        return m, self.terms[m]

    def monic(self, order=None):
        if not self.terms:
            return self
        _, c = self.leading(order)
        return self * (1 / c)

    def variables_used(self):
        used = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used.add(i)
        return used

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), Fraction(0))

    def evaluate(self, point):
        if len(point) != self.n:
            raise AmbientMismatch("point length differs from ambient size")
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for e, a in zip(m, point):
                if e:
                    v *= Fraction(a) ** e
            total += v
        return total


def partial_derivative(p, i):
    """Formal partial derivative with respect to variable i (0-based)."""
    if not 0 <= i < p.n:
        raise IndexOutOfRange(f"variable {i} outside 0..{p.n - 1}")
    terms = {}
    for m, c in p.terms.items():
        e = m[i]
        if e:
            m2 = m[:i] + (e - 1,) + m[i + 1:]
            terms[m2] = terms.get(m2, Fraction(0)) + c * e
    return Polynomial(p.n, terms)


def divide_exact(a, f, order=None):
    """Quotient q with a = q*f, or None when f does not divide a exactly."""
    if not f:
        raise ZeroDivisor("division by the zero polynomial")
    a._check(f)
    order = order or _default_order(a.n)
    lm_f, lc_f = f.leading(order)
    q = {}
    rem = dict(a.terms)
    while rem:
        m = max(rem, key=order.key)
        diff = tuple(x - y for x, y in zip(m, lm_f))
        if any(d < 0 for d in diff):
            return None
        c = rem[m] / lc_f
        q[diff] = q.get(diff, Fraction(0)) + c
        for mf, cf in f.terms.items():
            mm = tuple(x + y for x, y in zip(diff, mf))
            s = rem.get(mm, Fraction(0)) - c * cf
            if s:
                rem[mm] = s
            elif mm in rem:
                del rem[mm]
    return Polynomial(a.n, q)


class AffineChange:
    """New coordinates U_i = sum_j D[i][j] X_j + c_i with D invertible."""

    __slots__ = ("matrix", "shift", "_inverse")

    def __init__(self, matrix, shift=None):
        self.matrix = tuple(tuple(Fraction(v) for v in row) for row in matrix)
        n = len(self.matrix)
        if any(len(row) != n for row in self.matrix):
            raise SingularChange("matrix is not square")
        self.shift = (tuple(Fraction(v) for v in shift) if shift is not None
                      else (Fraction(0),) * n)
        if len(self.shift) != n:
            raise SingularChange("shift length differs from matrix size")
        m = linalg.RationalMatrix.from_rows(self.matrix)
        try:
            self._inverse = linalg.inverse(m)
        except linalg.SingularMatrix:
            raise SingularChange("change-of-variables matrix is singular") from None

    @property
    def n(self):
        return len(self.matrix)

    @classmethod
    def identity(cls, n):
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @classmethod
    def translation(cls, n, shift):
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], shift)

    def is_homogeneous(self):
        return all(c == 0 for c in self.shift)

    def inverse_matrix(self):
        return self._inverse

    def inverse_change(self):
        """The change composing with self to the identity: X = D^{-1}(U - c)."""
        inv = self._inverse
        rows = [[inv[i, j] for j in range(self.n)] for i in range(self.n)]
        shift = [-sum(inv[i, j] * self.shift[j] for j in range(self.n))
                 for i in range(self.n)]
        return AffineChange(rows, shift)

    def __eq__(self, other):
        return (isinstance(other, AffineChange) and self.matrix == other.matrix
                and self.shift == other.shift)

    def __repr__(self):
        return f"AffineChange(matrix={self.matrix}, shift={self.shift})"


def substitute_affine(p, t):
    """Ring homomorphism sending variable i to sum_j D[i][j] X_j + c_i."""
    if p.n != t.n:
        raise AmbientMismatch("polynomial and change have different ambient sizes")
    n = p.n
    images = []
    for i in range(n):
        terms = {}
        for j in range(n):
            if t.matrix[i][j]:
                e = [0] * n
                e[j] = 1
                terms[tuple(e)] = t.matrix[i][j]
        if t.shift[i]:
            terms[(0,) * n] = t.shift[i]
        images.append(Polynomial(n, terms))
    power_cache = [{0: Polynomial.constant(n, 1)} for _ in range(n)]

    def image_power(i, e):
        cache = power_cache[i]
        if e not in cache:
            cache[e] = image_power(i, e - 1) * images[i]
        return cache[e]

    out = Polynomial.zero(n)
    for m, c in p.terms.items():
        term = Polynomial.constant(n, c)
        for i, e in enumerate(m):
            if e:
                term = term * image_power(i, e)
        out = out + term
    return out


def _univariate_index(p):
    used = p.variables_used()
    if len(used) > 1:
        raise ZeroInput(f"polynomial is not univariate (variables {sorted(used)})")
    return used.pop() if used else 0


def univariate_gcd(u, v):
    """Monic gcd of two univariate polynomials in the same single variable."""
    i = _univariate_index(u if u else v)
    a, b = u, v
    while b:
        a, b = b, _univariate_remainder(a, b, i)
    return a.monic() if a else a


def _univariate_remainder(a, b, i):
    lm_b, lc_b = b.leading()
    db = lm_b[i]
    rem = a
    while rem and rem.leading()[0][i] >= db:
        lm_r, lc_r = rem.leading()
        shift = [0] * rem.n
        shift[i] = lm_r[i] - db
        rem = rem - Polynomial.monomial(rem.n, shift, lc_r / lc_b) * b
    return rem


def squarefree_part(u):
    """u / gcd(u, u'), monic; u must be univariate and nonzero."""
    if not u:
        raise ZeroInput("squarefree part of the zero polynomial")
    i = _univariate_index(u)
    if u.is_constant():
        return Polynomial.constant(u.n, 1)
    g = univariate_gcd(u, partial_derivative(u, i))
    if g.is_constant():
        return u.monic()
    q = divide_exact(u, g)
    assert q is not None, "gcd must divide"
    return q.monic()
