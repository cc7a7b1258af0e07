"""Weyl algebra A_n(Q): normal-ordered operators x^a d^b and their arithmetic.

Normal order is fixed as x-before-d; products are normalized eagerly through
the per-variable identity  d^b x^a = sum_k C(b,k) C(a,k) k! x^(a-k) d^(b-k),
so equal operators always have equal term maps.
"""

import itertools
from fractions import Fraction
from math import comb, factorial

from .errors import AmbientMismatch
from .poly import Polynomial, partial_derivative


class WeylElement:
    """Sparse sum of c * x^alpha d^beta terms, keyed by (alpha, beta)."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        self.terms = {}
        if terms:
            for (alpha, beta), c in terms.items():
                c = Fraction(c)
                if not c:
                    continue
                if len(alpha) != n or len(beta) != n:
                    raise AmbientMismatch("exponent vectors must have length n")
                self.terms[tuple(alpha), tuple(beta)] = c

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def constant(cls, n, c):
        return cls(n, {((0,) * n, (0,) * n): Fraction(c)})

    @classmethod
    def x(cls, n, i):
        alpha = [0] * n
        alpha[i] = 1
        return cls(n, {(tuple(alpha), (0,) * n): Fraction(1)})

    @classmethod
    def d(cls, n, i):
        beta = [0] * n
        beta[i] = 1
        return cls(n, {((0,) * n, tuple(beta)): Fraction(1)})

    @classmethod
    def from_polynomial(cls, p):
        return cls(p.n, {(m, (0,) * p.n): c for m, c in p.terms.items()})

    def _check(self, other):
        if self.n != other.n:
            raise AmbientMismatch(f"ambient sizes differ: {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = WeylElement.constant(self.n, other)
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            s = terms.get(k, Fraction(0)) + c
            if s:
                terms[k] = s
            elif k in terms:
                del terms[k]
        out = WeylElement.__new__(WeylElement)
        out.n, out.terms = self.n, terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = WeylElement.__new__(WeylElement)
        out.n = self.n
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = WeylElement.constant(self.n, other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            out = WeylElement.__new__(WeylElement)
            out.n = self.n
            out.terms = {k: c * v for k, v in self.terms.items()} if c else {}
            return out
        return weyl_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return weyl_mul(other, self)

    def __eq__(self, other):
        return (isinstance(other, WeylElement) and self.n == other.n
                and self.terms == other.terms)

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        parts = []
        for (alpha, beta), c in sorted(self.terms.items()):
            bits = [str(c)]
            bits += [f"x{i}^{e}" for i, e in enumerate(alpha) if e]
            bits += [f"d{i}^{e}" for i, e in enumerate(beta) if e]
            parts.append("*".join(bits))
        return f"WeylElement({' + '.join(parts) or '0'})"

    def is_constant_combination_of_partials(self):
        """True when every term is a constant multiple of a single d_i (degree one)."""
        for (alpha, beta), _ in self.terms.items():
            if any(alpha) or sum(beta) != 1:
                return False
        return True


def weyl_mul(a, b):
    """Normal-ordered product; bilinear and associative."""
    a._check(b)
    n = a.n
    terms = {}
    for (a1, b1), c1 in a.terms.items():
        for (a2, b2), c2 in b.terms.items():
            base = c1 * c2
            ranges = [range(min(b1[i], a2[i]) + 1) for i in range(n)]
            for k in itertools.product(*ranges):
                coeff = base
                for i, ki in enumerate(k):
                    if ki:
                        coeff *= comb(b1[i], ki) * comb(a2[i], ki) * factorial(ki)
                alpha = tuple(a1[i] + a2[i] - k[i] for i in range(n))
                beta = tuple(b1[i] + b2[i] - k[i] for i in range(n))
                key = (alpha, beta)
                s = terms.get(key, Fraction(0)) + coeff
                if s:
                    terms[key] = s
                elif key in terms:
                    del terms[key]
    out = WeylElement.__new__(WeylElement)
    out.n, out.terms = n, terms
    return out


def apply_to_polynomial(d, p):
    """Left action: x^alpha multiplies, d^beta differentiates."""
    if d.n != p.n:
        raise AmbientMismatch(f"ambient sizes differ: {d.n} vs {p.n}")
    out = Polynomial.zero(p.n)
    for (alpha, beta), c in d.terms.items():
        q = p
        for i, e in enumerate(beta):
            for _ in range(e):
                q = partial_derivative(q, i)
            if not q:
                break
        if not q:
            continue
        out = out + Polynomial.monomial(p.n, alpha, c) * q
    return out


def transform_operators(t):
    """The new partials d/dU_i = sum_j F[i][j] d_j with F = (D^{-1})^tr.

    Translations leave the partials unchanged since F depends only on the
    matrix part of the change.
    """
    n = t.n
    inv = t.inverse_matrix()
    ops = []
    for i in range(n):
        op = WeylElement.zero(n)
        for j in range(n):
            f_ij = inv[j, i]  # transpose of the inverse
            if f_ij:
                op = op + WeylElement.d(n, j) * f_ij
        ops.append(op)
    return ops
