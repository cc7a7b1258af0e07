"""Groebner-basis toolkit: normal forms, staircases, dimension, zero-dimensional
radicals, saturation, and point counting over the algebraic closure.

Buchberger with the coprimality and chain criteria is plenty at this scale
(few variables, low degrees); bases are fully reduced and monic.
"""

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .errors import (NoGoodChangeFound, NotHomogeneous, NotZeroDimensional,
                     SingularChange, UnitIdeal, WrongHeight, ZeroDivisor,
                     ZeroInput)
from .orders import degrevlex, lex
from .poly import AffineChange, Polynomial, squarefree_part, substitute_affine


@dataclass(frozen=True)
class Ideal:
    n: int
    generators: tuple

    def __post_init__(self):
        if not self.generators:
            raise ZeroInput("an ideal needs at least one generator")
        for g in self.generators:
            if not g:
                raise ZeroInput("zero generator")
            if g.n != self.n:
                raise ValueError("generator in the wrong ambient ring")


def ideal(*gens):
    gens = tuple(gens)
    return Ideal(gens[0].n, gens)


@dataclass(frozen=True)
class GroebnerBasis:
    order: object
    basis: tuple

    @property
    def n(self):
        return self.basis[0].n

    def leading_monomials(self):
        return [g.leading(self.order)[0] for g in self.basis]

    def is_unit(self):
        return len(self.basis) == 1 and self.basis[0].is_constant()


def _divides(m, lm):
    return all(a >= b for a, b in zip(m, lm))


def normal_form(p, gb):
    """Remainder of multivariate division of p by the basis; zero iff p in the ideal."""
    order = gb.order
    leads = [(g.leading(order)[0], g.leading(order)[1], g) for g in gb.basis]
    rem = {}
    work = dict(p.terms)
    while work:
        m = max(work, key=order.key)
        c = work.pop(m)
        for lm, lc, g in leads:
            if _divides(m, lm):
                factor = c / lc
                diff = tuple(a - b for a, b in zip(m, lm))
                for mg, cg in g.terms.items():
                    if mg == lm:
                        continue
                    mm = tuple(a + b for a, b in zip(diff, mg))
                    s = work.get(mm, Fraction(0)) - factor * cg
                    if s:
                        work[mm] = s
                    elif mm in work:
                        del work[mm]
                break
        else:
            rem[m] = c
    return Polynomial(p.n, rem)


def _spoly(f, g, order):
    lm_f, lc_f = f.leading(order)
    lm_g, lc_g = g.leading(order)
    lcm = tuple(max(a, b) for a, b in zip(lm_f, lm_g))
    mf = tuple(a - b for a, b in zip(lcm, lm_f))
    mg = tuple(a - b for a, b in zip(lcm, lm_g))
    return (Polynomial.monomial(f.n, mf, 1 / lc_f) * f
            - Polynomial.monomial(g.n, mg, 1 / lc_g) * g)


def _interreduce(polys, order):
    polys = [p.monic(order) for p in polys if p]
    changed = True
    while changed:
        changed = False
        for i, p in enumerate(polys):
            rest = GroebnerBasis(order, tuple(polys[:i] + polys[i + 1:]))
            if not rest.basis:
                continue
            r = normal_form(p, rest)
            if r != p:
                changed = True
                if r:
                    polys[i] = r.monic(order)
                else:
                    polys.pop(i)
                break
    polys.sort(key=lambda g: order.key(g.leading(order)[0]), reverse=True)
    return polys


def groebner(I, order=None):
    """Reduced Groebner basis of I.  The unit ideal yields basis (1)."""
    order = order or degrevlex(I.n)
    G = [g.monic(order) for g in I.generators if g]
    lead = [g.leading(order)[0] for g in G]
    pairs = {(i, j) for i in range(len(G)) for j in range(i)}

    def lcm(a, b):
        return tuple(max(x, y) for x, y in zip(a, b))

    while pairs:
        i, j = min(pairs, key=lambda ij: (sum(lcm(lead[ij[0]], lead[ij[1]])), ij))
        pairs.discard((i, j))
        l = lcm(lead[i], lead[j])
        # coprime leading terms: S-polynomial reduces to zero
        if l == tuple(a + b for a, b in zip(lead[i], lead[j])):
            continue
        # chain criterion
        skip = False
        for k in range(len(G)):
            if k in (i, j) or not _divides(l, lead[k]):
                continue
            p1 = (max(i, k), min(i, k))
            p2 = (max(j, k), min(j, k))
            if p1 not in pairs and p2 not in pairs:
                skip = True
                break
        if skip:
            continue
        r = normal_form(_spoly(G[i], G[j], order), GroebnerBasis(order, tuple(G)))
        if r:
            r = r.monic(order)
            G.append(r)
            lead.append(r.leading(order)[0])
            k = len(G) - 1
            pairs.update((k, t) for t in range(k))
    G = _interreduce(G, order)
    if any(g.is_constant() for g in G):
        return GroebnerBasis(order, (Polynomial.constant(I.n, 1),))
    return GroebnerBasis(order, tuple(G))


def staircase_dim(gb):
    """dim_K R/I as the number of standard monomials, or None when infinite."""
    if gb.is_unit():
        return 0
    leads = gb.leading_monomials()
    n = gb.n
    bounds = [None] * n
    for lm in leads:
        support = [i for i, e in enumerate(lm) if e]
        if len(support) == 1:
            i = support[0]
            if bounds[i] is None or lm[i] < bounds[i]:
                bounds[i] = lm[i]
    if any(b is None for b in bounds):
        return None
    count = 0
    for exps in itertools.product(*(range(b) for b in bounds)):
        if not any(_divides(exps, lm) for lm in leads):
            count += 1
    return count


def standard_monomials(gb):
    if gb.is_unit():
        return []
    leads = gb.leading_monomials()
    bounds = []
    for i in range(gb.n):
        b = None
        for lm in leads:
            if lm[i] and all(e == 0 for j, e in enumerate(lm) if j != i):
                b = lm[i] if b is None else min(b, lm[i])
        if b is None:
            raise NotZeroDimensional("staircase is infinite")
        bounds.append(b)
    out = [exps for exps in itertools.product(*(range(b) for b in bounds))
           if not any(_divides(exps, lm) for lm in leads)]
    out.sort(key=lambda m: (sum(m), m))
    return out


def krull_dim(gb):
    """Krull dimension of R/I via maximal independent variable subsets."""
    if gb.is_unit():
        raise UnitIdeal("the unit ideal has no Krull dimension")
    leads = gb.leading_monomials()
    supports = [frozenset(i for i, e in enumerate(lm) if e) for lm in leads]
    n = gb.n
    best = 0
    for size in range(n, -1, -1):
        for subset in itertools.combinations(range(n), size):
            s = set(subset)
            if not any(sup <= s for sup in supports):
                return size
    return best


def minimal_polynomial(I, i, gb=None):
    """Monic generator of I /\\ K[X_i], by linear algebra on normal forms of powers."""
    gb = gb or groebner(I)
    if gb.is_unit():
        raise UnitIdeal("unit ideal")
    monos = standard_monomials(gb)  # raises NotZeroDimensional when infinite
    index = {m: t for t, m in enumerate(monos)}
    dim = len(monos)
    xi = Polynomial.variable(I.n, i)
    vectors = []
    power = Polynomial.constant(I.n, 1)
    while True:
        nf = normal_form(power, gb)
        vec = [Fraction(0)] * dim
        for m, c in nf.terms.items():
            vec[index[m]] = c
        vectors.append(vec)
        if len(vectors) > 1:
            m = linalg.RationalMatrix.from_rows(
                [[vectors[r][c] for r in range(len(vectors) - 1)] for c in range(dim)])
            sol = linalg.solve(m, vectors[-1])
            if sol is not None:
                deg = len(vectors) - 1
                exps = [0] * I.n
                terms = {}
                for t, c in enumerate(sol):
                    if c:
                        e = list(exps)
                        e[i] = t
                        terms[tuple(e)] = -c
                e = list(exps)
                e[i] = deg
                terms[tuple(e)] = Fraction(1)
                return Polynomial(I.n, terms)
        power = power * xi
        if len(vectors) > dim + 1:
            raise AssertionError("no dependence found below the staircase bound")


def zero_dim_radical(I, gb=None):
    """I plus the squarefree parts of all minimal polynomials (Seidenberg)."""
    gb = gb or groebner(I)
    if gb.is_unit():
        raise UnitIdeal("unit ideal")
    if staircase_dim(gb) is None:
        raise NotZeroDimensional("radical shortcut needs a finite staircase")
    extra = []
    for i in range(I.n):
        u = minimal_polynomial(I, i, gb)
        extra.append(squarefree_part(u))
    return Ideal(I.n, tuple(I.generators) + tuple(extra))


def affine_point_count(I):
    """#V(I) over the algebraic closure = staircase dimension of the radical."""
    gb = groebner(I)
    if gb.is_unit():
        raise UnitIdeal("unit ideal")
    if staircase_dim(gb) is None:
        raise NotZeroDimensional("affine point counting needs a zero-dimensional ideal")
    rad = zero_dim_radical(I, gb)
    count = staircase_dim(groebner(rad))
    assert count is not None
    return count


def _extend_ring(p, extra_front=1):
    """Reinterpret p in K[t_1..t_extra, X_1..X_n] with the t's in front."""
    terms = {(0,) * extra_front + m: c for m, c in p.terms.items()}
    return Polynomial(p.n + extra_front, terms)


def _project_ring(p, extra_front=1):
    terms = {}
    for m, c in p.terms.items():
        if any(m[:extra_front]):
            raise ValueError("polynomial still involves the auxiliary variable")
        terms[m[extra_front:]] = c
    return Polynomial(p.n - extra_front, terms)


def saturate(I, f):
    """I : f^infinity via elimination of t from I + (t*f - 1)."""
    if not f:
        raise ZeroDivisor("saturation by zero")
    n = I.n
    gens = [_extend_ring(g) for g in I.generators]
    t = Polynomial.variable(n + 1, 0)
    gens.append(t * _extend_ring(f) - 1)
    gb = groebner(Ideal(n + 1, tuple(gens)), lex(n + 1))
    kept = [_project_ring(g) for g in gb.basis if 0 not in g.variables_used()]
    if not kept:
        kept = [Polynomial.constant(n, 1)]
    return Ideal(n, tuple(kept))


def radical_membership(p, I):
    """True iff p lies in the radical of I (Rabinowitsch trick)."""
    if not p:
        return True
    n = I.n
    gens = [_extend_ring(g) for g in I.generators]
    t = Polynomial.variable(n + 1, 0)
    gens.append(t * _extend_ring(p) - 1)
    gb = groebner(Ideal(n + 1, tuple(gens)), degrevlex(n + 1))
    return gb.is_unit()


def _random_homogeneous_change(rng, n):
    while True:
        rows = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)]
        try:
            return AffineChange(rows)
        except SingularChange:
            continue


def projective_point_count(I, rng=None, retries=32):
    """#V*(I) in P^{n-1} for a height n-1 homogeneous ideal.

    Applies random homogeneous changes of variables until no point of V(I)
    lies on the hyperplane X_n = 0, then counts affine points of the
    dehomogenization at X_n = 1.
    """
    rng = rng or random.Random(0)
    n = I.n
    for g in I.generators:
        if not g.is_homogeneous():
            raise NotHomogeneous("projective counting needs homogeneous generators")
    gb = groebner(I)
    if gb.is_unit():
        raise UnitIdeal("unit ideal")
    if krull_dim(gb) != 1:
        raise WrongHeight(f"expected Krull dimension 1, got {krull_dim(gb)}")
    xn = Polynomial.variable(n, n - 1)
    one_shift = Polynomial.variable(n, n - 1) - 1
    for _ in range(retries):
        change = _random_homogeneous_change(rng, n)
        gens = tuple(substitute_affine(g, change) for g in I.generators)
        at_infinity = Ideal(n, gens + (xn,))
        if not all(radical_membership(Polynomial.variable(n, i), at_infinity)
                   for i in range(n)):
            continue
        dehom = Ideal(n, gens + (one_shift,))
        gbd = groebner(dehom)
        if gbd.is_unit() or staircase_dim(gbd) is None:
            continue
        return affine_point_count(dehom)
    raise NoGoodChangeFound(f"no good change of variables in {retries} attempts")
