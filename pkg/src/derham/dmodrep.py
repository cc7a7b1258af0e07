"""Finite truncations of the D-modules under study.

Covered representations: the polynomial ring R, localizations R_f, the
injective hull E at a rational point (realized at the origin; non-origin
points enter through transformed operators), the module E' = E_{n-1}[X_n],
and Cech positions (direct sums of localizations at subset products).

Conventions, used everywhere:
  * delta(monomial a)            = |a|
  * delta(a / f^k)               = |a| - k * deg f
  * delta(inverse monomial r)    = -n - |r|
  * delta((r, j))                = -(n-1) - |r| + j
Every partial lowers delta by exactly one on graded representations, so
degree strands decouple; on non-graded localizations delta is a filtration
level that drops by at least one.

Basis labels are plain tuples:
  ("m", a)        monomial x^a
  ("f", a, k)     x^a / f^k, with a outside (LT f) whenever k >= 1
  ("e", r)        1/(X_1...X_n * X^r)
  ("ep", r, j)    (inverse monomial r over the first n-1 variables) * X_n^j

The ("f", ., .) labels are a vector-space basis of R_f: repeatedly dividing
the numerator by f pushes every element into this staircase-canonical form.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .errors import NotZeroDimensional, ZeroDivisor, ZeroInput
from .orders import degrevlex
from .poly import AffineChange, Polynomial, divide_exact, partial_derivative


@dataclass(frozen=True)
class TruncationWindow:
    """Bounds for a finite slice: a delta range, a denominator-exponent cap,
    and (for non-graded localizations) a numerator total-degree cap."""

    degree_lo: int
    degree_hi: int
    k_cap: int
    numerator_degree_cap: int | None = None

    def __post_init__(self):
        if self.degree_lo > self.degree_hi:
            raise ValueError("degree_lo must not exceed degree_hi")
        if self.k_cap < 0:
            raise ValueError("k_cap must be non-negative")

    def advance(self, steps=1, num_step=0):
        """The window one differential step later: delta down, caps up."""
        return TruncationWindow(
            self.degree_lo - steps, self.degree_hi - steps, self.k_cap + steps,
            None if self.numerator_degree_cap is None
            else self.numerator_degree_cap + steps * num_step)


def _monomials_of_degree(n, d):
    if d < 0:
        return
    if n == 1:
        yield (d,)
        return
    for first in range(d + 1):
        for rest in _monomials_of_degree(n - 1, d - first):
            yield (first,) + rest


def _vectors_of_total(n, total, cap):
    """Non-negative integer vectors of given total with componentwise cap."""
    if total > n * cap:
        return
    if n == 1:
        if total <= cap:
            yield (total,)
        return
    for first in range(min(cap, total) + 1):
        for rest in _vectors_of_total(n - 1, total - first, cap):
            yield (first,) + rest


class PolyRep:
    """The polynomial ring R as a module over its own partials."""

    graded = True
    name = "R"

    def __init__(self, n):
        self.n = n
        self._memo = {}

    def degree(self, label):
        return sum(label[1])

    def seed_labels(self, w):
        hi = w.degree_hi
        if w.numerator_degree_cap is not None:
            hi = min(hi, w.numerator_degree_cap)
        for d in range(max(0, w.degree_lo), hi + 1):
            for a in _monomials_of_degree(self.n, d):
                yield ("m", a)

    def partial(self, i, label):
        key = (i, label)
        out = self._memo.get(key)
        if out is None:
            a = label[1]
            if a[i]:
                out = ((Fraction(a[i]), ("m", a[:i] + (a[i] - 1,) + a[i + 1:])),)
            else:
                out = ()
            self._memo[key] = out
        return out


class ERep:
    """Injective hull of R/(X_1..X_n) at a rational point, realized at the origin.

    Action formulas live at the origin; a non-origin point only changes the
    operator list (translate_point + transform_operators), never the basis.
    """

    graded = True
    name = "E"

    def __init__(self, n, point=None):
        self.n = n
        self.point = tuple(Fraction(c) for c in point) if point is not None else None
        self._memo = {}

    def degree(self, label):
        return -self.n - sum(label[1])

    def seed_labels(self, w):
        total_lo = max(0, -self.n - w.degree_hi)
        total_hi = -self.n - w.degree_lo
        for total in range(total_lo, total_hi + 1):
            for r in _vectors_of_total(self.n, total, w.k_cap):
                yield ("e", r)

    def partial(self, i, label):
        key = (i, label)
        out = self._memo.get(key)
        if out is None:
            r = label[1]
            out = ((Fraction(-r[i] - 1), ("e", r[:i] + (r[i] + 1,) + r[i + 1:])),)
            self._memo[key] = out
        return out

    def x_action(self, i, label):
        r = label[1]
        if r[i] >= 1:
            return ((Fraction(1), ("e", r[:i] + (r[i] - 1,) + r[i + 1:])),)
        return ()


class EPolyRep:
    """E_{n-1}[X_n]: inverse monomials in the first n-1 variables times powers of X_n."""

    graded = True
    name = "HP"

    def __init__(self, n):
        if n < 2:
            raise ValueError("needs at least two variables")
        self.n = n
        self._memo = {}

    def degree(self, label):
        _, r, j = label
        return -(self.n - 1) - sum(r) + j

    def seed_labels(self, w):
        m = self.n - 1
        for total in range(0, m * w.k_cap + 1):
            for r in _vectors_of_total(m, total, w.k_cap):
                base = -(self.n - 1) - total
                for delta in range(w.degree_lo, w.degree_hi + 1):
                    j = delta - base
                    if j >= 0:
                        yield ("ep", r, j)

    def partial(self, i, label):
        key = (i, label)
        out = self._memo.get(key)
        if out is None:
            _, r, j = label
            if i == self.n - 1:
                out = ((Fraction(j), ("ep", r, j - 1)),) if j >= 1 else ()
            else:
                out = ((Fraction(-r[i] - 1), ("ep", r[:i] + (r[i] + 1,) + r[i + 1:], j)),)
            self._memo[key] = out
        return out


class LocalizedRep:
    """R_f in staircase-canonical coordinates.

    k = 0 labels are plain monomials; for k >= 1 the numerator monomial must
    avoid (LT f) so that the labels are linearly independent.  Action results
    are re-expanded into this form by repeated division by f.
    """

    name = "Rf"

    def __init__(self, n, f):
        if not f:
            raise ZeroDivisor("localization at zero")
        self.n = n
        self.f = f
        self.deg_f = int(f.degree())
        self._order = degrevlex(n)
        self.lt_f, self.lc_f = f.leading(self._order)
        self.graded = f.is_homogeneous()
        self._memo = {}
        self._partials_f = [partial_derivative(f, i) for i in range(n)]

    def degree(self, label):
        _, a, k = label
        return sum(a) - k * self.deg_f

    def _staircase(self, a):
        return any(x < y for x, y in zip(a, self.lt_f))

    def seed_labels(self, w):
        ncap = w.numerator_degree_cap
        for k in range(0, w.k_cap + 1):
            lo = max(0, w.degree_lo + k * self.deg_f)
            hi = w.degree_hi + k * self.deg_f
            if ncap is not None:
                hi = min(hi, ncap)
            for d in range(lo, hi + 1):
                for a in _monomials_of_degree(self.n, d):
                    if k == 0 or self._staircase(a):
                        yield ("f", a, k)

    def expand(self, terms, k):
        """Canonical coordinates of (sum terms)/f^k; terms is an exps->Fraction map."""
        out = {}
        work = [(terms, k)]
        while work:
            b, k = work.pop()
            if k == 0:
                for m, c in b.items():
                    key = ("f", m, 0)
                    s = out.get(key, Fraction(0)) + c
                    if s:
                        out[key] = s
                    elif key in out:
                        del out[key]
                continue
            quotient = {}
            order_key = self._order.key
            b = dict(b)
            while b:
                m = max(b, key=order_key)
                c = b.pop(m)
                if self._staircase(m):
                    key = ("f", m, k)
                    s = out.get(key, Fraction(0)) + c
                    if s:
                        out[key] = s
                    elif key in out:
                        del out[key]
                    continue
                diff = tuple(x - y for x, y in zip(m, self.lt_f))
                factor = c / self.lc_f
                quotient[diff] = quotient.get(diff, Fraction(0)) + factor
                for mf, cf in self.f.terms.items():
                    if mf == self.lt_f:
                        continue
                    mm = tuple(x + y for x, y in zip(diff, mf))
                    s = b.get(mm, Fraction(0)) - factor * cf
                    if s:
                        b[mm] = s
                    elif mm in b:
                        del b[mm]
            if quotient:
                work.append((quotient, k - 1))
        return out

    def partial(self, i, label):
        key = (i, label)
        out = self._memo.get(key)
        if out is None:
            _, a, k = label
            if k == 0:
                if a[i]:
                    out = ((Fraction(a[i]), ("f", a[:i] + (a[i] - 1,) + a[i + 1:], 0)),)
                else:
                    out = ()
            else:
                # quotient rule: (d_i(a) f - k a d_i(f)) / f^(k+1)
                num = {}
                if a[i]:
                    da = {a[:i] + (a[i] - 1,) + a[i + 1:]: Fraction(a[i])}
                    for m1, c1 in da.items():
                        for m2, c2 in self.f.terms.items():
                            mm = tuple(x + y for x, y in zip(m1, m2))
                            num[mm] = num.get(mm, Fraction(0)) + c1 * c2
                for m2, c2 in self._partials_f[i].terms.items():
                    mm = tuple(x + y for x, y in zip(a, m2))
                    s = num.get(mm, Fraction(0)) - k * c2
                    if s:
                        num[mm] = s
                    elif mm in num:
                        del num[mm]
                out = tuple((c, lab) for lab, c in sorted(self.expand(num, k + 1).items()))
            self._memo[key] = out
        return out


@dataclass(frozen=True)
class FractionElement:
    """a / f^k in lowest terms: k = 0 unless f no longer divides a."""

    numerator: Polynomial
    k: int

    def normalized(self, f):
        num, k = self.numerator, self.k
        if not num:
            return FractionElement(num, 0)
        while k > 0:
            q = divide_exact(num, f)
            if q is None:
                break
            num, k = q, k - 1
        return FractionElement(num, k)


def localized_partial(i, x, f):
    """d_i(a/f^k) by the quotient rule, re-normalized to lowest terms."""
    if not f:
        raise ZeroDivisor("localization at zero")
    a, k = x.numerator, x.k
    num = partial_derivative(a, i) * f - k * a * partial_derivative(f, i)
    return FractionElement(num, k + 1).normalized(f)


def translate_point(point):
    """The change U_i = X_i - a_i carrying the maximal ideal at the point to the origin."""
    n = len(point)
    return AffineChange.translation(n, [-Fraction(c) for c in point])


def _rational_roots(u, i):
    """Rational roots of a univariate polynomial in variable i."""
    denoms = 1
    for c in u.terms.values():
        denoms = denoms * c.denominator // __import__("math").gcd(denoms, c.denominator)
    coeffs = {}
    for m, c in u.terms.items():
        coeffs[m[i]] = int(c * denoms)
    deg = max(coeffs)
    lead = coeffs[deg]
    low = min(e for e in coeffs)
    roots = set()
    if low > 0:
        roots.add(Fraction(0))
        coeffs = {e - low: c for e, c in coeffs.items()}
        low = 0
    const = coeffs.get(0, 0)
    if const == 0:
        return sorted(roots)

    def divisors(v):
        v = abs(v)
        out = set()
        d = 1
        while d * d <= v:
            if v % d == 0:
                out.add(d)
                out.add(v // d)
            d += 1
        return out

    for p in divisors(const):
        for q in divisors(lead):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if sum(c * cand ** e for e, c in coeffs.items()) == 0:
                    roots.add(cand)
    return sorted(roots)


def comaximal_points(I, gb=None):
    """All points of V(I) when they are rational; None when some are not.

    Rationality test: every minimal polynomial splits into distinct linear
    factors over Q.  Candidate tuples from the root grids are filtered by
    membership.
    """
    from . import idealkit

    gb = gb or idealkit.groebner(I)
    if idealkit.staircase_dim(gb) is None:
        raise NotZeroDimensional("comaximal decomposition needs a zero-dimensional ideal")
    root_grid = []
    for i in range(I.n):
        u = idealkit.minimal_polynomial(I, i, gb)
        roots = _rational_roots(u, i)
        if len(roots) != max(m[i] for m in u.terms):
            return None
        root_grid.append(roots)
    points = []
    for cand in itertools.product(*root_grid):
        if all(g.evaluate(cand) == 0 for g in I.generators):
            points.append(tuple(cand))
    return points


@dataclass
class ModuleSlice:
    """A finite slice: ordered basis labels, per-partial matrices into the
    advanced slice, and the generating window."""

    basis: list
    window: TruncationWindow
    target_basis: list
    actions: list


def _label_sort_key(label):
    if label[0] == "m":
        return (0, sum(label[1]), label[1])
    if label[0] == "f":
        return (label[2], sum(label[1]), label[1])
    if label[0] == "e":
        return (sum(label[1]), label[1])
    if label[0] == "ep":
        return (label[2], sum(label[1]), label[1])
    # direct-sum labels: (summand index, inner label)
    return (label[0],) + _label_sort_key(label[1])


def action_matrix(rep, i, src_labels, dst_index):
    entries = {}
    for col, label in enumerate(src_labels):
        for coeff, out in rep.partial(i, label):
            row = dst_index.get(out)
            if row is None:
                raise KeyError(f"action image {out} escapes the target slice")
            entries[row, col] = entries.get((row, col), Fraction(0)) + coeff
    return linalg.RationalMatrix(len(dst_index), len(src_labels), entries)


def build_slice(rep, window, num_step=None):
    """Finite basis of the representation inside the window, with each
    partial's matrix landing in the once-advanced window."""
    if num_step is None:
        num_step = max(1, getattr(rep, "deg_f", 1) - 1)
    basis = sorted(set(rep.seed_labels(window)), key=_label_sort_key)
    target_window = window.advance(1, num_step)
    target = set(rep.seed_labels(target_window))
    for label in basis:
        for i in range(rep.n):
            for _, out in rep.partial(i, label):
                target.add(out)
    target_basis = sorted(target, key=_label_sort_key)
    dst_index = {lab: r for r, lab in enumerate(target_basis)}
    actions = [action_matrix(rep, i, basis, dst_index) for i in range(rep.n)]
    return ModuleSlice(basis, window, target_basis, actions)


def e_module_actions(i, r):
    """(x_action, d_action) of the i-th variable on the inverse monomial r."""
    n = len(r)
    rep = ERep(n)
    label = ("e", tuple(r))
    return rep.x_action(i, label), rep.partial(i, label)


def epoly_module_actions(i, r, j):
    """Action of d_i on (inverse monomial r over n-1 vars) * X_n^j."""
    n = len(r) + 1
    rep = EPolyRep(n)
    return rep.partial(i, ("ep", tuple(r), j))


class CechSpec:
    """Cech data: generators g_0..g_{s-1}; position p is the direct sum of
    localizations at products over size-p subsets, ordered lexicographically."""

    def __init__(self, generators):
        gens = tuple(generators)
        if not gens:
            raise ZeroInput("need at least one generator")
        for g in gens:
            if not g:
                raise ZeroInput("zero Cech generator")
        self.generators = gens
        self.n = gens[0].n
        self.s = len(gens)
        self._reps = {}
        self._map_memo = {}

    def subsets(self, p):
        return list(itertools.combinations(range(self.s), p))

    def position_rep(self, S):
        S = tuple(S)
        rep = self._reps.get(S)
        if rep is None:
            if not S:
                rep = PolyRep(self.n)
            else:
                f = self.generators[S[0]]
                for t in S[1:]:
                    f = f * self.generators[t]
                rep = LocalizedRep(self.n, f)
            self._reps[S] = rep
        return rep

    @property
    def graded(self):
        return all(g.is_homogeneous() for g in self.generators)

    def max_gen_degree(self):
        return max(int(g.degree()) for g in self.generators)

    def cech_map(self, S, l, label):
        """Image of a position-S label in position S+{l}: a/f_S^k -> a g_l^k / f_{S+l}^k."""
        S = tuple(S)
        key = (S, l, label)
        out = self._map_memo.get(key)
        if out is None:
            target = self.position_rep(tuple(sorted(S + (l,))))
            if label[0] == "m":
                a, k = label[1], 0
            else:
                _, a, k = label
            if k == 0:
                terms = {a: Fraction(1)}
            else:
                gl_k = self.generators[l] ** k
                terms = {tuple(x + y for x, y in zip(a, m)): c
                         for m, c in gl_k.terms.items()}
            out = tuple((c, lab) for lab, c in sorted(target.expand(terms, k).items()))
            self._map_memo[key] = out
        return out

    def cech_sign(self, S, l):
        return -1 if sum(1 for t in S if t < l) % 2 else 1


def cech_inclusion_matrices(spec, window):
    """The Cech differential position->position+1 restricted to window slices.

    Bases are window seeds closed under the maps, so consecutive composites
    vanish exactly on the slices.
    """
    bases = {}
    for p in range(spec.s + 1):
        for S in spec.subsets(p):
            rep = spec.position_rep(S)
            labels = set(rep.seed_labels(window))
            if not S:
                labels = {("m", lab[1]) if lab[0] == "m" else lab for lab in labels}
            bases[S] = labels
    for p in range(spec.s):
        for S in spec.subsets(p):
            for label in bases[S]:
                for l in range(spec.s):
                    if l in S:
                        continue
                    T = tuple(sorted(S + (l,)))
                    for _, out in spec.cech_map(S, l, label):
                        bases[T].add(out)
    ordered = {S: sorted(labels, key=_label_sort_key) for S, labels in bases.items()}
    matrices = []
    for p in range(spec.s):
        src_subsets = spec.subsets(p)
        dst_subsets = spec.subsets(p + 1)
        src_offsets, total_src = {}, 0
        for S in src_subsets:
            src_offsets[S] = total_src
            total_src += len(ordered[S])
        dst_offsets, total_dst = {}, 0
        for T in dst_subsets:
            dst_offsets[T] = total_dst
            total_dst += len(ordered[T])
        dst_index = {T: {lab: r for r, lab in enumerate(ordered[T])} for T in dst_subsets}
        entries = {}
        for S in src_subsets:
            for col_local, label in enumerate(ordered[S]):
                col = src_offsets[S] + col_local
                for l in range(spec.s):
                    if l in S:
                        continue
                    T = tuple(sorted(S + (l,)))
                    sign = spec.cech_sign(S, l)
                    for coeff, out in spec.cech_map(S, l, label):
                        row = dst_offsets[T] + dst_index[T][out]
                        s = entries.get((row, col), Fraction(0)) + sign * coeff
                        if s:
                            entries[row, col] = s
                        elif (row, col) in entries:
                            del entries[row, col]
        matrices.append(linalg.RationalMatrix(total_dst, total_src, entries))
    return matrices
