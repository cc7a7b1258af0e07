"""Monomial orders: lex and degrevlex, with an optional variable permutation.

An order compares exponent tuples through ``key``; larger key means larger
monomial.  ``perm[0]`` is the most significant variable.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class MonomialOrder:
    tag: str                 # "lex" | "degrevlex"
    perm: tuple[int, ...]

    def key(self, exps):
        if self.tag == "lex":
            return tuple(exps[v] for v in self.perm)
        # degrevlex: total degree, ties broken by the smallest trailing entry
        return (sum(exps), tuple(-exps[v] for v in reversed(self.perm)))

    @property
    def n(self):
        return len(self.perm)


def lex(n, perm=None):
    return MonomialOrder("lex", tuple(perm) if perm is not None else tuple(range(n)))


def degrevlex(n, perm=None):
    return MonomialOrder("degrevlex", tuple(perm) if perm is not None else tuple(range(n)))
