"""The group and pre-Lie/Lie algebra attached to a symmetric operad.

A group element is a sequence ``(id, a_2, ..., a_m)`` with ``a_n`` of arity
``n``, truncated at order ``m``; the product sums full compositions over
set partitions, twisted by the block-reading permutation.  Lie elements
have zero in arity one and the pre-Lie product keeps only the partitions
with a single non-singleton block.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Any, Sequence

from .combinatorics import (
    enumerate_set_partitions,
    nonempty_subsets,
    partition_from_subset,
    partition_permutation,
)
from .formal_diffeo import SeriesElement
from .operad import EndOperad, Multilinear, Operad


class _Truncated:

    __slots__ = ("carrier", "order", "components")

    def __init__(self, carrier: Operad, order: int, components: Sequence[Any] | None = None):
        if order < 1:
            raise ValueError("truncation order must be >= 1")
        comps = list(components) if components is not None else []
        if len(comps) > order - 1:
            raise ValueError(f"{len(comps)} components do not fit order {order}")
        comps += [carrier.zero(n) for n in range(len(comps) + 2, order + 1)]
        for n, a in enumerate(comps, start=2):
            if carrier.arity(a) != n:
                raise ValueError(f"component {n} has arity {carrier.arity(a)}")
        self.carrier = carrier
        self.order = order
        self.components = tuple(comps)

    def __getitem__(self, n: int):
        if n == 1:
            return self._first()
        if not 2 <= n <= self.order:
            raise IndexError(f"component {n} outside 1..{self.order}")
        return self.components[n - 2]

    def _first(self):
        raise NotImplementedError

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return (
            self.carrier == other.carrier
            and self.order == other.order
            and all(self.carrier.equal(a, b) for a, b in zip(self.components, other.components))
        )

    def __hash__(self):
        return hash((type(self).__name__, self.order))

    def __repr__(self):
        return f"{type(self).__name__}({self.carrier!r}, order={self.order})"

    def render(self) -> str:
        return "".join(self.carrier.render(a) for a in self.components)

    def map(self, fn) -> "_Truncated":
        return type(self)(self.carrier, self.order, [fn(a) for a in self.components])


class GroupElement(_Truncated):
    """Element of the operadic group, truncated at ``order``."""

    def _first(self):
        return self.carrier.unit()

    @classmethod
    def unit(cls, carrier: Operad, order: int) -> "GroupElement":
        return cls(carrier, order)

    @classmethod
    def random(cls, carrier: Operad, order: int, rng: random.Random) -> "GroupElement":
        return cls(carrier, order, [carrier.random_element(n, rng) for n in range(2, order + 1)])


class LieElement(_Truncated):
    """Element of the Lie algebra, truncated at ``order``."""

    def _first(self):
        return self.carrier.zero(1)

    @classmethod
    def zero(cls, carrier: Operad, order: int) -> "LieElement":
        return cls(carrier, order)

    @classmethod
    def random(cls, carrier: Operad, order: int, rng: random.Random) -> "LieElement":
        return cls(carrier, order, [carrier.random_element(n, rng) for n in range(2, order + 1)])

    def __add__(self, other):
        _check_pair(self, other)
        return LieElement(self.carrier, self.order,
                          [self.carrier.add(a, b) for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        _check_pair(self, other)
        return LieElement(self.carrier, self.order,
                          [self.carrier.sub(a, b) for a, b in zip(self.components, other.components)])

    def scaled(self, c) -> "LieElement":
        return self.map(lambda a: self.carrier.scale(a, c))


def _check_pair(x: _Truncated, y: _Truncated):
    if x.carrier != y.carrier:
        raise ValueError("elements live over different operads")
    if x.order != y.order:
        raise ValueError(f"truncation order mismatch: {x.order} != {y.order}")


@lru_cache(maxsize=None)
def _partitions_with_perms(n: int):
    return [(p, partition_permutation(p)) for p in enumerate_set_partitions(n)]


@lru_cache(maxsize=None)
def _subsets_with_perms(n: int, min_size: int, max_size: int):
    return [(J, partition_permutation(partition_from_subset(J, n)))
            for J in nonempty_subsets(n, min_size, max_size)]


def group_product(g: GroupElement, f: GroupElement) -> GroupElement:
    """``(g . f)_n = sum over partitions P of gamma(g_k; f_j1, ..., f_jk)^sigma_P``."""
    _check_pair(g, f)
    P = g.carrier
    comps = []
    for n in range(2, g.order + 1):
        terms = []
        for part, sigma in _partitions_with_perms(n):
            k = len(part)
            if k == n:
                terms.append(g[n])
                continue
            if k == 1:
                terms.append(f[n])
                continue
            outer = g[k]
            if P.is_zero(outer):
                continue
            inner = [f[j] for j in part.sizes]
            if any(j > 1 and P.is_zero(x) for j, x in zip(part.sizes, inner)):
                continue
            terms.append(P.act(P.gamma(outer, inner), sigma))
        comps.append(P.sum(terms, n))
    return GroupElement(P, g.order, comps)


def group_inverse(f: GroupElement) -> GroupElement:
    """Two-sided inverse, fixed degree by degree from ``(inv . f)_n = 0``."""
    P, m = f.carrier, f.order
    comps: list[Any] = []
    for n in range(2, m + 1):
        trial = GroupElement(P, m, comps)
        comps.append(P.scale(group_product(trial, f)[n], -1))
    return GroupElement(P, m, comps)


def prelie_product(f: LieElement, g: LieElement) -> LieElement:
    """``(f * g)_n = sum over J of (g_k o_{min J} f_|J|)^sigma_{P_J}``."""
    _check_pair(f, g)
    P = f.carrier
    comps = []
    for n in range(2, f.order + 1):
        terms = []
        for J, sigma in _subsets_with_perms(n, 2, n - 1):
            j = len(J)
            gk, fj = g[n - j + 1], f[j]
            if P.is_zero(gk) or P.is_zero(fj):
                continue
            terms.append(P.act(P.pcomp(gk, J[0], fj), sigma))
        comps.append(P.sum(terms, n))
    return LieElement(P, f.order, comps)


def lie_bracket(f: LieElement, g: LieElement) -> LieElement:
    return prelie_product(f, g) - prelie_product(g, f)


def exp_map(l: LieElement) -> GroupElement:
    """Time-one value of the flow ``g'(t) = d/de [g(t) . (1 + e*l)]``, ``g(0) = 1``.

    Each component ``g_n(t)`` is a polynomial in ``t``; the right-hand side in
    degree ``n`` only involves ``g_k`` with ``k < n`` because ``l_1 = 0``.
    """
    P, m = l.carrier, l.order
    # poly[n][p] is the coefficient of t**p in g_n(t)
    poly: dict[int, list[Any]] = {1: [P.unit()]}
    for n in range(2, m + 1):
        rhs: dict[int, list[Any]] = {}
        for J, sigma in _subsets_with_perms(n, 2, n):
            j = len(J)
            lj = l[j]
            if P.is_zero(lj):
                continue
            k = n - j + 1
            for p, c in enumerate(poly[k]):
                if k == 1:
                    term = lj
                else:
                    if P.is_zero(c):
                        continue
                    term = P.act(P.pcomp(c, J[0], lj), sigma)
                rhs.setdefault(p, []).append(term)
        top = max(rhs, default=-1)
        poly[n] = [P.zero(n)] + [
            P.scale(P.sum(rhs.get(p, []), n), Fraction(1, p + 1)) for p in range(top + 1)
        ]
    return GroupElement(P, m, [P.sum(poly[n], n) for n in range(2, m + 1)])


def log_map(g: GroupElement) -> LieElement:
    """The unique ``l`` with ``exp_map(l) == g``, solved degree by degree."""
    P, m = g.carrier, g.order
    comps: list[Any] = []
    for n in range(2, m + 1):
        trial = exp_map(LieElement(P, m, comps))
        comps.append(P.sub(g[n], trial[n]))
    return LieElement(P, m, comps)


def truncate(x: _Truncated, order: int) -> _Truncated:
    """Image in the quotient by the elements vanishing through ``order``."""
    if order > x.order:
        raise ValueError(f"cannot truncate order {x.order} to {order}")
    return type(x)(x.carrier, order, x.components[: order - 1])


def symmetrize_element(g: _Truncated) -> _Truncated:
    return g.map(g.carrier.symmetrize)


def is_invariant(g: _Truncated) -> bool:
    return all(g.carrier.is_invariant(a) for a in g.components)


def conjugate(g: GroupElement, h: GroupElement) -> GroupElement:
    return group_product(group_product(g, h), group_inverse(g))


def prelie_associator_symmetry(carrier: Operad, order: int, rng: random.Random, trials: int = 5) -> str:
    """Report which pre-Lie identity the product satisfies on random samples.

    Returns ``"right"`` when ``(x*y)*z - x*(y*z)`` is symmetric in ``(y, z)``,
    ``"left"`` when it is symmetric in ``(x, y)``, ``"both"`` or ``"neither"``.
    """
    def assoc(x, y, z):
        return prelie_product(prelie_product(x, y), z) - prelie_product(x, prelie_product(y, z))

    right = left = True
    for _ in range(trials):
        x, y, z = (LieElement.random(carrier, order, rng) for _ in range(3))
        right = right and assoc(x, y, z) == assoc(x, z, y)
        left = left and assoc(x, y, z) == assoc(y, x, z)
    return {(True, True): "both", (True, False): "right", (False, True): "left"}.get((right, left), "neither")


# -- endomorphism operad <-> formal diffeomorphisms --------------------------------

def series_to_group(series: SeriesElement, carrier: EndOperad | None = None) -> GroupElement:
    """Pointed series as an invariant group element of the endomorphism operad."""
    if not series.is_pointed():
        raise ValueError("only pointed series correspond to group elements")
    carrier = carrier or EndOperad(series.dim)
    if carrier.dim != series.dim:
        raise ValueError("dimension mismatch")
    comps = [Multilinear(series.dim, n, series.tensor(n)) for n in range(2, series.order + 1)]
    return GroupElement(carrier, series.order, comps)


def group_to_series(g: GroupElement) -> SeriesElement:
    """Read an invariant endomorphism-operad group element as a series."""
    P = g.carrier
    if not isinstance(P, EndOperad):
        raise TypeError("group_to_series needs an element over an endomorphism operad")
    data = {}
    for nu in range(1, P.dim + 1):
        data[(nu, (nu,))] = 1
    for n in range(2, g.order + 1):
        a = g[n]
        for (nu, mu), v in a.entries.items():
            if any(a.get(nu, p) != v for p in permutations(mu)):
                raise ValueError(f"component {n} is not S_{n}-invariant")
            data[(nu, tuple(sorted(mu)))] = v
    return SeriesElement(P.dim, g.order, data)
