"""Truncated multivariate formal power series without constant term.

A series ``y = f(x)`` in ``N`` variables is stored by its coefficients
``f[nu; mu_1..mu_n]`` in the normalization

    y_nu = sum_n 1/n! sum_{mu_1..mu_n} f[nu; mu_1..mu_n] x_mu_1 ... x_mu_n

so that the degree-``n`` tensor is the ``n``-th derivative at the origin.
Tensors are symmetric; only the sorted representative of each index
multiset is stored.  Indices are 1-based.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product
from math import factorial, prod
from typing import Iterable, Mapping, Sequence

from .combinatorics import enumerate_set_partitions

Key = tuple[int, tuple[int, ...]]


class SeriesElement:
    """Formal diffeomorphism-like series truncated at order ``order``."""

    __slots__ = ("dim", "order", "_coeffs")

    def __init__(self, dim: int, order: int, coeffs: Mapping[Key, object] | None = None):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if order < 1:
            raise ValueError("truncation order must be >= 1")
        self.dim = dim
        self.order = order
        store: dict[Key, Fraction] = {}
        for (nu, mu), value in (coeffs or {}).items():
            mu = tuple(sorted(mu))
            if not 1 <= len(mu) <= order:
                raise ValueError(f"degree {len(mu)} outside 1..{order}")
            if not 1 <= nu <= dim or any(not 1 <= x <= dim for x in mu):
                raise ValueError(f"index out of range in {(nu, mu)}")
            value = Fraction(value)
            key = (nu, mu)
            if key in store and store[key] != value:
                raise ValueError(f"conflicting values for symmetric entry {key}")
            if value:
                store[key] = value
        self._coeffs = store

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, dim: int, order: int) -> "SeriesElement":
        return cls(dim, order, {(nu, (nu,)): 1 for nu in range(1, dim + 1)})

    @classmethod
    def from_univariate(cls, coeffs: Sequence[object], order: int) -> "SeriesElement":
        """Build an ``N=1`` series from monomial coefficients ``c_1, c_2, ...``.

        ``c_n`` is the coefficient of ``x**n``; the stored tensor is ``n! c_n``.
        """
        data = {}
        for n, c in enumerate(coeffs, start=1):
            if n > order:
                break
            data[(1, (1,) * n)] = Fraction(c) * factorial(n)
        return cls(1, order, data)

    # -- access --------------------------------------------------------------

    def coefficient(self, nu: int, mu: Iterable[int]) -> Fraction:
        return self._coeffs.get((nu, tuple(sorted(mu))), Fraction(0))

    def items(self):
        return sorted(self._coeffs.items(), key=lambda kv: (len(kv[0][1]), kv[0]))

    def degree(self, n: int) -> dict[Key, Fraction]:
        return {k: v for k, v in self._coeffs.items() if len(k[1]) == n}

    def tensor(self, n: int) -> dict[tuple[int, tuple[int, ...]], Fraction]:
        """Full (unsorted) degree-``n`` tensor, every ordering of each multiset."""
        out = {}
        for (nu, mu), v in self._coeffs.items():
            if len(mu) == n:
                for p in set(permutations(mu)):
                    out[(nu, p)] = v
        return out

    def to_univariate(self) -> list[Fraction]:
        if self.dim != 1:
            raise ValueError("only defined for dim == 1")
        return [self.coefficient(1, (1,) * n) / factorial(n) for n in range(1, self.order + 1)]

    def is_pointed(self) -> bool:
        return all(
            self.coefficient(nu, (mu,)) == (1 if nu == mu else 0)
            for nu in range(1, self.dim + 1)
            for mu in range(1, self.dim + 1)
        )

    def truncate(self, order: int) -> "SeriesElement":
        if order > self.order:
            raise ValueError("cannot truncate to a higher order")
        return SeriesElement(self.dim, order, {k: v for k, v in self._coeffs.items() if len(k[1]) <= order})

    def __eq__(self, other):
        if not isinstance(other, SeriesElement):
            return NotImplemented
        return (self.dim, self.order, self._coeffs) == (other.dim, other.order, other._coeffs)

    def __hash__(self):
        return hash((self.dim, self.order, frozenset(self._coeffs.items())))

    def __repr__(self):
        return f"SeriesElement(dim={self.dim}, order={self.order}, {len(self._coeffs)} terms)"

    # -- text ----------------------------------------------------------------

    def render(self, labels: Sequence[str] | None = None) -> str:
        """Lines ``nu; mu1,...,mun : p/q`` ordered by degree, then indices."""
        def name(i):
            return labels[i - 1] if labels else str(i)

        lines = []
        for (nu, mu), v in self.items():
            lines.append(f"{name(nu)}; {','.join(name(x) for x in mu)} : {v}")
        return "".join(line + "\n" for line in lines)

    @classmethod
    def parse(cls, text: str, dim: int, order: int, labels: Sequence[str] | None = None) -> "SeriesElement":
        lookup = {lab: i for i, lab in enumerate(labels, start=1)} if labels else None

        def index(tok):
            tok = tok.strip()
            return lookup[tok] if lookup else int(tok)

        data = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                head, value = line.rsplit(":", 1)
                nu, mu = head.split(";")
                key = (index(nu), tuple(sorted(index(t) for t in mu.split(","))))
                data[key] = Fraction(value.strip())
            except (ValueError, KeyError) as exc:
                raise ValueError(f"bad series line {raw!r}") from exc
        return cls(dim, order, data)


def _check_compatible(g: SeriesElement, f: SeriesElement):
    if g.dim != f.dim:
        raise ValueError(f"dimension mismatch: {g.dim} != {f.dim}")
    if g.order != f.order:
        raise ValueError(f"truncation order mismatch: {g.order} != {f.order}")


def _multisets(dim: int, n: int):
    return combinations_with_replacement(range(1, dim + 1), n)


# -- direct substitution (the oracle) -----------------------------------------

Poly = dict[tuple[int, ...], Fraction]


def _poly_mul(a: Poly, b: Poly, max_deg: int) -> Poly:
    out: Poly = defaultdict(Fraction)
    for ea, ca in a.items():
        da = sum(ea)
        for eb, cb in b.items():
            if da + sum(eb) > max_deg:
                continue
            out[tuple(x + y for x, y in zip(ea, eb))] += ca * cb
    return {k: v for k, v in out.items() if v}


def _exponents(mu: tuple[int, ...], dim: int) -> tuple[int, ...]:
    e = [0] * dim
    for x in mu:
        e[x - 1] += 1
    return tuple(e)


def _to_polys(s: SeriesElement) -> list[Poly]:
    polys: list[Poly] = [defaultdict(Fraction) for _ in range(s.dim)]
    for (nu, mu), v in s.items():
        e = _exponents(mu, s.dim)
        polys[nu - 1][e] += v / prod(factorial(k) for k in e)
    return [dict(p) for p in polys]


def compose_direct(g: SeriesElement, f: SeriesElement) -> SeriesElement:
    """Coefficients of ``g(f(x))`` by literal polynomial substitution."""
    _check_compatible(g, f)
    dim, m = f.dim, f.order
    fp = _to_polys(f)
    zero = (0,) * dim

    powers: dict[tuple[int, int], Poly] = {}

    def power(r: int, k: int) -> Poly:
        if k == 0:
            return {zero: Fraction(1)}
        if (r, k) not in powers:
            powers[(r, k)] = _poly_mul(power(r, k - 1), fp[r], m)
        return powers[(r, k)]

    out: dict[Key, Fraction] = {}
    for nu, gpoly in enumerate(_to_polys(g), start=1):
        acc: Poly = defaultdict(Fraction)
        for e, c in gpoly.items():
            term: Poly = {zero: c}
            for r, k in enumerate(e):
                if k:
                    term = _poly_mul(term, power(r, k), m)
            for ex, v in term.items():
                acc[ex] += v
        for ex, v in acc.items():
            if v and 1 <= sum(ex) <= m:
                mu = tuple(i + 1 for i, k in enumerate(ex) for _ in range(k))
                out[(nu, mu)] = v * prod(factorial(k) for k in ex)
    return SeriesElement(dim, m, out)


# -- Faa di Bruno ---------------------------------------------------------------

def faa_di_bruno_compose(g: SeriesElement, f: SeriesElement) -> SeriesElement:
    """Coefficients of ``g o f`` from the set-partition sum."""
    _check_compatible(g, f)
    dim, m = f.dim, f.order

    g_by_degree: dict[int, list[tuple[int, tuple[int, ...], Fraction]]] = defaultdict(list)
    for (nu, rho), v in g.items():
        for p in set(permutations(rho)):
            g_by_degree[len(rho)].append((nu, p, v))

    out: dict[Key, Fraction] = {}
    for n in range(1, m + 1):
        for mu in _multisets(dim, n):
            acc = defaultdict(Fraction)
            for part in enumerate_set_partitions(n):
                k = len(part)
                # block vectors rho -> f[rho; mu_block]
                vectors = []
                for block in part.blocks:
                    sub = tuple(mu[i - 1] for i in block)
                    vec = {rho: f.coefficient(rho, sub) for rho in range(1, dim + 1)}
                    vectors.append({r: x for r, x in vec.items() if x})
                if any(not vec for vec in vectors):
                    continue
                for nu, rho, gv in g_by_degree[k]:
                    term = gv
                    for r, vec in zip(rho, vectors):
                        x = vec.get(r)
                        if x is None:
                            break
                        term *= x
                    else:
                        acc[nu] += term
            for nu, v in acc.items():
                if v:
                    out[(nu, mu)] = v
    return SeriesElement(dim, m, out)


def invert_series(f: SeriesElement) -> SeriesElement:
    """Composition inverse of a pointed series, built degree by degree."""
    if not f.is_pointed():
        raise ValueError("series is not pointed (linear part is not the identity)")
    dim, m = f.dim, f.order
    inv: dict[Key, Fraction] = {(nu, (nu,)): Fraction(1) for nu in range(1, dim + 1)}
    for n in range(2, m + 1):
        h = faa_di_bruno_compose(SeriesElement(dim, m, inv), f)
        for (nu, mu), v in h.degree(n).items():
            inv[(nu, mu)] = -v
    return SeriesElement(dim, m, inv)


def symmetrize(tensor: Mapping[tuple[int, ...], object]) -> dict[tuple[int, ...], Fraction]:
    """Average a coefficient map over all permutations of its index tuple.

    The input is a map ``mu -> value`` for one fixed output index and
    degree; the result holds every ordering of each index multiset.
    """
    sums: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    n = None
    for mu, v in tensor.items():
        n = len(mu) if n is None else n
        if len(mu) != n:
            raise ValueError("mixed degrees in one tensor")
        sums[tuple(sorted(mu))] += Fraction(v)
    out = {}
    for rep, total in sums.items():
        if not total:
            continue
        orderings = set(permutations(rep))
        share = total / factorial(len(rep))
        # each distinct ordering stands for (n! / |orbit|) permutations
        weight = Fraction(factorial(len(rep)), len(orderings))
        for p in orderings:
            out[p] = share * weight
    return out


def random_pointed_series(dim: int, order: int, rng, density: float = 0.6, bound: int = 3) -> SeriesElement:
    """A random pointed series with small rational coefficients."""
    data = {(nu, (nu,)): 1 for nu in range(1, dim + 1)}
    for n in range(2, order + 1):
        for mu in _multisets(dim, n):
            for nu in range(1, dim + 1):
                if rng.random() < density:
                    data[(nu, mu)] = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
    return SeriesElement(dim, order, data)
