"""Wick contraction and the action of contraction maps on coupling space.

``wick_enumerate`` sums over every admissible, tadpole-free pairing of the
flags of ``n`` given vertices.  ``wick_differential`` computes the same sum
by applying ``prod_{i<j} exp(sum_{(a,b)} <a(i)|b(j)> d/da(i) d/db(j))`` to
the product of the vertices in a commutative polynomial algebra; the two
share no code and serve as oracles for each other.

A contraction map ``Q`` of arity ``n`` then acts on the span ``F^T`` of
vertex types: feed ``n`` vertex types to Wick, contract every resulting
diagram to a single vertex weighted by ``Q`` and read the result back as a
vertex type.  This is an operad morphism into the endomorphism operad of
``F^T``, and on invariant group elements it yields formal diffeomorphisms
of coupling space.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .contraction_operad import ContractionMap, ContractionOperad, QftModel, VertexType
from .formal_diffeo import SeriesElement
from .graphs import Monomial
from .group import GroupElement, group_to_series
from .operad import EndOperad, Multilinear


class OutsideTypes(ValueError):
    """A contraction produced a one-vertex diagram that is not a vertex type."""


class InteractionVector:
    """A point of coupling space: one rational coefficient per vertex type."""

    def __init__(self, model: QftModel, coeffs: Mapping[str, object] | None = None):
        names = set(model.type_names)
        clean = {}
        for name, v in (coeffs or {}).items():
            if name not in names:
                raise KeyError(f"unknown vertex type {name!r}")
            v = Fraction(v)
            if v:
                clean[name] = v
        self.model = model
        self.coeffs = clean

    def vector(self) -> list[Fraction]:
        return [self.coeffs.get(name, Fraction(0)) for name in self.model.type_names]

    @classmethod
    def from_vector(cls, model: QftModel, values: Sequence[object]) -> "InteractionVector":
        return cls(model, dict(zip(model.type_names, values)))

    def __eq__(self, other):
        if not isinstance(other, InteractionVector):
            return NotImplemented
        return self.model == other.model and self.coeffs == other.coeffs

    def __repr__(self):
        return f"InteractionVector({self.coeffs})"


class DiagramSum:
    """A rational linear combination of ``n``-vertex diagram monomials."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Monomial, object] | None = None):
        clean = {}
        for m, v in (terms or {}).items():
            if m.n != n:
                raise ValueError(f"{m} does not have {n} vertices")
            v = Fraction(v)
            if v:
                clean[m] = v
        self.n = n
        self.terms = clean

    def __getitem__(self, m: Monomial) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, DiagramSum):
            return NotImplemented
        return (self.n, self.terms) == (other.n, other.terms)

    def __repr__(self):
        return f"DiagramSum(n={self.n}, {len(self.terms)} terms)"

    def render(self) -> str:
        rows = sorted((str(m), v) for m, v in self.terms.items())
        return "".join(f"{v} * {m}\n" for m, v in rows)

    @classmethod
    def parse(cls, text: str, signature, n: int) -> "DiagramSum":
        terms: dict[Monomial, Fraction] = defaultdict(Fraction)
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            try:
                coeff, mono = line.split("*", 1)
                terms[Monomial.parse(mono, signature)] += Fraction(coeff.strip())
            except ValueError as exc:
                raise ValueError(f"bad diagram-sum line {raw!r}: {exc}") from exc
        return cls(n, terms)


def _types(model: QftModel, vertices: Iterable) -> tuple[VertexType, ...]:
    out = []
    for v in vertices:
        if isinstance(v, str):
            v = model.vertex_type(v)
        if v not in model.vertex_types:
            raise KeyError(f"{v!r} is not a vertex type of the model")
        out.append(v)
    if not out:
        raise ValueError("need at least one vertex")
    return tuple(out)


# -- Wick by enumeration of pairings ----------------------------------------------

@lru_cache(maxsize=None)
def _wick_pairings(model: QftModel, types: tuple[VertexType, ...]) -> DiagramSum:
    flags = [(i, a) for i, t in enumerate(types, start=1) for a in t.corolla]
    colors = tuple(t.color for t in types)
    count: Counter = Counter()
    free: list[tuple[int, str]] = []
    pairs: list[tuple[int, str, int, str]] = []
    used = [False] * len(flags)

    def rec(k: int):
        while k < len(flags) and used[k]:
            k += 1
        if k == len(flags):
            count[Monomial(colors, tuple(free), tuple(pairs))] += 1
            return
        used[k] = True
        i, a = flags[k]
        free.append((i, a))
        rec(k + 1)
        free.pop()
        for l in range(k + 1, len(flags)):
            j, b = flags[l]
            if used[l] or i == j or not model.is_admissible(a, b):
                continue
            used[l] = True
            pairs.append((i, a, j, b))
            rec(k + 1)
            pairs.pop()
            used[l] = False
        used[k] = False

    rec(0)
    return DiagramSum(len(types), count)


def wick_enumerate(model: QftModel, vertices: Iterable) -> DiagramSum:
    """Sum over all admissible tadpole-free pairings of the vertices' flags."""
    return _wick_pairings(model, _types(model, vertices))


# -- Wick by the differential operator ---------------------------------------------

Gen = tuple  # ("f", i, a) or ("p", i, a, j, b)
PolyMono = tuple[tuple[Gen, int], ...]


def _mono(counter: Mapping[Gen, int]) -> PolyMono:
    return tuple(sorted((g, e) for g, e in counter.items() if e))


def _apply_pair_operator(poly: dict[PolyMono, Fraction], i: int, j: int,
                         pairs: Sequence[tuple[str, str]]) -> dict[PolyMono, Fraction]:
    out: dict[PolyMono, Fraction] = defaultdict(Fraction)
    for mono, c in poly.items():
        exps = dict(mono)
        for a, b in pairs:
            fa, fb = ("f", i, a), ("f", j, b)
            ea, eb = exps.get(fa, 0), exps.get(fb, 0)
            if not ea or not eb:
                continue
            new = dict(exps)
            new[fa] -= 1
            new[fb] -= 1
            key = (i, a, j, b) if (i, a) <= (j, b) else (j, b, i, a)
            p = ("p",) + key
            new[p] = new.get(p, 0) + 1
            out[_mono(new)] += c * ea * eb
    return {k: v for k, v in out.items() if v}


def _exp_pair_operator(poly, i, j, pairs):
    total: dict[PolyMono, Fraction] = defaultdict(Fraction, poly)
    term = poly
    k = 1
    while term:
        term = {m: c / k for m, c in _apply_pair_operator(term, i, j, pairs).items()}
        for m, c in term.items():
            total[m] += c
        k += 1
    return {m: c for m, c in total.items() if c}


def wick_differential(model: QftModel, vertices: Iterable) -> DiagramSum:
    """The Wick sum from the exponential of second-order differential operators."""
    types = _types(model, vertices)
    n = len(types)
    start = Counter()
    for i, t in enumerate(types, start=1):
        for a in t.corolla:
            start[("f", i, a)] += 1
    poly = {_mono(start): Fraction(1)}
    pairs = sorted(model.admissible)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            poly = _exp_pair_operator(poly, i, j, pairs)
    colors = tuple(t.color for t in types)
    terms: dict[Monomial, Fraction] = defaultdict(Fraction)
    for mono, c in poly.items():
        fields, props = [], []
        for g, e in mono:
            target = fields if g[0] == "f" else props
            target.extend([g[1:]] * e)
        terms[Monomial(colors, tuple(fields), tuple(props))] += c
    return DiagramSum(n, terms)


# -- contraction and the morphism to End(F^T) --------------------------------------

def hat_q(Q: ContractionMap, d: DiagramSum) -> DiagramSum:
    """Contract every diagram of ``d`` to one vertex, weighted by ``Q``."""
    if Q.n != d.n:
        raise ValueError(f"arity mismatch: map has {Q.n}, diagrams have {d.n}")
    everything = tuple(range(1, d.n + 1))
    index = Q.by_monomial()
    out: dict[Monomial, Fraction] = defaultdict(Fraction)
    for m, c in d.terms.items():
        for L, q in index.get(m, {}).items():
            out[m.contract(everything, L)] += c * q
    return DiagramSum(1, out)


def coupling_operad(model: QftModel) -> EndOperad:
    return EndOperad(len(model.vertex_types), labels=model.type_names)


def morphism(Q: ContractionMap, model: QftModel, permissive: bool = False) -> Multilinear:
    """The multilinear map ``(F^T)^n -> F^T`` induced by ``Q``.

    Only type tuples that occur as vertex sequences of diagrams in the
    support of ``Q`` can give nonzero values, so only those are expanded.
    Raises :class:`OutsideTypes` if a contraction is not a vertex type,
    unless ``permissive`` is set, in which case such terms are dropped.
    """
    by_key = {t.key: (k, t) for k, t in enumerate(model.vertex_types, start=1)}
    tuples = set()
    for m, _ in Q.entries:
        keys = tuple((m.vertices[i - 1], m.corolla(i)) for i in range(1, m.n + 1))
        if all(k in by_key for k in keys):
            tuples.add(keys)
    entries: dict[tuple[int, tuple[int, ...]], Fraction] = defaultdict(Fraction)
    for keys in sorted(tuples):
        mu = tuple(by_key[k][0] for k in keys)
        result = hat_q(Q, wick_enumerate(model, [by_key[k][1] for k in keys]))
        for vertex, c in result.terms.items():
            hit = by_key.get((vertex.vertices[0], vertex.corolla(1)))
            if hit is None:
                if permissive:
                    continue
                raise OutsideTypes(f"contraction {vertex} is not a vertex type of the model")
            entries[(hit[0], mu)] += c
    return Multilinear(len(model.vertex_types), Q.n, entries)


def morphism_group(g: GroupElement, permissive: bool = False) -> GroupElement:
    carrier = g.carrier
    if not isinstance(carrier, ContractionOperad):
        raise TypeError("expected a group element over a contraction operad")
    model = carrier.model
    target = coupling_operad(model)
    return GroupElement(target, g.order, [morphism(a, model, permissive) for a in g.components])


def rg_action(g: GroupElement, permissive: bool = False) -> SeriesElement:
    """The formal diffeomorphism of coupling space induced by ``g``.

    ``g`` must be invariant under relabeling vertices; otherwise its image
    is not determined by a power series.
    """
    carrier = g.carrier
    for a in g.components:
        if not carrier.is_invariant(a):
            raise ValueError(f"component of arity {a.n} is not invariant under vertex relabeling")
    return group_to_series(morphism_group(g, permissive))
