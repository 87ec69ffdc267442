"""Decorated, enumerated, colored graphs (Feynman diagrams) and their monomials.

A graph is two finite sets, vertices and flags, with an incidence map
``flag -> vertex`` and an involution on flags.  Fixed points of the
involution are external lines; two-element orbits are inner edges.

Isomorphism classes of enumerated colored graphs with ``n`` vertices are
in bijection with monomials in the free commutative monoid on

* ``L(i)``            vertex ``i`` has color ``L``,
* ``phi(i)``          an external line of color ``phi`` at vertex ``i``,
* ``<phi(i)|psi(j)>`` an inner edge from a ``phi``-flag at ``i`` to a
  ``psi``-flag at ``j``, stored with ``(i, phi) <= (j, psi)``.

:class:`Monomial` is that canonical form; every diagram computation that
only needs the isomorphism class works on monomials directly.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .combinatorics import Permutation


@dataclass(frozen=True)
class ColorSignature:
    vertex_colors: tuple[str, ...]
    field_colors: tuple[str, ...]
    parity: Mapping[str, str] = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        vc, fc = tuple(self.vertex_colors), tuple(self.field_colors)
        object.__setattr__(self, "vertex_colors", vc)
        object.__setattr__(self, "field_colors", fc)
        if not vc or not fc:
            raise ValueError("color sets must be nonempty")
        if len(set(vc)) != len(vc) or len(set(fc)) != len(fc):
            raise ValueError("duplicate color names")
        if set(vc) & set(fc):
            raise ValueError(f"names used both as vertex and field colors: {sorted(set(vc) & set(fc))}")
        for name in vc + fc:
            if not _NAME.fullmatch(name):
                raise ValueError(f"invalid color name {name!r}")
        parity = dict(self.parity or {})
        for name in fc:
            parity.setdefault(name, "boson")
        for name, p in parity.items():
            if name not in fc:
                raise ValueError(f"parity given for unknown field {name!r}")
            if p == "fermion":
                raise ValueError(f"field {name!r} is fermionic; only bosonic models are supported")
            if p != "boson":
                raise ValueError(f"unknown parity {p!r} for field {name!r}")
        object.__setattr__(self, "parity", parity)


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


# -- monomials ----------------------------------------------------------------------

Field = tuple[int, str]
Prop = tuple[int, str, int, str]


def _prop(i: int, a: str, j: int, b: str) -> Prop:
    return (i, a, j, b) if (i, a) <= (j, b) else (j, b, i, a)


@dataclass(frozen=True)
class Monomial:
    """Canonical monomial of an enumerated colored diagram with ``n`` vertices.

    ``vertices[i-1]`` is the color of vertex ``i``; ``fields`` and ``props``
    are sorted tuples with repetitions for multiplicities.
    """

    vertices: tuple[str, ...]
    fields: tuple[Field, ...] = ()
    props: tuple[Prop, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "fields", tuple(sorted(self.fields)))
        object.__setattr__(self, "props", tuple(sorted(_prop(*p) for p in self.props)))
        n = len(self.vertices)
        if n < 1:
            raise ValueError("a diagram needs at least one vertex")
        for i, _ in self.fields:
            if not 1 <= i <= n:
                raise ValueError(f"field at missing vertex {i}")
        for i, _, j, _ in self.props:
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError(f"propagator at missing vertex in {self.props}")

    @property
    def n(self) -> int:
        return len(self.vertices)

    # -- text --

    def generators(self) -> list[str]:
        verts = sorted(f"{c}({i})" for i, c in enumerate(self.vertices, start=1))
        props = sorted(f"<{a}({i})|{b}({j})>" for i, a, j, b in self.props)
        fields = sorted(f"{a}({i})" for i, a in self.fields)
        return verts + props + fields

    def __str__(self):
        return "*".join(self.generators())

    def __repr__(self):
        return f"Monomial({str(self)!r})"

    @classmethod
    def parse(cls, text: str, signature: ColorSignature) -> "Monomial":
        vertex_colors = set(signature.vertex_colors)
        field_colors = set(signature.field_colors)
        verts: dict[int, str] = {}
        fields: list[Field] = []
        props: list[Prop] = []
        text = text.strip()
        if not text:
            raise ValueError("empty monomial")
        for tok in text.split("*"):
            tok = tok.strip()
            m = _PROP_RE.fullmatch(tok)
            if m:
                a, i, b, j = m.group(1), int(m.group(2)), m.group(3), int(m.group(4))
                for name in (a, b):
                    if name not in field_colors:
                        raise ValueError(f"unknown field color {name!r} in {tok!r}")
                props.append(_prop(i, a, j, b))
                continue
            m = _GEN_RE.fullmatch(tok)
            if not m:
                raise ValueError(f"cannot parse generator {tok!r}")
            name, i = m.group(1), int(m.group(2))
            if name in vertex_colors:
                if i in verts:
                    raise ValueError(f"vertex {i} has two vertex generators")
                verts[i] = name
            elif name in field_colors:
                fields.append((i, name))
            else:
                raise ValueError(f"unknown color {name!r}")
        n = max(verts, default=0)
        used = [i for i, _ in fields] + [x for p in props for x in (p[0], p[2])]
        n = max([n] + used)
        missing = [i for i in range(1, n + 1) if i not in verts]
        if missing:
            raise ValueError(f"vertices without a vertex generator: {missing}")
        return cls(tuple(verts[i] for i in range(1, n + 1)), tuple(fields), tuple(props))

    # -- structure --

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, _, j, _ in self.props]

    def has_tadpole(self) -> bool:
        return any(i == j for i, j in self.edges())

    def is_connected(self) -> bool:
        return _connected(self.n, self.edges())

    def is_1pi(self) -> bool:
        return _one_pi(self.n, self.edges())

    def corolla(self, i: int) -> tuple[str, ...]:
        """Sorted colors of every flag attached to vertex ``i``."""
        cols = [a for k, a in self.fields if k == i]
        for p, a, q, b in self.props:
            if p == i:
                cols.append(a)
            if q == i:
                cols.append(b)
        return tuple(sorted(cols))

    def external(self) -> tuple[str, ...]:
        return tuple(sorted(a for _, a in self.fields))

    # -- operations --

    def relabel(self, sigma: Permutation) -> "Monomial":
        """Renumber vertex ``k`` as ``sigma^-1(k)``."""
        if sigma.n != self.n:
            raise ValueError("permutation size does not match vertex count")
        inv = sigma.inverse()
        verts = [None] * self.n
        for k, c in enumerate(self.vertices, start=1):
            verts[inv(k) - 1] = c
        return Monomial(
            tuple(verts),
            tuple((inv(i), a) for i, a in self.fields),
            tuple(_prop(inv(i), a, inv(j), b) for i, a, j, b in self.props),
        )

    def subgraph(self, J: Iterable[int]) -> "Monomial":
        """The diagram on the vertices ``J`` with the induced enumeration."""
        J = sorted(set(J))
        if not J:
            raise ValueError("J must be nonempty")
        if J[0] < 1 or J[-1] > self.n:
            raise ValueError(f"J not contained in 1..{self.n}")
        new = {v: k for k, v in enumerate(J, start=1)}
        fields = [(new[i], a) for i, a in self.fields if i in new]
        props = []
        for i, a, j, b in self.props:
            if i in new and j in new:
                props.append((new[i], a, new[j], b))
            elif i in new:
                fields.append((new[i], a))
            elif j in new:
                fields.append((new[j], b))
        return Monomial(tuple(self.vertices[v - 1] for v in J), tuple(fields), tuple(props))

    def contract(self, J: Iterable[int], color: str) -> "Monomial":
        """Shrink ``J`` to one vertex of color ``color`` at slot ``min J``."""
        J = set(J)
        if not J:
            raise ValueError("J must be nonempty")
        if min(J) < 1 or max(J) > self.n:
            raise ValueError(f"J not contained in 1..{self.n}")
        head = min(J)
        keep = [v for v in range(1, self.n + 1) if v not in J or v == head]
        new = {v: k for k, v in enumerate(keep, start=1)}

        def pos(v):
            return new[head] if v in J else new[v]

        verts = tuple(color if v == head else self.vertices[v - 1] for v in keep)
        fields = tuple((pos(i), a) for i, a in self.fields)
        props = tuple(
            (pos(i), a, pos(j), b) for i, a, j, b in self.props if not (i in J and j in J)
        )
        return Monomial(verts, fields, props)

    def vertex_diagram(self, i: int) -> "Monomial":
        """The one-vertex subgraph at ``i``."""
        return self.subgraph([i])


_GEN_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\((\d+)\)")
_PROP_RE = re.compile(r"<([A-Za-z_][A-Za-z0-9_]*)\((\d+)\)\|([A-Za-z_][A-Za-z0-9_]*)\((\d+)\)>")


def vertex_monomial(color: str, corolla: Iterable[str]) -> Monomial:
    return Monomial((color,), tuple((1, a) for a in corolla))


def _components(n: int, edges: Iterable[tuple[int, int]]) -> int:
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    count = n
    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            count -= 1
    return count


def _connected(n: int, edges: Sequence[tuple[int, int]]) -> bool:
    return _components(n, edges) == 1


def _one_pi(n: int, edges: Sequence[tuple[int, int]]) -> bool:
    if n < 2 or any(i == j for i, j in edges) or not _connected(n, edges):
        return False
    # cutting any single inner edge keeps the graph connected
    for k in range(len(edges)):
        if not _connected(n, edges[:k] + edges[k + 1:]):
            return False
    return True


# -- explicit graphs ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DecoratedGraph:
    """A graph with structure maps, optionally colored and enumerated.

    Vertex and flag ids are opaque hashables; only the enumeration and the
    colors carry meaning.
    """

    vertices: tuple[Hashable, ...]
    flags: tuple[Hashable, ...]
    incidence: Mapping[Hashable, Hashable]
    involution: Mapping[Hashable, Hashable]
    vcolor: Mapping[Hashable, str] | None = None
    fcolor: Mapping[Hashable, str] | None = None
    enumeration: Mapping[Hashable, int] | None = None
    signature: ColorSignature | None = None

    @property
    def n(self) -> int:
        return len(self.vertices)

    def inner_edges(self) -> list[tuple[Hashable, Hashable]]:
        """Each inner edge once, as ``(flag, partner)`` in flag order."""
        seen = set()
        out = []
        for f in self.flags:
            s = self.involution[f]
            if s != f and f not in seen:
                seen.update((f, s))
                out.append((f, s))
        return out

    def external_flags(self) -> list[Hashable]:
        return [f for f in self.flags if self.involution[f] == f]

    def number(self, v) -> int:
        return self.enumeration[v]

    def vertex_with_number(self, k: int):
        for v, i in self.enumeration.items():
            if i == k:
                return v
        raise KeyError(k)


def validate(g: DecoratedGraph) -> list[str]:
    """All broken invariants of ``g``; an empty list means the graph is valid."""
    problems = []
    verts, flags = set(g.vertices), set(g.flags)
    if len(verts) != len(g.vertices):
        problems.append("duplicate vertex ids")
    if len(flags) != len(g.flags):
        problems.append("duplicate flag ids")
    for f in g.flags:
        if f not in g.incidence:
            problems.append(f"flag {f!r} is not attached to a vertex")
        elif g.incidence[f] not in verts:
            problems.append(f"flag {f!r} attached to unknown vertex {g.incidence[f]!r}")
        if f not in g.involution:
            problems.append(f"involution undefined on flag {f!r}")
        elif g.involution[f] not in flags:
            problems.append(f"involution sends {f!r} outside the flag set")
        elif g.involution.get(g.involution[f]) != f:
            problems.append(f"involution does not square to the identity at {f!r}")
    extra = (set(g.incidence) | set(g.involution)) - flags
    if extra:
        problems.append(f"structure maps defined on unknown flags {sorted(map(repr, extra))}")
    sig = g.signature
    if g.vcolor is not None:
        for v in g.vertices:
            c = g.vcolor.get(v)
            if c is None:
                problems.append(f"vertex {v!r} has no color")
            elif sig is not None and c not in sig.vertex_colors:
                problems.append(f"vertex {v!r} has unknown color {c!r}")
    if g.fcolor is not None:
        for f in g.flags:
            c = g.fcolor.get(f)
            if c is None:
                problems.append(f"flag {f!r} has no color")
            elif sig is not None and c not in sig.field_colors:
                problems.append(f"flag {f!r} has unknown color {c!r}")
    if g.enumeration is not None:
        if set(g.enumeration) != verts or sorted(g.enumeration.values()) != list(range(1, g.n + 1)):
            problems.append("enumeration is not a bijection onto 1..n")
    return problems


def _require_valid(g: DecoratedGraph):
    problems = validate(g)
    if problems:
        raise ValueError("invalid graph: " + "; ".join(problems))


def _vertex_edges(g: DecoratedGraph) -> tuple[int, list[tuple[int, int]]]:
    index = {v: k for k, v in enumerate(g.vertices, start=1)}
    return g.n, [(index[g.incidence[f]], index[g.incidence[s]]) for f, s in g.inner_edges()]


def has_tadpole(g: DecoratedGraph) -> bool:
    _require_valid(g)
    return any(g.incidence[f] == g.incidence[s] for f, s in g.inner_edges())


def is_connected(g: DecoratedGraph) -> bool:
    _require_valid(g)
    return _connected(*_vertex_edges(g))


def is_1pi(g: DecoratedGraph) -> bool:
    _require_valid(g)
    return _one_pi(*_vertex_edges(g))


def cut_edge(g: DecoratedGraph, flag) -> DecoratedGraph:
    """Turn the inner edge through ``flag`` into two external lines."""
    partner = g.involution[flag]
    if partner == flag:
        raise ValueError(f"{flag!r} is an external line")
    inv = dict(g.involution)
    inv[flag], inv[partner] = flag, partner
    return DecoratedGraph(g.vertices, g.flags, g.incidence, inv, g.vcolor, g.fcolor, g.enumeration, g.signature)


def _monotone(values: Iterable[int]) -> dict[int, int]:
    return {x: k for k, x in enumerate(sorted(values), start=1)}


def subgraph(g: DecoratedGraph, J: Iterable[Hashable]) -> DecoratedGraph:
    J = set(J)
    if not J:
        raise ValueError("J must be nonempty")
    if not J <= set(g.vertices):
        raise ValueError("J is not a set of vertices of the graph")
    verts = tuple(v for v in g.vertices if v in J)
    flags = tuple(f for f in g.flags if g.incidence[f] in J)
    fset = set(flags)
    inv = {f: (g.involution[f] if g.involution[f] in fset else f) for f in flags}
    inc = {f: g.incidence[f] for f in flags}
    vcolor = {v: g.vcolor[v] for v in verts} if g.vcolor is not None else None
    fcolor = {f: g.fcolor[f] for f in flags} if g.fcolor is not None else None
    enum = None
    if g.enumeration is not None:
        order = _monotone(g.enumeration[v] for v in verts)
        enum = {v: order[g.enumeration[v]] for v in verts}
    return DecoratedGraph(verts, flags, inc, inv, vcolor, fcolor, enum, g.signature)


def contract(g: DecoratedGraph, J: Iterable[Hashable], color: str | None = None) -> DecoratedGraph:
    """``g / J``, with the new vertex colored ``color`` when ``g`` is colored."""
    J = set(J)
    if not J:
        raise ValueError("J must be nonempty")
    if not J <= set(g.vertices):
        raise ValueError("J is not a set of vertices of the graph")
    vJ = frozenset(J)
    verts = tuple(v for v in g.vertices if v not in J) + (vJ,)
    flags = tuple(
        f for f in g.flags
        if not (g.incidence[f] in J and g.incidence[g.involution[f]] in J and g.involution[f] != f)
    )
    inc = {f: (vJ if g.incidence[f] in J else g.incidence[f]) for f in flags}
    inv = {f: g.involution[f] for f in flags}
    vcolor = None
    if g.vcolor is not None:
        if color is None:
            raise ValueError("a colored graph needs a color for the contracted vertex")
        vcolor = {v: g.vcolor[v] for v in verts if v != vJ}
        vcolor[vJ] = color
    fcolor = {f: g.fcolor[f] for f in flags} if g.fcolor is not None else None
    enum = None
    if g.enumeration is not None:
        head = min(g.enumeration[v] for v in J)
        numbers = {v: g.enumeration[v] for v in verts if v != vJ}
        numbers[vJ] = head
        order = _monotone(numbers.values())
        enum = {v: order[k] for v, k in numbers.items()}
    return DecoratedGraph(verts, flags, inc, inv, vcolor, fcolor, enum, g.signature)


def relabel(g: DecoratedGraph, sigma: Permutation) -> DecoratedGraph:
    """New enumeration ``sigma^-1(enu(v))``; body and colors unchanged."""
    if g.enumeration is None:
        raise ValueError("graph is not enumerated")
    if sigma.n != g.n:
        raise ValueError("permutation size does not match vertex count")
    inv = sigma.inverse()
    enum = {v: inv(k) for v, k in g.enumeration.items()}
    return DecoratedGraph(g.vertices, g.flags, g.incidence, g.involution, g.vcolor, g.fcolor, enum, g.signature)


def to_monomial(g: DecoratedGraph) -> Monomial:
    _require_valid(g)
    if g.enumeration is None or g.vcolor is None or g.fcolor is None:
        raise ValueError("monomials need a colored, enumerated graph")
    enu = g.enumeration
    verts = [None] * g.n
    for v in g.vertices:
        verts[enu[v] - 1] = g.vcolor[v]
    fields = [(enu[g.incidence[f]], g.fcolor[f]) for f in g.external_flags()]
    props = [
        (enu[g.incidence[f]], g.fcolor[f], enu[g.incidence[s]], g.fcolor[s]) for f, s in g.inner_edges()
    ]
    return Monomial(tuple(verts), tuple(fields), tuple(props))


def from_monomial(m: Monomial, signature: ColorSignature) -> DecoratedGraph:
    """A representative graph: vertices ``1..n`` and integer flag ids."""
    for c in m.vertices:
        if c not in signature.vertex_colors:
            raise ValueError(f"unknown vertex color {c!r}")
    used = {a for _, a in m.fields} | {x for p in m.props for x in (p[1], p[3])}
    unknown = used - set(signature.field_colors)
    if unknown:
        raise ValueError(f"unknown field colors {sorted(unknown)}")
    verts = tuple(range(1, m.n + 1))
    inc, inv, fcolor = {}, {}, {}
    k = 0
    for i, a in m.fields:
        inc[k], inv[k], fcolor[k] = i, k, a
        k += 1
    for i, a, j, b in m.props:
        inc[k], fcolor[k] = i, a
        inc[k + 1], fcolor[k + 1] = j, b
        inv[k], inv[k + 1] = k + 1, k
        k += 2
    vcolor = {i: c for i, c in enumerate(m.vertices, start=1)}
    enum = {i: i for i in verts}
    return DecoratedGraph(verts, tuple(range(k)), inc, inv, vcolor, fcolor, enum, signature)


def corolla_counts(m: Monomial, i: int) -> Counter:
    return Counter(m.corolla(i))
