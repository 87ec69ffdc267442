"""The contraction operad of diagrams and its model suboperads.

An element of arity ``n`` is a contraction map: a finitely supported
rational function ``q(Gamma, K)`` of an ``n``-vertex diagram class and an
output vertex color.  Partial composition contracts the consecutive block
of vertices ``i..i+j-1``:

    (Q'' o_i Q')(Gamma, K) = sum_L q'(Gamma_J, L) * q''(Gamma/(J, L), K).

Diagrams are canonical monomials (module ``graphs``), so no isomorphism
search is ever needed.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Iterator, Mapping, Sequence

from .combinatorics import Permutation, all_permutations, nonempty_subsets
from .graphs import ColorSignature, Monomial, vertex_monomial
from .operad import Operad

DEFAULT_CAP = 100_000


class CapExceeded(RuntimeError):
    """Raised when a diagram enumeration grows past its configured cap."""


# -- models -------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexType:
    color: str
    corolla: tuple[str, ...]
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "corolla", tuple(sorted(self.corolla)))
        if self.name is None:
            object.__setattr__(self, "name", f"{self.color}[{'.'.join(self.corolla)}]")

    @property
    def key(self) -> tuple[str, tuple[str, ...]]:
        return (self.color, self.corolla)

    def monomial(self) -> Monomial:
        return vertex_monomial(self.color, self.corolla)


@dataclass(frozen=True)
class QftModel:
    signature: ColorSignature
    admissible: frozenset
    vertex_types: tuple[VertexType, ...]
    require_1pi: bool = True
    forbid_tadpoles: bool = True
    check_symmetry: bool = field(default=True, compare=False)

    def __post_init__(self):
        adm = frozenset(tuple(p) for p in self.admissible)
        object.__setattr__(self, "admissible", adm)
        object.__setattr__(self, "vertex_types", tuple(self.vertex_types))
        fc = set(self.signature.field_colors)
        if not adm:
            raise ValueError("the admissible set must be nonempty")
        for p in adm:
            if len(p) != 2 or not set(p) <= fc:
                raise ValueError(f"admissible pair {p!r} uses unknown fields")
        if self.check_symmetry:
            missing = sorted((b, a) for a, b in adm if (b, a) not in adm)
            if missing:
                raise ValueError(f"admissible set is not symmetric; missing {missing}")
        if not self.vertex_types:
            raise ValueError("a model needs at least one vertex type")
        keys, names = set(), set()
        for t in self.vertex_types:
            if t.color not in self.signature.vertex_colors:
                raise ValueError(f"vertex type {t.name!r} has unknown color {t.color!r}")
            if not set(t.corolla) <= fc:
                raise ValueError(f"vertex type {t.name!r} has unknown field colors")
            if t.key in keys:
                raise ValueError(f"duplicate vertex type {t.name!r}")
            if t.name in names:
                raise ValueError(f"duplicate vertex type name {t.name!r}")
            keys.add(t.key)
            names.add(t.name)

    @property
    def type_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.vertex_types)

    @property
    def type_keys(self) -> frozenset:
        return frozenset(t.key for t in self.vertex_types)

    def type_index(self, key) -> int | None:
        """1-based index of the vertex type ``(color, corolla)``, or ``None``."""
        for k, t in enumerate(self.vertex_types, start=1):
            if t.key == key:
                return k
        return None

    def vertex_type(self, name: str) -> VertexType:
        for t in self.vertex_types:
            if t.name == name:
                return t
        raise KeyError(f"unknown vertex type {name!r}")

    def is_admissible(self, a: str, b: str) -> bool:
        # both orientations must be declared; with a symmetric set this is plain membership
        return (a, b) in self.admissible and (b, a) in self.admissible


def one_vertex_key(m: Monomial, i: int = 1) -> tuple[str, tuple[str, ...]]:
    return (m.vertices[i - 1], m.corolla(i))


# -- enumeration --------------------------------------------------------------------

def _pairings(
    vertices: Sequence[tuple[str, tuple[str, ...]]],
    allowed: Callable[[str, str], bool],
    tadpoles: bool,
) -> Iterator[Monomial]:
    """Every distinct monomial obtained by joining flags of the given vertices.

    Enumerates multiplicities per propagator type, so each monomial appears
    exactly once.
    """
    n = len(vertices)
    capacity: dict[tuple[int, str], int] = defaultdict(int)
    for i, (_, corolla) in enumerate(vertices, start=1):
        for a in corolla:
            capacity[(i, a)] += 1
    slots = []
    for i in range(1, n + 1):
        cols_i = sorted(set(vertices[i - 1][1]))
        for j in range(i, n + 1):
            if i == j and not tadpoles:
                continue
            cols_j = sorted(set(vertices[j - 1][1]))
            for a in cols_i:
                for b in cols_j:
                    if i == j and a > b:
                        continue
                    if allowed(a, b):
                        slots.append((i, a, j, b))
    colors = tuple(c for c, _ in vertices)
    chosen: list[tuple[int, str, int, str]] = []

    def rec(k: int):
        if k == len(slots):
            fields = [key for key, c in capacity.items() for _ in range(c)]
            yield Monomial(colors, tuple(fields), tuple(chosen))
            return
        i, a, j, b = slots[k]
        if (i, a) == (j, b):
            most = capacity[(i, a)] // 2
        else:
            most = min(capacity[(i, a)], capacity[(j, b)])
        for mult in range(most + 1):
            if mult:
                capacity[(i, a)] -= 1
                capacity[(j, b)] -= 1
                chosen.append((i, a, j, b))
            yield from rec(k + 1)
        for _ in range(most):
            capacity[(i, a)] += 1
            capacity[(j, b)] += 1
            chosen.pop()

    yield from rec(0)


@lru_cache(maxsize=None)
def _enumerate(model: QftModel, n: int, cap: int) -> tuple[Monomial, ...]:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1 and model.require_1pi:
        return ()
    types = [t.key for t in model.vertex_types]
    out = []
    for combo in product(types, repeat=n):
        for m in _pairings(combo, model.is_admissible, False):
            # every one-vertex subgraph must be a vertex type (so no tadpoles either)
            if m.has_tadpole():
                continue
            if model.require_1pi and not m.is_1pi():
                continue
            out.append(m)
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} diagrams with {n} vertices")
    out.sort(key=str)
    return tuple(out)


def enumerate_diagrams(model: QftModel, n: int, cap: int = DEFAULT_CAP) -> list[Monomial]:
    """All model diagrams with ``n`` vertices, sorted by monomial string."""
    return list(_enumerate(model, n, cap))


@lru_cache(maxsize=None)
def _ambient(model: QftModel, n: int, tadpoles: bool, cap: int) -> tuple[Monomial, ...]:
    corollas = sorted({t.corolla for t in model.vertex_types})
    shapes = [(c, cor) for cor in corollas for c in model.signature.vertex_colors]
    out = []
    for combo in product(shapes, repeat=n):
        for m in _pairings(combo, lambda a, b: True, tadpoles):
            out.append(m)
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} ambient diagrams with {n} vertices")
    out.sort(key=str)
    return tuple(out)


def ambient_diagrams(model: QftModel, n: int, tadpoles: bool = True, cap: int = DEFAULT_CAP) -> list[Monomial]:
    """Every way of joining flags of the model's corollas, any vertex colors.

    No admissibility, connectivity or vertex-type condition is imposed; this
    is the test universe for closure checks.
    """
    return list(_ambient(model, n, tadpoles, cap))


# -- contraction maps ---------------------------------------------------------------

Entry = tuple[Monomial, str]


class ContractionMap:
    """Finitely supported ``q(Gamma, K)`` on ``n``-vertex diagrams."""

    __slots__ = ("n", "signature", "entries", "_by_monomial")

    def __init__(self, n: int, signature: ColorSignature, entries: Mapping[Entry, object] | None = None):
        if n < 1:
            raise ValueError("arity must be >= 1")
        self.n = n
        self.signature = signature
        clean: dict[Entry, Fraction] = {}
        for (m, K), v in (entries or {}).items():
            if m.n != n:
                raise ValueError(f"diagram {m} does not have {n} vertices")
            if K not in signature.vertex_colors:
                raise ValueError(f"unknown vertex color {K!r}")
            v = Fraction(v)
            if v:
                clean[(m, K)] = v
        self.entries = clean
        self._by_monomial = None

    def __call__(self, m: Monomial, K: str) -> Fraction:
        return self.entries.get((m, K), Fraction(0))

    def by_monomial(self) -> dict[Monomial, dict[str, Fraction]]:
        if self._by_monomial is None:
            index: dict[Monomial, dict[str, Fraction]] = defaultdict(dict)
            for (m, K), v in self.entries.items():
                index[m][K] = v
            self._by_monomial = dict(index)
        return self._by_monomial

    def __eq__(self, other):
        if not isinstance(other, ContractionMap):
            return NotImplemented
        return (self.n, self.signature, self.entries) == (other.n, other.signature, other.entries)

    def __hash__(self):
        return hash((self.n, frozenset(self.entries.items())))

    def __repr__(self):
        return f"ContractionMap(n={self.n}, {len(self.entries)} entries)"

    def render(self) -> str:
        lines = sorted(f"{m} -> {K} : {v}" for (m, K), v in self.entries.items())
        return "".join(line + "\n" for line in lines)

    @classmethod
    def parse_lines(cls, text: str, signature: ColorSignature) -> dict[Entry, Fraction]:
        out: dict[Entry, Fraction] = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                head, value = line.rsplit(":", 1)
                mono, color = head.split("->")
                key = (Monomial.parse(mono, signature), color.strip())
                value = Fraction(value.strip())
            except ValueError as exc:
                raise ValueError(f"bad contraction-map line {raw!r}: {exc}") from exc
            if key in out:
                raise ValueError(f"duplicate entry {raw!r}")
            out[key] = value
        return out

    @classmethod
    def parse(cls, text: str, signature: ColorSignature, n: int | None = None) -> "ContractionMap":
        entries = cls.parse_lines(text, signature)
        arities = {m.n for m, _ in entries}
        if n is None:
            if len(arities) != 1:
                raise ValueError("cannot infer the arity of an empty or mixed map")
            n = arities.pop()
        return cls(n, signature, entries)

    @classmethod
    def indicator(cls, m: Monomial, K: str, signature: ColorSignature, c=1) -> "ContractionMap":
        return cls(m.n, signature, {(m, K): c})


# -- systems of subsets -------------------------------------------------------------

class SystemFilter:
    """A predicate ``S(n)`` on (diagram, output color), memoized per pair."""

    def __init__(self, name: str, predicate: Callable[[Monomial, str], bool]):
        self.name = name
        self._predicate = predicate
        self._memo: dict[Entry, bool] = {}

    def __call__(self, m: Monomial, K: str) -> bool:
        key = (m, K)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = bool(self._predicate(m, K))
        return hit

    def __and__(self, other: "SystemFilter") -> "SystemFilter":
        return intersection(self, other)

    def __repr__(self):
        return f"SystemFilter({self.name})"


def everything() -> SystemFilter:
    return SystemFilter("everything", lambda m, K: True)


def one_pi_system() -> SystemFilter:
    """1PI diagrams; at arity one, tadpole-free vertices."""
    return SystemFilter("1PI", lambda m, K: not m.has_tadpole() if m.n == 1 else m.is_1pi())


def admissible_system(model: QftModel) -> SystemFilter:
    """Admissible inner edges only, and no tadpoles."""
    def pred(m, K):
        return not m.has_tadpole() and all(model.is_admissible(a, b) for _, a, _, b in m.props)
    return SystemFilter("Adm", pred)


def vertex_type_system(model: QftModel) -> SystemFilter:
    """Every vertex is a model vertex type and so is the full contraction."""
    keys = model.type_keys

    def pred(m, K):
        if m.has_tadpole():
            return False
        if any(one_vertex_key(m, i) not in keys for i in range(1, m.n + 1)):
            return False
        return (K, m.external()) in keys
    return SystemFilter("T", pred)


def intersection(*systems: SystemFilter) -> SystemFilter:
    return SystemFilter(" & ".join(s.name for s in systems), lambda m, K: all(s(m, K) for s in systems))


def model_system(model: QftModel) -> SystemFilter:
    parts = [admissible_system(model), vertex_type_system(model)]
    if model.require_1pi:
        parts.insert(0, one_pi_system())
    return intersection(*parts)


def restrict(Q: ContractionMap, S: SystemFilter) -> ContractionMap:
    return ContractionMap(Q.n, Q.signature, {k: v for k, v in Q.entries.items() if S(*k)})


def in_suboperad(Q: ContractionMap, S: SystemFilter) -> bool:
    return all(S(m, K) for m, K in Q.entries)


@dataclass
class ClosureReport:
    system: str
    passed: bool = True
    checked: int = 0
    invariance_checked: int = 0
    counterexample: str | None = None

    def fail(self, text: str):
        if self.passed:
            self.passed = False
            self.counterexample = text

    def summary(self) -> str:
        status = "pass" if self.passed else "FAIL"
        line = f"{self.system}: {status} ({self.checked} closure cases, {self.invariance_checked} relabelings)"
        if self.counterexample:
            line += f"\n  counterexample: {self.counterexample}"
        return line


def closure_check(S: SystemFilter, model: QftModel, n_max: int, cap: int = DEFAULT_CAP) -> ClosureReport:
    """Exhaustively test the composition-closure condition and S_n-invariance of ``S``.

    The universe is :func:`ambient_diagrams` (tadpoles and non-admissible
    edges included), so the check sees diagrams outside the system too.
    """
    report = ClosureReport(system=S.name)
    colors = model.signature.vertex_colors
    for n in range(1, n_max + 1):
        perms = list(all_permutations(n))
        subsets = list(nonempty_subsets(n))
        for g in ambient_diagrams(model, n, tadpoles=True, cap=cap):
            for K in colors:
                inside = S(g, K)
                for sigma in perms:
                    report.invariance_checked += 1
                    if S(g.relabel(sigma), K) != inside:
                        report.fail(f"not invariant: {g} -> {K} under {sigma.images}")
                if inside:
                    continue
                for J in subsets:
                    sub = g.subgraph(J)
                    for L in colors:
                        report.checked += 1
                        if S(sub, L) and S(g.contract(J, L), K):
                            report.fail(f"{g} -> {K} is outside, but J={list(J)}, L={L} gives members")
    return report


# -- operad carrier -----------------------------------------------------------------

class ContractionOperad(Operad):
    """Contraction maps supported on a composition-closed domain of diagrams.

    With ``ambient=False`` the domain is the model suboperad: model diagrams
    ``Gamma`` with output color ``K`` such that ``Gamma`` contracted to one
    ``K``-vertex is again a vertex type.  With ``ambient=True`` the domain
    drops admissibility, connectivity and vertex colors, keeping only
    tadpole-free joins of the model's corollas whose external legs form a
    model corolla.  Both contain the unit, which maps every arity-one
    domain element to its own color.
    """

    def __init__(self, model: QftModel, ambient: bool = False, cap: int = DEFAULT_CAP):
        self.model = model
        self.signature = model.signature
        self.ambient = ambient
        self.cap = cap
        self._domains: dict[int, tuple[Entry, ...]] = {}
        self._domain_sets: dict[int, frozenset] = {}
        self._diagram_index: dict[int, dict[Monomial, tuple[str, ...]]] = {}
        self._blocks: dict[tuple[Monomial, tuple[int, ...]], Monomial] = {}
        self._quotients: dict[tuple[Monomial, tuple[int, ...], str], Monomial] = {}
        self._unit = None

    def __eq__(self, other):
        return (isinstance(other, ContractionOperad)
                and (self.model, self.ambient) == (other.model, other.ambient))

    def __hash__(self):
        return hash((self.model, self.ambient))

    def __repr__(self):
        kind = "ambient" if self.ambient else "model"
        return f"ContractionOperad({kind}, types={list(self.model.type_names)})"

    # -- domain --

    def _one_vertex_domain(self) -> list[Entry]:
        model = self.model
        colors = model.signature.vertex_colors
        if self.ambient:
            corollas = sorted({t.corolla for t in model.vertex_types})
            return [(vertex_monomial(c, cor), K) for cor in corollas for c in colors for K in colors]
        keys = model.type_keys
        return [(t.monomial(), K) for t in model.vertex_types for K in colors if (K, t.corolla) in keys]

    def domain(self, n: int) -> tuple[Entry, ...]:
        if n not in self._domains:
            if n == 1:
                entries = self._one_vertex_domain()
            else:
                colors = self.model.signature.vertex_colors
                if self.ambient:
                    corollas = {t.corolla for t in self.model.vertex_types}
                    diagrams = [g for g in ambient_diagrams(self.model, n, tadpoles=False, cap=self.cap)
                                if g.external() in corollas]
                    entries = [(g, K) for g in diagrams for K in colors]
                else:
                    keys = self.model.type_keys
                    entries = [(g, K) for g in enumerate_diagrams(self.model, n, self.cap)
                               for K in colors if (K, g.external()) in keys]
            entries.sort(key=lambda e: (str(e[0]), e[1]))
            self._domains[n] = tuple(entries)
            self._domain_sets[n] = frozenset(entries)
            index: dict[Monomial, list[str]] = defaultdict(list)
            for g, K in entries:
                index[g].append(K)
            self._diagram_index[n] = {g: tuple(ks) for g, ks in index.items()}
        return self._domains[n]

    def contains(self, Q: ContractionMap) -> bool:
        self.domain(Q.n)
        return Q.signature == self.signature and all(k in self._domain_sets[Q.n] for k in Q.entries)

    def element(self, n: int, entries: Mapping[Entry, object]) -> ContractionMap:
        Q = ContractionMap(n, self.signature, entries)
        self._check(Q)
        return Q

    def _check(self, *maps: ContractionMap):
        for Q in maps:
            if not isinstance(Q, ContractionMap):
                raise TypeError(f"{Q!r} is not a contraction map")
            if not self.contains(Q):
                outside = [f"{m} -> {K}" for m, K in Q.entries if (m, K) not in self._domain_sets[Q.n]]
                raise ValueError(f"entries outside the carrier: {outside[:3]}")

    # -- operad structure --

    def unit(self):
        if self._unit is None:
            self._unit = ContractionMap(1, self.signature, {(g, K): 1 for g, K in self.domain(1) if g.vertices[0] == K})
        return self._unit

    def zero(self, n):
        return ContractionMap(n, self.signature)

    def arity(self, a):
        return a.n

    def add(self, a, b):
        if a.n != b.n:
            raise ValueError("cannot add maps of different arity")
        out = dict(a.entries)
        for k, v in b.entries.items():
            out[k] = out.get(k, 0) + v
        return ContractionMap(a.n, self.signature, out)

    def scale(self, a, c):
        c = Fraction(c)
        return ContractionMap(a.n, self.signature, {k: v * c for k, v in a.entries.items()})

    def act(self, a, sigma: Permutation):
        """``act(Q, sigma)(Gamma, K) = Q(relabel(Gamma, sigma), K)``."""
        if sigma.n != a.n:
            raise ValueError("permutation size does not match arity")
        inv = sigma.inverse()
        return ContractionMap(a.n, self.signature, {(m.relabel(inv), K): v for (m, K), v in a.entries.items()})

    def _block(self, g: Monomial, J: tuple[int, ...]) -> Monomial:
        key = (g, J)
        hit = self._blocks.get(key)
        if hit is None:
            hit = self._blocks[key] = g.subgraph(J)
        return hit

    def _quotient(self, g: Monomial, J: tuple[int, ...], L: str) -> Monomial:
        key = (g, J, L)
        hit = self._quotients.get(key)
        if hit is None:
            hit = self._quotients[key] = g.contract(J, L)
        return hit

    def pcomp(self, a, i, b):
        self._check(a, b)
        n, j = a.n, b.n
        if not 1 <= i <= n:
            raise ValueError(f"slot {i} out of range for arity {n}")
        N = n + j - 1
        J = tuple(range(i, i + j))
        inner, outer = b.by_monomial(), a.by_monomial()
        out: dict[Entry, Fraction] = defaultdict(Fraction)
        if inner and outer:
            self.domain(N)
            for g, colors in self._diagram_index[N].items():
                qs = inner.get(self._block(g, J))
                if not qs:
                    continue
                for L, c1 in qs.items():
                    rest = outer.get(self._quotient(g, J, L))
                    if not rest:
                        continue
                    for K, c2 in rest.items():
                        if K in colors:
                            out[(g, K)] += c1 * c2
        return ContractionMap(N, self.signature, out)

    def random_element(self, n, rng: random.Random, density: float = 0.5, bound: int = 3, max_terms: int = 6):
        dom = self.domain(n)
        if not dom:
            return self.zero(n)
        picks = [e for e in dom if rng.random() < density] or [rng.choice(dom)]
        if len(picks) > max_terms:
            picks = rng.sample(picks, max_terms)
        entries = {e: Fraction(rng.choice([x for x in range(-bound, bound + 1) if x]), rng.randint(1, bound))
                   for e in picks}
        return ContractionMap(n, self.signature, entries)

    def render(self, a):
        return a.render()

    def parse(self, text: str, n: int) -> ContractionMap:
        return self.element(n, ContractionMap.parse_lines(text, self.signature))


def model_operad(model: QftModel, cap: int = DEFAULT_CAP) -> ContractionOperad:
    return ContractionOperad(model, ambient=False, cap=cap)


def ambient_operad(model: QftModel, cap: int = DEFAULT_CAP) -> ContractionOperad:
    return ContractionOperad(model, ambient=True, cap=cap)
