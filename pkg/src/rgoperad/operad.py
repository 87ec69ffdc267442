"""Symmetric operads: a carrier interface, the endomorphism operad, and an axiom checker.

Conventions shared by every carrier:

* ``act(a, sigma)`` is the permutation action on inputs.  For multilinear
  maps ``act(f, sigma)(x_1, ..., x_n) = f(x_sigma(1), ..., x_sigma(n))``,
  hence ``act(act(a, sigma), tau) == act(a, tau.compose(sigma))``.
* ``pcomp(a, i, b)`` plugs ``b`` into input slot ``i`` of ``a``; the inputs
  of ``b`` occupy slots ``i..i+arity(b)-1`` of the result.
"""

from __future__ import annotations

import random
from abc import ABC, abstractmethod
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Any, Callable, Mapping, Sequence

from .combinatorics import (
    Permutation,
    all_permutations,
    block_permutation,
    shifted_permutation,
)


class Operad(ABC):
    """Linear symmetric operad with arities ``n >= 1``."""

    @abstractmethod
    def unit(self) -> Any: ...

    @abstractmethod
    def zero(self, n: int) -> Any: ...

    @abstractmethod
    def arity(self, a) -> int: ...

    @abstractmethod
    def add(self, a, b) -> Any: ...

    @abstractmethod
    def scale(self, a, c) -> Any: ...

    @abstractmethod
    def act(self, a, sigma: Permutation) -> Any: ...

    @abstractmethod
    def pcomp(self, a, i: int, b) -> Any: ...

    @abstractmethod
    def random_element(self, n: int, rng: random.Random) -> Any: ...

    @abstractmethod
    def render(self, a) -> str: ...

    def equal(self, a, b) -> bool:
        return a == b

    def is_zero(self, a) -> bool:
        return self.equal(a, self.zero(self.arity(a)))

    def sub(self, a, b):
        return self.add(a, self.scale(b, -1))

    def sum(self, items, n: int):
        total = self.zero(n)
        for x in items:
            total = self.add(total, x)
        return total

    def gamma(self, a, bs: Sequence[Any]):
        """Full composition ``a(b_1, ..., b_k)``, built from partial compositions.

        Inserting right to left keeps the slot indices of the remaining
        inputs of ``a`` unchanged.
        """
        if len(bs) != self.arity(a):
            raise ValueError(f"gamma needs {self.arity(a)} inputs, got {len(bs)}")
        unit = self.unit()
        out = a
        for i in range(len(bs), 0, -1):
            b = bs[i - 1]
            if b is unit or self.equal(b, unit):
                continue
            out = self.pcomp(out, i, b)
        return out

    def symmetrize(self, a):
        """Average of ``act(a, sigma)`` over the symmetric group."""
        n = self.arity(a)
        total = self.sum((self.act(a, s) for s in all_permutations(n)), n)
        return self.scale(total, Fraction(1, factorial(n)))

    def is_invariant(self, a) -> bool:
        n = self.arity(a)
        return all(self.equal(self.act(a, s), a) for s in all_permutations(n))


# -- endomorphism operad --------------------------------------------------------

TensorKey = tuple[int, tuple[int, ...]]


class Multilinear:
    """A multilinear map ``V^n -> V`` on ``V = F^dim``, as a sparse coefficient tensor.

    ``entries[(nu, (mu_1, ..., mu_n))]`` is the ``nu``-th coordinate of
    ``f(e_mu_1, ..., e_mu_n)``.
    """

    __slots__ = ("dim", "arity", "entries")

    def __init__(self, dim: int, arity: int, entries: Mapping[TensorKey, object] | None = None):
        self.dim = dim
        self.arity = arity
        clean = {}
        for (nu, mu), v in (entries or {}).items():
            mu = tuple(mu)
            if len(mu) != arity:
                raise ValueError(f"index {mu} has wrong arity for {arity}")
            if not 1 <= nu <= dim or any(not 1 <= x <= dim for x in mu):
                raise ValueError(f"index out of range: {(nu, mu)}")
            v = Fraction(v)
            if v:
                clean[(nu, mu)] = v
        self.entries = clean

    def get(self, nu: int, mu: Sequence[int]) -> Fraction:
        return self.entries.get((nu, tuple(mu)), Fraction(0))

    def __call__(self, *vectors: Sequence[object]) -> list[Fraction]:
        """Evaluate on ``arity`` coordinate vectors (length ``dim`` each)."""
        if len(vectors) != self.arity:
            raise ValueError("wrong number of arguments")
        out = [Fraction(0)] * self.dim
        for (nu, mu), c in self.entries.items():
            term = c
            for vec, x in zip(vectors, mu):
                term *= Fraction(vec[x - 1])
                if not term:
                    break
            out[nu - 1] += term
        return out

    def __eq__(self, other):
        if not isinstance(other, Multilinear):
            return NotImplemented
        return (self.dim, self.arity, self.entries) == (other.dim, other.arity, other.entries)

    def __hash__(self):
        return hash((self.dim, self.arity, frozenset(self.entries.items())))

    def __repr__(self):
        return f"Multilinear(dim={self.dim}, arity={self.arity}, {len(self.entries)} entries)"


class EndOperad(Operad):
    """The endomorphism operad of ``F^dim``."""

    def __init__(self, dim: int, labels: Sequence[str] | None = None):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        if labels is not None and len(labels) != dim:
            raise ValueError("need one label per basis vector")
        self.dim = dim
        self.labels = tuple(labels) if labels else None
        self._unit = Multilinear(dim, 1, {(nu, (nu,)): 1 for nu in range(1, dim + 1)})

    def __eq__(self, other):
        return isinstance(other, EndOperad) and (self.dim, self.labels) == (other.dim, other.labels)

    def __hash__(self):
        return hash(("End", self.dim, self.labels))

    def __repr__(self):
        return f"EndOperad({self.dim})"

    def unit(self):
        return self._unit

    def zero(self, n):
        return Multilinear(self.dim, n)

    def arity(self, a):
        return a.arity

    def _check(self, *elements):
        for a in elements:
            if not isinstance(a, Multilinear) or a.dim != self.dim:
                raise ValueError(f"{a!r} is not an element of {self!r}")

    def add(self, a, b):
        self._check(a, b)
        if a.arity != b.arity:
            raise ValueError("cannot add elements of different arity")
        out = dict(a.entries)
        for k, v in b.entries.items():
            out[k] = out.get(k, 0) + v
        return Multilinear(self.dim, a.arity, out)

    def scale(self, a, c):
        c = Fraction(c)
        return Multilinear(self.dim, a.arity, {k: v * c for k, v in a.entries.items()})

    def act(self, a, sigma):
        self._check(a)
        if sigma.n != a.arity:
            raise ValueError("permutation size does not match arity")
        inv = sigma.inverse()
        out = {}
        for (nu, alpha), v in a.entries.items():
            # result(mu) = a(mu_sigma(1), ..., mu_sigma(n)); so mu_s = alpha_{sigma^-1(s)}
            mu = tuple(alpha[inv(s) - 1] for s in range(1, a.arity + 1))
            out[(nu, mu)] = v
        return Multilinear(self.dim, a.arity, out)

    def pcomp(self, a, i, b):
        self._check(a, b)
        if not 1 <= i <= a.arity:
            raise ValueError(f"slot {i} out of range for arity {a.arity}")
        by_output: dict[int, list] = defaultdict(list)
        for (rho, beta), v in b.entries.items():
            by_output[rho].append((beta, v))
        out: dict[TensorKey, Fraction] = defaultdict(Fraction)
        for (nu, alpha), u in a.entries.items():
            for beta, v in by_output.get(alpha[i - 1], ()):
                out[(nu, alpha[: i - 1] + beta + alpha[i:])] += u * v
        return Multilinear(self.dim, a.arity + b.arity - 1, out)

    def random_element(self, n, rng, density=0.4, bound=3):
        entries = {}
        for nu in range(1, self.dim + 1):
            for mu in _all_index_tuples(self.dim, n):
                if rng.random() < density:
                    entries[(nu, mu)] = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        return Multilinear(self.dim, n, entries)

    def _name(self, i):
        return self.labels[i - 1] if self.labels else str(i)

    def render(self, a):
        lines = sorted(
            (mu, nu, v) for (nu, mu), v in a.entries.items()
        )
        return "".join(
            f"{self._name(nu)}; {','.join(self._name(x) for x in mu)} : {v}\n" for mu, nu, v in lines
        )


def _all_index_tuples(dim: int, n: int):
    if n == 0:
        yield ()
        return
    for rest in _all_index_tuples(dim, n - 1):
        for x in range(1, dim + 1):
            yield rest + (x,)


def end_operad(dim: int, labels: Sequence[str] | None = None) -> EndOperad:
    return EndOperad(dim, labels)


# -- axiom checker ----------------------------------------------------------------

@dataclass
class AxiomReport:
    carrier: str
    passed: bool = True
    checks: int = 0
    counterexample: str | None = None
    counts: dict[str, int] = field(default_factory=dict)

    def record(self, law: str, ok: bool, detail: Callable[[], str]):
        self.checks += 1
        self.counts[law] = self.counts.get(law, 0) + 1
        if not ok and self.passed:
            self.passed = False
            self.counterexample = f"{law}: {detail()}"

    def summary(self) -> str:
        status = "pass" if self.passed else "FAIL"
        laws = ", ".join(f"{k}={v}" for k, v in sorted(self.counts.items()))
        line = f"{self.carrier}: {status} ({self.checks} checks: {laws})"
        if self.counterexample:
            line += f"\n  counterexample: {self.counterexample}"
        return line


def check_operad_axioms(
    carrier: Operad,
    samples: Mapping[int, Sequence[Any]] | None = None,
    rng: random.Random | None = None,
    n_samples: int = 20,
    max_arity: int = 3,
    trials: int | None = None,
) -> AxiomReport:
    """Test unit laws, both associativity laws and equivariance on samples.

    ``max_arity`` bounds the arity of every element that gets built,
    including composites.  Failures are reported, never raised.
    """
    rng = rng or random.Random(0)
    trials = trials if trials is not None else n_samples
    if samples is None:
        samples = {n: [carrier.random_element(n, rng) for _ in range(n_samples)] for n in range(1, max_arity + 1)}
    samples = {n: list(v) for n, v in samples.items() if v and n <= max_arity}
    report = AxiomReport(carrier=repr(carrier))
    unit = carrier.unit()
    eq = carrier.equal

    def pick(n):
        return rng.choice(samples[n])

    arities = sorted(samples)

    for n in arities:
        for a in samples[n]:
            report.record("left unit", eq(carrier.pcomp(unit, 1, a), a),
                          lambda: f"unit o_1 {carrier.render(a)!r}")
            for i in range(1, n + 1):
                report.record("right unit", eq(carrier.pcomp(a, i, unit), a),
                              lambda: f"{carrier.render(a)!r} o_{i} unit")
            report.record("identity action", eq(carrier.act(a, Permutation.identity(n)), a),
                          lambda: carrier.render(a))

    for _ in range(trials):
        # sequential: (a o_i b) o_{i+r-1} c == a o_i (b o_r c)
        triples = [(x, y, z) for x in arities for y in arities for z in arities if x + y + z - 2 <= max_arity]
        if triples:
            na, nb, nc = rng.choice(triples)
            a, b, c = pick(na), pick(nb), pick(nc)
            i = rng.randint(1, na)
            r = rng.randint(1, nb)
            lhs = carrier.pcomp(carrier.pcomp(a, i, b), i + r - 1, c)
            rhs = carrier.pcomp(a, i, carrier.pcomp(b, r, c))
            report.record("sequential associativity", eq(lhs, rhs),
                          lambda: f"arities {(na, nb, nc)}, i={i}, r={r}")

        # parallel: (a o_i b) o_{k+|b|-1} c == (a o_k c) o_i b for i < k
        triples = [(x, y, z) for x in arities if x >= 2 for y in arities for z in arities if x + y + z - 2 <= max_arity]
        if triples:
            na, nb, nc = rng.choice(triples)
            a, b, c = pick(na), pick(nb), pick(nc)
            i, k = sorted(rng.sample(range(1, na + 1), 2))
            lhs = carrier.pcomp(carrier.pcomp(a, i, b), k + nb - 1, c)
            rhs = carrier.pcomp(carrier.pcomp(a, k, c), i, b)
            report.record("parallel associativity", eq(lhs, rhs),
                          lambda: f"arities {(na, nb, nc)}, i={i}, k={k}")

        pairs = [(x, y) for x in arities for y in arities if x + y - 1 <= max_arity]
        if pairs:
            na, nb = rng.choice(pairs)
            a, b = pick(na), pick(nb)
            i = rng.randint(1, na)
            sigma = Permutation(tuple(rng.sample(range(1, na + 1), na)))
            lhs = carrier.pcomp(carrier.act(a, sigma), i, b)
            rhs = carrier.act(carrier.pcomp(a, sigma.inverse()(i), b), block_permutation(sigma, i, nb))
            report.record("equivariance (outer)", eq(lhs, rhs),
                          lambda: f"arities {(na, nb)}, i={i}, sigma={sigma.images}")

            tau = Permutation(tuple(rng.sample(range(1, nb + 1), nb)))
            lhs = carrier.pcomp(a, i, carrier.act(b, tau))
            rhs = carrier.act(carrier.pcomp(a, i, b), shifted_permutation(tau, i, na))
            report.record("equivariance (inner)", eq(lhs, rhs),
                          lambda: f"arities {(na, nb)}, i={i}, tau={tau.images}")

        n = rng.choice(arities)
        a = pick(n)
        s = Permutation(tuple(rng.sample(range(1, n + 1), n)))
        t = Permutation(tuple(rng.sample(range(1, n + 1), n)))
        report.record("action law", eq(carrier.act(carrier.act(a, s), t), carrier.act(a, t.compose(s))),
                      lambda: f"arity {n}, sigma={s.images}, tau={t.images}")

    return report
