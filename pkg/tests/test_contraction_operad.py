import random
from fractions import Fraction as F
from itertools import product

import pytest

from rgoperad.combinatorics import Permutation, all_permutations
from rgoperad.contraction_operad import (
    CapExceeded,
    ContractionMap,
    QftModel,
    SystemFilter,
    VertexType,
    admissible_system,
    ambient_diagrams,
    ambient_operad,
    closure_check,
    enumerate_diagrams,
    everything,
    in_suboperad,
    intersection,
    model_operad,
    model_system,
    one_pi_system,
    restrict,
    vertex_type_system,
)
from rgoperad.graphs import ColorSignature, Monomial
from rgoperad.group import GroupElement, group_inverse, group_product
from rgoperad.operad import check_operad_axioms
from rgoperad.wick_rg import wick_enumerate

DOUBLE = "L(1)*L(2)*<phi(1)|phi(2)>*<phi(1)|phi(2)>"


def enumeration_oracle(model, n):
    """1PI supports of the Wick pairing sums over every tuple of vertex types."""
    found = set()
    for combo in product(model.vertex_types, repeat=n):
        found.update(m for m in wick_enumerate(model, combo).terms if m.is_1pi())
    return sorted(found, key=str)


def test_phi2_diagrams(phi2):
    assert [str(m) for m in enumerate_diagrams(phi2, 2)] == [DOUBLE]
    assert enumerate_diagrams(phi2, 1) == []


@pytest.mark.parametrize("name,top", [("phi2", 4), ("qed", 3), ("phi4", 3)])
def test_enumeration_matches_pairing_oracle(request, name, top):
    model = request.getfixturevalue(name)
    for n in range(2, top + 1):
        diagrams = enumerate_diagrams(model, n)
        assert diagrams == enumeration_oracle(model, n)
        assert [str(m) for m in diagrams] == sorted(str(m) for m in diagrams)


def test_qed_two_vertex_diagrams(qed):
    got = {str(m) for m in enumerate_diagrams(qed, 2)}
    assert "L(1)*L(2)*<A(1)|A(2)>*<psi(1)|psibar(2)>*psi(2)*psibar(1)" in got
    assert "L(1)*L(2)*<psi(1)|psibar(2)>*<psibar(1)|psi(2)>*A(1)*A(2)" in got
    # plus the mirrored photon-exchange diagram and the three-propagator vacuum diagram
    assert len(got) == 4


def test_enumeration_cap(qed):
    with pytest.raises(CapExceeded):
        enumerate_diagrams(qed, 3, cap=5)


def test_model_validation():
    sig = ColorSignature(("L",), ("a", "b"))
    t = [VertexType("L", ("a", "b"))]
    with pytest.raises(ValueError, match="symmetric"):
        QftModel(sig, {("a", "b")}, t)
    QftModel(sig, {("a", "b")}, t, check_symmetry=False)
    with pytest.raises(ValueError):
        QftModel(sig, set(), t)
    with pytest.raises(ValueError):
        QftModel(sig, {("a", "a")}, [VertexType("X", ("a",))])
    with pytest.raises(ValueError):
        QftModel(sig, {("a", "a")}, [VertexType("L", ("c",))])
    with pytest.raises(ValueError):
        QftModel(sig, {("a", "a")}, [VertexType("L", ("a",)), VertexType("L", ("a",), "again")])


def test_default_type_names(qed):
    assert VertexType("L", ("phi", "phi")).name == "L[phi.phi]"
    assert qed.type_names == ("e",)


# -- operad structure ---------------------------------------------------------------

def carriers(phi2, qed, phi4):
    return [model_operad(phi2), model_operad(qed), model_operad(phi4),
            ambient_operad(phi2), ambient_operad(qed), ambient_operad(phi4)]


def test_axioms_hold_in_every_carrier(phi2, qed, phi4):
    for P in carriers(phi2, qed, phi4):
        report = check_operad_axioms(P, rng=random.Random(2), max_arity=3)
        assert report.passed, report.summary()


def test_wrong_action_orientation_is_caught(phi4):
    P = model_operad(phi4)

    class Flipped(type(P)):
        def act(self, a, sigma):
            return ContractionMap(a.n, self.signature, {(m.relabel(sigma), K): v for (m, K), v in a.entries.items()})

    report = check_operad_axioms(Flipped(phi4), rng=random.Random(1), max_arity=3)
    assert not report.passed


def test_unit_and_unit_laws(phi2):
    P = model_operad(phi2)
    u = P.unit()
    assert P.contains(u)
    assert {str(m) for m, _ in u.entries} == {"L(1)*phi(1)*phi(1)", "L(1)"}
    Q = P.element(2, {(Monomial.parse(DOUBLE, phi2.signature), "L"): F(5, 2)})
    assert P.pcomp(Q, 1, u) == Q
    assert P.pcomp(Q, 2, u) == Q
    assert P.pcomp(u, 1, Q) == Q


def test_double_edge_self_composition_vanishes(phi2):
    for P in (model_operad(phi2), ambient_operad(phi2)):
        d = Monomial.parse(DOUBLE, phi2.signature)
        Q = ContractionMap.indicator(d, "L", phi2.signature)
        for i in (1, 2):
            R = P.pcomp(Q, i, Q)
            assert R == P.zero(3)
        # evaluated directly on every 3-vertex diagram of the model
        for g in enumerate_diagrams(phi2, 3):
            total = sum(Q(g.subgraph((1, 2)), L) * Q(g.contract((1, 2), L), "L") for L in ("L",))
            assert total == 0


def test_fish_composition_is_nonzero(phi4):
    P = model_operad(phi4)
    fish = [m for m, K in P.domain(2) if K == "L" and m.vertices == ("L", "L")]
    Q = ContractionMap.indicator(fish[0], "L", phi4.signature)
    R = P.pcomp(Q, 1, Q)
    # the two lines from vertex 3 end on {1,1}, {1,2} or {2,2}
    assert len(R.entries) == 3
    assert all(m.is_1pi() and v == 1 for (m, _), v in R.entries.items())
    assert sorted(len([p for p in m.props if 3 in (p[0], p[2])]) for m, _ in R.entries) == [2, 2, 2]


def test_pcomp_is_bilinear(qed, phi4):
    rng = random.Random(3)
    for model in (qed, phi4):
        P = ambient_operad(model)
        a, a2 = P.random_element(2, rng), P.random_element(2, rng)
        b, b2 = P.random_element(2, rng), P.random_element(2, rng)
        c = F(2, 3)
        lhs = P.pcomp(P.add(a, P.scale(a2, c)), 1, b)
        assert lhs == P.add(P.pcomp(a, 1, b), P.scale(P.pcomp(a2, 1, b), c))
        lhs = P.pcomp(a, 2, P.add(b, b2))
        assert lhs == P.add(P.pcomp(a, 2, b), P.pcomp(a, 2, b2))


def test_pcomp_rejects_foreign_entries(qed, phi2):
    P = model_operad(qed)
    with pytest.raises(ValueError):
        P.pcomp(P.unit(), 2, P.unit())
    foreign = ContractionMap(2, qed.signature, {(Monomial.parse("L(1)*L(2)*<A(1)|A(2)>", qed.signature), "L"): 1})
    with pytest.raises(ValueError):
        P.pcomp(foreign, 1, P.unit())


def test_action(phi2, phi4):
    P = model_operad(phi4)
    rng = random.Random(4)
    Q = P.random_element(3, rng)
    assert P.act(Q, Permutation.identity(3)) == Q
    s, t = Permutation((2, 3, 1)), Permutation((2, 1, 3))
    assert P.act(P.act(Q, s), t) == P.act(Q, t.compose(s))
    d = Monomial.parse(DOUBLE, phi2.signature)
    assert model_operad(phi2).is_invariant(ContractionMap.indicator(d, "L", phi2.signature))


# -- systems --------------------------------------------------------------------------

def test_restrict(qed):
    P = ambient_operad(qed)
    rng = random.Random(5)
    Q = P.random_element(3, rng, density=0.9, max_terms=20)
    assert restrict(Q, everything()) == Q
    S = one_pi_system()
    R = restrict(Q, S)
    assert restrict(R, S) == R
    assert in_suboperad(R, S)
    disconnected = [(m, K) for m, K in P.domain(3) if not m.is_connected()]
    D = P.element(3, {disconnected[0]: 1})
    assert restrict(D, S) == P.zero(3)
    assert not in_suboperad(D, S)


@pytest.mark.parametrize("name,top", [("phi2", 4), ("qed", 3)])
def test_closure_of_standard_systems(request, name, top):
    model = request.getfixturevalue(name)
    systems = [one_pi_system(), admissible_system(model), vertex_type_system(model)]
    systems.append(intersection(*systems))
    for S in systems:
        report = closure_check(S, model, top)
        assert report.passed, report.summary()
        assert report.checked > 0


def test_closure_check_detects_failures(qed):
    at_most_one_edge = SystemFilter("<=1 edge", lambda m, K: len(m.props) <= 1)
    report = closure_check(at_most_one_edge, qed, 3)
    assert not report.passed and "outside" in report.counterexample
    first_vertex = SystemFilter("photon at 1", lambda m, K: (1, "A") in m.fields)
    report = closure_check(first_vertex, qed, 2)
    assert not report.passed and "invariant" in report.counterexample


def test_composites_stay_in_system(phi2, qed, phi4):
    rng = random.Random(6)
    for model in (phi2, qed, phi4):
        P = ambient_operad(model)
        for S in (one_pi_system(), admissible_system(model), vertex_type_system(model), model_system(model)):
            for _ in range(6):
                a = restrict(P.random_element(2, rng, density=0.8, max_terms=10), S)
                b = restrict(P.random_element(2, rng, density=0.8, max_terms=10), S)
                for i in (1, 2):
                    assert in_suboperad(P.pcomp(a, i, b), S)


def test_model_domain_is_the_model_system(phi2, qed, phi4):
    for model in (phi2, qed, phi4):
        S = model_system(model)
        M, A = model_operad(model), ambient_operad(model)
        for n in (1, 2, 3):
            assert set(M.domain(n)) == {e for e in A.domain(n) if S(*e)}


def test_ambient_universe_contains_tadpoles(qed):
    assert any(m.has_tadpole() for m in ambient_diagrams(qed, 1))
    assert not any(m.has_tadpole() for m in ambient_diagrams(qed, 2, tadpoles=False))


# -- the group over a model ------------------------------------------------------------

def test_group_axioms_over_qed(qed):
    P = model_operad(qed)
    rng = random.Random(7)
    e = GroupElement.unit(P, 3)
    for _ in range(3):
        a, b, c = (GroupElement.random(P, 3, rng) for _ in range(3))
        assert group_product(group_product(a, b), c) == group_product(a, group_product(b, c))
        assert group_product(a, group_inverse(a)) == e
        assert group_product(group_inverse(a), a) == e
        assert group_product(a, e) == a


def test_text_round_trip(phi4):
    P = model_operad(phi4)
    Q = P.random_element(3, random.Random(8))
    text = Q.render()
    assert text.splitlines() == sorted(text.splitlines())
    assert P.parse(text, 3) == Q
    assert ContractionMap.parse(text, phi4.signature) == Q
    with pytest.raises(ValueError):
        ContractionMap.parse_lines("L(1) -> L\n", phi4.signature)
