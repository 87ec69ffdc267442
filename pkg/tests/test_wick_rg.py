import random
from fractions import Fraction as F
from itertools import product

import pytest

from rgoperad.combinatorics import Permutation
from rgoperad.contraction_operad import ContractionMap, enumerate_diagrams, model_operad
from rgoperad.formal_diffeo import SeriesElement, faa_di_bruno_compose
from rgoperad.graphs import Monomial
from rgoperad.group import GroupElement, group_product, symmetrize_element
from rgoperad.operad import Multilinear
from rgoperad.wick_rg import (
    DiagramSum,
    InteractionVector,
    OutsideTypes,
    coupling_operad,
    hat_q,
    morphism,
    rg_action,
    wick_differential,
    wick_enumerate,
)

DOUBLE = "L(1)*L(2)*<phi(1)|phi(2)>*<phi(1)|phi(2)>"


def as_strings(d: DiagramSum):
    return {str(m): v for m, v in d.terms.items()}


def test_single_vertex(qed, phi2):
    for model in (qed, phi2):
        t = model.vertex_types[0]
        expected = {str(t.monomial()): 1}
        assert as_strings(wick_enumerate(model, [t])) == expected
        assert as_strings(wick_differential(model, [t])) == expected


def test_one_leg_vertices(one_leg):
    expected = {"L(1)*L(2)*phi(1)*phi(2)": 1, "L(1)*L(2)*<phi(1)|phi(2)>": 1}
    assert as_strings(wick_enumerate(one_leg, ["v", "v"])) == expected
    assert as_strings(wick_differential(one_leg, ["v", "v"])) == expected


def test_phi2_two_vertex_coefficients(phi2):
    expected = {
        "L(1)*L(2)*phi(1)*phi(1)*phi(2)*phi(2)": 1,
        "L(1)*L(2)*<phi(1)|phi(2)>*phi(1)*phi(2)": 4,
        DOUBLE: 2,
    }
    assert as_strings(wick_enumerate(phi2, ["tau", "tau"])) == expected
    assert as_strings(wick_differential(phi2, ["tau", "tau"])) == expected


def test_qed_two_vertex_sum(qed):
    d = wick_enumerate(qed, ["e", "e"])
    # every subset of the three possible lines between the vertices, one pairing each
    assert len(d) == 8
    assert set(d.terms.values()) == {1}
    assert d == wick_differential(qed, ["e", "e"])
    assert d[Monomial.parse("L(1)*L(2)*<A(1)|A(2)>*<psi(1)|psibar(2)>*psi(2)*psibar(1)", qed.signature)] == 1


@pytest.mark.parametrize("name", ["phi2", "qed", "phi4", "one_leg"])
def test_enumeration_equals_differential(request, name):
    model = request.getfixturevalue(name)
    checked = 0
    # flagless vertex types allow arbitrarily long tuples; five vertices is the bound
    for n in range(1, 6):
        for combo in product(model.vertex_types, repeat=n):
            if sum(len(t.corolla) for t in combo) > 10:
                continue
            a, b = wick_enumerate(model, combo), wick_differential(model, combo)
            assert a == b
            assert all(v.denominator == 1 and v > 0 for v in a.terms.values())
            checked += 1
    assert checked > 0


def test_unknown_vertex_rejected(qed):
    with pytest.raises(KeyError):
        wick_enumerate(qed, ["nope"])
    with pytest.raises(ValueError):
        wick_enumerate(qed, [])


def test_diagram_sum_text(phi2):
    d = wick_enumerate(phi2, ["tau", "tau", "tau0"])
    text = d.render()
    assert DiagramSum.parse(text, phi2.signature, 3) == d
    assert text.splitlines()[0].startswith("2 * ")


# -- contraction and the morphism ------------------------------------------------------

def test_hat_q(phi2):
    sig = phi2.signature
    d0 = Monomial.parse(DOUBLE, sig)
    Q = ContractionMap.indicator(d0, "L", sig, F(3, 4))
    out = hat_q(Q, DiagramSum(2, {d0: 1}))
    assert {str(m): v for m, v in out.terms.items()} == {"L(1)": F(3, 4)}
    assert hat_q(ContractionMap(2, sig), wick_enumerate(phi2, ["tau", "tau"])).terms == {}
    with pytest.raises(ValueError):
        hat_q(Q, DiagramSum(1))


def test_phi2_morphism(phi2):
    sig = phi2.signature
    c = F(5, 3)
    Q = ContractionMap.indicator(Monomial.parse(DOUBLE, sig), "L", sig, c)
    # types are ordered (tau, tau0); tau + tau -> 2c tau0
    assert morphism(Q, phi2) == Multilinear(2, 2, {(2, (1, 1)): 2 * c})
    assert morphism(ContractionMap(2, sig), phi2) == Multilinear(2, 2)


def test_unit_maps_to_identity(phi2, qed, phi4):
    for model in (phi2, qed, phi4):
        P = model_operad(model)
        assert morphism(P.unit(), model) == coupling_operad(model).unit()


def test_out_of_type_contractions(phi2):
    sig = phi2.signature
    apart = Monomial.parse("L(1)*L(2)*phi(1)*phi(1)*phi(2)*phi(2)", sig)
    Q = ContractionMap.indicator(apart, "L", sig)
    with pytest.raises(OutsideTypes):
        morphism(Q, phi2)
    assert morphism(Q, phi2, permissive=True) == Multilinear(2, 2)


@pytest.mark.parametrize("name", ["phi2", "qed", "phi4"])
def test_morphism_law_and_equivariance(request, name):
    model = request.getfixturevalue(name)
    P, E = model_operad(model), coupling_operad(model)
    rng = random.Random(11)
    for _ in range(6):
        for n1, n2 in ((2, 2), (1, 2), (2, 1), (3, 1), (1, 3)):
            a, b = P.random_element(n1, rng), P.random_element(n2, rng)
            ma, mb = morphism(a, model), morphism(b, model)
            for i in range(1, n1 + 1):
                assert morphism(P.pcomp(a, i, b), model) == E.pcomp(ma, i, mb)
        a = P.random_element(3, rng)
        sigma = Permutation(tuple(rng.sample(range(1, 4), 3)))
        assert morphism(P.act(a, sigma), model) == E.act(morphism(a, model), sigma)


# -- the action on coupling space ------------------------------------------------------

def test_unit_acts_as_identity(qed, phi2):
    for model in (qed, phi2):
        P = model_operad(model)
        assert rg_action(GroupElement.unit(P, 3)) == SeriesElement.identity(len(model.vertex_types), 3)


def test_phi2_flow(phi2):
    P = model_operad(phi2)
    c = F(-2, 7)
    Q = P.element(2, {(Monomial.parse(DOUBLE, phi2.signature), "L"): c})
    series = rg_action(GroupElement(P, 3, [Q]))
    names = phi2.type_names
    assert series.coefficient(2, (1, 1)) == 2 * c
    assert series.render(names) == f"tau; tau : 1\ntau0; tau0 : 1\ntau0; tau,tau : {2 * c}\n"


@pytest.mark.parametrize("name", ["qed", "phi4", "phi2"])
def test_action_is_a_homomorphism(request, name):
    model = request.getfixturevalue(name)
    P = model_operad(model)
    rng = random.Random(12)
    for _ in range(3):
        g = symmetrize_element(GroupElement.random(P, 3, rng))
        h = symmetrize_element(GroupElement.random(P, 3, rng))
        assert rg_action(group_product(g, h)) == faa_di_bruno_compose(rg_action(g), rg_action(h))


def test_non_invariant_element_rejected(phi4):
    P = model_operad(phi4)
    rng = random.Random(13)
    while True:
        g = GroupElement.random(P, 3, rng)
        if not P.is_invariant(g[3]):
            break
    with pytest.raises(ValueError, match="invariant"):
        rg_action(g)


def test_interaction_vector(phi2):
    v = InteractionVector(phi2, {"tau": 2})
    assert v.vector() == [2, 0]
    assert InteractionVector.from_vector(phi2, [2, 0]) == v
    with pytest.raises(KeyError):
        InteractionVector(phi2, {"bogus": 1})
