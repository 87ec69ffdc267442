import random
from fractions import Fraction as F

import pytest

from rgoperad.combinatorics import Permutation
from rgoperad.operad import EndOperad, Multilinear, check_operad_axioms, end_operad


def test_unit_is_identity_matrix():
    E = end_operad(2)
    assert E.unit().entries == {(1, (1,)): 1, (2, (2,)): 1}
    with pytest.raises(ValueError):
        end_operad(0)


def test_pcomp_arity_and_substitution():
    E = end_operad(1)
    f = Multilinear(1, 2, {(1, (1, 1)): 2})
    g = Multilinear(1, 2, {(1, (1, 1)): 3})
    h = E.pcomp(f, 1, g)
    assert h.arity == 3
    assert h.entries == {(1, (1, 1, 1)): 6}


def test_action_permutes_inputs():
    E = end_operad(2)
    f = Multilinear(2, 2, {(1, (1, 2)): 1})
    swapped = E.act(f, Permutation((2, 1)))
    x, y = [F(3), F(0)], [F(0), F(5)]
    # act(f, s)(x, y) = f(y, x)
    assert swapped(y, x) == f(x, y)
    assert swapped.entries == {(1, (2, 1)): 1}


def test_evaluation_matches_pcomp():
    E = end_operad(2)
    rng = random.Random(4)
    f, g = E.random_element(2, rng), E.random_element(2, rng)
    x, y, z = ([F(rng.randint(-3, 3)) for _ in range(2)] for _ in range(3))
    assert E.pcomp(f, 2, g)(x, y, z) == f(x, g(y, z))
    assert E.pcomp(f, 1, g)(x, y, z) == f(g(x, y), z)


def test_end_operad_axioms():
    report = check_operad_axioms(end_operad(2), rng=random.Random(0), max_arity=4)
    assert report.passed, report.summary()
    assert report.counts["sequential associativity"] > 0


def test_gamma_matches_padded_partial_composition():
    E = end_operad(2)
    rng = random.Random(9)
    g = E.random_element(3, rng)
    f = E.random_element(2, rng)
    for i in (1, 2, 3):
        padded = [E.unit()] * 3
        padded[i - 1] = f
        assert E.gamma(g, padded) == E.pcomp(g, i, f)


class BrokenEnd(EndOperad):
    """Partial composition that ignores the slot."""

    def pcomp(self, a, i, b):
        return super().pcomp(a, 1, b)


def test_checker_reports_corrupted_composition():
    report = check_operad_axioms(BrokenEnd(2), rng=random.Random(0))
    assert not report.passed
    assert report.counterexample
    assert "FAIL" in report.summary()


def test_symmetrize_and_invariance():
    E = end_operad(2)
    f = E.random_element(3, random.Random(1))
    s = E.symmetrize(f)
    assert E.is_invariant(s)
    assert E.symmetrize(s) == s
    for (nu, mu), v in s.entries.items():
        assert s.get(nu, tuple(reversed(mu))) == v


def test_render_is_sorted_lines():
    E = end_operad(2, labels=["x", "y"])
    f = Multilinear(2, 2, {(2, (1, 2)): F(1, 2), (1, (1, 1)): 3})
    assert E.render(f) == "x; x,x : 3\ny; x,y : 1/2\n"
