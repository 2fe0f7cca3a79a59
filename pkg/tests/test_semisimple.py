import random

import pytest

from conftest import ALL, pipeline
from qhblowup.cli import parse_presentation, read_input
from qhblowup.cohomology import hodge_length
from qhblowup.exactpoly import PolyRing
from qhblowup.pipeline import QuantumPresentation
from qhblowup.semisimple import (
    INCONCLUSIVE,
    RETRY_CAP,
    SEMISIMPLE,
    DegenerateSpecialization,
    algebra_from_relations,
    generic_semisimplicity,
    is_semisimple,
    radical_test,
    specialize_algebra,
)


def p3():
    return parse_presentation(read_input("P3.pres")[0])


def test_p3_at_q_equal_one():
    A = specialize_algebra(p3(), {"q": 1})
    assert A.basis_labels() == ["1", "H", "H^2", "H^3"]
    cert = is_semisimple(A)
    assert cert.semisimple
    # trace form of Q[H]/(H^4 - 1): tr(H^k) = 4 when 4 | k
    assert cert.determinant == -256
    assert radical_test(A)


def test_dual_numbers():
    R = PolyRing(["E"])
    A = algebra_from_relations([R.parse("E^2")], R)
    assert A.dimension == 2
    cert = is_semisimple(A)
    assert not cert.semisimple and cert.determinant == 0
    assert not radical_test(A)


def test_zero_q_is_refused_and_degenerate_ideals_detected():
    with pytest.raises(ValueError):
        specialize_algebra(p3(), {"q": 0})
    R = PolyRing(["x", "y"])
    with pytest.raises(DegenerateSpecialization):
        algebra_from_relations([R.parse("x*y")], R)
    with pytest.raises(DegenerateSpecialization):
        algebra_from_relations([R.parse("x - 1"), R.parse("x - 2")], R)


def test_random_toy_algebras_agree_with_radical_test():
    rng = random.Random(11)
    R = PolyRing(["x", "y"])
    for _ in range(40):
        roots = [rng.randint(-3, 3) for _ in range(rng.randint(2, 3))]
        f = R.one()
        for r in roots:
            f = f * (R.gen("x") - r)
        # y is a polynomial in x, so the algebra is Q[x]/(f)
        A = algebra_from_relations([f, R.gen("y") - rng.randint(-2, 2) * R.gen("x")], R)
        assert A.dimension == len(roots)
        reduced = len(set(roots)) == len(roots)
        assert is_semisimple(A).semisimple == reduced
        assert radical_test(A, random.Random(1)) == reduced
        assert A.commuting()


@pytest.mark.parametrize("name", ALL)
def test_shipped_presentations_are_semisimple(name):
    pl = pipeline(name)
    v = generic_semisimplicity(pl.presentation, trials=2, seed=5, expected_dimension=hodge_length(pl.ring))
    assert v.status == SEMISIMPLE
    A = specialize_algebra(pl.presentation, v.trials[-1].qvals)
    assert A.dimension == hodge_length(pl.ring)
    assert A.commuting()
    assert radical_test(A)


def test_classical_algebra_is_not_semisimple():
    pl = pipeline("M2_33")
    p = pl.presentation
    stripped = QuantumPresentation(p.ring, p.classical, [p.ring.zero()] * len(p.classical))
    v = generic_semisimplicity(stripped, trials=3, seed=2)
    assert v.status == INCONCLUSIVE
    assert len(v.trials) == 3
    assert all(t.certificate.determinant == 0 and t.dimension == 6 for t in v.trials)


def test_sampling_is_deterministic():
    p = pipeline("M3_25").presentation
    a = generic_semisimplicity(p, trials=3, seed=42)
    b = generic_semisimplicity(p, trials=3, seed=42)
    assert [t.qvals for t in a.trials] == [t.qvals for t in b.trials]
    assert a.status == b.status == SEMISIMPLE
    for t in a.trials:
        for v in t.qvals.values():
            assert 1 <= v.numerator <= 1000 and 1 <= v.denominator <= 1000


def test_retry_cap_on_degenerate_presentations():
    R = PolyRing(["x", "y", "q"])
    p = QuantumPresentation(R, [R.parse("x*y")], [R.parse("0")])
    v = generic_semisimplicity(p, trials=2, seed=0)
    assert v.status == INCONCLUSIVE
    assert v.trials == [] and len(v.discarded) == RETRY_CAP


def test_trials_must_be_positive():
    with pytest.raises(ValueError):
        generic_semisimplicity(p3(), trials=0)
