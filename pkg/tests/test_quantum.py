from itertools import product

import pytest

from conftest import pipeline
from qhblowup.quantum import UnknownInvariant


@pytest.mark.parametrize("name", ["M2_33", "M2_22", "M3_25"])
def test_symbolic_product_properties(name):
    ctx = pipeline(name).context
    ring = ctx.cohomology
    n = ring.size
    for i, j in product(range(n), repeat=2):
        assert ctx.qmul(ctx.basis_element(i), ctx.basis_element(j)) == ctx.qmul(ctx.basis_element(j), ctx.basis_element(i))
        assert ctx.qmul(ctx.basis_element(0), ctx.basis_element(j)) == ctx.basis_element(j)


@pytest.mark.parametrize("name", ["M2_33", "M2_21", "M3_12"])
def test_grading_and_classical_limit(name):
    ctx = pipeline(name).context
    ring = ctx.cohomology
    qn = ctx.nq
    zero = {q: 0 for q in ctx.q_names}
    for (i, j), elem in ctx.table.items():
        classical = ring.table[i, j]
        for k, coeff in elem.items():
            # q -> 0 recovers the cup product
            assert coeff.specialize(zero) == classical.get(k, 0)
            for m in coeff.terms:
                qdeg = sum(w * e for w, e in zip(ctx.q_weights, m[:qn]))
                assert ring.degrees[i] + ring.degrees[j] == ring.degrees[k] + qdeg


@pytest.mark.parametrize("name", ["M2_30", "M2_22", "M3_18"])
def test_specialized_product_is_associative_on_divisors(name):
    pl = pipeline(name)
    sp = pl.product
    divs = pl.ring.divisors
    for i, j, k in product(divs, repeat=3):
        a, b, c = (sp.basis_element(t) for t in (i, j, k))
        assert sp.qmul(sp.qmul(a, b), c) == sp.qmul(a, sp.qmul(b, c))


def test_product_of_p3_blowup_along_line():
    pl = pipeline("M2_33")
    sp = pl.product
    E = pl.ring.index("E1")
    value = sp.evaluate(pl.presentation.ring.parse("E*H^2"))
    assert {pl.ring.names[k]: str(v) for k, v in value.items()} == {"1": "q0"}
    assert sp.evaluate(pl.presentation.ring.parse("E")) == sp.basis_element(E)


def test_unknown_invariants_raise():
    pl = pipeline("M2_30")
    ctx = pl.context
    values = dict(pl.solution.values)
    values.pop("x13")
    sp = ctx.specialized(values)
    assert "I(L0-F1 | rho, pt)" in [s.render(pl.ring, pl.lattice) for s in sp.missing_symbols]
    H = pl.ring.index("H")
    with pytest.raises(UnknownInvariant):
        sp.qmul(sp.basis_element(H), sp.basis_element(pl.ring.index("rho")))
