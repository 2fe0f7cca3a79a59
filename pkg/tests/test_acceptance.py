"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Runtimes are measured on fresh pipelines so cached work from other tests
does not flatter them.
"""

import random
import time

import numpy as np

import test_exactpoly
from conftest import ALL, B2_2, B2_3, expected
from qhblowup import groebner
from qhblowup.cli import load_descriptor, parse_presentation, read_input
from qhblowup.cohomology import classical_relations, hodge_length
from qhblowup.exactpoly import MonomialOrder, PolyRing
from qhblowup.pipeline import Pipeline, QuantumPresentation, presentation_ring, verify_against_expected
from qhblowup.semisimple import SEMISIMPLE, algebra_from_relations, generic_semisimplicity, is_semisimple
from test_groebner import random_ideal, random_slice_degree, twisted_cubic_cone

SEED = 2024


def report(capsys, number, ok, summary, failures=(), details=()):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {summary}")
        for line in list(details) + list(failures):
            print(f"        {line}")
    assert ok, "; ".join(failures)


def fresh(name):
    return Pipeline(load_descriptor(name))


def timed(fn):
    t = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - t


def test_criterion_1_classical_rings(capsys):
    failures = []
    worst = 0.0
    for name in ALL:
        pl = fresh(name)
        rels, secs = timed(lambda: classical_relations(pl.ring))
        worst = max(worst, secs)
        pr = presentation_ring(pl.ring, pl.lattice)
        zero = {q: 0 for q in pl.lattice.labels}
        table = sorted(str(pr.parse(r).specialize(zero)) for r in expected(name).relations)
        if sorted(map(str, rels)) != table:
            failures.append(f"{name}: {sorted(map(str, rels))} != {table}")
        if secs >= 1:
            failures.append(f"{name}: {secs:.2f} s")
    report(capsys, 1, not failures, f"classical relations match the tables for {13 - len(failures)}/13 (max {worst:.3f} s)", failures)


def test_criterion_2_essential_counts(capsys):
    failures = []
    worst = 0.0
    for name in ALL:
        pl = fresh(name)
        n, secs = timed(lambda: len(pl.essential))
        worst = max(worst, secs)
        if n != expected(name).N:
            failures.append(f"{name}: N = {n}, table {expected(name).N}")
        if secs >= 10:
            failures.append(f"{name}: {secs:.2f} s")
    report(capsys, 2, not failures, f"N matches for {13 - len(failures)}/13 (max {worst:.2f} s)", failures)


def test_criterion_3_variety_analysis(capsys):
    failures = []
    notes = []
    for name in B2_2 + B2_3:
        pl = fresh(name)
        pl.ideal
        try:
            H, secs = timed(lambda: pl.analysis())
        except groebner.BudgetExceeded:
            if name in B2_2 or name == "M3_25":
                failures.append(f"{name}: budget exceeded")
            notes.append(f"{name}: budget exceeded")
            continue
        exp = expected(name)
        got = (H.dimension, H.degree)
        if got != (exp.dimA, exp.degA):
            failures.append(f"{name}: (dim, deg) = {got}, table {(exp.dimA, exp.degA)}")
        notes.append(f"{name}: dim {H.dimension} deg {H.degree} in {secs:.2f} s")
    report(capsys, 3, not failures, "dim A / deg A match for all seven b2=2 rows, M3_25 and the five best-effort b2=3 rows", failures, notes)


def test_criterion_4_unique_solution(capsys):
    failures = []
    worst = 0.0
    for name in ALL:
        pl = fresh(name)
        try:
            _, secs = timed(lambda: pl.solved)
        except Exception as exc:  # noqa: BLE001 - reported as a failure line
            failures.append(f"{name}: {exc}")
            continue
        worst = max(worst, secs)
        if secs >= 60:
            failures.append(f"{name}: {secs:.1f} s")
    primary = fresh("M2_30")
    alt = fresh("M2_30_alt")
    try:
        a, b = primary.solution.values, alt.solution.values
        diff = {primary.essential.render(k): (a[k], b[k]) for k in a if a[k] != b[k]}
        if diff:
            failures.append(
                "M2_30 alternate set reaches a different point: "
                + ", ".join(f"{s} = {x} vs {y}" for s, (x, y) in diff.items())
            )
    except Exception as exc:  # noqa: BLE001
        failures.append(f"M2_30 alternate set: {exc}")
    report(capsys, 4, not failures, f"J_A + J_G is a single rational point for 13 threefolds (max {worst:.2f} s) and the M2_30 sets agree", failures)


def test_criterion_5_presentations(capsys):
    failures = []
    syntactic = []
    for name in ALL:
        pl = fresh(name)
        rep = verify_against_expected(pl.presentation, expected(name).relations)
        if rep.syntactic_equal:
            syntactic.append(name)
        if not rep.ideal_equal:
            for e in rep.expected_not_in_computed:
                failures.append(f"{name}: tabulated {e} has normal form {rep.residues[e]}")
    detail = [f"syntactic match: {len(syntactic)}/13 ({', '.join(syntactic)})"]
    report(capsys, 5, not failures, f"ideal-equal to the tables for {13 - len({f.split(':')[0] for f in failures})}/13", failures, detail)


def test_criterion_6_lifting_contract(capsys):
    failures = []
    for name in ALL:
        failures += [f"{name}: {p}" for p in fresh(name).check_presentation()]
    report(capsys, 6, not failures, "every relation vanishes under the quantum product and reduces to f^C at q = 0, 13/13", failures)


def test_criterion_7_semisimplicity(capsys):
    failures = []
    worst = 0.0
    for name in ALL:
        pl = fresh(name)
        pl.presentation
        v, secs = timed(lambda: generic_semisimplicity(pl.presentation, trials=3, seed=SEED, expected_dimension=hodge_length(pl.ring)))
        worst = max(worst, secs)
        if v.status != SEMISIMPLE:
            failures.append(f"{name}: {v.status}")
        if secs >= 10:
            failures.append(f"{name}: {secs:.1f} s")
    p3 = parse_presentation(read_input("P3.pres")[0])
    if generic_semisimplicity(p3, trials=3, seed=SEED).status != SEMISIMPLE:
        failures.append("P3 not semisimple")
    R = PolyRing(["E"])
    if is_semisimple(algebra_from_relations([R.parse("E^2")], R)).semisimple:
        failures.append("dual numbers reported semisimple")
    p = fresh("M2_33").presentation
    cup = QuantumPresentation(p.ring, p.classical, [p.ring.zero()] * len(p.classical))
    if generic_semisimplicity(cup, trials=3, seed=SEED).semisimple:
        failures.append("classical cup algebra reported semisimple")
    report(capsys, 7, not failures, f"13/13 semisimple with dim = hodge length (max {worst:.2f} s); P3 yes; dual numbers and cup algebra no", failures)


def test_criterion_8_kernel_properties(capsys):
    failures = []
    rng = random.Random(SEED)
    for k in range(100):
        ring = PolyRing(["x", "y", "z"][: rng.randint(1, 3)], order=MonomialOrder(rng.choice(["degrevlex", "lex"])))
        gens = random_ideal(rng, ring) or [ring.gen("x")]
        if not groebner.is_groebner(groebner.buchberger(gens, ring)):
            failures.append(f"random ideal {k}: S-polynomial criterion fails")
    R = PolyRing(["x", "y", "z", "w"])
    H = groebner.hilbert_analysis(groebner.buchberger(twisted_cubic_cone(R), R))
    oracle = random_slice_degree(twisted_cubic_cone(R), np.random.default_rng(SEED))
    if (H.dimension, H.degree) != (2, 3) or oracle != H.degree:
        failures.append(f"twisted cubic cone: dim {H.dimension} deg {H.degree}, oracle {oracle}")
    for law in (test_exactpoly.test_ring_laws, test_exactpoly.test_parse_of_str_is_identity, test_exactpoly.test_specialize_is_a_ring_map):
        try:
            law()
        except AssertionError as exc:
            failures.append(f"{law.__name__}: {exc}")
    report(capsys, 8, not failures, "S-polynomial criterion on 100 random ideals, twisted cubic cone (2, 3) = oracle, arithmetic laws", failures)
