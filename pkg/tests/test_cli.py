import json
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ALL
from qhblowup.cli import (
    DescriptorSyntaxError,
    main,
    parse_descriptor,
    parse_expected,
    read_input,
    render_descriptor,
    shipped_names,
)
from qhblowup.cohomology import Curve, DescriptorError, GeometricDatum, ThreefoldDescriptor


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_shipped_data_present():
    assert set(ALL) | {"M2_30_alt"} == set(shipped_names())
    for name in ALL:
        exp = parse_expected(read_input(f"{name}.expected")[0])
        assert exp.N and exp.dimA and exp.degA and len(exp.relations) in (2, 3)


def test_m230_descriptor():
    d = parse_descriptor(read_input("M2_30")[0])
    assert d.ambient == "P3" and d.curves == (Curve(1, 2),)
    assert d.basis == (("q0", (1, -2)), ("q1", (0, 1)))
    assert len(d.geometric) == 3


@pytest.mark.parametrize("name", ALL + ["M2_30_alt"])
def test_round_trip_shipped(name):
    d = parse_descriptor(read_input(name)[0])
    assert parse_descriptor(render_descriptor(d)) == d


@st.composite
def descriptors(draw):
    two = draw(st.booleans())
    degs = [draw(st.integers(1, 4)) for _ in range(2 if two else 1)]
    curves = tuple(Curve(j + 1, d) for j, d in enumerate(degs))
    a = draw(st.integers(-3, 0))
    b = draw(st.integers(-3, 0))
    basis = (("q0", (1, a, b)), ("q1", (0, 1, 0)), ("q2", (0, 0, 1))) if two else (("q0", (1, a)), ("q1", (0, 1)))
    geom = []
    if draw(st.booleans()):
        geom.append(GeometricDatum((0, 1, 0) if two else (0, 1), ("phi1",), Fraction(draw(st.integers(-3, 3)), draw(st.integers(1, 4)))))
    return ThreefoldDescriptor(draw(st.sampled_from(["X", "M_test"])), draw(st.sampled_from(["P3", "Q3"])), curves, basis, tuple(geom))


@given(descriptors())
@settings(max_examples=30, deadline=None)
def test_round_trip_generated(d):
    assert parse_descriptor(render_descriptor(d)) == d


def test_missing_geom_parses_then_underdetermined(tmp_path, capsys):
    text = "name: Y\nambient: P3\ncurve: 1 degree=2\nbasis: q0 = L0 - 2*F1\nbasis: q1 = F1\n"
    assert parse_descriptor(text).geometric == ()
    f = tmp_path / "y.fano"
    f.write_text(text)
    code, out = run(capsys, "solve", str(f))
    assert code == 2 and "dimension 2" in out


@pytest.mark.parametrize(
    "text, line, message",
    [
        ("name: Y\nambient: P3\ncurve: 1 degree=2\nbasis: q0 = L0 - 2*F1\n", 4, "not unimodular"),
        ("name: Y\nambient: P3\ncolour: red\n", 3, "unknown key"),
        ("name: Y\nambient: P5\n", 2, "ambient"),
        ("name: Y\n\nambient: P3\ncurve: 1 degree=2\nbasis: q0 = L0 - 2*G1\n", 5, "unknown class"),
        ("name: Y\nambient: P3\ncurve: 1 degree=2\nbasis: q0 = L0 - 2*F1\nbasis: q1 = F1\ngeom: I(F1 | pt) = 1\n", 6, "codimensions"),
        ("name: Y\nambient: P3\ncurve: 1 degree=2\nbasis: q0 = L0 - 2*F1\nbasis: q1 = F1\ngeom: I(F1 | phi2) = 1\n", 6, "phi2"),
        ("name: Y\nambient: P3\ncurve: 1 degree=two\n", 3, "curve"),
        ("name Y\n", 1, "key: value"),
    ],
)
def test_descriptor_errors_carry_line_numbers(text, line, message):
    with pytest.raises(DescriptorSyntaxError) as info:
        parse_descriptor(text)
    assert info.value.line == line
    assert message in str(info.value)


def test_missing_required_lines():
    with pytest.raises(DescriptorError, match="ambient"):
        parse_descriptor("name: Y\n")


def test_verify_m233(capsys):
    code, out = run(capsys, "verify", "data/M2_33.fano", "--expect", "data/M2_33.expected")
    assert code == 0
    assert "ideal equality: yes" in out and "syntactic match: yes" in out


def test_essential_m312(capsys):
    code, out = run(capsys, "essential", "data/M3_12.fano")
    assert code == 0 and out.splitlines()[0] == "N = 81"


def test_assoc_analyze_m221(capsys):
    code, out = run(capsys, "assoc", "--analyze", "data/M2_21.fano")
    assert code == 0 and "dimA = 3" in out and "degA = 5" in out
    code, out = run(capsys, "assoc", "--analyze", "--order", "lex", "M2_33")
    assert code == 0 and "dimA = 2" in out


def test_describe_and_present(capsys):
    code, out = run(capsys, "describe", "M2_30")
    assert "classical relation: E^2 - 3*E*H + 2*H^2" in out and "q0 = L0-2*F1  (weight 2)" in out
    code, out = run(capsys, "present", "M3_25")
    assert code == 0 and "relation: E1*E2 - q0" in out


def test_semisimple_command(capsys):
    code, out = run(capsys, "semisimple", "M3_25", "--seed", "9", "--trials", "3")
    assert code == 0 and "verdict: SEMISIMPLE" in out and "det(G)" in out
    code, out = run(capsys, "semisimple", "P3.pres")
    assert code == 0 and "dim 4" in out


def test_semisimple_inconclusive_exit(tmp_path, capsys):
    f = tmp_path / "cup.pres"
    f.write_text("generators: E H\nq: q0 weight=3\nq: q1 weight=1\nrelation: E^2 - 2*E*H + H^2\nrelation: E*H^2\n")
    code, out = run(capsys, "semisimple", str(f), "--trials", "2")
    assert code == 7 and "INCONCLUSIVE-LIKELY-NOT" in out


def test_exit_codes(tmp_path, capsys, monkeypatch):
    code, out = run(capsys, "verify", "M2_22", "--expect", "M2_22.expected")
    assert code == 6 and "ideal equality: NO" in out and "no associative quantum product" in out
    text = read_input("M2_30")[0] + "geom: I(L0 - F1 | phi1, pt) = 2\n"
    f = tmp_path / "bad.fano"
    f.write_text(text)
    code, out = run(capsys, "solve", str(f))
    assert code == 3
    code, out = run(capsys, "describe", str(tmp_path / "missing.fano"))
    assert code == 1
    monkeypatch.setenv("QH_BUDGET", "3")
    code, out = run(capsys, "assoc", "--analyze", "M3_10")
    assert code == 5 and "budget" in out


def test_all_is_byte_identical(capsys):
    code, first = run(capsys, "--json", "all", "M2_30", "M3_25", "--seed", "4")
    assert code == 0
    code, second = run(capsys, "--json", "all", "M2_30", "M3_25", "--seed", "4")
    assert first == second
    reports = json.loads(first)
    assert [r["target"] for r in reports] == ["M2_30", "M3_25"]
    stages = reports[0]["stages"]
    assert list(stages) == ["describe", "essential", "assoc", "solve", "present", "verify", "semisimple"]
    assert stages["verify"]["ok"] and stages["semisimple"]["verdict"] == "SEMISIMPLE"
    assert "timings" not in reports[0]


def test_console_script_runs():
    out = subprocess.run([sys.executable, "-m", "qhblowup.cli", "essential", "M2_33"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("N = 10")
