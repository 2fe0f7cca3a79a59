"""``qh``: descriptor files, shipped data and the command-line front end.

Descriptor grammar (one item per line, ``#`` starts a comment)::

    name: M2_30
    ambient: P3
    curve: 1 degree=2
    basis: q0 = L0 - 2*F1
    basis: q1 = F1
    geom: I(L0 - F1 | rho, pt) = 2
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import groebner
from .cohomology import (
    Curve,
    DescriptorError,
    GeometricDatum,
    ThreefoldDescriptor,
    anticanonical,
    build_blowup_ring,
    hodge_length,
    render_class,
)
from .exactpoly import ParseError, Poly, PolyRing
from .gwsymbols import SymbolError, parse_class, parse_symbol, resolve
from .pipeline import Pipeline, QuantumPresentation, SolveError, compatible_with_associativity, verify_against_expected
from .semisimple import DegenerateSpecialization, generic_semisimplicity

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNDERDETERMINED = 2
EXIT_INCONSISTENT = 3
EXIT_AMBIGUOUS = 4
EXIT_BUDGET = 5
EXIT_MISMATCH = 6
EXIT_INCONCLUSIVE = 7

INSERTIONS = ("pt", "rho", "phi1", "phi2")


class DescriptorSyntaxError(DescriptorError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


# descriptor files

_LINE = re.compile(r"^(?P<key>[a-z]+)\s*:\s*(?P<value>.*)$")
_CURVE = re.compile(r"^(?P<j>\d+)\s+degree\s*=\s*(?P<d>\d+)$")
_BASIS = re.compile(r"^q(?P<i>\d+)\s*=\s*(?P<cls>.+)$")
_GEOM = re.compile(r"^(?P<sym>I\s*\(.*\))\s*=\s*(?P<val>[-+]?\d+(?:/\d+)?)$")


def _content_lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def parse_descriptor(text: str) -> ThreefoldDescriptor:
    """Parse and validate a descriptor; errors carry the offending line number."""
    fields = {}
    curves, basis, geom = [], [], []
    for no, line in _content_lines(text):
        m = _LINE.match(line)
        if not m:
            raise DescriptorSyntaxError(no, f"expected 'key: value', got {line!r}")
        key, value = m.group("key"), m.group("value").strip()
        if key in ("name", "ambient"):
            if key in fields:
                raise DescriptorSyntaxError(no, f"duplicate {key!r}")
            if not value:
                raise DescriptorSyntaxError(no, f"empty {key!r}")
            if key == "ambient" and value not in ("P3", "Q3"):
                raise DescriptorSyntaxError(no, f"ambient must be P3 or Q3, got {value!r}")
            fields[key] = value
        elif key == "curve":
            c = _CURVE.match(value)
            if not c:
                raise DescriptorSyntaxError(no, f"expected 'curve: <j> degree=<d>', got {value!r}")
            curves.append((no, Curve(int(c.group("j")), int(c.group("d")))))
        elif key == "basis":
            b = _BASIS.match(value)
            if not b:
                raise DescriptorSyntaxError(no, f"expected 'basis: q<i> = <class>', got {value!r}")
            basis.append((no, int(b.group("i")), b.group("cls")))
        elif key == "geom":
            g = _GEOM.match(value)
            if not g:
                raise DescriptorSyntaxError(no, f"expected 'geom: I(<class> | <insertions>) = <rational>', got {value!r}")
            geom.append((no, g.group("sym"), Fraction(g.group("val"))))
        else:
            raise DescriptorSyntaxError(no, f"unknown key {key!r}")
    for key in ("name", "ambient"):
        if key not in fields:
            raise DescriptorError(f"missing '{key}:' line")
    if not curves:
        raise DescriptorError("missing 'curve:' line")
    curves.sort(key=lambda t: t[1].index)
    names = ["L0"] + [f"F{c.index}" for _, c in curves]
    seen = set()
    rows = []
    for no, i, expr in basis:
        if i in seen:
            raise DescriptorSyntaxError(no, f"q{i} defined twice")
        seen.add(i)
        try:
            rows.append((i, parse_class(expr, names)))
        except SymbolError as exc:
            raise DescriptorSyntaxError(no, str(exc)) from None
    if sorted(seen) != list(range(len(seen))):
        raise DescriptorError("basis labels must be q0, q1, ... without gaps")
    rows.sort()
    try:
        d = ThreefoldDescriptor(
            fields["name"],
            fields["ambient"],
            tuple(c for _, c in curves),
            tuple((f"q{i}", coords) for i, coords in rows),
        )
    except DescriptorError as exc:
        line = curves[0][0] if "curve" in str(exc) else (basis[-1][0] if basis else None)
        raise (DescriptorSyntaxError(line, str(exc)) if line else exc) from None
    ring, lattice = build_blowup_ring(d)
    data = []
    for no, sym, value in geom:
        try:
            klass, ins = parse_symbol(sym, names)
            for n in ins:
                if n not in INSERTIONS or n not in ring.names:
                    raise SymbolError(f"insertion {n!r} is not one of {', '.join(x for x in INSERTIONS if x in ring.names)}")
            _, s = resolve(ring, lattice, klass, ins)
            if s is None:
                raise SymbolError("insertion codimensions do not match the class degree, so the invariant vanishes")
        except SymbolError as exc:
            raise DescriptorSyntaxError(no, str(exc)) from None
        data.append(GeometricDatum(klass, ins, value))
    return d.with_geometric(data)


def _rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _class_text(geom, names) -> str:
    return render_class(geom, names).replace("+", " + ").replace("-", " - ").strip().replace("  ", " ").lstrip("+ ")


def render_descriptor(d: ThreefoldDescriptor) -> str:
    names = ["L0"] + [f"F{c.index}" for c in d.curves]
    lines = [f"name: {d.name}", f"ambient: {d.ambient}"]
    lines += [f"curve: {c.index} degree={c.degree}" for c in d.curves]
    lines += [f"basis: {label} = {_class_text(coords, names)}" for label, coords in d.basis]
    for g in d.geometric:
        lines.append(f"geom: I({_class_text(g.klass, names)} | {', '.join(g.insertions)}) = {_rational(Fraction(g.value))}")
    return "\n".join(lines) + "\n"


# expected-results and presentation files


@dataclass
class Expected:
    N: int | None = None
    dimA: int | None = None
    degA: int | None = None
    relations: list[str] = field(default_factory=list)


def parse_expected(text: str) -> Expected:
    out = Expected()
    for no, line in _content_lines(text):
        if line.startswith("relation:"):
            out.relations.append(line.split(":", 1)[1].strip())
            continue
        m = re.match(r"^(N|dimA|degA)\s*=\s*(\d+)$", line)
        if not m:
            raise DescriptorSyntaxError(no, f"unrecognized line {line!r}")
        setattr(out, m.group(1), int(m.group(2)))
    return out


def parse_presentation(text: str) -> QuantumPresentation:
    """``generators: H``, ``q: q weight=4`` and ``relation:`` lines."""
    gens, qs, rels = [], [], []
    for no, line in _content_lines(text):
        key, _, value = line.partition(":")
        value = value.strip()
        if key == "name":
            continue
        if key == "generators":
            gens = value.replace(",", " ").split()
        elif key == "q":
            m = re.match(r"^(q\w*)\s+weight\s*=\s*(\d+)$", value)
            if not m:
                raise DescriptorSyntaxError(no, f"expected 'q: <name> weight=<w>', got {value!r}")
            qs.append((m.group(1), int(m.group(2))))
        elif key == "relation":
            rels.append((no, value))
        else:
            raise DescriptorSyntaxError(no, f"unknown key {key!r}")
    ring = PolyRing(gens + [n for n, _ in qs], [1] * len(gens) + [w for _, w in qs])
    polys = []
    for no, r in rels:
        try:
            polys.append(ring.parse(r))
        except ParseError as exc:
            raise DescriptorSyntaxError(no, str(exc)) from None
    zero = {n: 0 for n, _ in qs}
    classical = [p.specialize(zero).coerce(ring) for p in polys]
    return QuantumPresentation(ring, classical, [c - p for c, p in zip(classical, polys)])


def data_dir():
    return resources.files("qhblowup") / "data"


def shipped_names() -> list[str]:
    return sorted(p.name[: -len(".fano")] for p in data_dir().iterdir() if p.name.endswith(".fano"))


def read_input(arg: str) -> tuple[str, str]:
    """Text of a file path, or of a shipped data file matched by name or basename."""
    path = Path(arg)
    if path.is_file():
        return path.read_text(encoding="utf-8"), str(path)
    base = path.name
    for candidate in (base, base + ".fano"):
        f = data_dir() / candidate
        if f.is_file():
            return f.read_text(encoding="utf-8"), f"data/{candidate}"
    raise FileNotFoundError(f"no such file or shipped data: {arg}")


def load_descriptor(arg: str) -> ThreefoldDescriptor:
    text, _ = read_input(arg)
    return parse_descriptor(text)


def shipped_expected(name: str) -> Expected | None:
    f = data_dir() / f"{name}.expected"
    return parse_expected(f.read_text(encoding="utf-8")) if f.is_file() else None


# reports


def _jsonable(x):
    if isinstance(x, Fraction):
        return _rational(x)
    if isinstance(x, Poly):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


class RunReport:
    """Ordered stage results; the JSON form is byte-stable unless timings are requested."""

    def __init__(self, target: str, timings: bool = False):
        self.target = target
        self.stages: dict[str, dict] = {}
        self.timings: dict[str, float] = {}
        self.keep_timings = timings
        self.exit_code = EXIT_OK
        self.lines: list[str] = []

    def stage(self, name: str, data: dict, seconds: float = 0.0):
        self.stages[name] = data
        self.timings[name] = round(seconds, 3)

    def fail(self, code: int):
        if self.exit_code == EXIT_OK:
            self.exit_code = code

    def as_dict(self) -> dict:
        out = {"target": self.target, "stages": _jsonable(self.stages), "exit_code": self.exit_code}
        if self.keep_timings:
            out["timings"] = self.timings
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def _timed(fn):
    t = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - t


# stages: each returns (data, printable lines) and may raise


def stage_describe(pl: Pipeline):
    ring, lat = pl.ring, pl.lattice
    data = {
        "name": pl.descriptor.name,
        "ambient": pl.descriptor.ambient,
        "basis": list(ring.names),
        "betti": ring.betti(),
        "hodge_length": hodge_length(ring),
        "anticanonical": str(anticanonical(pl.descriptor)),
        "q": {label: {"class": lat.render(tuple(int(i == j) for j in range(lat.rank))), "weight": w}
              for i, (label, w) in enumerate(zip(lat.labels, lat.weights()))},
        "classical_relations": [str(f) for f in pl.classical],
    }
    lines = [
        f"{data['name']}: blow-up of {data['ambient']} along {len(pl.descriptor.curves)} curve(s)",
        f"cohomology basis: {', '.join(ring.names)}  (hodge length {data['hodge_length']})",
        f"-K = {data['anticanonical']}",
    ]
    lines += [f"{k} = {v['class']}  (weight {v['weight']})" for k, v in data["q"].items()]
    lines += [f"classical relation: {f}" for f in data["classical_relations"]]
    return data, lines


def stage_essential(pl: Pipeline):
    es = pl.essential
    data = {"N": len(es), "symbols": dict(es.table())}
    return data, [f"N = {len(es)}"] + [f"  {n} = {s}" for n, s in es.table()]


def stage_assoc(pl: Pipeline, analyze: bool, order: str):
    ja = pl.ideal
    data = {"generators": len(ja), "N": len(pl.essential)}
    lines = [f"J_A: {len(ja)} generators in {len(pl.essential)} unknowns"]
    if analyze:
        H = pl.analysis(order)
        data.update(dimA=H.dimension, degA=H.degree, hilbert_numerator=H.numerator)
        lines += [f"dimA = {H.dimension}", f"degA = {H.degree}"]
    else:
        lines += [f"  {g}" for g in ja.generators]
    return data, lines


def stage_solve(pl: Pipeline):
    geo = pl.geometric
    res = pl.solved
    es = pl.essential
    data = {
        "geometric": [{"symbol": r.text, "value": r.value, "origin": r.origin} for r in geo],
        "solution": {es.render(n): v for n, v in res.solution.values.items()},
        "eliminated": res.eliminated,
        "groebner_steps": res.steps,
    }
    lines = [f"J_G: {r.text} = {_rational(r.value)}  [{r.origin}]" for r in geo]
    lines += [f"  {n} = {es.render(n)} = {_rational(v)}" for n, v in res.solution.values.items()]
    return data, lines


def stage_present(pl: Pipeline):
    p = pl.presentation
    problems = pl.check_presentation()
    data = {
        "generators": p.generator_names,
        "q": p.q_names,
        "relations": [str(r) for r in p.relations],
        "lifting_problems": problems,
    }
    lines = [f"relation: {r}" for r in data["relations"]] + [f"problem: {x}" for x in problems]
    return data, lines


def stage_verify(pl: Pipeline, exp: Expected):
    rep = verify_against_expected(pl.presentation, exp.relations)
    data = {
        "ideal_equal": rep.ideal_equal,
        "syntactic_equal": rep.syntactic_equal,
        "expected_not_in_computed": rep.expected_not_in_computed,
        "computed_not_in_expected": rep.computed_not_in_expected,
        "residues": rep.residues,
    }
    ok = rep.ideal_equal
    checks = []
    if exp.N is not None:
        checks.append(("N", exp.N, len(pl.essential)))
    if exp.dimA is not None or exp.degA is not None:
        H = pl.analysis()
        if exp.dimA is not None:
            checks.append(("dimA", exp.dimA, H.dimension))
        if exp.degA is not None:
            checks.append(("degA", exp.degA, H.degree))
    data["counts"] = {k: {"expected": e, "computed": c} for k, e, c in checks}
    ok = ok and all(e == c for _, e, c in checks)
    data["ok"] = ok
    lines = [f"{k}: expected {e}, computed {c} {'ok' if e == c else 'MISMATCH'}" for k, e, c in checks]
    lines.append(f"ideal equality: {'yes' if rep.ideal_equal else 'NO'}")
    lines.append(f"syntactic match: {'yes' if rep.syntactic_equal else 'no'}")
    for e in rep.expected_not_in_computed:
        lines.append(f"  expected relation not in computed ideal: {e}  (normal form {rep.residues[e]})")
    for c in rep.computed_not_in_expected:
        lines.append(f"  computed relation not in expected ideal: {c}")
    if not rep.ideal_equal:
        compatible = compatible_with_associativity(pl, exp.relations)
        data["expected_compatible_with_associativity"] = compatible
        if not compatible:
            lines.append("  the expected relations admit no associative quantum product (J_A becomes the unit ideal)")
    return data, lines, ok


def stage_semisimple(p: QuantumPresentation, seed: int, trials: int, expected_dimension=None):
    v = generic_semisimplicity(p, trials, seed, expected_dimension)
    data = {
        "verdict": v.status,
        "seed": seed,
        "trials": [{"q": t.qvals, "dimension": t.dimension, "det": t.certificate.determinant} for t in v.trials],
        "discarded": v.discarded,
    }
    lines = []
    for k, t in enumerate(v.trials, 1):
        q = ", ".join(f"{n}={_rational(x)}" for n, x in t.qvals.items())
        lines.append(f"trial {k}: {q}  dim {t.dimension}  det(G) = {_rational(t.certificate.determinant)}")
    lines.append(f"verdict: {v.status}")
    return data, lines, v.semisimple


# command line


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qh", description="Small quantum cohomology of blow-up Fano threefolds.")
    ap.add_argument("--json", action="store_true", help="print the run report as JSON")
    ap.add_argument("--timings", action="store_true", help="include stage timings in the report")
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, help_text, multiple=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("descriptor", nargs="+" if multiple else None, help="descriptor file or shipped name such as M2_30")
        return p

    cmd("describe", "classical ring, lattice and weights")
    cmd("essential", "essential invariants and N")
    p = cmd("assoc", "associativity ideal J_A")
    p.add_argument("--analyze", action="store_true", help="report dim A and deg A")
    p.add_argument("--order", choices=["degrevlex", "lex"], default="degrevlex")
    cmd("solve", "solve J_A + J_G")
    cmd("present", "quantized presentation")
    p = cmd("verify", "compare against expected results")
    p.add_argument("--expect", required=True, help="expected-results file")
    p = cmd("semisimple", "generic semisimplicity (descriptor or presentation file)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=3)
    p = cmd("all", "every stage, verification against shipped data when available", multiple=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--expect", help="expected-results file (single descriptor only)")
    return ap


def _run_one(args, target: str) -> RunReport:
    report = RunReport(target, args.timings)
    lines: list[str] = []

    def emit(name, fn):
        out, secs = _timed(fn)
        data, text = out[0], out[1]
        report.stage(name, data, secs)
        lines.extend(text)
        return out

    try:
        text, _ = read_input(target)
        if args.command == "semisimple" and re.search(r"^\s*generators\s*:", text, re.M):
            p = parse_presentation(text)
            out = emit("semisimple", lambda: stage_semisimple(p, args.seed, args.trials))
            if not out[2]:
                report.fail(EXIT_INCONCLUSIVE)
            return _finish(report, lines)
        d = parse_descriptor(text)
        pl = Pipeline(d)
        c = args.command
        if c in ("describe", "all"):
            emit("describe", lambda: stage_describe(pl))
        if c in ("essential", "all"):
            emit("essential", lambda: stage_essential(pl))
        if c == "assoc":
            emit("assoc", lambda: stage_assoc(pl, args.analyze, args.order))
        if c == "all":
            emit("assoc", lambda: stage_assoc(pl, True, "degrevlex"))
        if c in ("solve", "all"):
            emit("solve", lambda: stage_solve(pl))
        if c in ("present", "all"):
            emit("present", lambda: stage_present(pl))
            if report.stages["present"]["lifting_problems"]:
                report.fail(EXIT_MISMATCH)
        exp = None
        if c == "verify" or (c == "all" and args.expect):
            exp = parse_expected(read_input(args.expect)[0])
        elif c == "all":
            exp = shipped_expected(d.name)
        if exp is not None:
            out = emit("verify", lambda: stage_verify(pl, exp))
            if not out[2]:
                report.fail(EXIT_MISMATCH)
        if c in ("semisimple", "all"):
            out = emit("semisimple", lambda: stage_semisimple(pl.presentation, args.seed, args.trials, hodge_length(pl.ring)))
            if not out[2]:
                report.fail(EXIT_INCONCLUSIVE)
    except groebner.BudgetExceeded as exc:
        lines.append(f"error: {exc}")
        report.stage("error", {"kind": "budget", "message": str(exc)})
        report.fail(EXIT_BUDGET)
    except SolveError as exc:
        lines.append(f"error: {exc}")
        report.stage("error", {"kind": type(exc).__name__, "message": str(exc)})
        report.fail(exc.exit_code)
    except (DescriptorError, SymbolError, ParseError, FileNotFoundError, DegenerateSpecialization) as exc:
        lines.append(f"error: {exc}")
        report.stage("error", {"kind": "input", "message": str(exc)})
        report.fail(EXIT_INPUT)
    return _finish(report, lines)


def _finish(report: RunReport, lines: list[str]) -> RunReport:
    report.lines.extend(lines)
    return report


def run(argv: list[str] | None = None) -> tuple[list[RunReport], int]:
    args = _parser().parse_args(argv)
    targets = args.descriptor if isinstance(args.descriptor, list) else [args.descriptor]
    if args.command == "all" and args.expect and len(targets) > 1:
        raise SystemExit("qh all: --expect needs a single descriptor")
    reports = [_run_one(args, t) for t in targets]
    code = next((r.exit_code for r in reports if r.exit_code), EXIT_OK)
    return reports, code


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    reports, code = run(argv)
    if args.json:
        if len(reports) == 1:
            print(reports[0].to_json())
        else:
            print(json.dumps([r.as_dict() for r in reports], indent=2))
    else:
        for r in reports:
            if len(reports) > 1:
                print(f"== {r.target}")
            for line in r.lines:
                print(line)
            if r.exit_code and len(reports) > 1:
                print(f"exit code {r.exit_code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
