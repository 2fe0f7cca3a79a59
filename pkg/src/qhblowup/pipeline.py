"""From a threefold descriptor to a presentation of its small quantum
cohomology ring.

The steps are: build the classical ring, expand the divisor-triple
associativity relations, add the known invariant values, solve the combined
system for its unique rational point, and lift every classical relation
through the quantum product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement

from . import groebner, linalg
from .cohomology import (
    CohomologyRing,
    CurveClassLattice,
    GeometricDatum,
    ThreefoldDescriptor,
    build_blowup_ring,
    classical_relations,
    render_class,
)
from .exactpoly import MonomialOrder, Poly, PolyRing
from .gwsymbols import DEFAULT_CLASS_BOUND, EssentialSet, InvariantSymbol, SymbolError, resolve
from .quantum import AssociativityIdeal, QuantumContext, SpecializedProduct

STANDARD = "standard-fiber"
DESCRIPTOR = "descriptor"


class SolveError(RuntimeError):
    exit_code = 1


class Underdetermined(SolveError):
    exit_code = 2

    def __init__(self, dimension: int, degree: int):
        super().__init__(
            f"J_A + J_G has dimension {dimension} (degree {degree}); more geometric relations are needed"
        )
        self.dimension = dimension
        self.degree = degree


class Inconsistent(SolveError):
    exit_code = 3

    def __init__(self):
        super().__init__("J_A + J_G is the unit ideal: the geometric data contradict associativity")


class Ambiguous(SolveError):
    exit_code = 4

    def __init__(self, degree: int):
        super().__init__(f"J_A + J_G is zero-dimensional of degree {degree}, not a single point")
        self.degree = degree


@dataclass(frozen=True)
class GeometricRelation:
    symbol: InvariantSymbol
    value: Fraction
    origin: str
    text: str


@dataclass
class GeometricRelationSet:
    relations: list[GeometricRelation]

    def __len__(self):
        return len(self.relations)

    def __iter__(self):
        return iter(self.relations)

    def polynomials(self, es: EssentialSet, ring: PolyRing) -> list[Poly]:
        return [ring.gen(es.variable(r.symbol)) - r.value for r in self.relations]


def build_geometric(
    d: ThreefoldDescriptor, ring: CohomologyRing, lattice: CurveClassLattice, es: EssentialSet
) -> GeometricRelationSet:
    """Standard fiber relations I_{F_j}(phi_j) = -1 plus the descriptor's data."""
    data = []
    for c in d.curves:
        geom = tuple(int(k == c.index) for k in range(lattice.rank))
        data.append((GeometricDatum(geom, (f"phi{c.index}",), Fraction(-1)), STANDARD))
    for g in d.geometric:
        data.append((g, DESCRIPTOR))
    out = []
    seen = {}
    for g, origin in data:
        text = f"I({render_class(g.klass, lattice.geometric_names)} | {', '.join(g.insertions)})"
        coeff, sym = resolve(ring, lattice, g.klass, g.insertions)
        if sym is None:
            raise SymbolError(f"{text} vanishes by the grading axiom; it cannot carry a value")
        if sym not in es:
            raise SymbolError(f"{text} is not an essential invariant of {d.name}")
        value = Fraction(g.value) / coeff
        if sym in seen:
            if seen[sym] != value:
                raise SymbolError(f"conflicting values given for {text}")
            continue
        seen[sym] = value
        out.append(GeometricRelation(sym, value, origin, text))
    return GeometricRelationSet(out)


@dataclass
class Solution:
    values: dict[str, Fraction]  # x-name -> value

    def __getitem__(self, name):
        return self.values[name]


@dataclass
class SolveResult:
    solution: Solution
    steps: int
    eliminated: int
    residual_variables: int


def solve(ja: AssociativityIdeal, jg_polys: list[Poly], budget: int | None = None) -> SolveResult:
    """Unique rational point of J_A + J_G, with linear elimination first."""
    ring = ja.ring
    gens = list(ja.generators) + [p.coerce(ring) for p in jg_polys]
    rest, subs = groebner.linear_eliminate(gens)
    if any(g.is_constant() and g for g in rest):
        raise Inconsistent()
    residual = PolyRing([n for n in ring.names if n not in subs])
    rest = [g.coerce(residual) for g in rest]
    steps = 0
    if residual.nvars == 0:
        values = {}
    else:
        G = groebner.buchberger(rest, residual, budget=budget)
        steps = G.steps
        if G.is_unit():
            raise Inconsistent()
        H = groebner.hilbert_analysis(G)
        if H.dimension > 0:
            raise Underdetermined(H.dimension, H.degree)
        if H.degree != 1:
            raise Ambiguous(H.degree)
        values = groebner.solve_zero_dim(G).points[0]
    point = {n: Fraction(v) for n, v in values.items()}
    for name, image in subs.items():
        value = image.specialize(point)
        if not value.is_constant():
            raise Underdetermined(len(value.variables()), 1)
        point[name] = value.constant_term()
    sol = Solution({n: point[n] for n in ring.names})
    for g in gens:
        if g.specialize(sol.values):
            raise AssertionError("solution does not satisfy J_A + J_G")
    return SolveResult(sol, steps, len(subs), residual.nvars)


def analyze_associativity(ja: AssociativityIdeal, order: str = "degrevlex", budget: int | None = None) -> groebner.HilbertData:
    """dim A and deg A via the affine Hilbert polynomial of J_A.

    Linear generators are eliminated first; that affine change of
    coordinates keeps the degree filtration and so the Hilbert function.
    """
    rest, subs = groebner.linear_eliminate(ja.generators)
    residual = PolyRing([n for n in ja.ring.names if n not in subs])
    rest = [g.coerce(residual) for g in rest]
    if order == "lex":
        # dimension and degree need a degree-compatible order; lex is only a
        # cross-check that the completion itself succeeds
        groebner.buchberger(rest, residual.with_order(MonomialOrder("lex")), budget=budget)
    G = groebner.buchberger(rest, residual, budget=budget)
    return groebner.hilbert_analysis(G)


@dataclass
class QuantumPresentation:
    ring: PolyRing  # divisor generators then q's
    classical: list[Poly]
    corrections: list[Poly]  # f^Q
    quantization: dict[str, Poly] = field(default_factory=dict)

    @property
    def relations(self) -> list[Poly]:
        return [c - q for c, q in zip(self.classical, self.corrections)]

    @property
    def generator_names(self) -> list[str]:
        return [n for n in self.ring.names if not n.startswith("q")]

    @property
    def q_names(self) -> list[str]:
        return [n for n in self.ring.names if n.startswith("q")]


def presentation_ring(ring: CohomologyRing, lattice: CurveClassLattice) -> PolyRing:
    return PolyRing(list(ring.generator_names) + list(lattice.labels), [1] * len(ring.generator_names) + lattice.weights())


def quantize_presentation(ring: CohomologyRing, lattice: CurveClassLattice, product: SpecializedProduct) -> QuantumPresentation:
    """Lift classical relations f^C to f^C - f^Q through the quantum product.

    Each basis class T gets a polynomial P_T whose quantum value is T: start
    from the classical representative in standard monomials and subtract the
    q-corrections using entries of lower degree.  Corrections carry positive
    q-weight, so they only reach classes of strictly smaller degree.
    """
    pr = presentation_ring(ring, lattice)
    relations = classical_relations(ring)
    gr = ring.generator_ring()
    G = groebner.buchberger(relations, gr)
    nstd = [m for m in _all_standard(G, 3)]
    table: dict[int, Poly] = {0: pr.one()}
    for name, div in zip(ring.generator_names, ring.divisors):
        table[div] = pr.gen(name)
    for degree in (2, 3):
        classes = [k for k in range(ring.size) if ring.degrees[k] == degree]
        monos = [m for m in nstd if sum(m) == degree]
        images = [ring.evaluate(Poly(gr, {m: Fraction(1)})) for m in monos]
        inv = linalg.inverse([[img[k] for k in classes] for img in images])
        for a, k in enumerate(classes):
            rep = gr.zero()
            for b, m in enumerate(monos):
                if inv[a][b]:
                    rep = rep + Poly(gr, {m: inv[a][b]})
            # rep = sum_b inv[a][b] * monos[b];  its cup value is T_k
            rep = rep.coerce(pr)
            value = product.evaluate(rep)
            poly = rep
            for t, coeff in sorted(value.items()):
                if t == k:
                    if coeff != 1:
                        raise AssertionError("classical part of the representative is wrong")
                    continue
                if ring.degrees[t] >= degree:
                    raise AssertionError("quantum correction does not lower the degree")
                poly = poly - coeff.coerce(pr) * table[t]
            table[k] = poly
    corrections = []
    for f in relations:
        fc = f.coerce(pr)
        value = product.evaluate(fc)
        fq = pr.zero()
        for t, coeff in value.items():
            fq = fq + coeff.coerce(pr) * table[t]
        corrections.append(fq)
    return QuantumPresentation(
        pr,
        [f.coerce(pr) for f in relations],
        corrections,
        {ring.names[k]: p for k, p in table.items()},
    )


def _all_standard(G: groebner.GroebnerBasis, max_degree: int) -> list[tuple]:
    leads = G.leading_monomials()
    n = G.ring.nvars
    out = []
    for d in range(max_degree + 1):
        for combo in combinations_with_replacement(range(n), d):
            m = [0] * n
            for i in combo:
                m[i] += 1
            m = tuple(m)
            if not any(all(a <= b for a, b in zip(lm, m)) for lm in leads):
                out.append(m)
    out.sort(key=G.ring.key)
    return out


@dataclass
class VerificationReport:
    ideal_equal: bool
    syntactic_equal: bool
    expected_not_in_computed: list[str]  # expected relations with nonzero normal form
    computed_not_in_expected: list[str]
    residues: dict[str, str] = field(default_factory=dict)  # expected relation -> its normal form

    @property
    def ok(self) -> bool:
        return self.ideal_equal


def verify_against_expected(p: QuantumPresentation, expected: list) -> VerificationReport:
    """Ideal equality both ways via normal forms, plus a separate syntactic comparison.

    ``expected`` holds relations as Polys or as text over the presentation's
    generators and q's.
    """
    exp = [p.ring.parse(e) if isinstance(e, str) else e.coerce(p.ring) for e in expected]
    computed = p.relations
    Gc = groebner.buchberger(computed, p.ring)
    Ge = groebner.buchberger(exp, p.ring)
    missing_e, missing_c, residues = [], [], {}
    for e in exp:
        r = groebner.normal_form(e, Gc)
        if r:
            missing_e.append(str(e))
            residues[str(e)] = str(r)
    for c in computed:
        if groebner.normal_form(c, Ge):
            missing_c.append(str(c))
    syntactic = sorted(map(str, exp)) == sorted(map(str, computed))
    return VerificationReport(not missing_e and not missing_c, syntactic, missing_e, missing_c, residues)


class Pipeline:
    """All stages for one threefold, computed lazily and cached."""

    def __init__(self, descriptor: ThreefoldDescriptor, bound: int = DEFAULT_CLASS_BOUND, budget: int | None = None):
        self.descriptor = descriptor
        self.bound = bound
        self.budget = budget
        self.ring, self.lattice = build_blowup_ring(descriptor)

    @cached_property
    def context(self) -> QuantumContext:
        return QuantumContext(self.ring, self.lattice, self.bound)

    @cached_property
    def ideal(self) -> AssociativityIdeal:
        return self.context.associativity_system()

    @property
    def essential(self) -> EssentialSet:
        self.ideal
        return self.context.essential

    @cached_property
    def classical(self) -> list[Poly]:
        return classical_relations(self.ring)

    def analysis(self, order: str = "degrevlex") -> groebner.HilbertData:
        return analyze_associativity(self.ideal, order, self.budget)

    @cached_property
    def geometric(self) -> GeometricRelationSet:
        return build_geometric(self.descriptor, self.ring, self.lattice, self.essential)

    @cached_property
    def solved(self) -> SolveResult:
        return solve(self.ideal, self.geometric.polynomials(self.essential, self.ideal.ring), self.budget)

    @property
    def solution(self) -> Solution:
        return self.solved.solution

    @cached_property
    def product(self) -> SpecializedProduct:
        return self.context.specialized(self.solution.values)

    @cached_property
    def presentation(self) -> QuantumPresentation:
        return quantize_presentation(self.ring, self.lattice, self.product)

    def check_presentation(self) -> list[str]:
        """Problems with the two lifting conditions; empty when both hold."""
        problems = []
        p = self.presentation
        zero_q = {n: 0 for n in p.q_names}
        for rel, fc in zip(p.relations, p.classical):
            if rel.specialize(zero_q) != fc.specialize(zero_q):
                problems.append(f"{rel}: q = 0 does not give the classical relation")
            if self.product.evaluate(rel):
                problems.append(f"{rel}: nonzero under the quantum product")
        return problems


def relation_constraints(ctx: QuantumContext, relations: list[Poly]) -> list[Poly]:
    """Conditions on the essential unknowns for ``relations`` to vanish in quantum cohomology.

    Each relation is expanded under the symbolic product; every coefficient
    of every basis class and q-monomial must vanish.  Candidate symbols
    outside the essential set keep their own variables.
    """
    es = ctx.essential_set()
    fr = ctx.coefficient_ring
    ring = ctx.cohomology
    out = []
    for rel in relations:
        value: dict = {}
        for m, c in rel.terms.items():
            elem = ctx.basis_element(0)
            qm = [0] * fr.nvars
            for t, e in enumerate(m):
                name = rel.ring.names[t]
                if not e:
                    continue
                if name in ring.generator_names:
                    d = ring.divisors[ring.generator_names.index(name)]
                    for _ in range(e):
                        elem = ctx.qmul(elem, ctx.basis_element(d))
                else:
                    qm[fr.index[name]] = e
            value = ctx.add(value, ctx.scale(elem, Poly(fr, {tuple(qm): c})))
        for coeff in value.values():
            groups: dict[tuple, dict] = {}
            for m, c in coeff.terms.items():
                groups.setdefault(m[: ctx.nq], {})[(0,) * ctx.nq + m[ctx.nq :]] = c
            out.extend(Poly(fr, g) for g in groups.values())
    rename = {ctx.candidate_name[s]: es.variable(s) for s in es.symbols}
    extra = sorted({n for p in out for n in p.variables() if n not in rename}, key=lambda n: int(n[1:]))
    xr = PolyRing(list(es.names) + extra)
    converted = []
    for p in out:
        terms = {}
        for m, c in p.terms.items():
            new = [0] * xr.nvars
            for t, e in enumerate(m):
                if e:
                    new[xr.index[rename.get(fr.names[t], fr.names[t])]] = e
            terms[tuple(new)] = c
        converted.append(Poly(xr, terms))
    return converted


def compatible_with_associativity(pl: "Pipeline", relations: list) -> bool:
    """Whether some point of A makes every given relation hold.

    False means no associative quantum product with these classes satisfies
    the relations, whatever the geometric input.
    """
    pr = pl.presentation.ring
    rels = [pr.parse(r) if isinstance(r, str) else r.coerce(pr) for r in relations]
    cons = relation_constraints(pl.context, rels)
    ring = cons[0].ring if cons else PolyRing(pl.ideal.ring.names)
    gens = cons + [g.coerce(ring) for g in pl.ideal.generators]
    rest, subs = groebner.linear_eliminate(gens)
    if any(g.is_constant() and g for g in rest):
        return False
    residual = PolyRing([n for n in ring.names if n not in subs])
    G = groebner.buchberger([g.coerce(residual) for g in rest], residual, budget=pl.budget)
    return not G.is_unit()
