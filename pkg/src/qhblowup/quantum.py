"""Small quantum product with unknown invariants and the associativity ideal.

Quantum elements are dicts ``basis index -> Poly`` whose coefficients live in
a ring over the Novikov variables ``q0..`` (weighted by -K.beta_i) followed
by one variable per invariant symbol.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

from .cohomology import CohomologyRing, CurveClassLattice
from .exactpoly import Poly, PolyRing
from .gwsymbols import DEFAULT_CLASS_BOUND, EssentialSet, enumerate_classes, normalize

QuantumElement = dict  # basis index -> Poly


class UnknownInvariant(LookupError):
    pass


@dataclass(frozen=True)
class Provenance:
    triple: tuple[int, int, int]  # positions in the divisor list, 1-based
    basis: str
    klass: tuple[int, ...]


@dataclass
class AssociativityIdeal:
    ring: PolyRing  # x1..xN, degrevlex
    generators: list[Poly]
    provenance: list[list[Provenance]]

    def __len__(self):
        return len(self.generators)


class QuantumContext:
    """Quantum multiplication of cohomology classes with symbolic invariants.

    Products of basis classes are precomputed once; the class bound only
    limits work, since the grading kills every term beyond it.
    """

    def __init__(self, ring: CohomologyRing, lattice: CurveClassLattice, bound: int = DEFAULT_CLASS_BOUND):
        self.cohomology = ring
        self.lattice = lattice
        self.classes = enumerate_classes(lattice, bound)
        self.q_names = list(lattice.labels)
        self.q_weights = lattice.weights()
        p = len(self.q_names)

        raw = {}
        symbols = set()
        n = ring.size
        for i in range(n):
            for j in range(i, n):
                entries = []
                for beta in self.classes:
                    for l in range(n):
                        c, sym = normalize(ring, lattice, beta, (i, j, l))
                        if sym is None:
                            continue
                        symbols.add(sym)
                        for k, d in enumerate(ring.dual[l]):
                            if d:
                                entries.append((k, c * d, beta, sym))
                raw[i, j] = entries
        self.candidates = sorted(symbols, key=lambda s: (lattice.anticanonical_degree(s.klass), s.klass, s.insertions))
        self.candidate_name = {s: f"s{t}" for t, s in enumerate(self.candidates)}
        self.full_ring = PolyRing(
            self.q_names + [self.candidate_name[s] for s in self.candidates],
            self.q_weights + [1] * len(self.candidates),
        )
        self.nq = p
        fr = self.full_ring
        self.table = {}
        for (i, j), entries in raw.items():
            elem: QuantumElement = {}
            for k, c in ring.table[i, j].items():
                elem[k] = fr.constant(c)
            for k, c, beta, sym in entries:
                m = [0] * fr.nvars
                for t, b in enumerate(beta):
                    m[t] = b
                m[fr.index[self.candidate_name[sym]]] += 1
                term = Poly(fr, {tuple(m): c})
                elem[k] = elem[k] + term if k in elem else term
            elem = {k: v for k, v in elem.items() if v}
            self.table[i, j] = elem
            self.table[j, i] = elem
        self.coefficient_ring = fr
        self.essential: EssentialSet | None = None

    # elements

    def basis_element(self, i: int) -> QuantumElement:
        return {i: self.coefficient_ring.one()}

    def zero(self) -> QuantumElement:
        return {}

    def qmul(self, a: QuantumElement, b: QuantumElement) -> QuantumElement:
        out: QuantumElement = {}
        for i, ca in a.items():
            for j, cb in b.items():
                cab = ca * cb
                if not cab:
                    continue
                for k, t in self.table[i, j].items():
                    v = cab * t
                    out[k] = out[k] + v if k in out else v
        return {k: v for k, v in out.items() if v}

    def add(self, a: QuantumElement, b: QuantumElement, scale=1) -> QuantumElement:
        out = dict(a)
        for k, v in b.items():
            v = v * scale
            out[k] = out[k] + v if k in out else v
        return {k: v for k, v in out.items() if v}

    def scale(self, a: QuantumElement, c) -> QuantumElement:
        return {k: v * c for k, v in a.items() if v * c}

    # essential set and specialization

    def _occurring(self, polys) -> set:
        used = set()
        off = self.nq
        for p in polys:
            for m in p.terms:
                for t in range(off, len(m)):
                    if m[t]:
                        used.add(t)
        return used

    def raw_associativity(self) -> tuple[list[tuple[Provenance, Poly]], set]:
        """Coefficients of P(i,j,k) grouped by (basis class, q-monomial), in the full ring.

        Also returns the positions of the invariant variables met while
        expanding the two triple products (before they are subtracted).
        """
        ring = self.cohomology
        divs = ring.divisors
        p = len(divs)
        fr = self.coefficient_ring
        out = []
        used = set()
        for triple in combinations_with_replacement(range(p), 3):
            if triple[0] == triple[1] == triple[2]:
                continue
            i, j, k = (divs[t] for t in triple)
            left = self.qmul(self.qmul(self.basis_element(i), self.basis_element(j)), self.basis_element(k))
            right = self.qmul(self.basis_element(i), self.qmul(self.basis_element(j), self.basis_element(k)))
            used |= self._occurring(list(left.values()) + list(right.values()))
            diff = self.add(left, right, -1)
            for l in sorted(diff):
                groups: dict[tuple, dict] = {}
                for m, c in diff[l].terms.items():
                    qpart = m[: self.nq]
                    xpart = (0,) * self.nq + m[self.nq:]
                    groups.setdefault(qpart, {})[xpart] = c
                for qpart in sorted(groups):
                    prov = Provenance(tuple(t + 1 for t in triple), ring.names[l], qpart)
                    out.append((prov, Poly(fr, groups[qpart])))
        return out, used

    def associativity_system(self) -> AssociativityIdeal:
        raw, used = self.raw_associativity()
        symbols = [self.candidates[t - self.nq] for t in sorted(used)]
        es = EssentialSet(symbols, self.cohomology, self.lattice)
        self.essential = es
        xr = PolyRing(es.names)
        rename = {self.candidate_name[s]: es.variable(s) for s in es.symbols}
        pos = [None] * self.coefficient_ring.nvars
        for name, t in self.coefficient_ring.index.items():
            if name in rename:
                pos[t] = xr.index[rename[name]]
        gens: dict[Poly, list[Provenance]] = {}
        order = []
        for prov, g in raw:
            terms = {}
            for m, c in g.terms.items():
                new = [0] * xr.nvars
                for t, e in enumerate(m):
                    if e:
                        new[pos[t]] = e
                terms[tuple(new)] = c
            poly = Poly(xr, terms).monic()
            if poly not in gens:
                gens[poly] = []
                order.append(poly)
            gens[poly].append(prov)
        order.sort(key=lambda g: (g.total_degree(), str(g)))
        return AssociativityIdeal(xr, order, [gens[g] for g in order])

    def essential_set(self) -> EssentialSet:
        if self.essential is None:
            self.associativity_system()
        return self.essential

    def specialized(self, values: dict[str, Fraction]) -> "SpecializedProduct":
        """Quantum product with every essential unknown replaced by its value."""
        es = self.essential_set()
        bindings = {}
        for name, value in values.items():
            bindings[self.candidate_name[es.by_name[name]]] = Fraction(value)
        return SpecializedProduct(self, bindings)


class SpecializedProduct:
    """Quantum product over Q[q0, ...] once the invariants are known."""

    def __init__(self, ctx: QuantumContext, bindings: dict[str, Fraction]):
        self.ctx = ctx
        self.cohomology = ctx.cohomology
        self.q_ring = PolyRing(ctx.q_names, ctx.q_weights)
        self.table = {}
        self.missing = set()
        for key, elem in ctx.table.items():
            new = {}
            for k, v in elem.items():
                s = v.specialize(bindings)
                leftover = [n for n in s.variables() if n not in ctx.q_names]
                if leftover:
                    self.missing.update(leftover)
                    new = None
                    break
                s = s.coerce(self.q_ring)
                if s:
                    new[k] = s
            # None marks a product that still depends on unknown invariants
            self.table[key] = new
        self.missing_symbols = sorted(
            (ctx.candidates[int(n[1:])] for n in self.missing),
            key=lambda s: (ctx.lattice.anticanonical_degree(s.klass), s.klass, s.insertions),
        )

    def basis_element(self, i: int) -> QuantumElement:
        return {i: self.q_ring.one()}

    def qmul(self, a: QuantumElement, b: QuantumElement) -> QuantumElement:
        out: QuantumElement = {}
        for i, ca in a.items():
            for j, cb in b.items():
                cab = ca * cb
                if not cab:
                    continue
                entry = self.table[i, j]
                if entry is None:
                    raise UnknownInvariant(
                        f"{self.cohomology.names[i]} * {self.cohomology.names[j]} involves undetermined invariants"
                    )
                for k, t in entry.items():
                    v = cab * t
                    out[k] = out[k] + v if k in out else v
        return {k: v for k, v in out.items() if v}

    def add(self, a, b, scale=1):
        out = dict(a)
        for k, v in b.items():
            v = v * scale
            out[k] = out[k] + v if k in out else v
        return {k: v for k, v in out.items() if v}

    def scale_by(self, a: QuantumElement, c: Poly) -> QuantumElement:
        out = {k: v * c for k, v in a.items()}
        return {k: v for k, v in out.items() if v}

    def evaluate(self, p: Poly) -> QuantumElement:
        """Value of a polynomial in divisor generators and q's under the quantum product."""
        ring = self.cohomology
        gen_index = {}
        q_index = {}
        for t, name in enumerate(p.ring.names):
            if name in ring.generator_names:
                gen_index[t] = ring.divisors[ring.generator_names.index(name)]
            elif name in self.q_ring.index:
                q_index[t] = self.q_ring.index[name]
            else:
                raise ValueError(f"unknown generator {name!r}")
        out: QuantumElement = {}
        powers: dict[tuple, QuantumElement] = {}
        for m, c in p.terms.items():
            qm = [0] * self.q_ring.nvars
            elem = self.basis_element(0)
            for t, e in enumerate(m):
                if not e:
                    continue
                if t in q_index:
                    qm[q_index[t]] = e
                else:
                    key = (gen_index[t], e)
                    if key not in powers:
                        acc = self.basis_element(0)
                        for _ in range(e):
                            acc = self.qmul(acc, self.basis_element(gen_index[t]))
                        powers[key] = acc
                    elem = self.qmul(elem, powers[key])
            coeff = Poly(self.q_ring, {tuple(qm): c})
            out = self.add(out, self.scale_by(elem, coeff))
        return out


def qmul(a: QuantumElement, b: QuantumElement, ctx) -> QuantumElement:
    return ctx.qmul(a, b)


def associativity_system(ctx: QuantumContext) -> AssociativityIdeal:
    return ctx.associativity_system()
