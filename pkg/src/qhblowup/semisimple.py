"""Generic semisimplicity of a presented quantum cohomology algebra.

The presentation is specialized at a nonzero rational point q; the quotient
is then a finite-dimensional commutative algebra over the rationals.  Over a
field of characteristic zero it is semisimple exactly when the trace form
(u, v) -> tr(mult(u*v)) is nondegenerate.  Semisimplicity is an open
condition in q, so one semisimple sample decides the generic case.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import groebner, linalg
from .exactpoly import Poly, PolyRing

SEMISIMPLE = "SEMISIMPLE"
INCONCLUSIVE = "INCONCLUSIVE-LIKELY-NOT"
RETRY_CAP = 10
SAMPLE_RANGE = (1, 1000)


class DegenerateSpecialization(ValueError):
    """The specialized ideal is not zero-dimensional (or is the unit ideal)."""


@dataclass
class ArtinianAlgebra:
    ring: PolyRing
    basis: list[tuple]  # standard monomials
    matrices: dict[str, list[list[Fraction]]]  # generator -> matrix, column j = image of basis[j]
    groebner: groebner.GroebnerBasis

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def basis_labels(self) -> list[str]:
        return [self.ring.monomial_str(m) for m in self.basis]

    def coordinates(self, p: Poly) -> list[Fraction]:
        r = groebner.normal_form(p.coerce(self.ring), self.groebner)
        pos = {m: i for i, m in enumerate(self.basis)}
        vec = [Fraction(0)] * self.dimension
        for m, c in r.terms.items():
            vec[pos[m]] = c
        return vec

    def monomial_matrix(self, m: tuple) -> list[list[Fraction]]:
        acc = linalg.identity(self.dimension)
        for name, e in zip(self.ring.names, m):
            for _ in range(e):
                acc = linalg.matmul(self.matrices[name], acc)
        return acc

    def matrix_of(self, p: Poly) -> list[list[Fraction]]:
        n = self.dimension
        out = [[Fraction(0)] * n for _ in range(n)]
        for m, c in p.coerce(self.ring).terms.items():
            mm = self.monomial_matrix(m)
            for i in range(n):
                for j in range(n):
                    if mm[i][j]:
                        out[i][j] += c * mm[i][j]
        return out

    def commuting(self) -> bool:
        mats = list(self.matrices.values())
        for a in range(len(mats)):
            for b in range(a + 1, len(mats)):
                if linalg.matmul(mats[a], mats[b]) != linalg.matmul(mats[b], mats[a]):
                    return False
        return True


def algebra_from_relations(relations: list[Poly], ring: PolyRing) -> ArtinianAlgebra:
    """Quotient of ``ring`` by ``relations``; it must be zero-dimensional."""
    G = groebner.buchberger([r.coerce(ring) for r in relations], ring)
    if G.is_unit():
        raise DegenerateSpecialization("the relations generate the unit ideal")
    try:
        basis = groebner.standard_monomials(G)
    except ValueError:
        raise DegenerateSpecialization("the quotient is not finite-dimensional") from None
    pos = {m: i for i, m in enumerate(basis)}
    n = len(basis)
    matrices = {}
    for name in ring.names:
        g = ring.gen(name)
        mat = [[Fraction(0)] * n for _ in range(n)]
        for j, m in enumerate(basis):
            r = groebner.normal_form(g * Poly(ring, {m: Fraction(1)}), G)
            for mono, c in r.terms.items():
                mat[pos[mono]][j] = c
        matrices[name] = mat
    return ArtinianAlgebra(ring, basis, matrices, G)


def specialize_algebra(p, qvals: dict) -> ArtinianAlgebra:
    """Substitute nonzero rationals for the q's and pass to the quotient algebra.

    ``p`` is anything with ``relations``, ``generator_names`` and ``q_names``
    (a QuantumPresentation).
    """
    values = {}
    for name in p.q_names:
        if name not in qvals:
            raise ValueError(f"no value given for {name}")
        v = Fraction(qvals[name])
        if v == 0:
            raise ValueError(f"{name} must be nonzero")
        values[name] = v
    ring = PolyRing(list(p.generator_names))
    rels = [r.specialize(values).coerce(ring) for r in p.relations]
    return algebra_from_relations(rels, ring)


@dataclass
class Certificate:
    semisimple: bool
    determinant: Fraction
    gram: list[list[Fraction]] = field(repr=False, default_factory=list)


def trace_form(A: ArtinianAlgebra) -> list[list[Fraction]]:
    mats = [A.monomial_matrix(m) for m in A.basis]
    n = A.dimension
    gram = [[Fraction(0)] * n for _ in range(n)]
    for u in range(n):
        for v in range(u, n):
            # tr(M_u M_v) without forming the product
            t = sum(
                (mats[u][i][k] * mats[v][k][i] for i in range(n) for k in range(n) if mats[u][i][k]),
                Fraction(0),
            )
            gram[u][v] = gram[v][u] = t
    return gram


def is_semisimple(A: ArtinianAlgebra) -> Certificate:
    gram = trace_form(A)
    d = linalg.det(gram) if gram else Fraction(1)
    return Certificate(d != 0, d, gram)


# independent check: squarefree characteristic polynomial of a generic element


def _poly_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    """Monic gcd of dense univariate polynomials (highest degree first)."""
    a, b = _trim(a), _trim(b)
    while b != [Fraction(0)]:
        a, b = b, _remainder(a, b)
    return [c / a[0] for c in a]


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[0] == 0:
        p.pop(0)
    return p or [Fraction(0)]


def _remainder(a, b):
    a = list(a)
    while len(a) >= len(b) and any(a):
        f = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= f * b[i]
        a = _trim(a[1:])
    return _trim(a)


def _derivative(p):
    n = len(p) - 1
    return _trim([c * (n - i) for i, c in enumerate(p[:-1])]) if n else [Fraction(0)]


def radical_test(A: ArtinianAlgebra, rng: random.Random | None = None, attempts: int = 5) -> bool:
    """True when some linear form has a squarefree characteristic polynomial.

    A squarefree characteristic polynomial is the minimal polynomial, of
    degree dim A, so the algebra is a product of fields.  A nonreduced
    algebra never passes; a reduced one fails only for unlucky forms.
    """
    rng = rng or random.Random(0)
    n = A.dimension
    for _ in range(attempts):
        coeffs = {name: Fraction(rng.randint(-50, 50)) for name in A.ring.names}
        mat = [[Fraction(0)] * n for _ in range(n)]
        for name, c in coeffs.items():
            for i in range(n):
                for j in range(n):
                    mat[i][j] += c * A.matrices[name][i][j]
        chi = linalg.charpoly(mat)
        if len(_poly_gcd(chi, _derivative(chi))) == 1:
            return True
    return False


@dataclass
class Trial:
    qvals: dict[str, Fraction]
    dimension: int
    certificate: Certificate


@dataclass
class Verdict:
    status: str
    trials: list[Trial]
    discarded: list[dict] = field(default_factory=list)

    @property
    def semisimple(self) -> bool:
        return self.status == SEMISIMPLE


def sample_q(names: list[str], rng: random.Random) -> dict[str, Fraction]:
    lo, hi = SAMPLE_RANGE
    return {n: Fraction(rng.randint(lo, hi), rng.randint(lo, hi)) for n in names}


def generic_semisimplicity(p, trials: int = 3, seed: int = 0, expected_dimension: int | None = None) -> Verdict:
    """Sample nonzero rational q-points until one gives a semisimple algebra."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = random.Random(seed)
    done: list[Trial] = []
    discarded = []
    while len(done) < trials:
        q = sample_q(list(p.q_names), rng)
        try:
            A = specialize_algebra(p, q)
        except DegenerateSpecialization:
            discarded.append(q)
            if len(discarded) >= RETRY_CAP:
                break
            continue
        if expected_dimension is not None and A.dimension != expected_dimension:
            raise AssertionError(f"quotient has dimension {A.dimension}, expected {expected_dimension}")
        cert = is_semisimple(A)
        done.append(Trial(q, A.dimension, cert))
        if cert.semisimple:
            return Verdict(SEMISIMPLE, done, discarded)
    return Verdict(INCONCLUSIVE, done, discarded)
