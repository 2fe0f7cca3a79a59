"""Cohomology rings of blow-ups of P^3 or Q^3 along disjoint rational curves.

Basis order is ``1, E1[, E2], H, rho, phi1[, phi2], pt`` with complex degrees
0, 1, 2, 3.  ``rho`` is the pullback of the line class and ``phi_j`` the class
of a fiber of the j-th exceptional divisor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

from . import linalg
from .exactpoly import Poly, PolyRing

AMBIENT_INDEX = {"P3": 4, "Q3": 3}  # -K_X = index * H
AMBIENT_H_CUBED = {"P3": 1, "Q3": 2}  # H^2 = (H^3) * rho


class DescriptorError(ValueError):
    pass


@dataclass(frozen=True)
class Curve:
    index: int
    degree: int
    genus: int = 0


@dataclass(frozen=True)
class GeometricDatum:
    """Known value of one invariant: class in (L0, F1, F2) coordinates."""

    klass: tuple[int, ...]
    insertions: tuple[str, ...]
    value: Fraction


@dataclass(frozen=True)
class ThreefoldDescriptor:
    name: str
    ambient: str
    curves: tuple[Curve, ...]
    basis: tuple[tuple[str, tuple[int, ...]], ...]
    geometric: tuple[GeometricDatum, ...] = ()

    def __post_init__(self):
        if self.ambient not in AMBIENT_INDEX:
            raise DescriptorError(f"ambient must be P3 or Q3, got {self.ambient!r}")
        if not 1 <= len(self.curves) <= 2:
            raise DescriptorError("one or two blown-up curves are supported")
        if [c.index for c in self.curves] != list(range(1, len(self.curves) + 1)):
            raise DescriptorError("curves must be numbered 1, 2 in order")
        for c in self.curves:
            if c.genus != 0:
                raise DescriptorError(f"curve {c.index} has genus {c.genus}; only rational curves")
            if c.degree < 1:
                raise DescriptorError(f"curve {c.index} has degree {c.degree}")
        rank = len(self.curves) + 1
        if len(self.basis) != rank:
            raise DescriptorError(
                f"effective basis has {len(self.basis)} classes for a rank-{rank} lattice; it is not unimodular"
            )
        for label, coords in self.basis:
            if len(coords) != rank:
                raise DescriptorError(f"basis class {label} has wrong length")
        if abs(linalg.det([list(c) for _, c in self.basis])) != 1:
            raise DescriptorError("effective basis is not unimodular over the lattice L0, F1, F2")

    @property
    def b2(self) -> int:
        return len(self.curves) + 1

    def with_geometric(self, data) -> "ThreefoldDescriptor":
        return ThreefoldDescriptor(self.name, self.ambient, self.curves, self.basis, tuple(data))


def normal_degree(ambient: str, curve: Curve) -> int:
    """deg c_1 of the normal bundle: 2g - 2 - K_X.C."""
    return 2 * curve.genus - 2 + AMBIENT_INDEX[ambient] * curve.degree


@dataclass
class CohomologyRing:
    names: list[str]
    degrees: list[int]
    table: dict  # (i, j) -> vector
    divisors: list[int]
    codim2: list[int]
    point: int
    generator_names: list[str]
    anticanonical: list[Fraction] = field(default_factory=list)
    dual: list[list[Fraction]] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def b2(self) -> int:
        return len(self.divisors)

    def betti(self) -> list[int]:
        return [self.degrees.count(k) for k in range(4)]

    def unit(self, i: int) -> list[Fraction]:
        v = [Fraction(0)] * self.size
        v[i] = Fraction(1)
        return v

    def cup(self, u, v) -> list[Fraction]:
        out = [Fraction(0)] * self.size
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b:
                    continue
                for k, c in self.table[i, j].items():
                    out[k] += a * b * c
        return out

    def integral(self, v) -> Fraction:
        return v[self.point]

    def pairing_matrix(self) -> list[list[Fraction]]:
        return [[self.integral(self.cup(self.unit(i), self.unit(j))) for j in range(self.size)] for i in range(self.size)]

    def evaluate(self, p: Poly) -> list[Fraction]:
        """Cup-product value of a polynomial in the divisor generators."""
        gens = [self.generator_names.index(n) for n in p.ring.names]
        out = [Fraction(0)] * self.size
        for m, c in p.terms.items():
            v = self.unit(0)
            for g, e in zip(gens, m):
                for _ in range(e):
                    v = self.cup(v, self.unit(self.divisors[g]))
            for k in range(self.size):
                out[k] += c * v[k]
        return out

    def generator_ring(self) -> PolyRing:
        return PolyRing(self.generator_names)

    def index(self, name: str) -> int:
        return self.names.index(name)


@dataclass
class CurveClassLattice:
    """H_2 with geometric basis (L0, F1[, F2]) and an effective basis q0, q1, ..."""

    ambient: str
    geometric_names: list[str]
    divisor_pairing: list[list[int]]  # [geometric basis][divisor]
    anticanonical_degrees: list[int]  # -K . (L0, F1, ...)
    effective: list[tuple[int, ...]]  # rows in geometric coordinates
    labels: list[str]

    @property
    def rank(self) -> int:
        return len(self.geometric_names)

    def to_geometric(self, coords) -> tuple[int, ...]:
        out = [0] * self.rank
        for b, row in zip(coords, self.effective):
            for k, x in enumerate(row):
                out[k] += b * x
        return tuple(out)

    def from_geometric(self, geom) -> tuple[int, ...]:
        inv = linalg.inverse([list(r) for r in self.effective])
        # coords * effective = geom  ->  coords = geom * inv
        coords = [sum(Fraction(g) * inv[k][i] for k, g in enumerate(geom)) for i in range(self.rank)]
        if any(c.denominator != 1 for c in coords):
            raise ValueError("class is not in the lattice")
        return tuple(int(c) for c in coords)

    def anticanonical_degree(self, coords) -> int:
        g = self.to_geometric(coords)
        return sum(a * x for a, x in zip(self.anticanonical_degrees, g))

    def pair(self, coords, divisor: int) -> int:
        """Intersection number of a class with the divisor of index ``divisor`` in the divisor list."""
        g = self.to_geometric(coords)
        return sum(x * self.divisor_pairing[k][divisor] for k, x in enumerate(g))

    def weights(self) -> list[int]:
        return [self.anticanonical_degree(tuple(int(i == j) for j in range(self.rank))) for i in range(self.rank)]

    def render(self, coords) -> str:
        return render_class(self.to_geometric(coords), self.geometric_names)


def render_class(geom, names) -> str:
    parts = []
    for n, x in zip(names, geom):
        if not x:
            continue
        mag = abs(x)
        body = n if mag == 1 else f"{mag}*{n}"
        if not parts:
            parts.append(("-" if x < 0 else "") + body)
        else:
            parts.append(("-" if x < 0 else "+") + body)
    return "".join(parts) if parts else "0"


def build_blowup_ring(d: ThreefoldDescriptor) -> tuple[CohomologyRing, CurveClassLattice]:
    r = len(d.curves)
    two = r == 2
    enames = [f"E{c.index}" for c in d.curves]
    phinames = [f"phi{c.index}" for c in d.curves]
    names = ["1"] + enames + ["H", "rho"] + phinames + ["pt"]
    degrees = [0] + [1] * (r + 1) + [2] * (r + 1) + [3]
    idx = {n: i for i, n in enumerate(names)}
    size = len(names)
    one, H, rho, pt = idx["1"], idx["H"], idx["rho"], idx["pt"]
    E = [idx[n] for n in enames]
    phi = [idx[n] for n in phinames]
    cube = AMBIENT_H_CUBED[d.ambient]

    table = {(i, j): {} for i in range(size) for j in range(size)}

    def put(i, j, vec):
        clean = {k: Fraction(v) for k, v in vec.items() if v}
        table[i, j] = clean
        table[j, i] = clean

    for i in range(size):
        put(one, i, {i: 1})
    put(H, H, {rho: cube})
    put(H, rho, {pt: 1})
    for c, e, f in zip(d.curves, E, phi):
        put(e, e, {rho: -c.degree, f: normal_degree(d.ambient, c)})
        put(e, H, {f: c.degree})
        put(e, f, {pt: -1})
    # every other product of positive-degree classes vanishes

    ring = CohomologyRing(
        names=names,
        degrees=degrees,
        table=table,
        divisors=E + [H],
        codim2=[rho] + phi,
        point=pt,
        generator_names=(["E"] if not two else enames) + ["H"],
    )
    ring.anticanonical = [Fraction(0)] * size
    ring.anticanonical[H] = Fraction(AMBIENT_INDEX[d.ambient])
    for e in E:
        ring.anticanonical[e] = Fraction(-1)
    pairing = ring.pairing_matrix()
    inv = linalg.inverse(pairing)
    # (T_i . dual_j) = delta_ij  ->  dual_j = sum_k inv[k][j] T_k
    ring.dual = [[inv[k][j] for k in range(size)] for j in range(size)]

    geometric_names = ["L0"] + [f"F{c.index}" for c in d.curves]
    # divisors in order E1[, E2], H
    dp = [[0] * (r + 1) for _ in range(r + 1)]
    dp[0][r] = 1  # L0 . H
    for j in range(r):
        dp[j + 1][j] = -1  # F_j . E_j
    acd = [AMBIENT_INDEX[d.ambient]] + [1] * r
    lattice = CurveClassLattice(
        ambient=d.ambient,
        geometric_names=geometric_names,
        divisor_pairing=dp,
        anticanonical_degrees=acd,
        effective=[tuple(c) for _, c in d.basis],
        labels=[label for label, _ in d.basis],
    )
    return ring, lattice


def anticanonical(d: ThreefoldDescriptor) -> Poly:
    """-K as a linear form in the divisor generators."""
    ring, _ = build_blowup_ring(d)
    gr = ring.generator_ring()
    out = gr.zero()
    for name, div in zip(ring.generator_names, ring.divisors):
        out = out + gr.gen(name) * ring.anticanonical[div]
    return out


class GenerationError(ValueError):
    pass


def _monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        m = [0] * nvars
        for i in combo:
            m[i] += 1
        out.append(tuple(m))
    return out


def classical_relations(ring: CohomologyRing) -> list[Poly]:
    """Minimal generators of the kernel of C[divisors] -> H^*, degree by degree.

    In each degree the new relations are the reduced echelon basis of the
    kernel modulo multiples of lower-degree relations, with columns in
    descending degrevlex order, so the output is canonical and monic.
    """
    pr = ring.generator_ring()
    relations: list[Poly] = []
    for degree in range(1, 5):
        monos = sorted(_monomials(pr.nvars, degree), key=pr.key, reverse=True)
        col = {m: i for i, m in enumerate(monos)}
        images = [ring.evaluate(Poly(pr, {m: Fraction(1)})) for m in monos]
        target = [k for k in range(ring.size) if ring.degrees[k] == degree]
        if linalg.rank([[img[k] for img in images] for k in target]) != len(target):
            raise GenerationError(f"divisors do not generate H^{2 * degree}")
        # rows: equations sum_m v_m image_m[k] = 0 for every basis class k
        eqs = [[img[k] for img in images] for k in range(ring.size) if any(img[k] for img in images)]
        kernel = linalg.nullspace(eqs, len(monos))
        span = []
        for r in relations:
            rd = r.total_degree()
            for m in _monomials(pr.nvars, degree - rd):
                prod = r.mul_term(m, Fraction(1))
                row = [Fraction(0)] * len(monos)
                for mm, c in prod.terms.items():
                    row[col[mm]] = c
                span.append(row)
        span_red, span_piv = linalg.rref(span, len(monos)) if span else ([], [])
        reduced = []
        for v in kernel:
            v = list(v)
            for row, p in zip(span_red, span_piv):
                if v[p]:
                    f = v[p]
                    v = [a - f * b for a, b in zip(v, row)]
            if any(v):
                reduced.append(v)
        new_rows, _ = linalg.rref(reduced, len(monos)) if reduced else ([], [])
        for row in new_rows:
            relations.append(Poly(pr, {m: c for m, c in zip(monos, row) if c}))
    return relations


def hodge_length(ring: CohomologyRing) -> int:
    return sum(ring.betti())
