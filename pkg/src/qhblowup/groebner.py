"""Buchberger completion, normal forms, Hilbert polynomials and
zero-dimensional solving over the rationals.

Internally monomials are re-encoded so that plain tuple comparison is the
monomial order (degree fields first, reversed negated exponents for the
reverse-lexicographic tie break).  That keeps the inner reduction loop free of
key functions.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .exactpoly import DEGREVLEX, LEX, MonomialOrder, Poly, PolyRing

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    """Raised when a completion needs more reduction steps than allowed."""


def default_budget() -> int:
    value = os.environ.get("QH_BUDGET")
    return int(value) if value else DEFAULT_BUDGET


class _Encoding:
    def __init__(self, ring: PolyRing):
        n = ring.nvars
        order = ring.order
        w = ring.weights
        if order.kind == LEX:
            blocks = None
        elif order.kind == DEGREVLEX:
            blocks = [(0, n)]
        else:
            blocks = []
            start = 0
            for size in order.blocks:
                blocks.append((start, start + size))
                start += size
        self.n = n
        self.blocks = blocks
        self.weights = w
        # position of each variable inside the encoded tuple, with its sign
        if blocks is None:
            self.pos = list(range(n))
            self.sign = [1] * n
            self.degree_fields = []
            self.length = n
        else:
            self.pos = [0] * n
            self.sign = [-1] * n
            self.degree_fields = []
            at = 0
            for lo, hi in blocks:
                self.degree_fields.append((at, lo, hi))
                at += 1
                for v in range(hi - 1, lo - 1, -1):
                    self.pos[v] = at
                    at += 1
            self.length = at

    def encode(self, m: tuple) -> tuple:
        if self.blocks is None:
            return m
        out = [0] * self.length
        w = self.weights
        for at, lo, hi in self.degree_fields:
            out[at] = sum(w[v] * m[v] for v in range(lo, hi))
        for v, e in enumerate(m):
            out[self.pos[v]] = -e
        return tuple(out)

    def decode(self, t: tuple) -> tuple:
        if self.blocks is None:
            return t
        return tuple(self.sign[v] * t[self.pos[v]] for v in range(self.n))


@dataclass
class GroebnerBasis:
    ring: PolyRing
    polys: list[Poly]
    steps: int = 0

    @property
    def order(self) -> MonomialOrder:
        return self.ring.order

    def leading_monomials(self) -> list[tuple]:
        return [p.leading_monomial() for p in self.polys]

    def is_unit(self) -> bool:
        return len(self.polys) == 1 and self.polys[0].is_constant() and bool(self.polys[0])

    def __len__(self):
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)


class _Kernel:
    """Buchberger state over encoded monomials; polys are dicts enc -> Fraction."""

    def __init__(self, ring: PolyRing, budget: int):
        self.ring = ring
        self.enc = _Encoding(ring)
        self.budget = budget
        self.steps = 0
        self.basis: list[dict] = []
        self.lead: list[tuple] = []  # decoded exponent tuples of leading monomials
        self.lead_enc: list[tuple] = []
        self.lead_mask: list[int] = []
        self.active: list[bool] = []

    def to_internal(self, p: Poly) -> dict:
        enc = self.enc.encode
        return {enc(m): c for m, c in p.terms.items()}

    def to_poly(self, d: dict) -> Poly:
        dec = self.enc.decode
        return Poly(self.ring, {dec(t): c for t, c in d.items()})

    @staticmethod
    def mask(m: tuple) -> int:
        out = 0
        for i, e in enumerate(m):
            if e:
                out |= 1 << i
        return out

    def find_reducer(self, m: tuple, mmask: int, candidates) -> int | None:
        lead = self.lead
        masks = self.lead_mask
        for i in candidates:
            if masks[i] & ~mmask:
                continue
            lm = lead[i]
            if all(a <= b for a, b in zip(lm, m)):
                return i
        return None

    def reduce(self, f: dict, candidates, full: bool = True) -> dict:
        """Normal form of ``f`` modulo the basis elements listed in ``candidates``."""
        f = dict(f)
        heap = [tuple(-x for x in t) for t in f]
        heapq.heapify(heap)
        remainder = {}
        dec = self.enc.decode
        basis = self.basis
        lead_enc = self.lead_enc
        while heap:
            neg = heapq.heappop(heap)
            t = tuple(-x for x in neg)
            c = f.pop(t, None)
            if c is None:
                continue
            # drop duplicate heap entries for t
            while heap and heap[0] == neg:
                heapq.heappop(heap)
            m = dec(t)
            i = self.find_reducer(m, self.mask(m), candidates)
            if i is None:
                remainder[t] = c
                if not full:
                    remainder.update(f)
                    return remainder
                continue
            self.steps += 1
            if self.steps > self.budget:
                raise BudgetExceeded(f"Groebner budget of {self.budget} reduction steps exceeded")
            g = basis[i]
            lt = lead_enc[i]
            shift = tuple(a - b for a, b in zip(t, lt))
            factor = c / g[lt]
            for u, d in g.items():
                if u == lt:
                    continue
                v = tuple(a + b for a, b in zip(u, shift))
                old = f.get(v)
                if old is None:
                    f[v] = -factor * d
                    heapq.heappush(heap, tuple(-x for x in v))
                else:
                    new = old - factor * d
                    if new:
                        f[v] = new
                    else:
                        del f[v]
        return remainder

    def add(self, f: dict) -> int:
        lt = max(f)
        lc = f[lt]
        if lc != 1:
            f = {t: c / lc for t, c in f.items()}
        m = self.enc.decode(lt)
        self.basis.append(f)
        self.lead.append(m)
        self.lead_enc.append(lt)
        self.lead_mask.append(self.mask(m))
        self.active.append(True)
        return len(self.basis) - 1

    def spoly(self, i: int, j: int) -> dict:
        enc = self.enc.encode
        li, lj = self.lead[i], self.lead[j]
        lcm = tuple(max(a, b) for a, b in zip(li, lj))
        lcm_e = enc(lcm)
        si = tuple(a - b for a, b in zip(lcm_e, self.lead_enc[i]))
        sj = tuple(a - b for a, b in zip(lcm_e, self.lead_enc[j]))
        out = {}
        for t, c in self.basis[i].items():
            out[tuple(a + b for a, b in zip(t, si))] = c
        for t, c in self.basis[j].items():
            v = tuple(a + b for a, b in zip(t, sj))
            new = out.get(v, 0) - c
            if new:
                out[v] = new
            else:
                out.pop(v, None)
        return out


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _coprime(a, b):
    return all(not (x and y) for x, y in zip(a, b))


def buchberger(generators, ring: PolyRing | None = None, order: MonomialOrder | None = None, budget: int | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``generators``.

    Pairs are processed by the normal strategy (smallest lcm first, ties by
    pair index) with the Gebauer-Moeller criteria.  Raises ``BudgetExceeded``
    after ``budget`` reduction steps.
    """
    gens = [g for g in generators if g]
    if ring is None:
        if not gens:
            raise ValueError("need a ring for an empty generator list")
        ring = gens[0].ring
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
    gens = [g.coerce(ring) for g in gens]
    budget = default_budget() if budget is None else budget
    k = _Kernel(ring, budget)
    if not gens:
        return GroebnerBasis(ring, [], 0)

    pairs: list[tuple] = []  # heap of (lcm_enc, i, j)
    pair_set = set()

    def update(h: int):
        """Gebauer-Moeller update after adding basis element h."""
        nonlocal pairs
        lh = k.lead[h]
        new = []
        for i in range(h):
            if not k.active[i]:
                continue
            new.append((i, _lcm(k.lead[i], lh), _coprime(k.lead[i], lh)))
        # chain criterion among new pairs
        keep = []
        for idx, (i, l, cop) in enumerate(new):
            dominated = False
            for jdx, (j, l2, cop2) in enumerate(new):
                if jdx == idx:
                    continue
                if _divides(l2, l) and (l2 != l or jdx < idx):
                    dominated = True
                    break
            if not dominated:
                keep.append((i, l, cop))
        keep = [(i, l) for i, l, cop in keep if not cop]
        # remove old pairs (a, b) whose lcm is a multiple of lh and differs from the new lcms
        filtered = []
        for entry in pairs:
            _, a, b, lab = entry
            if (a, b) not in pair_set:
                continue
            if _divides(lh, lab) and lab != _lcm(k.lead[a], lh) and lab != _lcm(k.lead[b], lh):
                pair_set.discard((a, b))
                continue
            filtered.append(entry)
        pairs = filtered
        heapq.heapify(pairs)
        for i, l in keep:
            pair_set.add((i, h))
            heapq.heappush(pairs, (k.enc.encode(l), i, h, l))
        # elements whose leading term is a multiple of lh become redundant
        for i in range(h):
            if k.active[i] and _divides(lh, k.lead[i]):
                k.active[i] = False

    # interreduce the input a little: add generators one at a time
    for g in sorted(gens, key=lambda p: ring.key(p.leading_monomial())):
        f = k.to_internal(g)
        f = k.reduce(f, [i for i in range(len(k.basis)) if k.active[i]])
        if f:
            if all(not x for x in k.enc.decode(max(f))):
                return GroebnerBasis(ring, [ring.one()], k.steps)
            h = k.add(f)
            update(h)

    while pairs:
        _, i, j, _l = heapq.heappop(pairs)
        if (i, j) not in pair_set:
            continue
        pair_set.discard((i, j))
        s = k.spoly(i, j)
        if not s:
            continue
        r = k.reduce(s, [t for t in range(len(k.basis)) if k.active[t]])
        if not r:
            continue
        if all(not x for x in k.enc.decode(max(r))):
            return GroebnerBasis(ring, [ring.one()], k.steps)
        h = k.add(r)
        update(h)

    # reduce the minimal basis
    idx = [i for i in range(len(k.basis)) if k.active[i]]
    idx.sort(key=lambda i: k.lead_enc[i])
    out = []
    for i in idx:
        others = [t for t in idx if t != i]
        lt = k.lead_enc[i]
        tail = {t: c for t, c in k.basis[i].items() if t != lt}
        red = k.reduce(tail, others)
        red[lt] = k.basis[i][lt]
        out.append(k.to_poly(red))
    out.sort(key=lambda p: ring.key(p.leading_monomial()))
    return GroebnerBasis(ring, out, k.steps)


def normal_form(p: Poly, G: GroebnerBasis) -> Poly:
    """Remainder of ``p`` on division by the basis (unique for a Groebner basis)."""
    p = p.coerce(G.ring)
    if not p or not G.polys:
        return p
    k = _Kernel(G.ring, 10**18)
    for g in G.polys:
        k.add(k.to_internal(g))
    return k.to_poly(k.reduce(k.to_internal(p), range(len(k.basis))))


def division(p: Poly, divisors: list[Poly]) -> tuple[list[Poly], Poly]:
    """Multivariate division with quotients: p = sum(q_i * g_i) + r."""
    ring = p.ring
    quotients = [ring.zero() for _ in divisors]
    rem = ring.zero()
    f = p
    leads = [(g.leading_monomial(), g.leading_coefficient()) for g in divisors]
    while f:
        m = f.leading_monomial()
        c = f.terms[m]
        for i, (lm, lc) in enumerate(leads):
            if _divides(lm, m):
                q = Poly(ring, {tuple(a - b for a, b in zip(m, lm)): c / lc})
                quotients[i] = quotients[i] + q
                f = f - q * divisors[i]
                break
        else:
            t = Poly(ring, {m: c})
            rem = rem + t
            f = f - t
    return quotients, rem


def s_polynomial(f: Poly, g: Poly) -> Poly:
    lf, lg = f.leading_monomial(), g.leading_monomial()
    lcm = _lcm(lf, lg)
    a = Poly(f.ring, {tuple(x - y for x, y in zip(lcm, lf)): 1 / f.leading_coefficient()})
    b = Poly(f.ring, {tuple(x - y for x, y in zip(lcm, lg)): 1 / g.leading_coefficient()})
    return a * f - b * g


def is_groebner(G: GroebnerBasis) -> bool:
    """Buchberger criterion: every S-polynomial reduces to zero."""
    polys = G.polys
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if normal_form(s_polynomial(polys[i], polys[j]), G):
                return False
    return True


def is_reduced(G: GroebnerBasis) -> bool:
    leads = G.leading_monomials()
    for i, p in enumerate(G.polys):
        if p.leading_coefficient() != 1:
            return False
        for m in p.terms:
            for j, lm in enumerate(leads):
                if j != i and _divides(lm, m):
                    return False
    return True


# Hilbert series of monomial ideals


def _minimalize(monos: list[tuple]) -> list[tuple]:
    monos = sorted(set(monos), key=sum)
    out = []
    for m in monos:
        if not any(_divides(o, m) for o in out):
            out.append(m)
    return out


def _padd(a: list[int], b: list[int]) -> list[int]:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _pmul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _shift(a: list[int], d: int) -> list[int]:
    return [0] * d + a


def hilbert_numerator(monos: list[tuple]) -> list[int]:
    """Numerator N(t) of the Hilbert series N(t)/(1-t)^n of S/(monos), standard grading."""
    monos = _minimalize(monos)
    if not monos:
        return [1]
    if any(sum(m) == 0 for m in monos):
        return [0]
    # pairwise coprime generators: product of (1 - t^deg)
    support = [set(i for i, e in enumerate(m) if e) for m in monos]
    seen = set()
    coprime = True
    for s in support:
        if s & seen:
            coprime = False
            break
        seen |= s
    if coprime:
        out = [1]
        for m in monos:
            out = _pmul(out, [1] + [0] * (sum(m) - 1) + [-1])
        return out
    # pivot on the variable occurring most often
    counts = {}
    for m in monos:
        for i, e in enumerate(m):
            if e:
                counts[i] = counts.get(i, 0) + 1
    # a variable shared by two minimal generators; x^min_exponent is then
    # outside the ideal, so both branches shrink
    var = max(counts, key=lambda i: (counts[i], -i))
    e = min(m[var] for m in monos if m[var])
    pivot = tuple(e if i == var else 0 for i in range(len(monos[0])))
    # HN(I) = HN(I + p) + t^deg(p) HN(I : p)
    with_pivot = monos + [pivot]
    quotient = [tuple(max(a - b, 0) for a, b in zip(m, pivot)) for m in monos]
    return _padd(hilbert_numerator(with_pivot), _shift(hilbert_numerator(quotient), e))


@dataclass
class HilbertData:
    nvars: int
    numerator: list[int]
    dimension: int
    degree: int
    hilbert_polynomial: list[Fraction] = field(default_factory=list)  # coefficients, constant term first
    hilbert_function: list[int] = field(default_factory=list)  # affine, degrees 0..len-1


def hilbert_analysis(G: GroebnerBasis, values: int = 8) -> HilbertData:
    """Affine dimension and degree from the leading-term ideal of a degree-compatible basis."""
    ring = G.ring
    if ring.order.kind != DEGREVLEX or any(w != 1 for w in ring.weights):
        raise ValueError("hilbert_analysis needs degrevlex with unit weights")
    n = ring.nvars
    if G.is_unit():
        return HilbertData(n, [0], -1, 0, [], [0] * values)
    num = hilbert_numerator(G.leading_monomials())
    # strip factors (1 - t)
    k = 0
    q = list(num)
    while len(q) > 1 or (q and q[0] == 0):
        if sum(q) != 0:
            break
        # synthetic division by (1 - t): q = (1 - t) r  ->  r_i = sum_{j<=i} q_j
        r = []
        acc = 0
        for c in q[:-1]:
            acc += c
            r.append(acc)
        q = r
        k += 1
    dim = n - k
    degree = sum(q)
    # affine Hilbert function: series num / (1 - t)^(n + 1)
    hf = []
    for s in range(values):
        total = 0
        for i, c in enumerate(num):
            if i <= s:
                total += c * _comb(s - i + n, n)
        hf.append(total)
    # Hilbert polynomial: sum_i q_i * binom(s - i + dim, dim)
    hp = [Fraction(0)] * (dim + 1)
    for i, c in enumerate(q):
        coeffs = _shifted_binom(dim, -i)
        for j, x in enumerate(coeffs):
            hp[j] += c * x
    return HilbertData(n, num, dim, degree, hp, hf)


def _comb(a: int, b: int) -> int:
    if a < b or a < 0:
        return 0
    return factorial(a) // (factorial(b) * factorial(a - b))


def _shifted_binom(k: int, shift: int) -> list[Fraction]:
    """Coefficients in s of binomial(s + shift + k, k) = prod_{i=1..k} (s + shift + i) / i."""
    poly = [Fraction(1)]
    for i in range(1, k + 1):
        a = Fraction(shift + i, i)
        b = Fraction(1, i)
        new = [Fraction(0)] * (len(poly) + 1)
        for j, c in enumerate(poly):
            new[j] += c * a
            new[j + 1] += c * b
        poly = new
    return poly


def standard_monomials(G: GroebnerBasis) -> list[tuple]:
    """All monomials outside the leading-term ideal; the ideal must be zero-dimensional."""
    ring = G.ring
    leads = G.leading_monomials()
    n = ring.nvars
    if G.is_unit():
        return []
    for v in range(n):
        if not any(lm[v] > 0 and sum(lm) == lm[v] for lm in leads):
            raise ValueError("ideal is not zero-dimensional")
    out = []
    frontier = [ring.one_monomial]
    seen = {ring.one_monomial}
    while frontier:
        nxt = []
        for m in frontier:
            if any(_divides(lm, m) for lm in leads):
                continue
            out.append(m)
            for v in range(n):
                u = tuple(e + (1 if i == v else 0) for i, e in enumerate(m))
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    out.sort(key=ring.key)
    return out


class NotZeroDimensional(ValueError):
    pass


@dataclass
class ZeroDimSolution:
    degree: int
    points: list[dict] | None  # None when the points are not all rational
    rational: bool


def solve_zero_dim(G: GroebnerBasis) -> ZeroDimSolution:
    """Points of a zero-dimensional ideal when they are rational.

    Uses a lex basis: for a triangular lex basis with rational roots the
    points are enumerated by back substitution.
    """
    ring = G.ring
    if G.is_unit():
        return ZeroDimSolution(0, [], True)
    try:
        std = standard_monomials(G)
    except ValueError:
        raise NotZeroDimensional("positive-dimensional ideal") from None
    degree = len(std)
    if degree == 1:
        point = {}
        for p in G.polys:
            lm = p.leading_monomial()
            v = next(i for i, e in enumerate(lm) if e)
            point[ring.names[v]] = -p.constant_term()
        return ZeroDimSolution(1, [point], True)
    lex_ring = ring.with_order(MonomialOrder(LEX))
    L = buchberger(G.polys, lex_ring)
    points = [{}]
    for v in reversed(range(ring.nvars)):
        name = ring.names[v]
        elems = [p for p in L.polys if p.leading_monomial()[v] > 0 and all(e == 0 for e in p.leading_monomial()[:v])]
        new_points = []
        for pt in points:
            cands = None
            for p in elems:
                s = p.specialize(pt)
                if s.variables() and s.variables() != [name]:
                    continue
                if not s.variables():
                    if s:
                        cands = []
                    continue
                roots = set(_rational_roots(s, v))
                cands = roots if cands is None else cands & roots
            if cands is None:
                return ZeroDimSolution(degree, None, False)
            for r in sorted(cands):
                q = dict(pt)
                q[name] = r
                new_points.append(q)
        points = new_points
    # keep only genuine zeros
    points = [pt for pt in points if all(not p.specialize(pt) for p in G.polys)]
    if len(points) != degree:
        return ZeroDimSolution(degree, None, False)
    return ZeroDimSolution(degree, points, True)


def _rational_roots(p: Poly, v: int) -> list[Fraction]:
    """Rational roots of a univariate polynomial in variable index ``v``."""
    coeffs = {}
    for m, c in p.terms.items():
        coeffs[m[v]] = c
    deg = max(coeffs)
    lo = min(coeffs)
    roots = []
    if lo > 0:
        roots.append(Fraction(0))
    # clear denominators
    den = 1
    for c in coeffs.values():
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = {e: int(c * den) for e, c in coeffs.items()}
    a0 = abs(ints[lo])
    an = abs(ints[deg])
    for p_ in _divisors(a0):
        for q_ in _divisors(an):
            for s in (1, -1):
                r = Fraction(s * p_, q_)
                if r not in roots and sum(c * r ** (e - lo) for e, c in ints.items()) == 0:
                    roots.append(r)
    return roots


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            if i != n // i:
                out.append(n // i)
        i += 1
    return out


def linear_eliminate(generators: list[Poly]) -> tuple[list[Poly], dict[str, Poly]]:
    """Use generators of degree one to eliminate variables, repeatedly.

    Returns the remaining nonlinear generators (in the ring of surviving
    variables) and the substitutions made.  The eliminated variable is always
    the leading variable of a linear generator, so the residual ring keeps the
    original variable order.  The affine Hilbert function is preserved.
    """
    if not generators:
        return [], {}
    ring = generators[0].ring
    gens = [g.coerce(ring) for g in generators if g]
    subs: dict[str, Poly] = {}
    while True:
        linear = [g for g in gens if g.total_degree() <= 1]
        if not linear:
            break
        if any(g.is_constant() for g in linear):
            return [ring.one()], subs
        g = min(linear, key=lambda p: (len(p), ring.key(p.leading_monomial())))
        g = g.monic()
        lm = g.leading_monomial()
        v = next(i for i, e in enumerate(lm) if e)
        name = ring.names[v]
        image = ring.gen(name) - g
        subs = {n: p.substitute({name: image}) for n, p in subs.items()}
        subs[name] = image
        new = []
        for h in gens:
            h2 = h.substitute({name: image})
            if h2:
                new.append(h2.monic())
        gens = list(dict.fromkeys(new))
    return gens, subs
