"""Sparse multivariate polynomials over the rationals.

A ``PolyRing`` fixes the variable names, their priority (earlier names are
larger), positive integer weights and a monomial order.  ``Poly`` values are
immutable maps from exponent tuples to nonzero ``Fraction`` coefficients.

The text form produced by ``str(poly)`` is canonical: terms in descending
order, coefficients as ``a/b``, ``^`` for powers and ``*`` between factors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Mapping

Rational = Fraction

DEGREVLEX = "degrevlex"
LEX = "lex"
BLOCK = "block"


def rational(value) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Floats are refused: nothing in the engine may go through binary floating
    point.  Strings such as ``"5/2"`` are accepted.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError("floating point coefficients are not allowed")
    # gmpy2.mpq and friends
    return Fraction(int(value.numerator), int(value.denominator))


@dataclass(frozen=True)
class MonomialOrder:
    """Monomial order over a ring's variable list.

    ``blocks`` gives the sizes of consecutive variable blocks for the
    elimination order; each block is compared by weighted degrevlex and
    earlier blocks dominate.
    """

    kind: str = DEGREVLEX
    blocks: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in (DEGREVLEX, LEX, BLOCK):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == BLOCK and not self.blocks:
            raise ValueError("block order needs block sizes")

    def key_function(self, weights: tuple[int, ...]) -> Callable[[tuple], tuple]:
        """Return a sort key; a larger key means a larger monomial."""
        if self.kind == LEX:
            return lambda m: m
        if self.kind == DEGREVLEX:
            if all(w == 1 for w in weights):
                return lambda m: (sum(m), tuple(-e for e in reversed(m)))
            return lambda m: (
                sum(w * e for w, e in zip(weights, m)),
                tuple(-e for e in reversed(m)),
            )
        if sum(self.blocks) != len(weights):
            raise ValueError("block sizes do not cover the variables")
        bounds = []
        start = 0
        for size in self.blocks:
            bounds.append((start, start + size))
            start += size

        def key(m):
            out = []
            for lo, hi in bounds:
                part = m[lo:hi]
                out.append(sum(w * e for w, e in zip(weights[lo:hi], part)))
                out.append(tuple(-e for e in reversed(part)))
            return tuple(out)

        return key


class PolyRing:
    """Polynomial ring context: variables, weights and monomial order."""

    def __init__(
        self,
        names: Iterable[str],
        weights: Iterable[int] | None = None,
        order: MonomialOrder | None = None,
    ):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        for name in self.names:
            if not _IDENT.fullmatch(name):
                raise ValueError(f"bad variable name {name!r}")
        self.weights = tuple(weights) if weights is not None else (1,) * len(self.names)
        if len(self.weights) != len(self.names):
            raise ValueError("one weight per variable expected")
        if any((not isinstance(w, int)) or w <= 0 for w in self.weights):
            raise ValueError("weights must be positive integers")
        self.order = order or MonomialOrder()
        self.index = {name: i for i, name in enumerate(self.names)}
        self.nvars = len(self.names)
        self.key = self.order.key_function(self.weights)
        self.one_monomial = (0,) * self.nvars

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.names == other.names
            and self.weights == other.weights
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.names, self.weights, self.order))

    def __repr__(self):
        return f"PolyRing({list(self.names)}, weights={list(self.weights)}, order={self.order.kind})"

    # construction helpers

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return Poly(self, {self.one_monomial: Fraction(1)})

    def constant(self, c) -> "Poly":
        c = rational(c)
        return Poly(self, {self.one_monomial: c} if c else {})

    def gen(self, name: str) -> "Poly":
        i = self.index[name]
        m = tuple(1 if j == i else 0 for j in range(self.nvars))
        return Poly(self, {m: Fraction(1)})

    def gens(self) -> tuple["Poly", ...]:
        return tuple(self.gen(n) for n in self.names)

    def monomial(self, exponents: Mapping[str, int], coeff=1) -> "Poly":
        m = [0] * self.nvars
        for name, e in exponents.items():
            if e < 0:
                raise ValueError("negative exponent")
            m[self.index[name]] = e
        c = rational(coeff)
        return Poly(self, {tuple(m): c} if c else {})

    def from_terms(self, terms: Mapping[tuple, object]) -> "Poly":
        clean = {}
        for m, c in terms.items():
            c = rational(c)
            if c:
                if len(m) != self.nvars:
                    raise ValueError("exponent tuple has wrong length")
                clean[tuple(m)] = c
        return Poly(self, clean)

    def __call__(self, value) -> "Poly":
        if isinstance(value, Poly):
            return value.coerce(self)
        if isinstance(value, str):
            return self.parse(value)
        return self.constant(value)

    def parse(self, text: str) -> "Poly":
        return _Parser(text, self).parse()

    def with_order(self, order: MonomialOrder) -> "PolyRing":
        return PolyRing(self.names, self.weights, order)

    def merged(self, other: "PolyRing") -> "PolyRing":
        """Ring over this ring's variables followed by the new ones of ``other``."""
        if other == self:
            return self
        names = list(self.names)
        weights = list(self.weights)
        for n, w in zip(other.names, other.weights):
            if n in self.index:
                if self.weights[self.index[n]] != w:
                    raise ValueError(f"conflicting weights for {n}")
            else:
                names.append(n)
                weights.append(w)
        order = self.order
        if order.kind == BLOCK:
            order = MonomialOrder(BLOCK, order.blocks[:-1] + (order.blocks[-1] + len(names) - self.nvars,))
        return PolyRing(names, weights, order)

    # monomial helpers

    def monomial_degree(self, m: tuple) -> int:
        return sum(w * e for w, e in zip(self.weights, m))

    def monomial_str(self, m: tuple) -> str:
        parts = []
        for name, e in zip(self.names, m):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def monomial_dict(self, m: tuple) -> dict[str, int]:
        """Sparse view of an exponent tuple (zero exponents dropped)."""
        return {n: e for n, e in zip(self.names, m) if e}


class Poly:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to nonzero rationals."""

    __slots__ = ("ring", "terms", "_sorted")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._sorted = None

    # structure

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ring.one_monomial in self.terms)

    def __len__(self):
        return len(self.terms)

    def sorted_terms(self) -> list[tuple[tuple, Fraction]]:
        """Terms in descending monomial order."""
        if self._sorted is None:
            key = self.ring.key
            self._sorted = sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)
        return self._sorted

    def leading_monomial(self) -> tuple:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=self.ring.key) if self._sorted is None else self._sorted[0][0]

    def leading_coefficient(self) -> Fraction:
        return self.terms[self.leading_monomial()]

    def coefficient(self, monomial) -> Fraction:
        if isinstance(monomial, Mapping):
            m = [0] * self.ring.nvars
            for name, e in monomial.items():
                m[self.ring.index[name]] = e
            monomial = tuple(m)
        return self.terms.get(tuple(monomial), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get(self.ring.one_monomial, Fraction(0))

    def variables(self) -> list[str]:
        used = [False] * self.ring.nvars
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used[i] = True
        return [n for n, u in zip(self.ring.names, used) if u]

    def weighted_degree(self) -> int:
        if not self.terms:
            raise ValueError("degree of the zero polynomial is undefined")
        return max(self.ring.monomial_degree(m) for m in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            raise ValueError("degree of the zero polynomial is undefined")
        return max(sum(m) for m in self.terms)

    def is_homogeneous(self) -> bool:
        return len({self.ring.monomial_degree(m) for m in self.terms}) <= 1

    def homogeneous_part(self, degree: int) -> "Poly":
        rd = self.ring.monomial_degree
        return Poly(self.ring, {m: c for m, c in self.terms.items() if rd(m) == degree})

    # coercion

    def coerce(self, ring: PolyRing) -> "Poly":
        """Re-express in ``ring``; every used variable must exist there."""
        if ring == self.ring:
            return self
        pos = []
        for i, name in enumerate(self.ring.names):
            j = ring.index.get(name)
            pos.append(j)
        out = {}
        for m, c in self.terms.items():
            new = [0] * ring.nvars
            for i, e in enumerate(m):
                if e:
                    j = pos[i]
                    if j is None:
                        raise ValueError(f"variable {self.ring.names[i]} missing from target ring")
                    new[j] = e
            out[tuple(new)] = c
        return Poly(ring, out)

    def _unify(self, other):
        if isinstance(other, Poly):
            if other.ring == self.ring:
                return self, other
            ring = self.ring.merged(other.ring)
            return self.coerce(ring), other.coerce(ring)
        return self, self.ring.constant(other)

    # arithmetic

    def __neg__(self):
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __pos__(self):
        return self

    def __add__(self, other):
        a, b = self._unify(other)
        out = dict(a.terms)
        for m, c in b.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s += c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly(a.ring, out)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._unify(other)
        out = dict(a.terms)
        for m, c in b.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = -c
            else:
                s -= c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly(a.ring, out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = rational(other)
            if not c:
                return Poly(self.ring, {})
            return Poly(self.ring, {m: v * c for m, v in self.terms.items()})
        a, b = self._unify(other)
        out = {}
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                s = out.get(m)
                out[m] = c1 * c2 if s is None else s + c1 * c2
        return Poly(a.ring, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = rational(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return Poly(self.ring, {m: v / c for m, v in self.terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def mul_term(self, monomial: tuple, coeff: Fraction) -> "Poly":
        return Poly(
            self.ring,
            {tuple(x + y for x, y in zip(m, monomial)): c * coeff for m, c in self.terms.items()},
        )

    def __eq__(self, other):
        if isinstance(other, Poly):
            if other.ring.names == self.ring.names:
                return self.terms == other.terms
            a, b = self._unify(other)
            return a.terms == b.terms
        try:
            c = rational(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.terms == ({self.ring.one_monomial: c} if c else {})

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # transformations

    def specialize(self, bindings: Mapping[str, object]) -> "Poly":
        """Substitute rationals for some variables; the others survive."""
        idx = {}
        for name, value in bindings.items():
            if name in self.ring.index:
                idx[self.ring.index[name]] = rational(value)
        if not idx:
            return self
        out = {}
        for m, c in self.terms.items():
            new = list(m)
            for i, v in idx.items():
                e = m[i]
                if e:
                    c = c * v**e
                    new[i] = 0
            if not c:
                continue
            key = tuple(new)
            s = out.get(key)
            out[key] = c if s is None else s + c
        return Poly(self.ring, {m: c for m, c in out.items() if c})

    def substitute(self, images: Mapping[str, "Poly"]) -> "Poly":
        """Replace variables by polynomials (in the same ring)."""
        idx = {self.ring.index[n]: self.ring(p) for n, p in images.items() if n in self.ring.index}
        if not idx:
            return self
        result = self.ring.zero()
        cache: dict[tuple[int, int], Poly] = {}
        for m, c in self.terms.items():
            rest = list(m)
            term = None
            for i, p in idx.items():
                e = m[i]
                if e:
                    rest[i] = 0
                    if (i, e) not in cache:
                        cache[(i, e)] = p**e
                    term = cache[(i, e)] if term is None else term * cache[(i, e)]
            base = Poly(self.ring, {tuple(rest): c})
            result = result + (base if term is None else base * term)
        return result

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        return self / self.leading_coefficient()

    def primitive(self) -> "Poly":
        """Scale to integer coefficients with gcd 1 and positive leading coefficient."""
        if not self.terms:
            return self
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        num = 0
        for c in self.terms.values():
            num = gcd(num, c.numerator * (den // c.denominator))
        scale = Fraction(den, num)
        if self.leading_coefficient() < 0:
            scale = -scale
        return self * scale

    # rendering

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for m, c in self.sorted_terms():
            mono = self.ring.monomial_str(m)
            mag = abs(c)
            if mono == "1":
                body = _frac_str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{_frac_str(mag)}*{mono}"
            if not pieces:
                pieces.append(("-" if c < 0 else "") + body)
            else:
                pieces.append((" - " if c < 0 else " + ") + body)
        return "".join(pieces)

    def __repr__(self):
        return f"Poly({str(self)!r})"


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


# parsing

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


class ParseError(ValueError):
    pass


class _Parser:
    def __init__(self, text: str, ring: PolyRing):
        self.text = text
        self.ring = ring
        self.tokens = []
        for m in _TOKEN.finditer(text):
            num, ident, other = m.groups()
            if num is not None:
                self.tokens.append(("num", int(num)))
            elif ident is not None:
                self.tokens.append(("id", ident))
            elif other is not None and not other.isspace():
                if other not in "+-*/^()":
                    raise ParseError(f"unexpected character {other!r} in {text!r}")
                self.tokens.append(("op", other))
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self) -> Poly:
        if not self.tokens:
            raise ParseError("empty polynomial")
        p = self.expr()
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing input in {self.text!r}")
        return p

    def expr(self) -> Poly:
        sign = 1
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        acc = self.term() * sign
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                acc = acc + t if val == "+" else acc - t
            else:
                return acc

    def term(self) -> Poly:
        acc = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = acc * self.factor()
            elif kind == "op" and val == "/":
                self.take()
                d = self.factor()
                if not d.is_constant() or d.is_zero():
                    raise ParseError("division only by nonzero constants")
                acc = acc / d.constant_term()
            elif kind in ("id", "num") or (kind == "op" and val == "("):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> Poly:
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ParseError("exponent must be a nonnegative integer")
            return base**val
        return base

    def atom(self) -> Poly:
        kind, val = self.take()
        if kind == "num":
            return self.ring.constant(val)
        if kind == "id":
            if val not in self.ring.index:
                raise ParseError(f"unknown variable {val!r}")
            return self.ring.gen(val)
        if kind == "op" and val == "(":
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError("missing ')'")
            return inner
        raise ParseError(f"unexpected token {val!r} in {self.text!r}")
