"""Gromov-Witten invariant symbols and their reduction by the Divisor and
Grading axioms.

A symbol is a curve class (coordinates over the effective basis) together
with a sorted tuple of cohomology-basis indices of complex codimension at
least two.  Invariants whose insertions fail ``sum(codim) == -K.beta + n``
vanish; divisor insertions are peeled off with factor ``beta . D``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .cohomology import CohomologyRing, CurveClassLattice, render_class

DEFAULT_CLASS_BOUND = 6


@dataclass(frozen=True, order=True)
class InvariantSymbol:
    klass: tuple[int, ...]  # effective-basis coordinates
    insertions: tuple[int, ...]  # sorted basis indices

    def render(self, ring: CohomologyRing, lattice: CurveClassLattice) -> str:
        cls = render_class(lattice.to_geometric(self.klass), lattice.geometric_names)
        ins = ", ".join(ring.names[i] for i in self.insertions)
        return f"I({cls} | {ins})"


class SymbolError(ValueError):
    pass


def enumerate_classes(lattice: CurveClassLattice, bound: int) -> list[tuple[int, ...]]:
    """Nonzero nonnegative combinations of the effective basis with -K.beta <= bound."""
    if bound < 1:
        return []
    w = lattice.weights()
    if any(x <= 0 for x in w):
        raise ValueError("effective basis has a class of nonpositive anticanonical degree")
    ranges = [range(bound // x + 1) for x in w]
    out = []
    for coords in product(*ranges):
        deg = sum(a * b for a, b in zip(coords, w))
        if 1 <= deg <= bound:
            out.append(coords)
    out.sort(key=lambda c: (sum(c), c))
    return out


def normalize(ring: CohomologyRing, lattice: CurveClassLattice, klass, insertions) -> tuple[Fraction, InvariantSymbol | None]:
    """Reduce I_beta(insertions) to ``coefficient * symbol``.

    Returns ``(0, None)`` when the invariant vanishes.  ``klass`` must be
    nonzero; insertions are cohomology-basis indices.
    """
    klass = tuple(klass)
    if not any(klass):
        raise SymbolError("classical (beta = 0) invariants are not symbols")
    coeff = Fraction(1)
    rest = []
    for i in insertions:
        if not 0 <= i < ring.size:
            raise SymbolError(f"insertion {i!r} is not a basis class")
        deg = ring.degrees[i]
        if deg == 0:
            return Fraction(0), None
        if deg == 1:
            coeff *= lattice.pair(klass, ring.divisors.index(i))
            if not coeff:
                return Fraction(0), None
        else:
            rest.append(i)
    if sum(ring.degrees[i] for i in rest) != lattice.anticanonical_degree(klass) + len(rest):
        return Fraction(0), None
    return coeff, InvariantSymbol(klass, tuple(sorted(rest)))


def symbol_sort_key(sym: InvariantSymbol, ring: CohomologyRing, lattice: CurveClassLattice):
    return (
        lattice.anticanonical_degree(sym.klass),
        sym.klass,
        len(sym.insertions),
        tuple(ring.degrees[i] for i in sym.insertions),
        sym.insertions,
    )


class EssentialSet:
    """Ordered unknowns x1..xN, each standing for one invariant symbol."""

    def __init__(self, symbols, ring: CohomologyRing, lattice: CurveClassLattice):
        self.ring = ring
        self.lattice = lattice
        self.symbols = sorted(set(symbols), key=lambda s: symbol_sort_key(s, ring, lattice))
        self.names = [f"x{i + 1}" for i in range(len(self.symbols))]
        self.index = {s: n for s, n in zip(self.symbols, self.names)}
        self.by_name = dict(zip(self.names, self.symbols))

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, sym):
        return sym in self.index

    def variable(self, sym: InvariantSymbol) -> str:
        return self.index[sym]

    def render(self, name_or_sym) -> str:
        sym = self.by_name[name_or_sym] if isinstance(name_or_sym, str) else name_or_sym
        return sym.render(self.ring, self.lattice)

    def table(self) -> list[tuple[str, str]]:
        return [(n, self.render(s)) for n, s in zip(self.names, self.symbols)]


# symbol syntax:  I(<class expr> | <insertion>, ...)

_SYMBOL = re.compile(r"^\s*I\s*\(\s*(?P<cls>[^|]+?)\s*\|\s*(?P<ins>[^)]*?)\s*\)\s*$")
_CLASS_TERM = re.compile(r"\s*([+-]?)\s*(?:(\d+)\s*\*?\s*)?([A-Za-z][A-Za-z0-9]*)\s*")


def parse_class(text: str, names: list[str]) -> tuple[int, ...]:
    """Parse an integer combination such as ``L0 - 2*F1`` over ``names``."""
    coords = [0] * len(names)
    pos = 0
    text = text.strip()
    if not text:
        raise SymbolError("empty class expression")
    first = True
    while pos < len(text):
        m = _CLASS_TERM.match(text, pos)
        if not m or m.end() == pos:
            raise SymbolError(f"bad class expression {text!r}")
        sign, mult, name = m.groups()
        if not sign and not first:
            raise SymbolError(f"missing operator in class expression {text!r}")
        if name not in names:
            raise SymbolError(f"unknown class {name!r} (expected one of {', '.join(names)})")
        k = int(mult) if mult else 1
        coords[names.index(name)] += -k if sign == "-" else k
        pos = m.end()
        first = False
    return tuple(coords)


def parse_symbol(text: str, geometric_names: list[str]) -> tuple[tuple[int, ...], tuple[str, ...]]:
    """Split ``I(L0-2*F1 | rho, rho)`` into geometric coordinates and insertion names."""
    m = _SYMBOL.match(text)
    if not m:
        raise SymbolError(f"bad invariant syntax {text!r}")
    klass = parse_class(m.group("cls"), geometric_names)
    ins = tuple(s.strip() for s in m.group("ins").split(",") if s.strip())
    if not ins:
        raise SymbolError("an invariant needs at least one insertion")
    return klass, ins


def resolve(ring: CohomologyRing, lattice: CurveClassLattice, geom_class, insertion_names) -> tuple[Fraction, InvariantSymbol | None]:
    """Normalize a symbol given in geometric coordinates and insertion names."""
    try:
        klass = lattice.from_geometric(geom_class)
    except (ValueError, ZeroDivisionError) as exc:
        raise SymbolError(str(exc)) from None
    if any(c < 0 for c in klass):
        raise SymbolError(
            f"class {render_class(geom_class, lattice.geometric_names)} is not a nonnegative combination of the effective basis"
        )
    idx = []
    for n in insertion_names:
        if n not in ring.names:
            raise SymbolError(f"insertion {n!r} is not a basis class")
        idx.append(ring.names.index(n))
    return normalize(ring, lattice, klass, idx)
