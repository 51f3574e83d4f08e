"""Exact multivariate polynomials over the rationals.

The unknowns are values of a multiplicative function at prime-power sites.
Every equation the deduction engine manipulates is a ``Poly`` required to
equal zero, so all arithmetic here is exact (``fractions.Fraction``) and
every operation returns a canonical form: no zero coefficients, monomials
ordered degree-lexicographically by symbol id.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Mapping, Optional, Union

Rational = Fraction

Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class Symbol:
    """Unknown value f(p^e) attached to one prime-power site."""

    id: int
    site: int

    def __repr__(self) -> str:
        return f"x{self.site}"

    def sort_key(self) -> tuple[int, int]:
        return (self.site, self.id)


# A monomial is a sorted tuple of symbols, repeats encode powers.
Monomial = tuple[Symbol, ...]


def _merge(a: Monomial, b: Monomial) -> Monomial:
    return tuple(sorted(a + b, key=Symbol.sort_key))


def _monomial_key(m: Monomial) -> tuple:
    return (len(m), tuple(s.site for s in m), tuple(s.id for s in m))


class Poly:
    """Immutable multivariate polynomial with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        cleaned: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                c = Fraction(coeff)
                if c:
                    cleaned[mono] = c
        object.__setattr__(self, "terms", cleaned)

    # -- constructors ------------------------------------------------

    @classmethod
    def const(cls, value: Scalar) -> "Poly":
        return cls({(): Fraction(value)})

    @classmethod
    def var(cls, symbol: Symbol) -> "Poly":
        return cls({(symbol,): Fraction(1)})

    # -- predicates --------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"not a constant: {self}")
        return self.terms.get((), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    # -- structure ---------------------------------------------------

    def symbols(self) -> set[Symbol]:
        out: set[Symbol] = set()
        for mono in self.terms:
            out.update(mono)
        return out

    def total_degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def degree_in(self, symbol: Symbol) -> int:
        return max((sum(1 for s in m if s == symbol) for m in self.terms), default=0)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: _monomial_key(kv[0]))

    def key(self) -> tuple:
        """Canonical hashable form; equal polynomials have equal keys."""
        return tuple((m, c) for m, c in self.sorted_terms())

    # -- arithmetic --------------------------------------------------

    def _coerce(self, other) -> Optional["Poly"]:
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other)
        return None

    def __add__(self, other) -> "Poly":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        terms = dict(self.terms)
        for mono, coeff in rhs.terms.items():
            terms[mono] = terms.get(mono, Fraction(0)) + coeff
        return Poly(terms)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other) -> "Poly":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs + (-self)

    def __mul__(self, other) -> "Poly":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in rhs.terms.items():
                mono = _merge(m1, m2)
                terms[mono] = terms.get(mono, Fraction(0)) + c1 * c2
        return Poly(terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise ValueError("negative power")
        result = Poly.const(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.key())

    # -- substitution and evaluation ----------------------------------

    def substitute(self, symbol: Symbol, value: Scalar) -> "Poly":
        """Replace every occurrence of ``symbol`` by a rational constant."""
        v = Fraction(value)
        terms: dict[Monomial, Fraction] = {}
        for mono, coeff in self.terms.items():
            count = 0
            rest: list[Symbol] = []
            for s in mono:
                if s == symbol:
                    count += 1
                else:
                    rest.append(s)
            c = coeff * v**count if count else coeff
            if c:
                m = tuple(rest)
                terms[m] = terms.get(m, Fraction(0)) + c
        return Poly(terms)

    def substitute_poly(self, symbol: Symbol, replacement: "Poly") -> "Poly":
        """Replace ``symbol`` by an arbitrary polynomial."""
        out = Poly()
        for mono, coeff in self.terms.items():
            count = sum(1 for s in mono if s == symbol)
            rest = tuple(s for s in mono if s != symbol)
            piece = Poly({rest: coeff})
            if count:
                piece = piece * replacement**count
            out = out + piece
        return out

    def evaluate(self, values: Mapping[Symbol, Scalar]) -> Fraction:
        total = Fraction(0)
        for mono, coeff in self.terms.items():
            acc = coeff
            for s in mono:
                acc *= Fraction(values[s])
            total += acc
        return total

    # -- shape queries used by the engine ------------------------------

    def linear_solve(self) -> Optional[tuple[Symbol, Fraction]]:
        """If the poly is c*s + d with one symbol, return (s, -d/c)."""
        syms = self.symbols()
        if len(syms) != 1:
            return None
        (s,) = syms
        if any(len(m) > 1 for m in self.terms):
            return None
        c = self.terms.get((s,))
        if not c:
            return None
        d = self.constant_term()
        return (s, -d / c)

    def solve_for(self, symbol: Symbol) -> Optional["Poly"]:
        """Solve for ``symbol`` when its coefficient is a nonzero constant.

        Requires the poly to be c*symbol + rest with ``rest`` free of the
        symbol; returns -rest/c, else None.
        """
        c = self.terms.get((symbol,))
        if not c:
            return None
        rest: dict[Monomial, Fraction] = {}
        for mono, coeff in self.terms.items():
            if mono == (symbol,):
                continue
            if symbol in mono:
                return None
            rest[mono] = -coeff / c
        return Poly(rest)

    def univariate_coeffs(self) -> Optional[tuple[Symbol, list[Fraction]]]:
        """Dense coefficients (c0..cd) when exactly one symbol occurs."""
        syms = self.symbols()
        if len(syms) != 1:
            return None
        (s,) = syms
        degree = self.degree_in(s)
        coeffs = [Fraction(0)] * (degree + 1)
        for mono, coeff in self.terms.items():
            if any(sym != s for sym in mono):
                return None
            coeffs[len(mono)] += coeff
        return s, coeffs

    def primitive(self) -> "Poly":
        """Scale to coprime integer coefficients with positive leading term."""
        if not self.terms:
            return self
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        num = 0
        for c in self.terms.values():
            num = gcd(num, abs(c.numerator * den // c.denominator))
        scale = Fraction(den, num) if num else Fraction(den)
        lead = self.sorted_terms()[-1][1]
        if lead < 0:
            scale = -scale
        return Poly({m: c * scale for m, c in self.terms.items()})

    # -- display -------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts: list[str] = []
        for mono, coeff in reversed(self.sorted_terms()):
            if mono:
                factors: list[str] = []
                i = 0
                while i < len(mono):
                    j = i
                    while j < len(mono) and mono[j] == mono[i]:
                        j += 1
                    power = j - i
                    factors.append(repr(mono[i]) + (f"^{power}" if power > 1 else ""))
                    i = j
                body = "*".join(factors)
                if coeff == 1:
                    text = body
                elif coeff == -1:
                    text = f"-{body}"
                else:
                    text = f"{coeff}*{body}"
            else:
                text = str(coeff)
            if parts and not text.startswith("-"):
                parts.append("+ " + text)
            elif parts:
                parts.append("- " + text[1:])
            else:
                parts.append(text)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Poly({self})"


ZERO = Poly()
ONE = Poly.const(1)
