"""
Exact arithmetic in s = q^(1/2) and v = t^(1/2).

Exponents are stored doubled: the key (a, b) of a LaurentPoly is the monomial
s^a v^b, i.e. q^(a/2) t^(b/2). Coefficients are Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterator, Mapping

import sympy
from sympy import QQ, Poly

Rational = Fraction
Key = tuple[int, int]

_GENS = sympy.symbols("s v")


class DivisionByZero(ZeroDivisionError):
    pass


class ZeroDenominator(ValueError):
    pass


class NonMonomialLead(ZeroDenominator):
    """The lowest s-coefficient of a denominator is a v-polynomial with no Laurent inverse"""


class NotPolynomial(ValueError):
    def __init__(self, message: str, remainder: "LaurentPoly"):
        super().__init__(message)
        self.remainder = remainder


class ExpansionMode(Enum):
    """|q| < 1 expands in ascending powers of s, |q| > 1 in ascending powers of 1/s"""

    Q = "q"
    Q_INVERSE = "qinv"


class Substitution(Enum):
    S_INVERSE = "s->1/s"
    V_NEGATE = "v->-v"
    ADAMS = "(s,v)->(s^d,v^d)"


class LaurentPoly:
    """
    A sparse Laurent polynomial in s and v with rational coefficients.

    >>> qnum(1) * qnum(1) == LaurentPoly({(-2, 0): 1, (0, 0): -2, (2, 0): 1})
    True
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Key, Fraction | int] | None = None):
        clean: dict[Key, Fraction] = {}
        for (a, b), coeff in (terms or {}).items():
            c = Fraction(coeff)
            if c != 0:
                clean[(int(a), int(b))] = c
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def monomial(cls, a: int, b: int = 0, coeff: Fraction | int = 1) -> LaurentPoly:
        return cls({(a, b): coeff})

    @classmethod
    def constant(cls, coeff: Fraction | int) -> LaurentPoly:
        return cls({(0, 0): coeff})

    @staticmethod
    def coerce(other: LaurentPoly | Fraction | int) -> LaurentPoly:
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.constant(other)
        raise TypeError(f"Cannot coerce {other!r} to a LaurentPoly")

    # Accessors
    def items(self) -> list[tuple[Key, Fraction]]:
        return sorted(self._terms.items())

    def keys(self) -> list[Key]:
        return sorted(self._terms)

    def coefficient(self, a: int, b: int = 0) -> Fraction:
        return self._terms.get((a, b), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Key]:
        return iter(self.keys())

    def min_exponents(self) -> Key:
        return (min(a for a, _ in self._terms), min(b for _, b in self._terms))

    def leading_key(self) -> Key:
        return max(self._terms)

    def s_slices(self) -> dict[int, LaurentPoly]:
        """Split into coefficients of powers of s, each a polynomial in v only"""
        slices: dict[int, dict[Key, Fraction]] = {}
        for (a, b), c in self._terms.items():
            slices.setdefault(a, {})[(0, b)] = c
        return {a: LaurentPoly(t) for a, t in sorted(slices.items())}

    def v_slices(self) -> dict[int, dict[int, Fraction]]:
        """Split into {v-exponent: {s-exponent: coeff}}"""
        slices: dict[int, dict[int, Fraction]] = {}
        for (a, b), c in sorted(self._terms.items()):
            slices.setdefault(b, {})[a] = c
        return slices

    # Ring operations
    def __add__(self, other: LaurentPoly | Fraction | int) -> LaurentPoly:
        if not isinstance(other, (LaurentPoly, int, Fraction)):
            return NotImplemented
        other = LaurentPoly.coerce(other)
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms.get(k, 0) + c
        return LaurentPoly(terms)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: LaurentPoly | Fraction | int) -> LaurentPoly:
        if not isinstance(other, (LaurentPoly, int, Fraction)):
            return NotImplemented
        return self + (-LaurentPoly.coerce(other))

    def __rsub__(self, other: Fraction | int) -> LaurentPoly:
        return LaurentPoly.coerce(other) - self

    def __mul__(self, other: LaurentPoly | Fraction | int) -> LaurentPoly:
        if isinstance(other, (int, Fraction)):
            return LaurentPoly({k: c * other for k, c in self._terms.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        terms: dict[Key, Fraction] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                key = (a1 + a2, b1 + b2)
                terms[key] = terms.get(key, 0) + c1 * c2
        return LaurentPoly(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> LaurentPoly:
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("Only monomials can be raised to a negative power")
            ((a, b), c), = self._terms.items()
            return LaurentPoly({(-a, -b): 1 / c}) ** (-n)
        result = LaurentPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # Exponent maps
    def shift(self, da: int, db: int = 0) -> LaurentPoly:
        return LaurentPoly({(a + da, b + db): c for (a, b), c in self._terms.items()})

    def invert_s(self) -> LaurentPoly:
        return LaurentPoly({(-a, b): c for (a, b), c in self._terms.items()})

    def negate_v(self) -> LaurentPoly:
        return LaurentPoly(
            {(a, b): (-c if b % 2 else c) for (a, b), c in self._terms.items()}
        )

    def adams(self, d: int) -> LaurentPoly:
        if d < 1:
            raise ValueError(f"Adams degree must be positive, got {d}")
        return LaurentPoly({(d * a, d * b): c for (a, b), c in self._terms.items()})

    # sympy bridge, only valid for nonnegative exponents
    def to_poly(self) -> Poly:
        rep = {k: sympy.Rational(c.numerator, c.denominator) for k, c in self._terms.items()}
        return Poly.from_dict(rep or {(0, 0): 0}, *_GENS, domain=QQ)

    @classmethod
    def from_poly(cls, poly: Poly) -> LaurentPoly:
        if poly.is_zero:
            return cls()
        return cls(
            {
                (int(m[0]), int(m[1])): Fraction(int(c.p), int(c.q))
                for m, c in poly.terms()
            }
        )

    # Text form
    def serialize(self) -> str:
        if not self._terms:
            return "0"
        return " ".join(f"{a},{b}:{_format_fraction(c)}" for (a, b), c in self.items())

    @classmethod
    def parse(cls, text: str) -> LaurentPoly:
        text = text.strip()
        if text == "0":
            return cls()
        terms: dict[Key, Fraction] = {}
        for token in text.split():
            exponents, _, coeff = token.partition(":")
            if not coeff:
                raise ValueError(f"Malformed term '{token}', expected 'a,b:coeff'")
            a, b = (int(x) for x in exponents.split(","))
            if (a, b) in terms:
                raise ValueError(f"Repeated exponent {a},{b} in '{text}'")
            terms[(a, b)] = Fraction(coeff)
        return cls(terms)

    def fmt(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (a, b), c in sorted(self._terms.items(), reverse=True):
            mono = "*".join(
                x for x in (_power("s", a), _power("v", b)) if x
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"LaurentPoly('{self.fmt()}')"


def _power(var: str, exp: int) -> str:
    if exp == 0:
        return ""
    return var if exp == 1 else f"{var}^{exp}"


def _format_fraction(c: Fraction) -> str:
    sign = "+" if c > 0 else "-"
    c = abs(c)
    return f"{sign}{c.numerator}" if c.denominator == 1 else f"{sign}{c.numerator}/{c.denominator}"


def qnum(n: int) -> LaurentPoly:
    """The q-number [n] = q^(-n/2) - q^(n/2) = s^-n - s^n"""
    return LaurentPoly({(-n, 0): 1, (n, 0): -1})


def vnum(n: int) -> LaurentPoly:
    """t^(-n/2) - t^(n/2) = v^-n - v^n"""
    return LaurentPoly({(0, -n): 1, (0, n): -1})


S = LaurentPoly.monomial(1, 0)
V = LaurentPoly.monomial(0, 1)


def _canonical(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if den.is_zero():
        raise DivisionByZero("Denominator is zero")
    if num.is_zero():
        return LaurentPoly(), LaurentPoly.constant(1)

    # Clear Laurent units so both sides are polynomials
    na, nb = num.min_exponents()
    da, db = den.min_exponents()
    num_poly = num.shift(-na, -nb)
    den_poly = den.shift(-da, -db)
    shift = (na - da, nb - db)

    if len(den_poly) > 1:
        p, q = num_poly.to_poly().cancel(den_poly.to_poly(), include=True)
        num_poly, den_poly = LaurentPoly.from_poly(p), LaurentPoly.from_poly(q)
        # cancel leaves a coprime pair, but the denominator may still carry a monomial
        qa, qb = den_poly.min_exponents()
        den_poly = den_poly.shift(-qa, -qb)
        shift = (shift[0] - qa, shift[1] - qb)

    # Scale the denominator to primitive integers with positive leading coefficient
    coeffs = [c for _, c in den_poly.items()]
    common_den = reduce(lcm, (c.denominator for c in coeffs), 1)
    common_num = reduce(gcd, (c.numerator for c in coeffs), 0)
    factor = Fraction(common_den, common_num)
    if den_poly.coefficient(*den_poly.leading_key()) < 0:
        factor = -factor

    return (num_poly * factor).shift(*shift), den_poly * factor


class RatFunc:
    """
    A rational function num/den of Laurent polynomials in canonical form.

    Equality is structural: two RatFuncs are equal iff they are the same function.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(
        self,
        num: LaurentPoly | Fraction | int = 0,
        den: LaurentPoly | Fraction | int = 1,
    ):
        self.num, self.den = _canonical(LaurentPoly.coerce(num), LaurentPoly.coerce(den))
        self._hash: int | None = None

    @classmethod
    def _trusted(cls, num: LaurentPoly, den: LaurentPoly) -> RatFunc:
        # For results already known to be canonical
        obj = cls.__new__(cls)
        obj.num, obj.den, obj._hash = num, den, None
        return obj

    @staticmethod
    def coerce(other: RatFunc | LaurentPoly | Fraction | int) -> RatFunc:
        if isinstance(other, RatFunc):
            return other
        return RatFunc(other)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_laurent(self) -> bool:
        return len(self.den) == 1

    def __add__(self, other: RatFunc | LaurentPoly | Fraction | int) -> RatFunc:
        if not isinstance(other, (RatFunc, LaurentPoly, int, Fraction)):
            return NotImplemented
        other = RatFunc.coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> RatFunc:
        return RatFunc._trusted(-self.num, self.den)

    def __sub__(self, other: RatFunc | LaurentPoly | Fraction | int) -> RatFunc:
        if not isinstance(other, (RatFunc, LaurentPoly, int, Fraction)):
            return NotImplemented
        return self + (-RatFunc.coerce(other))

    def __rsub__(self, other: LaurentPoly | Fraction | int) -> RatFunc:
        return RatFunc.coerce(other) - self

    def __mul__(self, other: RatFunc | LaurentPoly | Fraction | int) -> RatFunc:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return RatFunc()
            return RatFunc._trusted(self.num * other, self.den)
        if not isinstance(other, (RatFunc, LaurentPoly)):
            return NotImplemented
        other = RatFunc.coerce(other)
        if self.is_zero() or other.is_zero():
            return RatFunc()
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: RatFunc | LaurentPoly | Fraction | int) -> RatFunc:
        if not isinstance(other, (RatFunc, LaurentPoly, int, Fraction)):
            return NotImplemented
        other = RatFunc.coerce(other)
        if other.is_zero():
            raise DivisionByZero(f"Division of {self} by zero")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: LaurentPoly | Fraction | int) -> RatFunc:
        return RatFunc.coerce(other) / self

    def __pow__(self, n: int) -> RatFunc:
        if n < 0:
            return RatFunc(1) / (self ** (-n))
        return RatFunc(self.num**n, self.den**n)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (LaurentPoly, int, Fraction)):
            other = RatFunc(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def invert_s(self) -> RatFunc:
        return RatFunc(self.num.invert_s(), self.den.invert_s())

    def negate_v(self) -> RatFunc:
        return RatFunc(self.num.negate_v(), self.den.negate_v())

    def adams(self, d: int) -> RatFunc:
        if d == 1:
            return self
        return RatFunc(self.num.adams(d), self.den.adams(d))

    def serialize(self) -> str:
        if self.den == 1:
            return self.num.serialize()
        return f"{self.num.serialize()} / {self.den.serialize()}"

    @classmethod
    def parse(cls, text: str) -> RatFunc:
        num, sep, den = text.partition(" / ")
        if not sep:
            return cls(LaurentPoly.parse(num))
        return cls(LaurentPoly.parse(num), LaurentPoly.parse(den))

    def __repr__(self) -> str:
        if self.den == 1:
            return f"RatFunc('{self.num.fmt()}')"
        return f"RatFunc('({self.num.fmt()}) / ({self.den.fmt()})')"


ZERO = RatFunc()
ONE = RatFunc(1)


def substitute(f: RatFunc, substitution: Substitution, d: int = 1) -> RatFunc:
    match substitution:
        case Substitution.S_INVERSE:
            return f.invert_s()
        case Substitution.V_NEGATE:
            return f.negate_v()
        case Substitution.ADAMS:
            return f.adams(d)


def as_laurent(f: RatFunc) -> LaurentPoly:
    """
    Return f as a Laurent polynomial.
    :raises NotPolynomial: if the denominator does not divide the numerator
    """
    if f.is_laurent():
        ((a, b), c), = f.den.items()
        return f.num * LaurentPoly({(-a, -b): 1 / c})
    na, nb = f.num.min_exponents()
    remainder = f.num.shift(-na, -nb).to_poly().rem(f.den.to_poly())
    raise NotPolynomial(
        f"{f} is not a Laurent polynomial",
        LaurentPoly.from_poly(remainder).shift(na, nb),
    )


@dataclass(frozen=True)
class QSeries:
    """
    A truncated series sum_i coeffs[i] * u^(offset + i), exact for u-exponents up to
    offset + order. u = s in Q mode and u = 1/s in Q_INVERSE mode; coefficients are
    polynomials in v only.
    """

    offset: int
    coeffs: tuple[LaurentPoly, ...]
    order: int
    mode: ExpansionMode = ExpansionMode.Q

    def __post_init__(self):
        if len(self.coeffs) != self.order + 1:
            raise ValueError(
                f"QSeries needs {self.order + 1} coefficients, got {len(self.coeffs)}"
            )

    @property
    def precision(self) -> int:
        return self.offset + self.order

    @classmethod
    def zero(cls, order: int, mode: ExpansionMode = ExpansionMode.Q) -> QSeries:
        return cls(0, (LaurentPoly(),) * (order + 1), order, mode)

    @classmethod
    def from_laurent(
        cls, poly: LaurentPoly, precision: int, mode: ExpansionMode = ExpansionMode.Q
    ) -> QSeries:
        """Truncate a Laurent polynomial at u-exponent precision"""
        if mode is ExpansionMode.Q_INVERSE:
            poly = poly.invert_s()
        slices = poly.s_slices()
        offset = min(slices) if slices else 0
        if offset > precision:
            offset = precision
        order = precision - offset
        coeffs = tuple(slices.get(offset + i, LaurentPoly()) for i in range(order + 1))
        return cls(offset, coeffs, order, mode)

    def u_terms(self) -> dict[int, LaurentPoly]:
        return {self.offset + i: c for i, c in enumerate(self.coeffs) if c}

    def terms(self) -> dict[Key, Fraction]:
        """{(s-exponent, v-exponent): coeff} in actual powers of s"""
        sign = 1 if self.mode is ExpansionMode.Q else -1
        out: dict[Key, Fraction] = {}
        for u, coeff in self.u_terms().items():
            for (_, b), c in coeff.items():
                out[(sign * u, b)] = c
        return out

    def _check(self, other: QSeries):
        if self.mode is not other.mode:
            raise ValueError("Cannot combine series expanded in different modes")

    def __add__(self, other: QSeries) -> QSeries:
        self._check(other)
        offset = min(self.offset, other.offset)
        precision = min(self.precision, other.precision)
        mine, theirs = self.u_terms(), other.u_terms()
        coeffs = tuple(
            mine.get(u, LaurentPoly()) + theirs.get(u, LaurentPoly())
            for u in range(offset, precision + 1)
        )
        return QSeries(offset, coeffs, precision - offset, self.mode)

    def __mul__(self, other: QSeries) -> QSeries:
        self._check(other)
        offset = self.offset + other.offset
        order = min(self.order, other.order)
        coeffs = []
        for i in range(order + 1):
            acc = LaurentPoly()
            for j in range(i + 1):
                acc = acc + self.coeffs[j] * other.coeffs[i - j]
            coeffs.append(acc)
        return QSeries(offset, tuple(coeffs), order, self.mode)

    def difference(self, other: QSeries) -> dict[Key, Fraction]:
        """Nonzero entries of self - other inside the common window of exactness"""
        self._check(other)
        window = min(self.precision, other.precision)
        sign = 1 if self.mode is ExpansionMode.Q else -1
        mine, theirs = self.u_terms(), other.u_terms()
        out: dict[Key, Fraction] = {}
        for u in sorted(set(mine) | set(theirs)):
            if u > window:
                continue
            delta = mine.get(u, LaurentPoly()) - theirs.get(u, LaurentPoly())
            for (_, b), c in delta.items():
                out[(sign * u, b)] = c
        return out

    def flip_mode(self) -> QSeries:
        """The substitution s -> 1/s applied to the series"""
        mode = (
            ExpansionMode.Q_INVERSE
            if self.mode is ExpansionMode.Q
            else ExpansionMode.Q
        )
        return QSeries(self.offset, self.coeffs, self.order, mode)


def expand_qseries(
    f: RatFunc, order: int, mode: ExpansionMode = ExpansionMode.Q
) -> QSeries:
    """
    Expand f as a series in s (|q| < 1) or in 1/s (|q| > 1).

    >>> expand_qseries(RatFunc(1, qnum(1)), 3).terms()
    {(1, 0): Fraction(1, 1), (3, 0): Fraction(1, 1)}
    """
    if order < 0:
        raise ValueError(f"Series order must be nonnegative, got {order}")
    if mode is ExpansionMode.Q_INVERSE:
        f = f.invert_s()
    if f.is_zero():
        return QSeries.zero(order, mode)

    num, den = f.num.s_slices(), f.den.s_slices()
    d0 = min(den)
    lead = den[d0]
    if len(lead) != 1:
        raise NonMonomialLead(
            f"Lowest s-coefficient {lead.fmt()} of the denominator is not a monomial in v, so it has no Laurent inverse"
        )
    ((_, lb), lc), = lead.items()
    inverse_lead = LaurentPoly({(0, -lb): 1 / lc})
    n0 = min(num)

    coeffs: list[LaurentPoly] = []
    for i in range(order + 1):
        acc = num.get(n0 + i, LaurentPoly())
        for j in range(1, i + 1):
            dj = den.get(d0 + j)
            if dj is not None:
                acc = acc - dj * coeffs[i - j]
        coeffs.append(acc * inverse_lead)
    return QSeries(n0 - d0, tuple(coeffs), order, mode)
