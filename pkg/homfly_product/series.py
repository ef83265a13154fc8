"""
Truncated symmetric function series in the power sums p_mu of L sets of variables.

PSeries keeps the normalised coefficient Z_mu of every power sum, the series being
sum_mu Z_mu / z_mu * p_mu. The raw monomial coefficient is Z_mu / z_mu.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import factorial, prod
from typing import Callable, Iterable, Mapping

from homfly_product.algebra import ONE, ZERO, LaurentPoly, RatFunc, qnum
from homfly_product.partitions import (
    Partition,
    PartitionVector,
    enumerate_partitions,
    vector_character,
    vectors_of_shape,
    z_order,
)

logger = logging.getLogger(__name__)

Scalar = RatFunc | Fraction | int


class BadConstantTerm(ValueError):
    pass


class ComponentMismatch(ValueError):
    pass


class Direction(Enum):
    """The change of variables y = x * q^rho, read in either direction"""

    Y_TO_X = "y_to_x"
    X_TO_Y = "x_to_y"


def _clean(coeffs: Mapping[PartitionVector, Scalar]) -> dict[PartitionVector, RatFunc]:
    out = {}
    for key, c in coeffs.items():
        c = RatFunc.coerce(c)
        if not c.is_zero():
            out[key] = c
    return out


def _check_keys(components: int, degree: int, keys: Iterable[PartitionVector]):
    for key in keys:
        if key.components != components:
            raise ComponentMismatch(
                f"Key {key} has {key.components} components, expected {components}"
            )
        if key.size > degree:
            raise ValueError(f"Key {key} exceeds the truncation degree {degree}")
        if key.size == 0:
            raise ValueError("The empty key is the constant term, store it separately")


@dataclass(frozen=True, eq=False)
class PSeries:
    components: int
    degree: int
    coeffs: Mapping[PartitionVector, RatFunc] = field(default_factory=dict)
    constant: RatFunc = ZERO
    truncated: bool = False

    def __post_init__(self):
        if self.components < 1:
            raise ValueError(f"A series needs at least one component, got {self.components}")
        if self.degree < 0:
            raise ValueError(f"Truncation degree must be nonnegative, got {self.degree}")
        coeffs = _clean(self.coeffs)
        _check_keys(self.components, self.degree, coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "constant", RatFunc.coerce(self.constant))

    @classmethod
    def one(cls, components: int, degree: int) -> PSeries:
        return cls(components, degree, {}, ONE)

    @classmethod
    def from_raw(
        cls,
        components: int,
        degree: int,
        raw: Mapping[PartitionVector, Scalar],
        constant: Scalar = 0,
    ) -> PSeries:
        return cls(
            components,
            degree,
            {key: RatFunc.coerce(c) * z_order(key) for key, c in raw.items()},
            RatFunc.coerce(constant),
        )

    def coefficient(self, key: PartitionVector) -> RatFunc:
        return self.coeffs.get(key, ZERO)

    def raw(self, key: PartitionVector) -> RatFunc:
        return self.coefficient(key) * Fraction(1, z_order(key))

    def raw_coeffs(self) -> dict[PartitionVector, RatFunc]:
        return {key: self.raw(key) for key in self.coeffs}

    def items(self) -> list[tuple[PartitionVector, RatFunc]]:
        return sorted(self.coeffs.items(), key=lambda kv: kv[0].sort_key())

    def keys(self) -> list[PartitionVector]:
        return [key for key, _ in self.items()]

    def _check(self, other: PSeries):
        if self.components != other.components:
            raise ComponentMismatch(
                f"Cannot combine series with {self.components} and {other.components} components"
            )

    def __add__(self, other: PSeries) -> PSeries:
        self._check(other)
        degree = min(self.degree, other.degree)
        coeffs: dict[PartitionVector, RatFunc] = {}
        for source in (self, other):
            for key, c in source.coeffs.items():
                if key.size <= degree:
                    coeffs[key] = coeffs.get(key, ZERO) + c
        return PSeries(
            self.components,
            degree,
            coeffs,
            self.constant + other.constant,
            self.truncated or other.truncated,
        )

    def __neg__(self) -> PSeries:
        return self.scale(-1)

    def __sub__(self, other: PSeries) -> PSeries:
        return self + (-other)

    def scale(self, factor: Scalar) -> PSeries:
        return PSeries(
            self.components,
            self.degree,
            {key: c * factor for key, c in self.coeffs.items()},
            self.constant * factor,
            self.truncated,
        )

    def __mul__(self, other: PSeries | Scalar) -> PSeries:
        if not isinstance(other, PSeries):
            return self.scale(other)
        self._check(other)
        degree = min(self.degree, other.degree)

        # p_mu * p_nu = p_(mu u nu) on raw coefficients
        mine, theirs = self.raw_coeffs(), other.raw_coeffs()
        raw: dict[PartitionVector, RatFunc] = defaultdict(lambda: ZERO)
        for key, c in mine.items():
            if key.size <= degree:
                raw[key] = raw[key] + c * other.constant
        for key, c in theirs.items():
            if key.size <= degree:
                raw[key] = raw[key] + c * self.constant
        for k1, c1 in mine.items():
            for k2, c2 in theirs.items():
                if k1.size + k2.size <= degree:
                    joined = k1.union(k2)
                    raw[joined] = raw[joined] + c1 * c2

        result = PSeries.from_raw(
            self.components, degree, raw, self.constant * other.constant
        )
        if self.truncated or other.truncated:
            return PSeries(result.components, degree, result.coeffs, result.constant, True)
        return result

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PSeries):
            return NotImplemented
        return (
            self.components == other.components
            and self.degree == other.degree
            and self.constant == other.constant
            and self.coeffs == other.coeffs
        )

    def map_coefficients(self, f: Callable[[PartitionVector, RatFunc], RatFunc]) -> PSeries:
        """Apply f(key, coeff) to every key; the constant term is left alone"""
        return PSeries(
            self.components,
            self.degree,
            {key: f(key, c) for key, c in self.coeffs.items()},
            self.constant,
            self.truncated,
        )

    def truncate(self, degree: int) -> PSeries:
        return PSeries(
            self.components,
            degree,
            {key: c for key, c in self.coeffs.items() if key.size <= degree},
            self.constant,
            self.truncated,
        )

    def __repr__(self) -> str:
        terms = ", ".join(f"{key}: {c!r}" for key, c in self.items())
        return f"PSeries(L={self.components}, D={self.degree}, constant={self.constant!r}, {{{terms}}})"


@dataclass(frozen=True, eq=False)
class SchurCoeffs:
    """sum_A coeffs[A] * s_A, plus the coefficient of s_(empty)"""

    components: int
    degree: int
    coeffs: Mapping[PartitionVector, RatFunc] = field(default_factory=dict)
    constant: RatFunc = ZERO

    def __post_init__(self):
        coeffs = _clean(self.coeffs)
        _check_keys(self.components, self.degree, coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "constant", RatFunc.coerce(self.constant))

    def coefficient(self, key: PartitionVector) -> RatFunc:
        return self.coeffs.get(key, ZERO)

    def items(self) -> list[tuple[PartitionVector, RatFunc]]:
        return sorted(self.coeffs.items(), key=lambda kv: kv[0].sort_key())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SchurCoeffs):
            return NotImplemented
        return (
            self.components == other.components
            and self.degree == other.degree
            and self.constant == other.constant
            and self.coeffs == other.coeffs
        )


def _change_basis(
    coeffs: Mapping[PartitionVector, RatFunc],
    weight: Callable[[PartitionVector, PartitionVector], Fraction],
) -> dict[PartitionVector, RatFunc]:
    # Characters vanish between keys of different component shapes
    by_shape: dict[tuple[int, ...], list[tuple[PartitionVector, RatFunc]]] = defaultdict(list)
    for key, c in coeffs.items():
        by_shape[key.shape].append((key, c))

    out: dict[PartitionVector, RatFunc] = {}
    for shape, entries in by_shape.items():
        for target in vectors_of_shape(shape):
            acc = ZERO
            for source, c in entries:
                w = weight(target, source)
                if w:
                    acc = acc + c * w
            out[target] = acc
    return out


def schur_to_power(s: SchurCoeffs) -> PSeries:
    """
    s_A = sum_mu chi_A(mu) / z_mu * p_mu, so the normalised coefficient of p_mu is
    sum_A c_A chi_A(mu).
    """
    logger.debug(f"Schur to power sums: {len(s.coeffs)} keys up to degree {s.degree}")
    coeffs = _change_basis(
        s.coeffs, lambda mu, a: Fraction(vector_character(a, mu))
    )
    return PSeries(s.components, s.degree, coeffs, s.constant)


def power_to_schur(p: PSeries) -> SchurCoeffs:
    logger.debug(f"Power sums to Schur: {len(p.coeffs)} keys up to degree {p.degree}")
    coeffs = _change_basis(
        p.coeffs, lambda a, mu: Fraction(vector_character(a, mu), z_order(mu))
    )
    return SchurCoeffs(p.components, p.degree, coeffs, p.constant)


def log_series(z: PSeries) -> PSeries:
    """
    Formal logarithm, truncated at the series degree.
    :raises BadConstantTerm: unless the constant term is 1
    """
    if z.constant != ONE:
        raise BadConstantTerm(f"log needs constant term 1, got {z.constant!r}")
    logger.debug(f"log of a {z.components} component series to degree {z.degree}")
    u = PSeries(z.components, z.degree, z.coeffs, ZERO, z.truncated)
    result = PSeries(z.components, z.degree, {}, ZERO, z.truncated)
    power = u
    for k in range(1, z.degree + 1):
        result = result + power.scale(Fraction((-1) ** (k + 1), k))
        power = power * u
    return result


def exp_series(f: PSeries) -> PSeries:
    """
    Formal exponential, truncated at the series degree.
    :raises BadConstantTerm: unless the constant term is 0
    """
    if not f.constant.is_zero():
        raise BadConstantTerm(f"exp needs constant term 0, got {f.constant!r}")
    logger.debug(f"exp of a {f.components} component series to degree {f.degree}")
    result = PSeries.one(f.components, f.degree)
    power = PSeries.one(f.components, f.degree)
    for k in range(1, f.degree + 1):
        power = power * f
        result = result + power.scale(Fraction(1, factorial(k)))
    if f.truncated:
        return PSeries(result.components, result.degree, result.coeffs, result.constant, True)
    return result


def adams_x(p: PSeries, d: int) -> PSeries:
    """
    p_mu -> p_(d mu). Normalised coefficients pick up d^length(mu) since
    z_(d mu) = d^length(mu) z_mu. Keys pushed past the truncation degree are dropped
    and the result is flagged as truncated.
    """
    if d < 1:
        raise ValueError(f"Adams degree must be positive, got {d}")
    if d == 1:
        return p
    coeffs = {}
    dropped = False
    for key, c in p.coeffs.items():
        if key.size * d > p.degree:
            dropped = True
            continue
        coeffs[key.scale(d)] = c * d**key.length
    return PSeries(p.components, p.degree, coeffs, p.constant, p.truncated or dropped)


def adams_qt(p: PSeries, d: int) -> PSeries:
    """(q, t) -> (q^d, t^d) on every coefficient"""
    return PSeries(
        p.components,
        p.degree,
        {key: c.adams(d) for key, c in p.coeffs.items()},
        p.constant.adams(d),
        p.truncated,
    )


def adams_sum(p: PSeries, weight: Callable[[int], Fraction]) -> PSeries:
    """
    sum_d weight(d) * psi_d(p) where psi_d acts on both x and (q, t).
    Terms beyond the truncation degree are expected here and do not set the flag.
    """
    result = PSeries(p.components, p.degree, {}, ZERO, p.truncated)
    for d in range(1, p.degree + 1):
        w = weight(d)
        if not w:
            continue
        term = adams_x(adams_qt(p, d), d)
        result = result + PSeries(
            p.components, p.degree, term.coeffs, term.constant, p.truncated
        ).scale(w)
    return result


def qrho_weight(key: PartitionVector, direction: Direction) -> RatFunc:
    """prod_j 1/[mu_j] for Y_TO_X, prod_j [mu_j] for X_TO_Y"""
    numbers = prod(
        (qnum(part) for p in key.entries for part in p.parts),
        start=LaurentPoly.constant(1),
    )
    if direction is Direction.Y_TO_X:
        return RatFunc(1, numbers)
    return RatFunc(numbers)


def specialize_qrho(p: PSeries, direction: Direction) -> PSeries:
    """Substitute p_n(y) = p_n(x) p_n(q^rho) with p_n(q^rho) = 1/[n], or undo it"""
    return p.map_coefficients(lambda key, c: c * qrho_weight(key, direction))


def transform_T(s: SchurCoeffs, at_qrho: bool = True, inverse: bool = False) -> SchurCoeffs:
    """
    Apply T_AB(q^rho) = sum_mu chi_A chi_B / z_mu * prod_j 1/[mu_j], or its inverse,
    to Schur coefficients: c_B -> sum_A c_A T_AB.
    """
    if not at_qrho:
        raise ValueError("Only the q^rho evaluation of the transformation is supported")
    direction = Direction.X_TO_Y if inverse else Direction.Y_TO_X
    return power_to_schur(specialize_qrho(schur_to_power(s), direction))


def transformation_matrix(
    n: int, inverse: bool = False
) -> dict[tuple[Partition, Partition], RatFunc]:
    """The degree-n block of T(q^rho) for a single component, keyed by (A, B)"""
    direction = Direction.X_TO_Y if inverse else Direction.Y_TO_X
    classes = [PartitionVector((mu,)) for mu in enumerate_partitions(n)]
    weights = {mu: qrho_weight(mu, direction) * Fraction(1, z_order(mu)) for mu in classes}
    block = {}
    for a in classes:
        for b in classes:
            acc = ZERO
            for mu in classes:
                chi = vector_character(a, mu) * vector_character(b, mu)
                if chi:
                    acc = acc + weights[mu] * chi
            block[(a.entries[0], b.entries[0])] = acc
    return block
