"""
The staged extraction W -> Z_mu -> F_mu -> f -> P_B -> N -> n -> checkn.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from homfly_product.algebra import (
    ZERO,
    LaurentPoly,
    NotPolynomial,
    RatFunc,
    as_laurent,
    qnum,
)
from homfly_product.partitions import (
    PartitionVector,
    mobius,
    partition_vectors_upto,
    vector_character,
    vectors_of_shape,
    z_order,
)
from homfly_product.schemas import (
    Convention,
    IntegralityReport,
    IntegralityRow,
)
from homfly_product.series import (
    Direction,
    PSeries,
    SchurCoeffs,
    adams_sum,
    log_series,
    power_to_schur,
    schur_to_power,
    specialize_qrho,
)

logger = logging.getLogger(__name__)

# (g, 2Q)
GenusKey = tuple[int, int]


class IntegralityError(ValueError):
    pass


class NonIntegerCoefficient(IntegralityError):
    pass


class AsymmetricQPart(IntegralityError):
    pass


class NonIntegerSolution(IntegralityError):
    pass


def _full(
    components: int, degree: int, entries: dict[PartitionVector, RatFunc]
) -> dict[PartitionVector, RatFunc]:
    # Zero rows are kept so written tables list every key
    return {
        key: entries.get(key, ZERO) for key in partition_vectors_upto(components, degree)
    }


@dataclass
class CoefficientTable:
    components: int
    degree: int
    entries: dict[PartitionVector, RatFunc] = field(default_factory=dict)

    def __post_init__(self):
        self.entries = _full(self.components, self.degree, self.entries)

    def __getitem__(self, key: PartitionVector) -> RatFunc:
        return self.entries[key]

    def items(self) -> list[tuple[PartitionVector, RatFunc]]:
        return sorted(self.entries.items(), key=lambda kv: kv[0].sort_key())

    def series(self, constant: RatFunc | int = 0) -> PSeries:
        """The table as normalised power sum coefficients"""
        return PSeries(self.components, self.degree, self.entries, constant)

    def schur(self, constant: RatFunc | int = 0) -> SchurCoeffs:
        """The table as Schur coefficients"""
        return SchurCoeffs(self.components, self.degree, self.entries, constant)


@dataclass
class WTable(CoefficientTable):
    """
    Colored HOMFLY invariants W_A, one per partition vector of size 1..degree.
    W of the empty colour is 1 and not stored.
    """

    name: str = "unnamed"
    framing: str | None = None

    def __post_init__(self):
        self._given = set(self.entries)
        super().__post_init__()

    def missing(self) -> list[PartitionVector]:
        """Keys the table was built without"""
        return [key for key in partition_vectors_upto(self.components, self.degree) if key not in self._given]

    def truncate(self, degree: int) -> WTable:
        if degree > self.degree:
            raise ValueError(
                f"Table {self.name} only reaches degree {self.degree}, asked for {degree}"
            )
        return WTable(
            self.components,
            degree,
            {key: c for key, c in self.entries.items() if key.size <= degree},
            name=self.name,
            framing=self.framing,
        )


class ZmuTable(CoefficientTable):
    pass


class FTable(CoefficientTable):
    pass


class PTable(CoefficientTable):
    pass


@dataclass
class fTable:
    """f on both sides: power[mu] is f-hat_mu = sum_A chi_A(mu) f_A, schur[A] is f_A"""

    components: int
    degree: int
    power: dict[PartitionVector, RatFunc]
    schur: dict[PartitionVector, RatFunc]

    def __post_init__(self):
        self.power = _full(self.components, self.degree, self.power)
        self.schur = _full(self.components, self.degree, self.schur)

    def power_series(self) -> PSeries:
        return PSeries(self.components, self.degree, self.power)


@dataclass
class InvariantTable:
    """
    Rows of (g, 2Q) -> value per partition vector. Every key up to the degree has a
    row, possibly empty.
    """

    components: int
    degree: int
    rows: dict[PartitionVector, dict[GenusKey, int | Fraction]] = field(default_factory=dict)

    def __post_init__(self):
        self.rows = {
            key: {gq: v for gq, v in sorted(self.rows.get(key, {}).items()) if v != 0}
            for key in partition_vectors_upto(self.components, self.degree)
        }

    def __getitem__(self, key: PartitionVector) -> dict[GenusKey, int | Fraction]:
        return self.rows[key]

    def value(self, key: PartitionVector, g: int, q2: int) -> int | Fraction:
        return self.rows.get(key, {}).get((g, q2), 0)

    def items(self) -> list[tuple[PartitionVector, dict[GenusKey, int | Fraction]]]:
        return sorted(self.rows.items(), key=lambda kv: kv[0].sort_key())

    def bounds(self, key: PartitionVector) -> tuple[int, int] | None:
        """(g_max, max |2Q|) over the nonzero entries of a row"""
        row = self.rows.get(key)
        if not row:
            return None
        return max(g for g, _ in row), max(abs(q2) for _, q2 in row)

    def nonzero(self) -> list[tuple[PartitionVector, int, int, int | Fraction]]:
        return [
            (key, g, q2, v)
            for key, row in self.items()
            for (g, q2), v in row.items()
        ]


class NTable(InvariantTable):
    pass


class nTable(InvariantTable):
    pass


class CheckNTable(InvariantTable):
    pass


# Z_mu


def reformulate_Z(w: WTable) -> ZmuTable:
    """Z_mu = sum_A chi_A(mu) W_A"""
    z = schur_to_power(w.schur())
    return ZmuTable(w.components, w.degree, dict(z.coeffs))


def recover_W(z: ZmuTable, name: str = "unnamed") -> WTable:
    """W_A = sum_mu chi_A(mu) / z_mu * Z_mu"""
    s = power_to_schur(z.series())
    return WTable(z.components, z.degree, _full(z.components, z.degree, dict(s.coeffs)), name=name)


# Free energy


def free_energy(z: ZmuTable) -> FTable:
    f = log_series(z.series(constant=1))
    return FTable(z.components, z.degree, dict(f.coeffs))


def extract_f(f: FTable) -> fTable:
    """
    Invert F = sum_d 1/d f(q^d, t^d)(x^d) by Mobius inversion over d.
    """
    power = adams_sum(f.series(), lambda d: Fraction(mobius(d), d))
    schur = power_to_schur(power)
    return fTable(f.components, f.degree, dict(power.coeffs), dict(schur.coeffs))


def assemble_F(f: fTable) -> FTable:
    forward = adams_sum(f.power_series(), lambda d: Fraction(1, d))
    return FTable(f.components, f.degree, dict(forward.coeffs))


def compute_P(f: fTable, convention: Convention = Convention.QRHO) -> PTable:
    """
    P_B = sum_mu chi_B(mu) / z_mu * w_mu * f-hat_mu, where w_mu is prod_j 1/[mu_j]
    for the q^rho convention and prod_j [mu_j] for the literal inverse.
    """
    direction = Direction.Y_TO_X if convention is Convention.QRHO else Direction.X_TO_Y
    p = power_to_schur(specialize_qrho(f.power_series(), direction))
    return PTable(f.components, f.degree, dict(p.coeffs))


# Integrality

ONE_SQUARED = qnum(1) * qnum(1)


def genus_basis(g: int) -> LaurentPoly:
    """[1]^(2g)"""
    return ONE_SQUARED**g


def character_basis(g: int) -> LaurentPoly:
    """sum_(k=0..g) q^(g-2k), in powers of s"""
    return LaurentPoly({(2 * (g - 2 * k), 0): 1 for k in range(g + 1)})


def _as_integer(value: Fraction, error: type[IntegralityError], context: str) -> int:
    if value.denominator != 1:
        raise error(f"Coefficient {value} is not an integer ({context})")
    return value.numerator


def _q_part_check(b: int, q_part: dict[int, Fraction]):
    for a, c in q_part.items():
        if a % 2:
            raise AsymmetricQPart(f"Half-integer power q^({a}/2) at v^{b}")
        if q_part.get(-a, 0) != c:
            raise AsymmetricQPart(
                f"q-part at v^{b} is not symmetric under q -> 1/q: coefficient of s^{a} is {c}, of s^{-a} is {q_part.get(-a, 0)}"
            )


def _reduce(q_part: dict[int, Fraction], basis, error: type[IntegralityError], b: int) -> dict[int, int]:
    # Strip the top s-power with the basis element whose top term is s^(2g)
    poly = LaurentPoly({(a, 0): c for a, c in q_part.items()})
    out: dict[int, int] = {}
    while poly:
        top = max(a for a, _ in poly.keys())
        if top % 2 or top < 0:
            raise error(f"Cannot reduce the q-part at v^{b}: leftover {poly.fmt()}")
        g = top // 2
        coeff = _as_integer(poly.coefficient(top), error, f"g={g}, 2Q={b}")
        out[g] = coeff
        poly = poly - basis(g) * coeff
    return out


def genus_expansion(poly: LaurentPoly) -> dict[GenusKey, int]:
    """
    Write a Laurent polynomial as sum N_(g,Q) [1]^(2g) t^Q.
    :raises AsymmetricQPart: for half-integer or non-symmetric q-parts
    :raises NonIntegerCoefficient: if some N is not an integer
    """
    out: dict[GenusKey, int] = {}
    for b, q_part in poly.v_slices().items():
        _q_part_check(b, q_part)
        for g, n in _reduce(q_part, genus_basis, NonIntegerCoefficient, b).items():
            out[(g, b)] = n
    return out


def integrality_row(key: PartitionVector, p: RatFunc) -> IntegralityRow:
    try:
        genus_expansion(as_laurent(p * ONE_SQUARED))
    except NotPolynomial as e:
        return IntegralityRow(
            key=str(key),
            passed=False,
            reason="[1]^2 P is not a Laurent polynomial",
            remainder=e.remainder.serialize(),
        )
    except IntegralityError as e:
        return IntegralityRow(key=str(key), passed=False, reason=str(e))
    return IntegralityRow(key=str(key), passed=True)


def check_integrality(p: PTable) -> IntegralityReport:
    report = IntegralityReport(rows=[integrality_row(key, value) for key, value in p.items()])
    for row in report.failures():
        logger.warning(f"Integrality fails at {row.key}: {row.reason}")
    return report


def extract_N(p: PTable) -> NTable:
    rows = {}
    for key, value in p.items():
        rows[key] = genus_expansion(as_laurent(value * ONE_SQUARED))
        logger.debug(f"N row {key}: {rows[key]}")
    return NTable(p.components, p.degree, rows)


def _change_row(
    row: dict[GenusKey, int],
    source,
    target,
) -> dict[GenusKey, int]:
    by_q: dict[int, LaurentPoly] = {}
    for (g, q2), value in row.items():
        by_q[q2] = by_q.get(q2, LaurentPoly()) + source(g) * value
    out = {}
    for q2, poly in sorted(by_q.items()):
        q_part = {a: c for (a, _), c in poly.items()}
        for g, value in _reduce(q_part, target, NonIntegerSolution, q2).items():
            out[(g, q2)] = value
    return out


def N_to_n(n_table: NTable) -> nTable:
    """Rewrite each row from the basis [1]^(2g) into sum_k q^(g-2k)"""
    rows = {key: _change_row(row, genus_basis, character_basis) for key, row in n_table.items()}
    return nTable(n_table.components, n_table.degree, rows)


def n_to_N(small: nTable) -> NTable:
    rows = {key: _change_row(row, character_basis, genus_basis) for key, row in small.items()}
    return NTable(small.components, small.degree, rows)


def compute_checkn(small: nTable) -> CheckNTable:
    """checkn_(mu;g,Q) = sum_B chi_B(mu) / z_mu * n_(B;g,Q)"""
    rows: dict[PartitionVector, dict[GenusKey, Fraction]] = {}
    for mu in partition_vectors_upto(small.components, small.degree):
        acc: dict[GenusKey, Fraction] = {}
        z = z_order(mu)
        for b in vectors_of_shape(mu.shape):
            chi = vector_character(b, mu)
            if not chi:
                continue
            for gq, value in small.rows.get(b, {}).items():
                acc[gq] = acc.get(gq, Fraction(0)) + Fraction(chi * value, z)
        rows[mu] = acc
    return CheckNTable(small.components, small.degree, rows)


@dataclass
class PipelineResult:
    w: WTable
    z: ZmuTable
    free: FTable
    f: fTable
    p: PTable
    integrality: IntegralityReport
    convention: Convention
    big_n: NTable | None = None
    small_n: nTable | None = None
    checkn: CheckNTable | None = None

    @property
    def passed(self) -> bool:
        return self.integrality.passed

    def nonintegral_checkn(self) -> list[str]:
        if self.checkn is None:
            return []
        return [
            str(key)
            for key, row in self.checkn.items()
            if any(Fraction(v).denominator != 1 for v in row.values())
        ]


def run_pipeline(
    w: WTable,
    degree: int | None = None,
    convention: Convention = Convention.QRHO,
) -> PipelineResult:
    """
    Run every stage on a W table. When integrality fails the N, n and checkn
    stages are skipped and left as None.
    """
    if degree is not None and degree != w.degree:
        w = w.truncate(degree)
    logger.info(f"Running pipeline on {w.name} (L={w.components}, D={w.degree}, {convention.value})")

    z = reformulate_Z(w)
    logger.info("Computed Z_mu")
    free = free_energy(z)
    logger.info("Computed free energy")
    f = extract_f(free)
    logger.info("Extracted f")
    p = compute_P(f, convention)
    logger.info("Computed P_B")
    report = check_integrality(p)

    result = PipelineResult(w, z, free, f, p, report, convention)
    if not report.passed:
        logger.warning(f"{len(report.failures())} rows fail integrality, stopping before N")
        return result

    result.big_n = extract_N(p)
    result.small_n = N_to_n(result.big_n)
    result.checkn = compute_checkn(result.small_n)
    logger.info("Extracted N, n and checkn")
    return result


def degree_one_shortcut(w: WTable) -> RatFunc:
    """P_(1) = W_(1) / [1] for a knot"""
    key = PartitionVector.of((1,))
    return w[key] / qnum(1)
