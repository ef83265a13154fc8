"""
The infinite product form of the partition function, its expansion as a truncated
q-series, and the checks run against it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from homfly_product.algebra import (
    ExpansionMode,
    LaurentPoly,
    QSeries,
    RatFunc,
    as_laurent,
    expand_qseries,
    qnum,
    vnum,
)
from homfly_product.partitions import (
    Partition,
    PartitionVector,
    partition_vectors_upto,
)
from homfly_product.pipeline import (
    ONE_SQUARED,
    CheckNTable,
    PipelineResult,
    WTable,
    reformulate_Z,
    run_pipeline,
)
from homfly_product.schemas import (
    DEFAULT_Q_ORDER,
    Convention,
    Discrepancy,
    RoundTripReport,
    SymmetryReport,
    SymmetryResult,
)
from homfly_product.series import (
    Direction,
    PSeries,
    adams_sum,
    exp_series,
    power_to_schur,
    specialize_qrho,
)

logger = logging.getLogger(__name__)

MAX_DEGREE = 8
MAX_Q_ORDER = 256


class TruncationOverflow(ValueError):
    pass


def check_truncation(degree: int, q_order: int):
    if degree > MAX_DEGREE:
        raise TruncationOverflow(f"x-degree {degree} exceeds the supported maximum {MAX_DEGREE}")
    if q_order > MAX_Q_ORDER:
        raise TruncationOverflow(f"q-order {q_order} exceeds the supported maximum {MAX_Q_ORDER}")


@dataclass(frozen=True)
class ProductFactor:
    """The factor prod_m prod_k <1 - q^(g-2k+m) t^Q x^mu>^(-m checkn)"""

    key: PartitionVector
    g: int
    q2: int
    value: Fraction

    def sort_key(self) -> tuple:
        return (self.key.sort_key(), self.g, self.q2)


@dataclass(frozen=True)
class ProductRep:
    components: int
    degree: int
    q_order: int = DEFAULT_Q_ORDER
    mode: ExpansionMode = ExpansionMode.Q
    factors: tuple[ProductFactor, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self,
            "factors",
            tuple(sorted((f for f in self.factors if f.value), key=ProductFactor.sort_key)),
        )

    def with_mode(self, mode: ExpansionMode) -> ProductRep:
        return ProductRep(self.components, self.degree, self.q_order, mode, self.factors)


def build_product(
    checkn: CheckNTable,
    q_order: int = DEFAULT_Q_ORDER,
    mode: ExpansionMode = ExpansionMode.Q,
) -> ProductRep:
    """One factor per nonzero checkn entry"""
    factors = tuple(
        ProductFactor(key, g, q2, Fraction(value)) for key, g, q2, value in checkn.nonzero()
    )
    return ProductRep(checkn.components, checkn.degree, q_order, mode, factors)


def factor_weight(g: int, q2: int) -> RatFunc:
    """t^Q sum_(k=0..g) q^(g-2k) / [1]^2, the m-sum folded in"""
    numerator = LaurentPoly({(2 * (g - 2 * k), q2): 1 for k in range(g + 1)})
    return RatFunc(numerator, ONE_SQUARED)


def product_log(rep: ProductRep) -> PSeries:
    """
    log of the product, sum over factors and d of checkn / d times the weight at
    (q^d, t^d), placed at p_(d mu).
    """
    check_truncation(rep.degree, rep.q_order)
    raw: dict[PartitionVector, RatFunc] = {}
    for factor in rep.factors:
        weight = factor_weight(factor.g, factor.q2) * factor.value
        raw[factor.key] = raw.get(factor.key, RatFunc()) + weight
    g_series = PSeries.from_raw(rep.components, rep.degree, raw)
    return adams_sum(g_series, lambda d: Fraction(1, d))


@dataclass(frozen=True)
class ExpandedSeries:
    """A series in the power sums whose coefficients are truncated q-series"""

    components: int
    degree: int
    q_order: int
    mode: ExpansionMode
    coeffs: dict[PartitionVector, QSeries] = field(default_factory=dict)
    constant: QSeries | None = None

    def coefficient(self, key: PartitionVector) -> QSeries:
        if key.size == 0:
            return self.constant if self.constant is not None else QSeries.zero(self.q_order, self.mode)
        return self.coeffs.get(key, QSeries.zero(self.q_order, self.mode))

    def keys(self) -> list[PartitionVector]:
        return sorted(self.coeffs, key=PartitionVector.sort_key)

    def flip_mode(self) -> ExpandedSeries:
        mode = ExpansionMode.Q_INVERSE if self.mode is ExpansionMode.Q else ExpansionMode.Q
        return ExpandedSeries(
            self.components,
            self.degree,
            self.q_order,
            mode,
            {key: c.flip_mode() for key, c in self.coeffs.items()},
            self.constant.flip_mode() if self.constant is not None else None,
        )


def empty_key(components: int) -> PartitionVector:
    return PartitionVector(tuple(Partition() for _ in range(components)))


def expand_series(
    series: PSeries, q_order: int, mode: ExpansionMode = ExpansionMode.Q
) -> ExpandedSeries:
    return ExpandedSeries(
        series.components,
        series.degree,
        q_order,
        mode,
        {key: expand_qseries(c, q_order, mode) for key, c in series.items()},
        expand_qseries(series.constant, q_order, mode),
    )


def compare_expansions(a: ExpandedSeries, b: ExpandedSeries) -> list[Discrepancy]:
    """
    Coefficientwise differences inside the window where both sides are exact, for
    every key up to the smaller degree.
    """
    if a.components != b.components:
        raise ValueError("Cannot compare series with different component counts")
    if a.mode is not b.mode:
        raise ValueError("Cannot compare series expanded in different modes")
    degree = min(a.degree, b.degree)
    keys = [empty_key(a.components)] + partition_vectors_upto(a.components, degree)
    out = []
    for key in keys:
        for (s_power, v_power), c in sorted(a.coefficient(key).difference(b.coefficient(key)).items()):
            out.append(
                Discrepancy(key=str(key), s_power=s_power, v_power=v_power, difference=str(c))
            )
    return out


def expand_product(rep: ProductRep) -> ExpandedSeries:
    logger.info(
        f"Expanding {len(rep.factors)} factors to x-degree {rep.degree}, q-order {rep.q_order} ({rep.mode.value})"
    )
    return expand_series(exp_series(product_log(rep)), rep.q_order, rep.mode)


def direct_Z_series(w: WTable) -> PSeries:
    """Z_CS in the x variables, y = x * q^rho"""
    z = reformulate_Z(w)
    return specialize_qrho(z.series(constant=1), Direction.Y_TO_X)


def direct_Z(
    w: WTable, q_order: int = DEFAULT_Q_ORDER, mode: ExpansionMode = ExpansionMode.Q
) -> ExpandedSeries:
    check_truncation(w.degree, q_order)
    return expand_series(direct_Z_series(w), q_order, mode)


def roundtrip_verify(
    w: WTable,
    q_order: int = DEFAULT_Q_ORDER,
    mode: ExpansionMode = ExpansionMode.Q,
    convention: Convention = Convention.QRHO,
    checkn: CheckNTable | None = None,
    result: PipelineResult | None = None,
) -> RoundTripReport:
    """
    Compare the expanded product built from the pipeline against Z_CS directly.
    A checkn table may be passed to replace the one the pipeline extracts.
    """
    check_truncation(w.degree, q_order)
    if result is None:
        result = run_pipeline(w, convention=convention)
    report = RoundTripReport(
        name=w.name,
        degree=w.degree,
        q_order=q_order,
        mode=mode,
        compared_keys=0,
        integrality=result.integrality,
    )
    if not result.passed:
        logger.warning(f"Skipping the round trip for {w.name}: integrality failed")
        return report

    rep = build_product(checkn if checkn is not None else result.checkn, q_order, mode)
    expanded = expand_product(rep)
    direct = direct_Z(w, q_order, mode)
    report.compared_keys = 1 + len(partition_vectors_upto(w.components, w.degree))
    report.discrepancies = compare_expansions(expanded, direct)
    if report.discrepancies:
        logger.warning(f"Round trip for {w.name} has {len(report.discrepancies)} discrepancies")
    else:
        logger.info(f"Round trip for {w.name} matches on {report.compared_keys} keys")
    return report


# Unknot and unlinks


def unknot_table(degree: int) -> WTable:
    """W_A = dim_q V_A = sum_mu chi_A(mu) / z_mu * prod_j (v^-mu_j - v^mu_j) / [mu_j]"""
    if degree < 1:
        raise ValueError(f"Degree must be at least 1, got {degree}")
    power = {
        key: RatFunc(
            _product(vnum(part) for part in key.entries[0].parts),
            _product(qnum(part) for part in key.entries[0].parts),
        )
        for key in partition_vectors_upto(1, degree)
    }
    s = power_to_schur(PSeries(1, degree, power))
    return WTable(1, degree, dict(s.coeffs), name="unknot", framing="standard")


def _product(polys) -> LaurentPoly:
    result = LaurentPoly.constant(1)
    for p in polys:
        result = result * p
    return result


def unlink_table(components: int, degree: int) -> WTable:
    """The split union of unknots: W is the product of the component W, with W = 1 on an empty colour"""
    if components < 1:
        raise ValueError(f"Need at least one component, got {components}")
    unknot = unknot_table(degree)
    if components == 1:
        return unknot
    entries = {}
    for key in partition_vectors_upto(components, degree):
        value = RatFunc(1)
        for part in key.entries:
            if part.size:
                value = value * unknot[PartitionVector((part,))]
        entries[key] = value
    return WTable(components, degree, entries, name=f"unlink-{components}", framing="standard")


def unknot_closed_product(
    degree: int, q_order: int = DEFAULT_Q_ORDER, mode: ExpansionMode = ExpansionMode.Q
) -> ExpandedSeries:
    """
    prod_m (1 - q^m t^(1/2) x)^m / (1 - q^m t^(-1/2) x)^m over the symmetric product,
    with q^-m in place of q^m for the 1/q expansion. The m-product is enumerated up
    to a bound that keeps every coefficient exact past the compared window.
    """
    check_truncation(degree, q_order)
    bound = degree + q_order
    sign = 1 if mode is ExpansionMode.Q else -1
    raw: dict[PartitionVector, RatFunc] = {}
    for d in range(1, degree + 1):
        acc = LaurentPoly()
        for m in range(1, bound + 1):
            acc = acc + LaurentPoly.monomial(sign * 2 * m * d) * Fraction(m, d)
        raw[PartitionVector.of((d,))] = RatFunc(acc * vnum(d))

    z = exp_series(PSeries.from_raw(1, degree, raw))
    precision = 2 * bound + 1
    return ExpandedSeries(
        1,
        degree,
        q_order,
        mode,
        {key: QSeries.from_laurent(as_laurent(c), precision, mode) for key, c in z.items()},
        QSeries.from_laurent(as_laurent(z.constant), precision, mode),
    )


# Symmetries


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


def _w_identity(w: WTable, name: str, rule) -> SymmetryResult:
    failures = []
    for key, value in w.items():
        lhs, rhs = rule(key, value)
        if lhs != rhs:
            failures.append(str(key))
    return SymmetryResult(identity=name, passed=not failures, failures=failures)


def symmetry_checks(
    w: WTable,
    result: PipelineResult | None = None,
    q_order: int = DEFAULT_Q_ORDER,
) -> SymmetryReport:
    """
    Check the q -> 1/q symmetry of the product, rank-level duality and its strong
    forms on W, and the induced symmetries of N and checkn.
    """
    check_truncation(w.degree, q_order)
    if result is None:
        result = run_pipeline(w)
    report = SymmetryReport(name=w.name, degree=w.degree)

    # (a) The product is invariant under q -> 1/q
    if result.checkn is None:
        report.results.append(
            SymmetryResult(identity="q-inverse", passed=False, failures=["no checkn table"])
        )
    else:
        rep = build_product(result.checkn, q_order, ExpansionMode.Q)
        flipped = expand_product(rep).flip_mode()
        inverse = expand_product(rep.with_mode(ExpansionMode.Q_INVERSE))
        failures = sorted({d.key for d in compare_expansions(flipped, inverse)})
        report.results.append(
            SymmetryResult(identity="q-inverse", passed=not failures, failures=failures)
        )

    # (b) W_(A^t)(1/s, -v) = W_A
    report.results.append(
        _w_identity(
            w,
            "rank-level",
            lambda key, value: (w[key.conjugate()].invert_s().negate_v(), value),
        )
    )
    # (c) W_(A^t)(1/s, v) = (-1)^|A| W_A and W_A(s, -v) = (-1)^|A| W_A
    report.results.append(
        _w_identity(
            w,
            "strong-rank-level-1",
            lambda key, value: (w[key.conjugate()].invert_s(), value * _sign(key.size)),
        )
    )
    report.results.append(
        _w_identity(
            w,
            "strong-rank-level-2",
            lambda key, value: (value.negate_v(), value * _sign(key.size)),
        )
    )

    # (d) N_(A^t;g,Q) = (-1)^|A| N_(A;g,-Q)
    if result.big_n is None:
        report.results.append(SymmetryResult(identity="N", passed=False, failures=["no N table"]))
    else:
        failures = []
        for key, row in result.big_n.items():
            partner = result.big_n[key.conjugate()]
            keys = set(partner) | {(g, -q2) for g, q2 in row}
            for g, q2 in keys:
                if partner.get((g, q2), 0) != _sign(key.size) * row.get((g, -q2), 0):
                    failures.append(f"{key};{g};{q2}")
        report.results.append(SymmetryResult(identity="N", passed=not failures, failures=failures))

    # (e) checkn_(mu;g,-Q) = (-1)^length(mu) checkn_(mu;g,Q)
    if result.checkn is None:
        report.results.append(
            SymmetryResult(identity="checkn", passed=False, failures=["no checkn table"])
        )
    else:
        failures = []
        for key, row in result.checkn.items():
            for (g, q2), value in row.items():
                if row.get((g, -q2), 0) != _sign(key.length) * value:
                    failures.append(f"{key};{g};{q2}")
        report.results.append(
            SymmetryResult(identity="checkn", passed=not failures, failures=failures)
        )

    for r in report.results:
        logger.info(f"{r.identity}: {'holds' if r.passed else 'fails'}")
    return report
