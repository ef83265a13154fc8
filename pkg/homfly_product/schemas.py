from pydantic import BaseModel, PositiveInt, NonNegativeInt
from pydantic.functional_validators import AfterValidator
from typing import Annotated
import re
from enum import Enum

from homfly_product.algebra import ExpansionMode

TABLE_FORMAT = "v1"
REPORT_SCHEMA = "v1.0.0"

DEFAULT_DEGREE = 3
DEFAULT_Q_ORDER = 12

TABLENAME_PATTERN = r"^[A-Za-z0-9][A-Za-z0-9_.+-]*$"
FORMAT_PATTERN = r"^v\d+$"


class Convention(Enum):
    """How P_B is read off the free energy: T(q^rho), or the literal inverse"""

    QRHO = "qrho"
    LITERAL_TINV = "literal-tinv"


class TableKind(Enum):
    W = "W"
    Z = "Z"
    F = "F"
    F_POWER = "f-power"
    F_SCHUR = "f-schur"
    P = "P"
    N = "N"
    SMALL_N = "n"
    CHECK_N = "checkn"
    PRODUCT = "product"

    @property
    def is_coefficient_table(self) -> bool:
        return self in COEFFICIENT_KINDS


COEFFICIENT_KINDS = {
    TableKind.W,
    TableKind.Z,
    TableKind.F,
    TableKind.F_POWER,
    TableKind.F_SCHUR,
    TableKind.P,
}


def validate_format(version: str) -> str:
    if not re.match(FORMAT_PATTERN, version):
        raise ValueError(f"Invalid format: {version}. Must be in form of v(int)")
    if version != TABLE_FORMAT:
        raise ValueError(f"Unsupported format: {version}. Supported: {TABLE_FORMAT}")
    return version


def validate_tablename(name: str) -> str:
    if not re.match(TABLENAME_PATTERN, name):
        raise ValueError(
            f"Invalid table name: {name}. Must only contain A-Z, a-z, 0-9, _, ., + and -. Must start with a letter or digit"
        )
    return name


class TableHeader(BaseModel):
    format: Annotated[str, AfterValidator(validate_format)] = TABLE_FORMAT
    kind: TableKind
    name: Annotated[str, AfterValidator(validate_tablename)]
    components: PositiveInt
    degree: PositiveInt
    # Optional fields
    convention: Convention | None = None
    framing: str | None = None
    q_order: NonNegativeInt | None = None
    mode: ExpansionMode | None = None


class IntegralityRow(BaseModel):
    key: str
    passed: bool
    reason: str | None = None
    remainder: str | None = None


class IntegralityReport(BaseModel):
    rows: list[IntegralityRow] = []

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def failures(self) -> list[IntegralityRow]:
        return [row for row in self.rows if not row.passed]


class Discrepancy(BaseModel):
    key: str
    s_power: int
    v_power: int
    difference: str


class RoundTripReport(BaseModel):
    name: str
    degree: PositiveInt
    q_order: NonNegativeInt
    mode: ExpansionMode
    compared_keys: NonNegativeInt
    discrepancies: list[Discrepancy] = []
    integrality: IntegralityReport | None = None
    reportschema: str = REPORT_SCHEMA

    @property
    def passed(self) -> bool:
        integral = self.integrality is None or self.integrality.passed
        return integral and not self.discrepancies


class SymmetryResult(BaseModel):
    identity: str
    passed: bool
    failures: list[str] = []


class SymmetryReport(BaseModel):
    name: str
    degree: PositiveInt
    results: list[SymmetryResult] = []
    reportschema: str = REPORT_SCHEMA

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)


class PipelineReport(BaseModel):
    name: str
    components: PositiveInt
    degree: PositiveInt
    convention: Convention
    integrality: IntegralityReport
    # Keys whose checkn row holds a non-integer value; reported, not asserted
    nonintegral_checkn: list[str] = []
    reportschema: str = REPORT_SCHEMA
