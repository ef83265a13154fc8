import pathlib
import re
from fractions import Fraction

from pydantic import ValidationError

from homfly_product.algebra import RatFunc
from homfly_product.partitions import PartitionVector
from homfly_product.pipeline import (
    CheckNTable,
    CoefficientTable,
    FTable,
    InvariantTable,
    NTable,
    PTable,
    WTable,
    ZmuTable,
    fTable,
    nTable,
)
from homfly_product.product import ProductFactor, ProductRep
from homfly_product.schemas import (
    COEFFICIENT_KINDS,
    TABLE_FORMAT,
    Convention,
    TableHeader,
    TableKind,
)

# Line structure only, the fields are parsed afterwards
HEADER_LINE = r"^#\s*([a-z_]+)\s*:\s*(.*?)\s*$"
KEY_FIELD = r"[0-9,|\-]+"
COEFFICIENT_LINE = rf"^{KEY_FIELD}\t\S.*$"
INVARIANT_LINE = rf"^{KEY_FIELD}(\t-?\d+\t-?\d+\t-?\d+(/\d+)?)?$"

HEADER_ORDER = [
    "format",
    "kind",
    "name",
    "components",
    "degree",
    "convention",
    "framing",
    "q_order",
    "mode",
]

INVARIANT_CLASSES: dict[TableKind, type[InvariantTable]] = {
    TableKind.N: NTable,
    TableKind.SMALL_N: nTable,
    TableKind.CHECK_N: CheckNTable,
}
COEFFICIENT_CLASSES: dict[TableKind, type[CoefficientTable]] = {
    TableKind.Z: ZmuTable,
    TableKind.F: FTable,
    TableKind.P: PTable,
}


class TableFileError(ValueError):
    pass


class ParseError(TableFileError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class VersionError(TableFileError):
    pass


class DuplicateKey(TableFileError):
    pass


class MissingDegrees(TableFileError):
    def __init__(self, message: str, missing: list[PartitionVector]):
        super().__init__(message)
        self.missing = missing


def read_table_file(
    tablepath: pathlib.Path,
) -> tuple[list[tuple[int, str]], list[tuple[int, str]]]:
    """
    Reads a table file into header and body lines, each paired with its line number.

    :return: header_lines, body_lines
    """
    header: list[tuple[int, str]] = []
    body: list[tuple[int, str]] = []
    with open(tablepath, "r", encoding="utf-8") as tablefile:
        for number, line in enumerate(tablefile, start=1):
            line = line.rstrip("\n")
            if line.startswith("#"):
                header.append((number, line))
            elif line.strip():  # If not empty
                body.append((number, line))
    return header, body


def parse_header(lines: list[tuple[int, str]]) -> TableHeader:
    fields: dict[str, str] = {}
    for number, line in lines:
        match = re.match(HEADER_LINE, line)
        if match is None:
            raise ParseError(f"Malformed header line '{line}'", number)
        key, value = match.groups()
        if key not in HEADER_ORDER:
            raise ParseError(f"Unknown header field '{key}'", number, line.index(key) + 1)
        if key in fields:
            raise DuplicateKey(f"Header field '{key}' given twice (line {number})")
        fields[key] = value

    # Check the version before anything else
    version = fields.get("format")
    if version is None:
        raise VersionError("Table file has no format header")
    if version != TABLE_FORMAT:
        raise VersionError(f"Unsupported format {version}, expected {TABLE_FORMAT}")

    try:
        return TableHeader.model_validate(fields)
    except ValidationError as e:
        raise ParseError(f"Invalid header: {e}", lines[0][0] if lines else 1)


def serialize_header(header: TableHeader) -> str:
    values = header.model_dump(mode="json", exclude_none=True)
    return "".join(f"# {key}: {values[key]}\n" for key in HEADER_ORDER if key in values)


def _column(line: str, field_index: int) -> int:
    fields = line.split("\t")
    return sum(len(f) + 1 for f in fields[:field_index]) + 1


def _parse_key(header: TableHeader, number: int, text: str) -> PartitionVector:
    try:
        key = PartitionVector.parse(text)
    except ValueError as e:
        raise ParseError(f"Invalid key '{text}': {e}", number)
    if key.components != header.components:
        raise ParseError(
            f"Key '{text}' has {key.components} components, header says {header.components}",
            number,
        )
    if key.size == 0 or key.size > header.degree:
        raise ParseError(f"Key '{text}' is outside degrees 1..{header.degree}", number)
    return key


def parse_coefficients(
    header: TableHeader, body: list[tuple[int, str]]
) -> dict[PartitionVector, RatFunc]:
    entries: dict[PartitionVector, RatFunc] = {}
    for number, line in body:
        if not re.match(COEFFICIENT_LINE, line):
            raise ParseError(f"Expected '<key>\\t<value>', got '{line}'", number)
        key_text, value_text = line.split("\t", 1)
        key = _parse_key(header, number, key_text)
        if key in entries:
            raise DuplicateKey(f"Key {key} given twice (line {number})")
        try:
            entries[key] = RatFunc.parse(value_text)
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"Invalid value '{value_text}': {e}", number, _column(line, 1))

    missing = [
        key
        for key in CoefficientTable(header.components, header.degree).entries
        if key not in entries
    ]
    if missing:
        degrees = sorted({key.size for key in missing})
        raise MissingDegrees(
            f"Table {header.name} has no entry for {len(missing)} keys in degrees {degrees}",
            missing,
        )
    return entries


def parse_rows(
    header: TableHeader, body: list[tuple[int, str]]
) -> dict[PartitionVector, dict[tuple[int, int], Fraction]]:
    rows: dict[PartitionVector, dict[tuple[int, int], Fraction]] = {}
    empty: set[PartitionVector] = set()
    for number, line in body:
        if not re.match(INVARIANT_LINE, line):
            raise ParseError(f"Expected '<key>[\\t<g>\\t<2Q>\\t<value>]', got '{line}'", number)
        fields = line.split("\t")
        key = _parse_key(header, number, fields[0])
        if len(fields) == 1:
            if key in empty or key in rows:
                raise DuplicateKey(f"Row {key} given twice (line {number})")
            empty.add(key)
            continue
        g, q2, value = int(fields[1]), int(fields[2]), Fraction(fields[3])
        if g < 0:
            raise ParseError(f"Genus must be nonnegative, got {g}", number, _column(line, 1))
        row = rows.setdefault(key, {})
        if key in empty or (g, q2) in row:
            raise DuplicateKey(f"Entry {key};{g};{q2} given twice (line {number})")
        row[(g, q2)] = value
    return rows


def _to_int(value: Fraction, number_hint: str) -> int:
    if value.denominator != 1:
        raise TableFileError(f"Non-integer value {value} in integer table ({number_hint})")
    return value.numerator


def parse_table(tablepath: pathlib.Path):
    """
    Parse any table file.

    :return: header, table. The table is a WTable, a CoefficientTable subclass, a
        (kind, entries) pair for one side of f, an InvariantTable subclass or a
        ProductRep, depending on the header kind.
    """
    header_lines, body = read_table_file(tablepath)
    header = parse_header(header_lines)
    kind = header.kind

    if kind is TableKind.W:
        entries = parse_coefficients(header, body)
        return header, WTable(
            header.components, header.degree, entries, name=header.name, framing=header.framing
        )
    if kind in COEFFICIENT_CLASSES:
        entries = parse_coefficients(header, body)
        return header, COEFFICIENT_CLASSES[kind](header.components, header.degree, entries)
    if kind in (TableKind.F_POWER, TableKind.F_SCHUR):
        return header, (kind, parse_coefficients(header, body))

    rows = parse_rows(header, body)
    if kind is TableKind.PRODUCT:
        factors = tuple(
            ProductFactor(key, g, q2, value)
            for key, row in rows.items()
            for (g, q2), value in row.items()
        )
        kwargs = {}
        if header.q_order is not None:
            kwargs["q_order"] = header.q_order
        if header.mode is not None:
            kwargs["mode"] = header.mode
        return header, ProductRep(header.components, header.degree, factors=factors, **kwargs)

    cls = INVARIANT_CLASSES[kind]
    if kind is not TableKind.CHECK_N:
        rows = {
            key: {gq: _to_int(v, f"{key};{gq[0]};{gq[1]}") for gq, v in row.items()}
            for key, row in rows.items()
        }
    return header, cls(header.components, header.degree, rows)


def parse_wtable(tablepath: pathlib.Path) -> WTable:
    header, table = parse_table(tablepath)
    if header.kind is not TableKind.W:
        raise TableFileError(f"{tablepath} holds a {header.kind.value} table, expected W")
    return table


def _value(v: int | Fraction) -> str:
    return str(Fraction(v))


def _coefficient_body(entries: dict[PartitionVector, RatFunc]) -> str:
    return "".join(
        f"{key}\t{value.serialize()}\n"
        for key, value in sorted(entries.items(), key=lambda kv: kv[0].sort_key())
    )


def _invariant_body(table: InvariantTable) -> str:
    lines = []
    for key, row in table.items():
        if not row:
            lines.append(f"{key}\n")
        for (g, q2), value in row.items():
            lines.append(f"{key}\t{g}\t{q2}\t{_value(value)}\n")
    return "".join(lines)


def _product_body(rep: ProductRep) -> str:
    return "".join(
        f"{f.key}\t{f.g}\t{f.q2}\t{_value(f.value)}\n" for f in rep.factors
    )


def serialize_table(
    table,
    name: str | None = None,
    kind: TableKind | None = None,
    convention: Convention | None = None,
) -> str:
    """
    Serialize a table with its header. The kind is inferred from the table type
    except for fTable, where it picks the side (f-power or f-schur).
    """
    extra: dict = {}
    match table:
        case WTable():
            kind, body = TableKind.W, _coefficient_body(table.entries)
            name = name or table.name
            extra["framing"] = table.framing
        case fTable():
            if kind is TableKind.F_SCHUR:
                body = _coefficient_body(table.schur)
            else:
                kind, body = TableKind.F_POWER, _coefficient_body(table.power)
        case ZmuTable():
            kind, body = TableKind.Z, _coefficient_body(table.entries)
        case FTable():
            kind, body = TableKind.F, _coefficient_body(table.entries)
        case PTable():
            kind, body = TableKind.P, _coefficient_body(table.entries)
        case NTable():
            kind, body = TableKind.N, _invariant_body(table)
        case nTable():
            kind, body = TableKind.SMALL_N, _invariant_body(table)
        case CheckNTable():
            kind, body = TableKind.CHECK_N, _invariant_body(table)
        case ProductRep():
            kind, body = TableKind.PRODUCT, _product_body(table)
            extra["q_order"] = table.q_order
            extra["mode"] = table.mode
        case _:
            raise TypeError(f"Cannot serialize {type(table).__name__}")

    if kind not in COEFFICIENT_KINDS and kind is not TableKind.PRODUCT:
        extra.pop("framing", None)
    header = TableHeader(
        kind=kind,
        name=name or "unnamed",
        components=table.components,
        degree=table.degree,
        convention=convention,
        **extra,
    )
    return serialize_header(header) + body


def write_table(
    table,
    tablepath: pathlib.Path,
    name: str | None = None,
    kind: TableKind | None = None,
    convention: Convention | None = None,
):
    with open(tablepath, "w", encoding="utf-8") as tablefile:
        tablefile.write(serialize_table(table, name, kind, convention))
