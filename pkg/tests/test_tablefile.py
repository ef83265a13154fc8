import pathlib
import shutil
import unittest
from fractions import Fraction

from homfly_product.algebra import ExpansionMode, RatFunc, vnum
from homfly_product.partitions import PartitionVector
from homfly_product.pipeline import CheckNTable, NTable, PTable, WTable, run_pipeline
from homfly_product.product import build_product, unknot_table, unlink_table
from homfly_product.schemas import Convention, TableKind, validate_tablename
from homfly_product.tablefile import (
    DuplicateKey,
    MissingDegrees,
    ParseError,
    TableFileError,
    VersionError,
    parse_table,
    parse_wtable,
    serialize_table,
    write_table,
)


def k(text: str) -> PartitionVector:
    return PartitionVector.parse(text)


class TestTableFile(unittest.TestCase):
    def setUp(self) -> None:
        self.input = pathlib.Path("tests/test_input")
        self.output = pathlib.Path("tests/test_output/tablefile")

        # Clean up any previous test runs
        if self.output.exists():
            shutil.rmtree(self.output)
        self.output.mkdir(parents=True)

    def test_unknot_roundtrip(self):
        """Write the generated unknot, read it back and compare"""
        path = self.output / "unknot.table"
        write_table(unknot_table(3), path)
        self.assertEqual(parse_wtable(path), unknot_table(3))

        # Reserialising the parsed table reproduces the file byte for byte
        with open(path, "r", encoding="utf-8") as tablefile:
            text = tablefile.read()
        self.assertEqual(serialize_table(parse_wtable(path)), text)

    def test_utf8_header(self):
        unknot = unknot_table(1)
        w = WTable(1, 1, dict(unknot.items()), name="unknot", framing="écarté ∞")
        path = self.output / "framed.table"
        write_table(w, path)
        self.assertEqual(path.read_bytes().decode("utf-8"), serialize_table(w))
        self.assertEqual(parse_wtable(path).framing, "écarté ∞")

    def test_trefoil_fixture(self):
        path = self.input / "trefoil.table"
        w = parse_wtable(path)
        self.assertEqual(w.name, "trefoil")
        self.assertEqual(w.framing, "standard")
        self.assertEqual(w.degree, 1)
        with open(path, "r", encoding="utf-8") as tablefile:
            self.assertEqual(serialize_table(w), tablefile.read())

    def test_header(self):
        text = serialize_table(unlink_table(2, 1))
        self.assertEqual(
            text.splitlines()[:6],
            [
                "# format: v1",
                "# kind: W",
                "# name: unlink-2",
                "# components: 2",
                "# degree: 1",
                "# framing: standard",
            ],
        )
        self.assertEqual(text.splitlines()[6].split("\t")[0], "1|-")

    def test_missing_degrees(self):
        with self.assertRaises(MissingDegrees) as context:
            parse_wtable(self.input / "empty_body.table")
        self.assertEqual(context.exception.missing, [k("1"), k("2"), k("1,1")])

    def test_version(self):
        with self.assertRaises(VersionError):
            parse_wtable(self.input / "future_version.table")

    def test_duplicate_key(self):
        with self.assertRaises(DuplicateKey):
            parse_wtable(self.input / "duplicate_key.table")

    def test_parse_error_position(self):
        with self.assertRaises(ParseError) as context:
            parse_wtable(self.input / "malformed_value.table")
        self.assertEqual(context.exception.line, 6)
        self.assertEqual(context.exception.column, 3)

    def test_key_outside_degree(self):
        path = self.output / "too_big.table"
        with open(path, "w", encoding="utf-8") as tablefile:
            tablefile.write("# format: v1\n# kind: W\n# name: big\n# components: 1\n# degree: 1\n2\t0,1:+1\n")
        with self.assertRaises(ParseError) as context:
            parse_wtable(path)
        self.assertEqual(context.exception.line, 6)

    def test_invalid_name(self):
        path = self.output / "bad_name.table"
        with open(path, "w", encoding="utf-8") as tablefile:
            tablefile.write("# format: v1\n# kind: W\n# name: -bad\n# components: 1\n# degree: 1\n1\t0,1:+1\n")
        with self.assertRaises(ParseError):
            parse_wtable(path)
        with self.assertRaises(ValueError):
            validate_tablename("has space")

    def test_wrong_kind(self):
        path = self.output / "P.table"
        write_table(PTable(1, 1, {k("1"): RatFunc(vnum(1))}), path, "p")
        with self.assertRaises(TableFileError):
            parse_wtable(path)
        header, table = parse_table(path)
        self.assertEqual(header.kind, TableKind.P)
        self.assertEqual(table, PTable(1, 1, {k("1"): RatFunc(vnum(1))}))

    def test_invariant_tables(self):
        result = run_pipeline(unknot_table(2))
        path = self.output / "N.table"
        write_table(result.big_n, path, "unknot", convention=Convention.QRHO)
        text = path.read_text(encoding="utf-8")
        self.assertIn("# convention: qrho\n", text)
        self.assertIn("1\t0\t-1\t1\n1\t0\t1\t-1\n2\n1,1\n", text)

        header, table = parse_table(path)
        self.assertIsInstance(table, NTable)
        self.assertEqual(table, result.big_n)
        self.assertEqual(serialize_table(table, "unknot", convention=Convention.QRHO), text)

    def test_checkn_rationals(self):
        checkn = CheckNTable(1, 2, {k("2"): {(0, 1): Fraction(1, 2)}})
        path = self.output / "checkn.table"
        write_table(checkn, path, "half")
        self.assertIn("2\t0\t1\t1/2\n", path.read_text(encoding="utf-8"))
        _, table = parse_table(path)
        self.assertEqual(table, checkn)

    def test_product_file(self):
        rep = build_product(run_pipeline(unknot_table(2)).checkn, 10, ExpansionMode.Q_INVERSE)
        path = self.output / "product.table"
        write_table(rep, path, "unknot")
        text = path.read_text(encoding="utf-8")
        self.assertIn("# q_order: 10\n# mode: qinv\n", text)
        header, parsed = parse_table(path)
        self.assertEqual(header.kind, TableKind.PRODUCT)
        self.assertEqual(parsed, rep)

    def test_f_sides(self):
        result = run_pipeline(unknot_table(2))
        for kind in (TableKind.F_POWER, TableKind.F_SCHUR):
            path = self.output / f"{kind.value}.table"
            write_table(result.f, path, "unknot", kind)
            header, (parsed_kind, entries) = parse_table(path)
            self.assertEqual(header.kind, kind)
            self.assertEqual(parsed_kind, kind)
            expected = result.f.power if kind is TableKind.F_POWER else result.f.schur
            self.assertEqual(entries, expected)


if __name__ == "__main__":
    unittest.main()
