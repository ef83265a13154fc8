import json
import pathlib
import shutil
import unittest

from typer.testing import CliRunner

from homfly_product.main import ExitStatus, app
from homfly_product.partitions import partition_vectors_upto
from homfly_product.product import ProductRep, unknot_table
from homfly_product.schemas import TableKind
from homfly_product.tablefile import parse_table, parse_wtable, serialize_table

runner = CliRunner()


class TestCli(unittest.TestCase):
    def setUp(self) -> None:
        self.input = pathlib.Path("tests/test_input")
        self.output = pathlib.Path("tests/test_output/cli")

        # Clean up any previous test runs
        if self.output.exists():
            shutil.rmtree(self.output)
        self.output.mkdir(parents=True)

        self.unknot = self.output / "unknot.table"
        result = runner.invoke(app, ["gen-unknot", "--degree", "2", "--out", str(self.unknot)])
        self.assertEqual(result.exit_code, 0, result.output)

    def test_gen_unknot_stdout(self):
        result = runner.invoke(app, ["gen-unknot", "--degree", "2"])
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.output, serialize_table(unknot_table(2)))

    def test_gen_unknot_file(self):
        self.assertEqual(parse_wtable(self.unknot), unknot_table(2))

    def test_gen_unlink(self):
        result = runner.invoke(app, ["gen-unknot", "--degree", "1", "--components", "2"])
        self.assertEqual(result.exit_code, 0)
        self.assertIn("# name: unlink-2\n# components: 2\n", result.output)

    def test_degree_from_environment(self):
        result = runner.invoke(app, ["gen-unknot"], env={"HOMFLY_PRODUCT_DEGREE": "1"})
        self.assertEqual(result.exit_code, 0)
        self.assertIn("# degree: 1\n", result.output)

    def test_verify(self):
        report = self.output / "verify.json"
        result = runner.invoke(
            app,
            ["verify", "--in", str(self.unknot), "--q-order", "8", "--report", str(report)],
        )
        self.assertEqual(result.exit_code, ExitStatus.OK.value, result.output)
        self.assertIn("No discrepancies", result.output)

        data = json.loads(report.read_text(encoding="utf-8"))
        self.assertEqual(data["discrepancies"], [])
        self.assertEqual(data["mode"], "q")
        self.assertEqual(data["compared_keys"], 4)

    def test_verify_inverse_mode(self):
        result = runner.invoke(
            app, ["verify", "--in", str(self.unknot), "--q-order", "8", "--mode", "qinv"]
        )
        self.assertEqual(result.exit_code, ExitStatus.OK.value, result.output)

    def test_verify_degree_truncation(self):
        result = runner.invoke(app, ["verify", "--in", str(self.unknot), "--degree", "1"])
        self.assertEqual(result.exit_code, ExitStatus.OK.value, result.output)
        result = runner.invoke(app, ["verify", "--in", str(self.unknot), "--degree", "3"])
        self.assertEqual(result.exit_code, ExitStatus.INPUT_ERROR.value)

    def test_verify_bad_table(self):
        result = runner.invoke(app, ["verify", "--in", str(self.input / "bad.table")])
        self.assertEqual(result.exit_code, ExitStatus.INTEGRALITY_FAILED.value)

    def test_pipeline(self):
        outdir = self.output / "pipeline"
        result = runner.invoke(
            app, ["pipeline", "--in", str(self.unknot), "--outdir", str(outdir)]
        )
        self.assertEqual(result.exit_code, ExitStatus.OK.value, result.output)

        # Check the staged tables exist
        for name in (
            "Z.table",
            "F.table",
            "f-power.table",
            "f-schur.table",
            "P.table",
            "N.table",
            "n.table",
            "checkn.table",
            "report.json",
            "report.txt",
        ):
            self.assertTrue((outdir / "unknot" / name).exists(), name)

        header, checkn = parse_table(outdir / "unknot" / "checkn.table")
        self.assertEqual(header.kind, TableKind.CHECK_N)
        self.assertEqual(len(checkn.nonzero()), 2)

        report = json.loads((outdir / "unknot" / "report.json").read_text(encoding="utf-8"))
        self.assertEqual(report["convention"], "qrho")
        self.assertTrue(all(row["passed"] for row in report["integrality"]["rows"]))

    def test_pipeline_refuses_overwrite(self):
        outdir = self.output / "pipeline"
        args = ["pipeline", "--in", str(self.unknot), "--outdir", str(outdir)]
        self.assertEqual(runner.invoke(app, args).exit_code, ExitStatus.OK.value)
        self.assertEqual(runner.invoke(app, args).exit_code, ExitStatus.INPUT_ERROR.value)
        self.assertEqual(runner.invoke(app, args + ["--force"]).exit_code, ExitStatus.OK.value)

    def test_pipeline_integrality_failure(self):
        outdir = self.output / "pipeline"
        result = runner.invoke(
            app, ["pipeline", "--in", str(self.input / "bad.table"), "--outdir", str(outdir)]
        )
        self.assertEqual(result.exit_code, ExitStatus.INTEGRALITY_FAILED.value)
        self.assertIn("FAIL", result.output)

        # The failing row is reported and no N tables are written
        report = json.loads((outdir / "bad" / "report.json").read_text(encoding="utf-8"))
        failing = [row["key"] for row in report["integrality"]["rows"] if not row["passed"]]
        self.assertEqual(failing, ["1"])
        self.assertFalse((outdir / "bad" / "N.table").exists())

    def test_pipeline_literal_tinv(self):
        outdir = self.output / "pipeline"
        result = runner.invoke(
            app,
            ["pipeline", "--in", str(self.unknot), "--outdir", str(outdir), "--literal-tinv"],
        )
        self.assertEqual(result.exit_code, ExitStatus.OK.value, result.output)
        self.assertIn("# convention: literal-tinv\n", (outdir / "unknot" / "P.table").read_text(encoding="utf-8"))

    def test_symmetries(self):
        report = self.output / "symmetries.json"
        result = runner.invoke(
            app,
            ["symmetries", "--in", str(self.unknot), "--q-order", "6", "--report", str(report)],
        )
        self.assertEqual(result.exit_code, ExitStatus.OK.value, result.output)
        data = json.loads(report.read_text(encoding="utf-8"))
        self.assertTrue(all(r["passed"] for r in data["results"]))

    def test_product(self):
        out = self.output / "unknot.product"
        result = runner.invoke(
            app, ["product", "--in", str(self.unknot), "--out", str(out), "--q-order", "6"]
        )
        self.assertEqual(result.exit_code, ExitStatus.OK.value, result.output)
        header, rep = parse_table(out)
        self.assertIsInstance(rep, ProductRep)
        self.assertEqual(header.q_order, 6)
        self.assertEqual(len(rep.factors), 2)

    def test_product_bad_table(self):
        result = runner.invoke(app, ["product", "--in", str(self.input / "bad.table")])
        self.assertEqual(result.exit_code, ExitStatus.INTEGRALITY_FAILED.value)

    def test_q_order_limit(self):
        for command in ("verify", "symmetries", "product"):
            result = runner.invoke(app, [command, "--in", str(self.unknot), "--q-order", "300"])
            self.assertEqual(result.exit_code, ExitStatus.USAGE.value, command)
            self.assertIn("--q-order", result.output)

        result = runner.invoke(
            app, ["verify", "--in", str(self.unknot)], env={"HOMFLY_PRODUCT_Q_ORDER": "300"}
        )
        self.assertEqual(result.exit_code, ExitStatus.USAGE.value)

    def test_degree_limit(self):
        # A zero table past the largest expandable degree
        path = self.output / "deep.table"
        lines = ["# format: v1", "# kind: W", "# name: deep", "# components: 1", "# degree: 9"]
        lines.extend(f"{key}\t0" for key in partition_vectors_upto(1, 9))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

        for command in ("verify", "symmetries", "product"):
            result = runner.invoke(app, [command, "--in", str(path)])
            self.assertEqual(result.exit_code, ExitStatus.USAGE.value, command)
            self.assertIsInstance(result.exception, SystemExit)
            self.assertIn("x-degree 9 exceeds the supported maximum 8", result.output)

    def test_input_errors(self):
        result = runner.invoke(app, ["verify", "--in", str(self.input / "missing.table")])
        self.assertEqual(result.exit_code, ExitStatus.USAGE.value)

        result = runner.invoke(app, ["verify", "--in", str(self.input / "malformed_value.table")])
        self.assertEqual(result.exit_code, ExitStatus.INPUT_ERROR.value)
        self.assertIn("line 6, column 3", result.output)


if __name__ == "__main__":
    unittest.main()
