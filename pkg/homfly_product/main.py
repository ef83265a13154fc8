import typer
import pathlib
import shutil
import logging
from typing_extensions import Annotated
from typing import Optional
from enum import Enum

from rich.console import Console
from rich.logging import RichHandler

from homfly_product.algebra import ExpansionMode
from homfly_product.pipeline import WTable, run_pipeline
from homfly_product.product import (
    MAX_Q_ORDER,
    TruncationOverflow,
    build_product,
    check_truncation,
    roundtrip_verify,
    symmetry_checks,
    unlink_table,
)
from homfly_product.report import (
    render_pipeline,
    render_roundtrip,
    render_symmetries,
)
from homfly_product.schemas import (
    DEFAULT_DEGREE,
    DEFAULT_Q_ORDER,
    Convention,
    PipelineReport,
    TableKind,
)
from homfly_product.tablefile import (
    TableFileError,
    parse_wtable,
    serialize_table,
    write_table,
)


class ExitStatus(Enum):
    OK = 0
    USAGE = 2
    INTEGRALITY_FAILED = 3
    VERIFICATION_FAILED = 4
    SYMMETRY_FAILED = 5
    INPUT_ERROR = 6


DEGREE_ENVVAR = "HOMFLY_PRODUCT_DEGREE"
Q_ORDER_ENVVAR = "HOMFLY_PRODUCT_Q_ORDER"

# Create the typer app
app = typer.Typer()
console = Console()
err_console = Console(stderr=True)

logger = logging.getLogger("homfly_product")


@app.callback()
def main(
    verbose: Annotated[
        int,
        typer.Option(
            "--verbose", "-v", count=True, help="Log progress, repeat for more detail"
        ),
    ] = 0,
):
    """Colored HOMFLY invariant tables and the product form of their partition function"""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def fail(status: ExitStatus, message: str):
    err_console.print(message, markup=False, highlight=False, soft_wrap=True)
    raise typer.Exit(status.value)


def load_table(path: pathlib.Path, degree: int | None) -> WTable:
    """
    Read a W table and truncate it to the requested degree.
    Input problems exit with INPUT_ERROR.
    """
    try:
        table = parse_wtable(path)
        if degree is not None and degree != table.degree:
            table = table.truncate(degree)
    except (TableFileError, ValueError, OSError) as e:
        fail(ExitStatus.INPUT_ERROR, f"Could not read {path}: {e}")
    return table


def convention_of(literal_tinv: bool) -> Convention:
    return Convention.LITERAL_TINV if literal_tinv else Convention.QRHO


InPath = Annotated[
    pathlib.Path,
    typer.Option(
        "--in",
        help="The W table to read",
        exists=True,
        dir_okay=False,
        readable=True,
    ),
]
TableDegree = Annotated[
    Optional[int],
    typer.Option(
        help="Truncate the table to this x-degree, default is the table's degree",
        min=1,
        envvar=DEGREE_ENVVAR,
    ),
]
QOrder = Annotated[
    int,
    typer.Option(
        help="Order of the q-series expansion",
        min=0,
        max=MAX_Q_ORDER,
        envvar=Q_ORDER_ENVVAR,
    ),
]
LiteralTinv = Annotated[
    bool,
    typer.Option(
        "--literal-tinv",
        help="Read P_B off with prod [mu_j] in place of prod 1/[mu_j]",
    ),
]


@app.command()
def gen_unknot(
    degree: Annotated[
        int,
        typer.Option(help="Maximum total colour degree", min=1, envvar=DEGREE_ENVVAR),
    ] = DEFAULT_DEGREE,
    out: Annotated[
        Optional[pathlib.Path],
        typer.Option(help="Where to write the table, default is stdout", writable=True),
    ] = None,
    components: Annotated[
        int, typer.Option(help="Number of unknots in the split union", min=1)
    ] = 1,
):
    """Generate the W table of the unknot, or of a split unlink of unknots"""
    table = unlink_table(components, degree)
    if out is None:
        typer.echo(serialize_table(table), nl=False)
    else:
        write_table(table, out)
        logger.info(f"Wrote {table.name} to {out}")


@app.command()
def pipeline(
    input_path: InPath,
    degree: TableDegree = None,
    literal_tinv: LiteralTinv = False,
    outdir: Annotated[
        pathlib.Path,
        typer.Option(help="Directory to write the staged tables into", writable=True),
    ] = pathlib.Path("pipeline-output"),
    force: Annotated[
        bool, typer.Option(help="Overwrite an existing output directory")
    ] = False,
):
    """Run the full extraction W -> Z -> F -> f -> P -> N -> n -> checkn"""
    table = load_table(input_path, degree)
    convention = convention_of(literal_tinv)
    result = run_pipeline(table, convention=convention)

    # Check the output directory before creating files
    repo_dir = outdir / table.name
    if repo_dir.exists():
        if not force:
            fail(ExitStatus.INPUT_ERROR, f"{repo_dir} already exists, use --force to overwrite")
        shutil.rmtree(repo_dir)
    repo_dir.mkdir(parents=True)

    # If this fails it will delete the half written directory
    try:
        name = table.name
        write_table(result.z, repo_dir / "Z.table", name, convention=convention)
        write_table(result.free, repo_dir / "F.table", name, convention=convention)
        write_table(
            result.f, repo_dir / "f-power.table", name, TableKind.F_POWER, convention
        )
        write_table(
            result.f, repo_dir / "f-schur.table", name, TableKind.F_SCHUR, convention
        )
        write_table(result.p, repo_dir / "P.table", name, convention=convention)
        for stage, filename in (
            (result.big_n, "N.table"),
            (result.small_n, "n.table"),
            (result.checkn, "checkn.table"),
        ):
            if stage is not None:
                write_table(stage, repo_dir / filename, name, convention=convention)

        report = PipelineReport(
            name=name,
            components=table.components,
            degree=table.degree,
            convention=convention,
            integrality=result.integrality,
            nonintegral_checkn=result.nonintegral_checkn(),
        )
        with open(repo_dir / "report.json", "w", encoding="utf-8") as reportfile:
            reportfile.write(report.model_dump_json(indent=4))
        text = render_pipeline(result)
        with open(repo_dir / "report.txt", "w", encoding="utf-8") as reportfile:
            reportfile.write(text + "\n")
    except Exception as e:
        # Cleanup
        shutil.rmtree(repo_dir)
        raise Exception(f"{e}\nCleaning up {repo_dir}")

    console.print(text, markup=False, highlight=False, soft_wrap=True)
    if not result.passed:
        raise typer.Exit(ExitStatus.INTEGRALITY_FAILED.value)


@app.command()
def verify(
    input_path: InPath,
    degree: TableDegree = None,
    q_order: QOrder = DEFAULT_Q_ORDER,
    mode: Annotated[
        ExpansionMode, typer.Option(help="Expand in q (|q| < 1) or in 1/q (|q| > 1)")
    ] = ExpansionMode.Q.value,  # type: ignore
    literal_tinv: LiteralTinv = False,
    report: Annotated[
        Optional[pathlib.Path],
        typer.Option(help="Write the report as JSON to this path", writable=True),
    ] = None,
):
    """Compare the expanded product against the partition function computed directly"""
    table = load_table(input_path, degree)
    try:
        roundtrip = roundtrip_verify(
            table, q_order, ExpansionMode(mode), convention_of(literal_tinv)
        )
    except TruncationOverflow as e:
        fail(ExitStatus.USAGE, str(e))
    if report is not None:
        with open(report, "w", encoding="utf-8") as reportfile:
            reportfile.write(roundtrip.model_dump_json(indent=4))

    console.print(render_roundtrip(roundtrip), markup=False, highlight=False, soft_wrap=True)
    if roundtrip.integrality is not None and not roundtrip.integrality.passed:
        raise typer.Exit(ExitStatus.INTEGRALITY_FAILED.value)
    if roundtrip.discrepancies:
        raise typer.Exit(ExitStatus.VERIFICATION_FAILED.value)


@app.command()
def symmetries(
    input_path: InPath,
    degree: TableDegree = None,
    q_order: QOrder = DEFAULT_Q_ORDER,
    report: Annotated[
        Optional[pathlib.Path],
        typer.Option(help="Write the report as JSON to this path", writable=True),
    ] = None,
):
    """Check the q -> 1/q symmetry, rank-level duality and the N and checkn symmetries"""
    table = load_table(input_path, degree)
    try:
        result = symmetry_checks(table, q_order=q_order)
    except TruncationOverflow as e:
        fail(ExitStatus.USAGE, str(e))
    if report is not None:
        with open(report, "w", encoding="utf-8") as reportfile:
            reportfile.write(result.model_dump_json(indent=4))

    console.print(render_symmetries(result), markup=False, highlight=False, soft_wrap=True)
    if not result.passed:
        raise typer.Exit(ExitStatus.SYMMETRY_FAILED.value)


@app.command()
def product(
    input_path: InPath,
    out: Annotated[
        Optional[pathlib.Path],
        typer.Option(help="Where to write the product, default is stdout", writable=True),
    ] = None,
    degree: TableDegree = None,
    q_order: QOrder = DEFAULT_Q_ORDER,
    mode: Annotated[
        ExpansionMode, typer.Option(help="Expansion branch recorded with the product")
    ] = ExpansionMode.Q.value,  # type: ignore
    literal_tinv: LiteralTinv = False,
):
    """Write the factors of the infinite product form"""
    table = load_table(input_path, degree)
    try:
        check_truncation(table.degree, q_order)
    except TruncationOverflow as e:
        fail(ExitStatus.USAGE, str(e))

    convention = convention_of(literal_tinv)
    result = run_pipeline(table, convention=convention)
    if not result.passed:
        fail(
            ExitStatus.INTEGRALITY_FAILED,
            f"{table.name} fails integrality at {', '.join(r.key for r in result.integrality.failures())}",
        )

    rep = build_product(result.checkn, q_order, ExpansionMode(mode))
    if out is None:
        typer.echo(serialize_table(rep, table.name, convention=convention), nl=False)
    else:
        write_table(rep, out, table.name, convention=convention)
        logger.info(f"Wrote {len(rep.factors)} factors to {out}")


if __name__ == "__main__":
    app()
