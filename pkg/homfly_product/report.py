"""
Plain text rendering of pipeline results and verification reports.
"""

from fractions import Fraction

from homfly_product.pipeline import GenusKey, InvariantTable, PipelineResult
from homfly_product.schemas import IntegralityReport, RoundTripReport, SymmetryReport


def format_t(q2: int) -> str:
    """t^Q from the doubled exponent 2Q"""
    if q2 == 0:
        return ""
    if q2 % 2 == 0:
        return "t" if q2 == 2 else f"t^{q2 // 2}"
    return f"t^({q2}/2)"


def format_genus(g: int) -> str:
    if g == 0:
        return ""
    return "[1]^2" if g == 1 else f"[1]^{2 * g}"


def _term(coeff: int | Fraction, factors: list[str]) -> str:
    factors = [f for f in factors if f]
    if not factors:
        return str(coeff)
    body = "*".join(factors)
    if coeff == 1:
        return body
    if coeff == -1:
        return f"-{body}"
    return f"{coeff}*{body}"


def genus_expansion_text(row: dict[GenusKey, int | Fraction]) -> str:
    """
    >>> genus_expansion_text({(0, -1): 1, (0, 1): -1})
    't^(-1/2) - t^(1/2)'
    """
    if not row:
        return "0"
    terms = [_term(v, [format_genus(g), format_t(q2)]) for (g, q2), v in sorted(row.items())]
    return " + ".join(terms).replace("+ -", "- ")


def render_integrality(report: IntegralityReport) -> str:
    lines = []
    for row in report.rows:
        if row.passed:
            lines.append(f"  {row.key}\tpass")
        else:
            detail = f" (remainder {row.remainder})" if row.remainder else ""
            lines.append(f"  {row.key}\tFAIL: {row.reason}{detail}")
    return "\n".join(lines)


def render_invariants(table: InvariantTable, label: str) -> str:
    lines = []
    for key, row in table.items():
        if not row:
            lines.append(f"  {label}[{key}] = 0")
            continue
        entries = ", ".join(f"(g={g}, 2Q={q2}): {v}" for (g, q2), v in row.items())
        g_max, q_max = table.bounds(key)
        lines.append(f"  {label}[{key}] = {{{entries}}}  g <= {g_max}, |2Q| <= {q_max}")
    return "\n".join(lines)


def render_pipeline(result: PipelineResult) -> str:
    w = result.w
    sections = [
        f"{w.name}: {w.components} component(s), degree {w.degree}, convention {result.convention.value}",
        "Integrality of [1]^2 P_B:",
        render_integrality(result.integrality),
    ]
    if result.big_n is not None:
        sections.append("Genus expansion [1]^2 P_B = sum N [1]^2g t^Q:")
        sections.extend(
            f"  [1]^2 P[{key}] = {genus_expansion_text(row)}" for key, row in result.big_n.items()
        )
    if result.small_n is not None:
        sections.append("n invariants:")
        sections.append(render_invariants(result.small_n, "n"))
    if result.checkn is not None:
        sections.append("checkn invariants:")
        sections.append(render_invariants(result.checkn, "checkn"))
        nonintegral = result.nonintegral_checkn()
        if nonintegral:
            sections.append(f"Non-integer checkn rows: {', '.join(nonintegral)}")
    return "\n".join(sections)


def render_roundtrip(report: RoundTripReport) -> str:
    header = f"Round trip {report.name}: degree {report.degree}, q-order {report.q_order}, mode {report.mode.value}"
    if report.integrality is not None and not report.integrality.passed:
        return f"{header}\nIntegrality failed, no product to compare:\n{render_integrality(report.integrality)}"
    if not report.discrepancies:
        return f"{header}\nNo discrepancies over {report.compared_keys} keys"
    lines = [header, f"{len(report.discrepancies)} discrepancies:"]
    lines.extend(
        f"  {d.key}\ts^{d.s_power} v^{d.v_power}\t{d.difference}" for d in report.discrepancies
    )
    return "\n".join(lines)


def render_symmetries(report: SymmetryReport) -> str:
    lines = [f"Symmetries of {report.name} up to degree {report.degree}:"]
    for result in report.results:
        status = "holds" if result.passed else f"FAILS at {', '.join(result.failures)}"
        lines.append(f"  {result.identity}\t{status}")
    return "\n".join(lines)
