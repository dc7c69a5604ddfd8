"""JSON schemas shared by the CLI and the bundled corpus.

Every parser validates before any computation starts and names the
offending field in its error message.  Exact values serialize as
{order, coefficient strings}; float renderings are attached for display
and never feed back into computations.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Any, Mapping, Optional

import mpmath

from .classify import LatticeData
from .groups import FiniteAbelianGroup, QuadraticForm
from .scalars import Cyclotomic, QmodZ, to_complex
from .spin import (
    PointedSpinModular,
    SimpleObject,
    SpinModularSummary,
)
from .surgery import CharacteristicSublink, LinkingMatrix

__all__ = [
    "SchemaError",
    "parse_fraction",
    "parse_metric_group",
    "parse_pointed",
    "parse_summary",
    "parse_surgery",
    "parse_lattice",
    "render_cyclotomic",
    "render_matrix",
]


class SchemaError(ValueError):
    """Input document does not match its schema."""


def _require(doc: Mapping, key: str, where: str) -> Any:
    if not isinstance(doc, Mapping):
        raise SchemaError(f"{where}: expected an object")
    if key not in doc:
        raise SchemaError(f"{where}: missing field '{key}'")
    return doc[key]


def parse_fraction(value: Any, where: str) -> Fraction:
    try:
        if isinstance(value, bool):
            raise ValueError
        if isinstance(value, (int, str)):
            return Fraction(value)
    except (ValueError, ZeroDivisionError):
        pass
    raise SchemaError(f"{where}: expected a rational like '3/8', got {value!r}")


def _parse_orders(doc: Mapping, where: str) -> FiniteAbelianGroup:
    orders = _require(doc, "orders", where)
    if not isinstance(orders, list) or not all(
        isinstance(n, int) and n >= 1 for n in orders
    ):
        raise SchemaError(f"{where}.orders: expected a list of integers >= 1")
    return FiniteAbelianGroup(tuple(orders))


def _parse_residue_key(key: str, rank: int, where: str) -> tuple[int, ...]:
    cleaned = key.strip().strip("()").strip()
    if cleaned == "":
        parts: list[str] = []
    else:
        parts = [p.strip() for p in cleaned.split(",") if p.strip() != ""]
    try:
        residues = tuple(int(p) for p in parts)
    except ValueError:
        raise SchemaError(f"{where}: bad residue key {key!r}") from None
    if len(residues) != rank:
        raise SchemaError(
            f"{where}: residue key {key!r} has {len(residues)} entries, expected {rank}"
        )
    return residues


def parse_metric_group(doc: Mapping, where: str = "group") -> QuadraticForm:
    """{"orders": [...], "q": {"gram": [[...]]} | {"table": {...}}}"""
    group = _parse_orders(doc, where)
    q_doc = _require(doc, "q", where)
    if not isinstance(q_doc, Mapping):
        raise SchemaError(f"{where}.q: expected an object with 'gram' or 'table'")
    if "gram" in q_doc:
        gram_rows = q_doc["gram"]
        k = len(group.orders)
        if not isinstance(gram_rows, list) or len(gram_rows) != k:
            raise SchemaError(f"{where}.q.gram: expected {k} rows")
        gram = []
        for i, row in enumerate(gram_rows):
            if not isinstance(row, list) or len(row) != k:
                raise SchemaError(f"{where}.q.gram[{i}]: expected {k} entries")
            gram.append(
                [parse_fraction(x, f"{where}.q.gram[{i}][{j}]") for j, x in enumerate(row)]
            )
        try:
            return QuadraticForm.from_gram(group, gram)
        except ValueError as exc:
            raise SchemaError(f"{where}.q.gram: {exc}") from exc
    if "table" in q_doc:
        table_doc = q_doc["table"]
        if not isinstance(table_doc, Mapping):
            raise SchemaError(f"{where}.q.table: expected an object")
        table = {}
        for key, value in table_doc.items():
            residues = _parse_residue_key(key, len(group.orders), f"{where}.q.table")
            elem = group.element(residues)
            table[elem] = QmodZ(parse_fraction(value, f"{where}.q.table[{key!r}]"))
        if len(table) != group.size:
            raise SchemaError(
                f"{where}.q.table: {len(table)} entries for a group of size {group.size}"
            )
        try:
            return QuadraticForm(group, table)
        except ValueError as exc:
            raise SchemaError(f"{where}.q.table: {exc}") from exc
    raise SchemaError(f"{where}.q: needs either 'gram' or 'table'")


def parse_pointed(doc: Mapping, where: str = "psm") -> PointedSpinModular:
    """Metric-group schema plus {"fermion": [residues]}."""
    q = parse_metric_group(doc, where)
    fermion_doc = _require(doc, "fermion", where)
    if not isinstance(fermion_doc, list) or not all(
        isinstance(x, int) for x in fermion_doc
    ):
        raise SchemaError(f"{where}.fermion: expected a list of integers")
    if len(fermion_doc) != len(q.group.orders):
        raise SchemaError(
            f"{where}.fermion: expected {len(q.group.orders)} residues"
        )
    try:
        return PointedSpinModular(q, q.group.element(tuple(fermion_doc)))
    except ValueError as exc:
        raise SchemaError(f"{where}.fermion: {exc}") from exc


def _parse_dim(value: Any, where: str) -> Cyclotomic:
    if isinstance(value, int) and not isinstance(value, bool):
        return Cyclotomic.from_rational(value)
    if isinstance(value, str):
        return Cyclotomic.from_rational(parse_fraction(value, where))
    if isinstance(value, Mapping) and "order" in value and "coeffs" in value:
        try:
            return Cyclotomic.from_json(value)
        except (ValueError, TypeError) as exc:
            raise SchemaError(f"{where}: {exc}") from exc
    raise SchemaError(
        f"{where}: expected an integer, a rational string, or {{order, coeffs}}"
    )


def parse_summary(doc: Mapping, where: str = "summary") -> SpinModularSummary:
    simples_doc = _require(doc, "simples", where)
    fermion_dim = _require(doc, "fermion_dim", where)
    if fermion_dim not in (1, -1):
        raise SchemaError(f"{where}.fermion_dim: must be 1 or -1")
    if not isinstance(simples_doc, list) or not simples_doc:
        raise SchemaError(f"{where}.simples: expected a nonempty list")
    simples = []
    for i, entry in enumerate(simples_doc):
        label = _require(entry, "label", f"{where}.simples[{i}]")
        degree = _require(entry, "degree", f"{where}.simples[{i}]")
        fixed = _require(entry, "fixed_by_f", f"{where}.simples[{i}]")
        dim = _parse_dim(_require(entry, "dim", f"{where}.simples[{i}]"),
                         f"{where}.simples[{i}].dim")
        if degree not in (0, 1):
            raise SchemaError(f"{where}.simples[{i}].degree: must be 0 or 1")
        if not isinstance(fixed, bool):
            raise SchemaError(f"{where}.simples[{i}].fixed_by_f: must be a boolean")
        simples.append(SimpleObject(str(label), dim, degree, fixed))
    try:
        return SpinModularSummary(simples=simples, fermion_dim=fermion_dim)
    except ValueError as exc:
        raise SchemaError(f"{where}.simples: {exc}") from exc


def parse_surgery(
    doc: Mapping, where: str = "surgery"
) -> tuple[LinkingMatrix, Optional[CharacteristicSublink]]:
    """{"linking_matrix": [[ints]], "sublink": [bits] optional}"""
    rows = _require(doc, "linking_matrix", where)
    if not isinstance(rows, list):
        raise SchemaError(f"{where}.linking_matrix: expected a list of rows")
    for i, row in enumerate(rows):
        if not isinstance(row, list) or not all(isinstance(x, int) for x in row):
            raise SchemaError(
                f"{where}.linking_matrix[{i}]: expected a list of integers"
            )
    try:
        link = LinkingMatrix.from_rows(rows)
    except ValueError as exc:
        raise SchemaError(f"{where}.linking_matrix: {exc}") from exc
    sublink = None
    if doc.get("sublink") is not None:
        bits = doc["sublink"]
        if (
            not isinstance(bits, list)
            or len(bits) != link.size
            or any(b not in (0, 1) for b in bits)
        ):
            raise SchemaError(
                f"{where}.sublink: expected {link.size} entries from {{0, 1}}"
            )
        sublink = CharacteristicSublink(tuple(bits))
        lhs = [
            sum(link.entries[i][j] * bits[j] for j in range(link.size)) % 2
            for i in range(link.size)
        ]
        if lhs != [x % 2 for x in link.diagonal()]:
            raise SchemaError(f"{where}.sublink: vector is not characteristic")
    return link, sublink


def parse_lattice(doc: Mapping, where: str = "lattice") -> LatticeData:
    gram = _require(doc, "gram", where)
    w2 = _require(doc, "w2", where)
    if not isinstance(gram, list) or not all(
        isinstance(row, list) and all(isinstance(x, int) for x in row) for row in gram
    ):
        raise SchemaError(f"{where}.gram: expected integer rows")
    if not isinstance(w2, list) or not all(isinstance(x, int) for x in w2):
        raise SchemaError(f"{where}.w2: expected a list of integers")
    try:
        return LatticeData.from_lists(gram, w2)
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


# -- rendering ---------------------------------------------------------------


def _format_mpf(value, digits: int) -> str:
    return mpmath.nstr(value, digits, strip_zeros=False)


def render_cyclotomic(value: Cyclotomic, digits: int = 12) -> dict:
    approx = to_complex(value, digits)
    doc = value.to_json()
    doc["float"] = {
        "re": _format_mpf(approx.real, digits),
        "im": _format_mpf(approx.imag, digits),
    }
    return doc


def render_matrix(rows, digits: int = 12) -> list:
    return [[render_cyclotomic(entry, digits) for entry in row] for row in rows]
