"""Parse delimited alert-log files and schema config files.

Log format: one record per line, delimiter-separated fields in schema
order, optional ``#`` comment lines, optional single header line. A bad
line is rejected and reported, never fatal; nightly rebuilds must survive
one corrupt record.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Union

from .errors import EmptyDatasetError, SchemaError, ValueParseError
from .model import (
    Alert,
    AlertDataset,
    AttributeSchema,
    FieldKind,
    SchemaField,
    canonicalize_value,
    split_timestamp,
)

Source = Union[str, Path, IO[str], IO[bytes]]


@dataclass(frozen=True)
class LogFormat:
    """How a log file is laid out on disk.

    The delimiter must never occur unescaped inside a value; there is no
    quoting. Tab is the default because signature names may contain most
    other punctuation.
    """

    delimiter: str = "\t"
    comment_prefix: str | None = "#"
    has_header: bool = False

    def __post_init__(self) -> None:
        if len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")


@dataclass(frozen=True)
class RejectedLine:
    line_number: int
    reason: str


@dataclass(frozen=True)
class ParseResult:
    dataset: AlertDataset
    rejects: tuple[RejectedLine, ...]


def _open_lines(source: Source):
    """Yield (owned_handle, line_iterable) for a path or stream."""
    if isinstance(source, (str, Path)):
        handle = open(source, "r", encoding="utf-8", newline="")
        return handle, handle
    if isinstance(source, io.TextIOBase) or hasattr(source, "encoding"):
        return None, source
    # byte stream
    return None, io.TextIOWrapper(source, encoding="utf-8")


def parse_log(
    source: Source, schema: AttributeSchema, fmt: LogFormat = LogFormat()
) -> ParseResult:
    """Parse a delimited log into an AlertDataset.

    Input record order is preserved and tids are assigned 0..n-1 over the
    accepted records. Malformed lines (wrong column count, unparseable
    numeric or timestamp values) are collected into the rejects report and
    parsing continues. Raises EmptyDatasetError when nothing parses.
    """
    if not schema.itemizable_indexes():
        raise SchemaError("schema has no itemizable fields; nothing to mine")
    handle, lines = _open_lines(source)
    alerts: list[Alert] = []
    rejects: list[RejectedLine] = []
    try:
        header_pending = fmt.has_header
        for line_number, raw_line in enumerate(lines, start=1):
            line = raw_line.rstrip("\r\n")
            if not line.strip():
                continue
            if fmt.comment_prefix and line.startswith(fmt.comment_prefix):
                continue
            if header_pending:
                header_pending = False
                continue
            fields = line.split(fmt.delimiter)
            if len(fields) != schema.field_count:
                rejects.append(
                    RejectedLine(
                        line_number,
                        f"expected {schema.field_count} fields, got {len(fields)}",
                    )
                )
                continue
            try:
                values = tuple(
                    _canonical_field(raw, f) for raw, f in zip(fields, schema.fields)
                )
            except ValueParseError as exc:
                rejects.append(RejectedLine(line_number, str(exc)))
                continue
            alerts.append(Alert(len(alerts), values))
    finally:
        if handle is not None:
            handle.close()
    if not alerts:
        raise EmptyDatasetError(
            f"no valid alert records in input ({len(rejects)} rejected)"
        )
    return ParseResult(AlertDataset(schema, tuple(alerts)), tuple(rejects))


def _canonical_field(raw: str, f: SchemaField) -> str:
    if f.kind in (FieldKind.NUMERIC, FieldKind.TIMESTAMP):
        value = canonicalize_value(raw, f.kind)
        if f.kind is FieldKind.TIMESTAMP and value != "null":
            try:
                split_timestamp(value)
            except ValueParseError as exc:
                raise ValueParseError(str(exc), field=f.name) from None
        return value
    if f.kind is FieldKind.CATEGORICAL:
        return canonicalize_value(raw, f.kind)
    return raw.strip()


def write_log(target: Source, dataset: AlertDataset, fmt: LogFormat = LogFormat()) -> None:
    """Serialize a dataset back to its delimited form (debug writer; also
    used to emit synthetic logs). Round-trips value-identically with
    parse_log on canonical input."""
    handle = None
    if isinstance(target, (str, Path)):
        handle = open(target, "w", encoding="utf-8", newline="")
        out = handle
    else:
        out = target
    try:
        for alert in dataset.alerts:
            out.write(fmt.delimiter.join(alert.values))
            out.write("\n")
    finally:
        if handle is not None:
            handle.close()


def write_rejects(target: Source, rejects: Iterable[RejectedLine]) -> None:
    """Rejects report: one `line_number<TAB>reason` row per rejected line."""
    handle = None
    if isinstance(target, (str, Path)):
        handle = open(target, "w", encoding="utf-8", newline="")
        out = handle
    else:
        out = target
    try:
        for r in rejects:
            out.write(f"{r.line_number}\t{r.reason}\n")
    finally:
        if handle is not None:
            handle.close()


_KINDS_BY_NAME = {k.value: k for k in FieldKind}


def load_schema(source: Source) -> AttributeSchema:
    """Read a schema config: one `name<TAB>kind` entry per line, order
    defining column order. Blank lines and `#` comments are skipped."""
    handle, lines = _open_lines(source)
    fields: list[SchemaField] = []
    try:
        for line_number, raw_line in enumerate(lines, start=1):
            line = raw_line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise SchemaError(
                    f"schema line {line_number}: expected 'name<TAB>kind', got {line!r}"
                )
            name, kind_text = parts[0].strip(), parts[1].strip().lower()
            kind = _KINDS_BY_NAME.get(kind_text)
            if kind is None:
                raise SchemaError(
                    f"schema line {line_number}: unknown field kind {kind_text!r}"
                )
            fields.append(SchemaField(name, kind))
    finally:
        if handle is not None:
            handle.close()
    if not fields:
        raise SchemaError("schema config defines no fields")
    return AttributeSchema(tuple(fields))


def write_schema(target: Source, schema: AttributeSchema) -> None:
    handle = None
    if isinstance(target, (str, Path)):
        handle = open(target, "w", encoding="utf-8", newline="")
        out = handle
    else:
        out = target
    try:
        for f in schema.fields:
            out.write(f"{f.name}\t{f.kind.value}\n")
    finally:
        if handle is not None:
            handle.close()
