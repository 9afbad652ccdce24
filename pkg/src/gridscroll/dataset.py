"""Ordered data access: schema, fast seeks, slow counts, CSV, SQL rendering.

The in-memory table keeps rows sorted by their composite key ordinal, which by
construction equals lexicographic key order, and instruments every access:
``touch_count`` grows with each index entry examined (binary-search probes and
returned rows), ``slow_query_count`` with each counting query.  Counting
queries enumerate the whole index and honor an injectable latency so that
asynchronous behavior is testable deterministically.

The table is immutable after construction; concurrent readers are
unrestricted.
"""

from __future__ import annotations

import csv
import re
import threading
import time
from dataclasses import dataclass

from .collation import CollationRules
from .errors import DomainError, GridScrollError, IngestError, SchemaError
from .keycodec import (
    BitCodec,
    CollatedStringCodec,
    CompositeCodec,
    DatetimeCodec,
    Float64Codec,
    Int32Codec,
    Int64Codec,
    PlainStringCodec,
    ScalarCodec,
    format_iso_millis,
    parse_iso_millis,
)

KINDS = ("bit", "int32", "int64", "float64", "datetime", "string")

_TRUE_WORDS = frozenset({"1", "t", "true", "yes"})
_FALSE_WORDS = frozenset({"0", "f", "false", "no"})
_PLAIN_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class FieldSpec:
    """One key field: name, machine kind, and string parameters."""

    name: str
    kind: str
    max_length: int | None = None
    rules: CollationRules | None = None
    alphabet: str | None = None

    def build_codec(self) -> ScalarCodec:
        if self.kind == "bit":
            return BitCodec()
        if self.kind == "int32":
            return Int32Codec()
        if self.kind == "int64":
            return Int64Codec()
        if self.kind == "float64":
            return Float64Codec()
        if self.kind == "datetime":
            return DatetimeCodec()
        if self.kind == "string":
            if self.max_length is None:
                raise SchemaError(f"string field {self.name!r} needs max_length")
            if self.rules is not None:
                return CollatedStringCodec(self.rules, self.max_length)
            if self.alphabet is not None:
                return PlainStringCodec(self.alphabet, self.max_length)
            raise SchemaError(
                f"string field {self.name!r} needs collation rules or an alphabet"
            )
        raise SchemaError(f"unknown field kind {self.kind!r} for {self.name!r}")


class KeySchema:
    """Ordered key fields plus the composite codec built from them.

    Field order is significance order: exactly the ORDER BY column order.
    """

    def __init__(self, fields: list[FieldSpec] | tuple[FieldSpec, ...]):
        if not fields:
            raise SchemaError("schema needs at least one key field")
        self.fields = tuple(fields)
        self.names = tuple(f.name for f in self.fields)
        self.codec = CompositeCodec([f.build_codec() for f in self.fields])

    def encode_key(self, values) -> int:
        """Composite ordinal of a key tuple; malformed tuples raise SchemaError."""
        try:
            return self.codec.encode(values)
        except SchemaError:
            raise
        except GridScrollError as exc:
            raise SchemaError(str(exc)) from exc

    def decode_key(self, ordinal: int, clamp_slots: bool = False) -> tuple:
        return self.codec.decode(ordinal, clamp_slots=clamp_slots)

    # -- text and wire boundaries ------------------------------------------------

    def parse_cell(self, i: int, text: str):
        """Field value from CSV text."""
        kind = self.fields[i].kind
        try:
            if kind == "bit":
                lowered = text.strip().lower()
                if lowered in _TRUE_WORDS:
                    return True
                if lowered in _FALSE_WORDS:
                    return False
                raise DomainError(f"not a bit value: {text!r}")
            if kind in ("int32", "int64"):
                return int(text)
            if kind == "float64":
                return float(text)
            if kind == "datetime":
                return parse_iso_millis(text)
            return text
        except ValueError as exc:
            raise DomainError(f"bad {kind} cell {text!r}: {exc}") from None

    def format_cell(self, i: int, value) -> str:
        kind = self.fields[i].kind
        if kind == "bit":
            return "true" if value else "false"
        if kind == "datetime":
            return format_iso_millis(value)
        if kind == "float64":
            return repr(float(value))
        return str(value)

    def to_json_value(self, i: int, value):
        kind = self.fields[i].kind
        if kind == "datetime":
            return format_iso_millis(value)
        return value

    def from_json_value(self, i: int, value):
        kind = self.fields[i].kind
        if kind == "datetime":
            if isinstance(value, str):
                try:
                    return parse_iso_millis(value)
                except ValueError as exc:
                    raise SchemaError(f"bad datetime value {value!r}") from exc
            if isinstance(value, int):
                return value
            raise SchemaError(f"bad datetime value {value!r}")
        if kind == "float64" and isinstance(value, int) and not isinstance(value, bool):
            return float(value)
        return value

    def parse_key_json(self, values) -> tuple:
        if not isinstance(values, (list, tuple)) or len(values) != len(self.fields):
            raise SchemaError(
                f"key must be an array of {len(self.fields)} values in schema order"
            )
        return tuple(self.from_json_value(i, v) for i, v in enumerate(values))

    def describe(self) -> list[dict]:
        out = []
        for f in self.fields:
            entry: dict = {"name": f.name, "kind": f.kind}
            if f.max_length is not None:
                entry["max_length"] = f.max_length
            out.append(entry)
        return out


@dataclass(frozen=True, slots=True)
class Row:
    """Key tuple plus opaque display columns."""

    key: tuple
    payload: tuple = ()


class IndexedTable:
    """Rows in composite-ordinal order with access instrumentation."""

    def __init__(
        self,
        schema: KeySchema,
        ordinals: list[int],
        keys: list[tuple],
        payloads: list[tuple],
        payload_names: tuple[str, ...] = (),
        slow_latency: float = 0.0,
    ):
        self.schema = schema
        self._ordinals = ordinals
        self._keys = keys
        self._payloads = payloads
        self.payload_names = payload_names
        self.slow_latency = slow_latency
        self.touch_count = 0
        self.slow_query_count = 0
        self._stats_lock = threading.Lock()

    # -- construction --------------------------------------------------------------

    @classmethod
    def from_rows(
        cls,
        schema: KeySchema,
        entries,
        payload_names: tuple[str, ...] = (),
        slow_latency: float = 0.0,
    ) -> "IndexedTable":
        """Build from (key_tuple, payload_tuple) pairs; keys must be unique."""
        ordinals: list[int] = []
        keys: list[tuple] = []
        payloads: list[tuple] = []
        for rownum, (key, payload) in enumerate(entries, start=1):
            try:
                ordinals.append(schema.encode_key(key))
            except SchemaError as exc:
                raise IngestError(str(exc), row=rownum) from exc
            keys.append(tuple(key))
            payloads.append(tuple(payload))
        order = sorted(range(len(ordinals)), key=ordinals.__getitem__)
        sorted_ordinals = [ordinals[i] for i in order]
        for j in range(1, len(sorted_ordinals)):
            if sorted_ordinals[j] == sorted_ordinals[j - 1]:
                raise IngestError(
                    f"duplicate key {keys[order[j]]!r}", row=order[j] + 1
                )
        return cls(
            schema,
            sorted_ordinals,
            [keys[i] for i in order],
            [payloads[i] for i in order],
            payload_names=payload_names,
            slow_latency=slow_latency,
        )

    # -- instrumentation -------------------------------------------------------------

    def _touch(self, n: int) -> None:
        with self._stats_lock:
            self.touch_count += n

    def _slow_query(self) -> None:
        with self._stats_lock:
            self.slow_query_count += 1
        if self.slow_latency > 0:
            time.sleep(self.slow_latency)

    @property
    def row_count(self) -> int:
        return len(self._ordinals)

    def _row(self, i: int) -> Row:
        return Row(self._keys[i], self._payloads[i])

    def _rows(self, start: int, stop: int) -> list[Row]:
        start = max(start, 0)
        stop = min(stop, len(self._ordinals))
        if stop <= start:
            return []
        self._touch(stop - start)
        return [self._row(i) for i in range(start, stop)]

    def _probe_left(self, target: int) -> int:
        """Instrumented bisect_left over the ordinal index."""
        arr = self._ordinals
        lo, hi = 0, len(arr)
        probes = 0
        while lo < hi:
            mid = (lo + hi) // 2
            probes += 1
            if arr[mid] < target:
                lo = mid + 1
            else:
                hi = mid
        self._touch(probes)
        return lo

    def _probe_right(self, target: int) -> int:
        """Instrumented bisect_right over the ordinal index."""
        arr = self._ordinals
        lo, hi = 0, len(arr)
        probes = 0
        while lo < hi:
            mid = (lo + hi) // 2
            probes += 1
            if target < arr[mid]:
                hi = mid
            else:
                lo = mid + 1
        self._touch(probes)
        return lo

    # -- fast queries ------------------------------------------------------------------

    def first_last(self, direction: str = "asc") -> Row | None:
        """Minimal (asc) or maximal (desc) row; None on an empty table."""
        if direction not in ("asc", "desc"):
            raise DomainError(f"direction must be 'asc' or 'desc', got {direction!r}")
        if not self._ordinals:
            return None
        self._touch(1)
        return self._row(0 if direction == "asc" else len(self._ordinals) - 1)

    def head(self, h: int) -> list[Row]:
        """First h rows in key order."""
        if h < 1:
            raise DomainError("h must be >= 1")
        return self._rows(0, h)

    def tail(self, h: int) -> list[Row]:
        """Last h rows, still in ascending key order."""
        if h < 1:
            raise DomainError("h must be >= 1")
        return self._rows(len(self._ordinals) - h, len(self._ordinals))

    def seek_ge(self, keys, h: int) -> list[Row]:
        """First h rows with key >= the given tuple (which need not exist)."""
        if h < 1:
            raise DomainError("h must be >= 1")
        start = self._probe_left(self.schema.encode_key(keys))
        return self._rows(start, start + h)

    def seek_gt(self, keys, h: int) -> list[Row]:
        """First h rows with key strictly greater than the given tuple."""
        if h < 1:
            raise DomainError("h must be >= 1")
        start = self._probe_right(self.schema.encode_key(keys))
        return self._rows(start, start + h)

    def seek_lt_desc(self, keys, h: int) -> list[Row]:
        """Up to h rows with key strictly below the tuple, nearest first."""
        if h < 1:
            raise DomainError("h must be >= 1")
        stop = self._probe_left(self.schema.encode_key(keys))
        return list(reversed(self._rows(stop - h, stop)))

    # -- slow queries --------------------------------------------------------------------

    def count_all(self) -> int:
        """Total record count; enumerates the whole index."""
        self._slow_query()
        count = sum(1 for _ in self._ordinals)
        self._touch(len(self._ordinals))
        return count

    def count_less(self, keys) -> int:
        """Number of rows with key strictly below the tuple; enumerates everything."""
        target = self.schema.encode_key(keys)
        self._slow_query()
        count = sum(1 for o in self._ordinals if o < target)
        self._touch(len(self._ordinals))
        return count

    # -- diagnostics (not part of the instrumented query model) ----------------------------

    def ordinal_rank(self, ordinal: int) -> int:
        """Uninstrumented rank of an ordinal; for reporting and benchmarks."""
        import bisect

        return bisect.bisect_left(self._ordinals, ordinal)

    def row_at(self, index: int) -> Row:
        """Uninstrumented positional access; for reporting and benchmarks."""
        return self._row(index)


# -- SQL text rendering --------------------------------------------------------


def _sql_ident(name: str) -> str:
    if _PLAIN_IDENT.match(name):
        return name
    return '"' + name.replace('"', '""') + '"'


def _sql_literal(schema: KeySchema, i: int, value) -> str:
    kind = schema.fields[i].kind
    if kind == "bit":
        return "TRUE" if value else "FALSE"
    if kind in ("int32", "int64"):
        return str(value)
    if kind == "float64":
        return repr(float(value))
    if kind == "datetime":
        return f"TIMESTAMP '{format_iso_millis(value)}'"
    return "'" + str(value).replace("'", "''") + "'"


def render_sql_where(
    schema: KeySchema, keys, strict: bool = False, descending: bool = False
) -> str:
    """WHERE predicate selecting rows at or beyond a key tuple.

    Uses the nested AND/OR form whose top level is a conjunction, which
    composite-index planners can turn into an index range scan; a top-level
    disjunction of the straightforward lexicographic expansion defeats them.
    ``descending`` mirrors every comparison for backward seeks; ``strict``
    excludes the tuple itself.
    """
    schema.encode_key(keys)  # validates arity and domains
    inclusive, exclusive = ("<=", "<") if descending else (">=", ">")
    innermost = exclusive if strict else inclusive

    def clause(i: int) -> str:
        name = _sql_ident(schema.fields[i].name)
        literal = _sql_literal(schema, i, keys[i])
        if i == len(schema.fields) - 1:
            return f"{name} {innermost} {literal}"
        return (
            f"{name} {inclusive} {literal} AND "
            f"({name} {exclusive} {literal} OR ({clause(i + 1)}))"
        )

    return clause(0)


# -- CSV ingestion ---------------------------------------------------------------


def ingest_csv(path, schema: KeySchema, slow_latency: float = 0.0) -> IndexedTable:
    """Load a UTF-8, RFC-4180 CSV whose header covers every schema field.

    Non-key columns become the row payload.  Empty key cells count as NULLs
    and are rejected, as are duplicate composite keys; both report the
    offending 1-based data row number.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError("file has no header row") from None
        positions = []
        for name in schema.names:
            if name not in header:
                raise IngestError(f"header lacks key column {name!r}")
            positions.append(header.index(name))
        payload_positions = [i for i in range(len(header)) if i not in positions]
        payload_names = tuple(header[i] for i in payload_positions)

        def entries():
            for rownum, cells in enumerate(reader, start=1):
                if len(cells) != len(header):
                    raise IngestError(
                        f"expected {len(header)} cells, got {len(cells)}", row=rownum
                    )
                key = []
                for i, pos in enumerate(positions):
                    text = cells[pos]
                    if text == "":
                        raise IngestError(
                            f"empty (NULL) key cell in column {schema.names[i]!r}",
                            row=rownum,
                        )
                    try:
                        key.append(schema.parse_cell(i, text))
                    except DomainError as exc:
                        raise IngestError(str(exc), row=rownum) from exc
                yield tuple(key), tuple(cells[i] for i in payload_positions)

        return IndexedTable.from_rows(
            schema, entries(), payload_names=payload_names, slow_latency=slow_latency
        )
