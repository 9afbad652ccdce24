"""gridscroll: constant-time scrollbar addressing over large ordered datasets.

A scrollbar position maps to a key-tuple ordinal through a monotone
interpolation table refined asynchronously by exact counting queries; the
key tuple then drives an index-seek query, so the user-facing path never
waits on anything slower than a logarithmic lookup.
"""

from .collation import CharComponents, CollationRules, parse_rules
from .dataset import (
    FieldSpec,
    IndexedTable,
    KeySchema,
    Row,
    ingest_csv,
    render_sql_where,
)
from .engine import (
    EngineConfig,
    GridState,
    MaxPositionChanged,
    RefinementOutcome,
    ScrollEngine,
    ThumbCorrected,
    WindowChanged,
    start,
)
from .errors import (
    DomainError,
    DuplicateChar,
    EmptyDomain,
    EmptyTable,
    GridScrollError,
    IngestError,
    LengthExceeded,
    MalformedRule,
    NoSuchSlot,
    OutOfRange,
    RangeError,
    SchemaError,
    StaleEndpointConflict,
    UnknownChar,
)
from .interpolation import EditSummary, InterpolationTable
from .keycodec import (
    BitCodec,
    CollatedStringCodec,
    CompositeCodec,
    DatetimeCodec,
    Float64Codec,
    Int32Codec,
    Int64Codec,
    PlainStringCodec,
    string_count,
)
from .segment_stats import SegmentModel, interpolate_key, interpolate_position

__version__ = "0.1.0"

__all__ = [
    "BitCodec",
    "CharComponents",
    "CollatedStringCodec",
    "CollationRules",
    "CompositeCodec",
    "DatetimeCodec",
    "DomainError",
    "DuplicateChar",
    "EditSummary",
    "EmptyDomain",
    "EmptyTable",
    "EngineConfig",
    "FieldSpec",
    "Float64Codec",
    "GridScrollError",
    "GridState",
    "IndexedTable",
    "IngestError",
    "Int32Codec",
    "Int64Codec",
    "InterpolationTable",
    "KeySchema",
    "LengthExceeded",
    "MalformedRule",
    "MaxPositionChanged",
    "NoSuchSlot",
    "OutOfRange",
    "PlainStringCodec",
    "RangeError",
    "RefinementOutcome",
    "Row",
    "SchemaError",
    "ScrollEngine",
    "SegmentModel",
    "StaleEndpointConflict",
    "ThumbCorrected",
    "UnknownChar",
    "WindowChanged",
    "ingest_csv",
    "interpolate_key",
    "interpolate_position",
    "parse_rules",
    "render_sql_where",
    "start",
    "string_count",
]
