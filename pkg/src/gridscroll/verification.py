"""Self-contained verification suites behind ``gridscroll verify``.

Each suite checks one contract against an oracle computed right here —
brute-force enumeration, linear filtering, or exhaustive comparison — and
reports pass/fail counts.  The suites double as a quick health check on a
configured dataset fixture.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations, product

from .collation import CollationRules, default_cyrillic_rules
from .config import AppConfig
from .dataset import FieldSpec, IndexedTable, KeySchema, ingest_csv, render_sql_where
from .errors import GridScrollError, StaleEndpointConflict
from .interpolation import InterpolationTable
from .keycodec import (
    BitCodec,
    CollatedStringCodec,
    CompositeCodec,
    Float64Codec,
    Int32Codec,
    Int64Codec,
    PlainStringCodec,
    string_count,
)
from .segment_stats import SegmentModel


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    notes: list[str] = field(default_factory=list)

    def check(self, ok: bool, message: str) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.notes) < 20:
                self.notes.append(message)


# -- suite: scalar and composite codecs -----------------------------------------


def _check_order_and_roundtrip(result, codec, values, less=None):
    less = less or (lambda a, b: a < b)
    encoded = [codec.encode(v) for v in values]
    for v, e in zip(values, encoded):
        result.check(codec.decode(e) == v, f"round trip failed for {v!r}")
    rng = random.Random(7)
    for _ in range(len(values)):
        a, b = rng.randrange(len(values)), rng.randrange(len(values))
        if a == b:
            continue
        agree = less(values[a], values[b]) == (encoded[a] < encoded[b])
        result.check(agree, f"order mismatch for {values[a]!r} vs {values[b]!r}")


def suite_codecs(seed: int = 1) -> SuiteResult:
    result = SuiteResult("codec order isomorphism and round trips")
    rng = random.Random(seed)

    _check_order_and_roundtrip(result, BitCodec(), [False, True])
    ints32 = [rng.randint(-(2**31), 2**31 - 1) for _ in range(2000)]
    ints32 += [-(2**31), 2**31 - 1, 0, -1, 1]
    _check_order_and_roundtrip(result, Int32Codec(), ints32)
    ints64 = [rng.randint(-(2**63), 2**63 - 1) for _ in range(2000)]
    _check_order_and_roundtrip(result, Int64Codec(), ints64)

    floats = [rng.uniform(-1e12, 1e12) for _ in range(1000)]
    floats += [rng.gauss(0, 1) for _ in range(1000)]
    floats += [0.0, -1.5, 1.5, 1e-308, -1e-308, float("inf"), float("-inf")]
    fc = Float64Codec()
    _check_order_and_roundtrip(result, fc, floats)
    result.check(fc.encode(-0.0) < fc.encode(0.0), "-0.0 must encode below +0.0")
    result.check(
        fc.encode(float("nan")) > fc.encode(float("inf")),
        "NaN must encode above every number",
    )

    plain = PlainStringCodec("abc", 4)
    words = sorted(
        "".join(w)
        for length in range(5)
        for w in product("abc", repeat=length)
    )
    for rank, word in enumerate(words):
        result.check(plain.encode(word) == rank, f"plain rank of {word!r}")

    rules = default_cyrillic_rules()
    collated = CollatedStringCodec(rules, 2)
    alphabet = [ch for group in rules.groups for var in group for ch in var]
    strings = [""] + [a for a in alphabet] + [
        a + b for a in alphabet[:12] for b in alphabet[:12]
    ]
    ordered = sorted(strings, key=cmp_to_key(rules.compare))
    encoded = [collated.encode(s) for s in ordered]
    result.check(
        all(x < y for x, y in zip(encoded, encoded[1:])),
        "collated encode order must match the comparator order",
    )
    for s in ordered[:: max(1, len(ordered) // 200)]:
        result.check(collated.decode(collated.encode(s)) == s, f"collated trip {s!r}")

    comp = CompositeCodec([Int32Codec(), BitCodec()])
    tuples = [(rng.randint(-100, 100), rng.random() < 0.5) for _ in range(800)]
    encoded = [comp.encode(t) for t in tuples]
    for t, e in zip(tuples, encoded):
        result.check(comp.decode(e) == t, f"composite trip {t!r}")
    for _ in range(800):
        a, b = rng.randrange(len(tuples)), rng.randrange(len(tuples))
        if tuples[a] == tuples[b]:
            continue
        result.check(
            (tuples[a] < tuples[b]) == (encoded[a] < encoded[b]),
            f"composite order {tuples[a]!r} vs {tuples[b]!r}",
        )
    return result


# -- suite: string enumeration ----------------------------------------------------


def suite_string_enumeration() -> SuiteResult:
    result = SuiteResult("string enumeration against brute-force sort")
    codec = PlainStringCodec("ab", 2)
    expected = ["", "a", "aa", "ab", "b", "ba", "bb"]
    for rank, word in enumerate(expected):
        result.check(codec.encode(word) == rank, f"{word!r} should rank {rank}")
        result.check(codec.decode(rank) == word, f"rank {rank} should be {word!r}")
    result.check(string_count(2, 3) == 15, "count of length<=3 binary strings")
    result.check(string_count(2, 0) == 1, "only the empty string at m=0")
    result.check(string_count(1, 5) == 6, "unary alphabet counts prefixes")

    rules = CollationRules.parse("<а,А<б,Б;в,В")
    codec = CollatedStringCodec(rules, 2)
    alphabet = "аАбБвВ"
    strings = [""] + [a for a in alphabet] + [a + b for a in alphabet for b in alphabet]
    ordered = sorted(strings, key=cmp_to_key(rules.compare))
    encoded = [codec.encode(s) for s in ordered]
    result.check(
        all(x < y for x, y in zip(encoded, encoded[1:])),
        "three-pass comparator order must equal encode order",
    )
    for s in strings:
        result.check(codec.decode(codec.encode(s)) == s, f"trip {s!r}")
    return result


# -- suite: segment statistics ------------------------------------------------------


def _enumerate_placements(span: int, max_position: int):
    """All strictly monotone record placements pinned at offsets 0 and span."""
    for interior in combinations(range(1, span), max_position - 1):
        yield (0,) + interior + (span,)


def suite_segment_model() -> SuiteResult:
    result = SuiteResult("segment statistics against exhaustive enumeration")
    for span in range(2, 10):
        for max_position in range(1, min(span, 3) + 1):
            model = SegmentModel(0, span, max_position)
            placements = list(_enumerate_placements(span, max_position))
            result.check(
                model.total_placements() == len(placements),
                f"total count span={span} mp={max_position}",
            )
            for key in range(1, span + 1):
                below = [sum(1 for r in p if r < key) for p in placements]
                for position in range(1, max_position + 1):
                    result.check(
                        model.placements_through(key, position)
                        == sum(1 for b in below if b == position),
                        f"count through ({key},{position}) span={span}",
                    )
                mean = Fraction(sum(below), len(below))
                result.check(
                    model.expected_position(key) == mean,
                    f"mean at key={key} span={span} mp={max_position}",
                )
                var = (
                    Fraction(sum(b * b for b in below), len(below)) - mean * mean
                )
                result.check(
                    model.position_variance(key) == var,
                    f"variance at key={key} span={span} mp={max_position}",
                )
    return result


# -- suite: interpolation table fuzz --------------------------------------------------


def suite_interpolation(seed: int = 1) -> SuiteResult:
    result = SuiteResult("interpolation table monotonicity under fuzzing")
    rng = random.Random(seed)
    table = InterpolationTable(0, 10**9, max_position=5000, capacity=64)
    for step in range(2000):
        try:
            table.insert_point(rng.randint(1, 4999), rng.randint(1, 10**9 - 1))
        except StaleEndpointConflict:
            pass
        points = table.points()
        positions = [p for p, _ in points]
        ordinals = [o for _, o in points]
        ok = (
            positions[0] == 0
            and positions[-1] == table.max_position
            and all(a < b for a, b in zip(positions, positions[1:]))
            and all(a < b for a, b in zip(ordinals, ordinals[1:]))
            and len(points) <= 64
        )
        result.check(ok, f"structure broken after insert #{step}")
        if not ok:
            break
    return result


# -- suite: SQL predicate rendering ------------------------------------------------------


def _has_top_level_or(sql: str) -> bool:
    depth = 0
    tokens = sql.replace("(", " ( ").replace(")", " ) ").split()
    for token in tokens:
        if token == "(":
            depth += 1
        elif token == ")":
            depth -= 1
        elif token == "OR" and depth == 0:
            return True
    return False


def _eval_predicate(sql: str, names, values) -> bool:
    expr = sql.replace(" AND ", " and ").replace(" OR ", " or ")
    env = dict(zip(names, values))
    return bool(eval(expr, {"__builtins__": {}}, env))  # ints only here


def suite_sql_predicates() -> SuiteResult:
    result = SuiteResult("seek predicate equivalence on exhaustive grids")
    for n in (1, 2, 3):
        schema = KeySchema([FieldSpec(f"k{i + 1}", "int32") for i in range(n)])
        names = [f"k{i + 1}" for i in range(n)]
        grid = list(product(range(4), repeat=n))
        for bound in grid:
            for strict in (False, True):
                sql = render_sql_where(schema, bound, strict=strict)
                result.check(
                    not _has_top_level_or(sql), f"top-level OR in {sql!r}"
                )
                for row in grid:
                    want = row > bound if strict else row >= bound
                    got = _eval_predicate(sql, names, row)
                    result.check(
                        got == want, f"{sql!r} wrong at {row} (bound {bound})"
                    )
    return result


# -- suite: seek queries against a linear oracle ---------------------------------------------


def suite_seeks(seed: int = 1) -> SuiteResult:
    result = SuiteResult("index seeks against linear filtering")
    rng = random.Random(seed)
    schema = KeySchema([FieldSpec("id", "int32")])
    for _ in range(30):
        keys = rng.sample(range(-5000, 5000), 200)
        table = IndexedTable.from_rows(schema, [((k,), ()) for k in keys])
        ordered = sorted(keys)
        for _ in range(20):
            probe = rng.randint(-5200, 5200)
            h = rng.choice((1, 3, 7))
            ge = [r.key[0] for r in table.seek_ge((probe,), h)]
            result.check(
                ge == [k for k in ordered if k >= probe][:h],
                f"seek_ge({probe}, {h})",
            )
            gt = [r.key[0] for r in table.seek_gt((probe,), h)]
            result.check(
                gt == [k for k in ordered if k > probe][:h],
                f"seek_gt({probe}, {h})",
            )
            lt = [r.key[0] for r in table.seek_lt_desc((probe,), h)]
            result.check(
                lt == [k for k in reversed(ordered) if k < probe][:h],
                f"seek_lt_desc({probe}, {h})",
            )
            result.check(
                table.count_less((probe,)) == sum(1 for k in keys if k < probe),
                f"count_less({probe})",
            )
    return result


# -- suite: configured dataset fixture ---------------------------------------------------------


def suite_dataset_fixture(config: AppConfig) -> SuiteResult:
    result = SuiteResult(f"dataset fixture {config.dataset}")
    try:
        table = ingest_csv(config.dataset, config.schema())
    except GridScrollError as exc:
        result.check(False, f"ingestion failed: {exc}")
        return result
    result.check(table.count_all() == table.row_count, "count matches rows")
    first = table.first_last("asc")
    last = table.first_last("desc")
    result.check(first is not None and last is not None, "table has rows")
    if first is not None and last is not None:
        result.check(
            table.schema.encode_key(first.key) <= table.schema.encode_key(last.key),
            "first/last out of order",
        )
    return result


def run_all(config: AppConfig | None = None, seed: int = 1) -> tuple[int, list[SuiteResult]]:
    suites = [
        suite_codecs(seed),
        suite_string_enumeration(),
        suite_segment_model(),
        suite_interpolation(seed),
        suite_sql_predicates(),
        suite_seeks(seed),
    ]
    if config is not None and config.dataset:
        suites.append(suite_dataset_fixture(config))
    failed = sum(s.failed for s in suites)
    return (0 if failed == 0 else 1, suites)


def format_report(suites: list[SuiteResult]) -> str:
    lines = []
    for s in suites:
        status = "ok" if s.failed == 0 else "FAIL"
        lines.append(f"[{status}] {s.name}: {s.passed} passed, {s.failed} failed")
        lines.extend(f"    - {note}" for note in s.notes)
    total_passed = sum(s.passed for s in suites)
    total_failed = sum(s.failed for s in suites)
    lines.append(f"total: {total_passed} passed, {total_failed} failed")
    return "\n".join(lines)
