"""Indexed table seeks, counting queries, SQL rendering and CSV ingestion."""

import math
import random
import time
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from gridscroll.collation import parse_rules
from gridscroll.dataset import (
    FieldSpec,
    IndexedTable,
    KeySchema,
    Row,
    ingest_csv,
    render_sql_where,
)
from gridscroll.errors import DomainError, IngestError, SchemaError

from oracle_helpers import linear_seek_ge, linear_seek_gt, linear_seek_lt_desc


def int_table(keys, slow_latency=0.0):
    schema = KeySchema([FieldSpec("id", "int32")])
    return IndexedTable.from_rows(
        schema, [((k,), (f"p{k}",)) for k in keys], payload_names=("label",),
        slow_latency=slow_latency,
    )


class TestFirstLast:
    def test_empty(self):
        table = int_table([])
        assert table.first_last("asc") is None
        assert table.first_last("desc") is None

    def test_min_and_max(self):
        table = int_table([5, 1, 9])
        assert table.first_last("asc").key == (1,)
        assert table.first_last("desc").key == (9,)

    def test_touch_budget(self):
        table = int_table(random.Random(0).sample(range(10**6), 10**4))
        before = table.touch_count
        table.first_last("asc")
        table.first_last("desc")
        assert table.touch_count - before <= 2 * (math.ceil(math.log2(10**4)) + 2)

    def test_bad_direction(self):
        with pytest.raises(DomainError):
            int_table([1]).first_last("up")


class TestSeeks:
    def test_below_minimum_returns_first_rows(self):
        table = int_table([10, 20, 30])
        assert [r.key[0] for r in table.seek_ge((-99,), 2)] == [10, 20]

    def test_above_maximum_returns_empty(self):
        table = int_table([10, 20, 30])
        assert table.seek_ge((31,), 2) == []

    def test_exact_key_is_included(self):
        table = int_table([10, 20, 30])
        assert [r.key[0] for r in table.seek_ge((20,), 2)] == [20, 30]

    def test_seek_gt_at_maximum_is_empty(self):
        table = int_table([10, 20, 30])
        assert table.seek_gt((30,), 1) == []

    def test_seek_lt_desc_returns_immediate_predecessor(self):
        table = int_table([10, 20, 30])
        assert [r.key[0] for r in table.seek_lt_desc((30,), 1)] == [20]
        assert [r.key[0] for r in table.seek_lt_desc((30,), 5)] == [20, 10]

    def test_adjacency_round_trip(self):
        keys = sorted(random.Random(1).sample(range(10**6), 500))
        table = int_table(keys)
        rng = random.Random(2)
        for _ in range(100):
            i = rng.randrange(1, len(keys) - 1)
            nxt = table.seek_gt((keys[i],), 1)[0]
            assert nxt.key[0] == keys[i + 1]
            back = table.seek_lt_desc(nxt.key, 1)[0]
            assert back.key[0] == keys[i]

    def test_matches_linear_oracle_on_random_tables(self):
        rng = random.Random(3)
        for _ in range(60):
            keys = rng.sample(range(-10**4, 10**4), 300)
            table = int_table(keys)
            ordered = sorted(keys)
            for _ in range(15):
                probe = (rng.randint(-11000, 11000),)
                h = rng.choice((1, 2, 5))
                assert [r.key[0] for r in table.seek_ge(probe, h)] == linear_seek_ge(
                    ordered, probe[0], h
                )
                assert [r.key[0] for r in table.seek_gt(probe, h)] == linear_seek_gt(
                    ordered, probe[0], h
                )
                assert [
                    r.key[0] for r in table.seek_lt_desc(probe, h)
                ] == linear_seek_lt_desc(ordered, probe[0], h)

    def test_malformed_tuple(self):
        table = int_table([1, 2, 3])
        with pytest.raises(SchemaError):
            table.seek_ge(("x",), 1)
        with pytest.raises(SchemaError):
            table.seek_ge((1, 2), 1)

    def test_head_and_tail(self):
        table = int_table([4, 2, 9, 7])
        assert [r.key[0] for r in table.head(2)] == [2, 4]
        assert [r.key[0] for r in table.tail(2)] == [7, 9]
        assert [r.key[0] for r in table.tail(99)] == [2, 4, 7, 9]


class TestInstrumentation:
    def test_seek_touch_budget(self):
        n, h = 10**4, 7
        table = int_table(random.Random(5).sample(range(10**7), n))
        budget = h + math.ceil(math.log2(n)) + 2
        rng = random.Random(6)
        for _ in range(50):
            before = table.touch_count
            table.seek_ge((rng.randint(0, 10**7),), h)
            assert table.touch_count - before <= budget

    def test_counting_queries_touch_everything(self):
        n = 2000
        table = int_table(list(range(n)))
        before = table.touch_count
        table.count_all()
        assert table.touch_count - before >= n
        before = table.touch_count
        table.count_less((50,))
        assert table.touch_count - before >= n

    def test_slow_query_counter(self):
        table = int_table([1, 2, 3])
        assert table.slow_query_count == 0
        table.count_all()
        table.count_less((2,))
        assert table.slow_query_count == 2

    def test_latency_injection_observable(self):
        table = int_table(list(range(100)), slow_latency=0.2)
        t0 = time.monotonic()
        table.count_all()
        slow_elapsed = time.monotonic() - t0
        t0 = time.monotonic()
        table.seek_ge((50,), 5)
        fast_elapsed = time.monotonic() - t0
        assert slow_elapsed >= 0.2
        assert fast_elapsed < 0.05


class TestCounts:
    def test_count_all(self):
        assert int_table([]).count_all() == 0
        assert int_table(list(range(500))).count_all() == 500

    def test_count_less_bounds(self):
        table = int_table([10, 20, 30])
        assert table.count_less((10,)) == 0
        assert table.count_less((31,)) == 3

    def test_count_less_matches_brute_filter(self):
        rng = random.Random(7)
        keys = rng.sample(range(-5000, 5000), 400)
        table = int_table(keys)
        for _ in range(50):
            probe = rng.randint(-5100, 5100)
            assert table.count_less((probe,)) == sum(1 for k in keys if k < probe)


class TestRenderSqlWhere:
    def one_field(self):
        return KeySchema([FieldSpec("k1", "int32")])

    def two_fields(self):
        return KeySchema([FieldSpec("k1", "int32"), FieldSpec("k2", "int32")])

    def test_single_field_degenerate(self):
        assert render_sql_where(self.one_field(), (5,)) == "k1 >= 5"
        assert render_sql_where(self.one_field(), (5,), strict=True) == "k1 > 5"

    def test_two_field_nested_form(self):
        sql = render_sql_where(self.two_fields(), (5, 7))
        assert sql == "k1 >= 5 AND (k1 > 5 OR (k2 >= 7))"

    def test_descending_mirror(self):
        sql = render_sql_where(self.two_fields(), (5, 7), strict=True, descending=True)
        assert sql == "k1 <= 5 AND (k1 < 5 OR (k2 < 7))"

    @pytest.mark.parametrize("strict", [False, True])
    @pytest.mark.parametrize("descending", [False, True])
    def test_truth_table_equivalence_three_fields(self, strict, descending):
        schema = KeySchema([FieldSpec(f"k{i}", "int32") for i in (1, 2, 3)])
        grid = list(product(range(4), repeat=3))
        for bound in grid:
            sql = render_sql_where(schema, bound, strict=strict, descending=descending)
            expr = sql.replace(" AND ", " and ").replace(" OR ", " or ")
            for row in grid:
                env = {"k1": row[0], "k2": row[1], "k3": row[2]}
                got = eval(expr, {"__builtins__": {}}, env)
                if descending:
                    want = row < bound if strict else row <= bound
                else:
                    want = row > bound if strict else row >= bound
                assert got == want, f"{sql} at {row}"

    def test_no_top_level_or(self):
        schema = KeySchema([FieldSpec(f"k{i}", "int32") for i in (1, 2, 3)])
        sql = render_sql_where(schema, (1, 2, 3))
        depth = 0
        for token in sql.replace("(", " ( ").replace(")", " ) ").split():
            if token == "(":
                depth += 1
            elif token == ")":
                depth -= 1
            elif token == "OR":
                assert depth > 0

    def test_literal_rendering(self):
        rules = parse_rules("<a<b<c<'")
        schema = KeySchema(
            [
                FieldSpec("s", "string", max_length=4, rules=rules),
                FieldSpec("flag", "bit"),
                FieldSpec("seen", "datetime"),
                FieldSpec("score", "float64"),
            ]
        )
        sql = render_sql_where(schema, ("a'b", True, 97445678, 1.5))
        assert "s >= 'a''b'" in sql
        assert "flag > TRUE" in sql or "flag >= TRUE" in sql
        assert "TIMESTAMP '1970-01-02T03:04:05.678+00:00'" in sql
        assert "1.5" in sql

    def test_identifier_quoting(self):
        schema = KeySchema([FieldSpec("weird name", "int32")])
        assert render_sql_where(schema, (1,)) == '"weird name" >= 1'

    def test_malformed_keys_rejected(self):
        with pytest.raises(SchemaError):
            render_sql_where(self.two_fields(), (1,))


class TestIngestCsv:
    def write(self, tmp_path, text):
        path = tmp_path / "data.csv"
        path.write_text(text, encoding="utf-8")
        return path

    def test_three_row_fixture_round_trips(self, tmp_path):
        path = self.write(tmp_path, "id,label\n3,c\n1,a\n2,b\n")
        table = ingest_csv(path, KeySchema([FieldSpec("id", "int32")]))
        assert table.row_count == 3
        assert [r.key[0] for r in table.head(3)] == [1, 2, 3]
        assert [r.payload[0] for r in table.head(3)] == ["a", "b", "c"]
        assert table.payload_names == ("label",)

    def test_duplicate_key_reports_row(self, tmp_path):
        path = self.write(tmp_path, "id,label\n1,a\n2,b\n1,c\n")
        with pytest.raises(IngestError, match="row 3"):
            ingest_csv(path, KeySchema([FieldSpec("id", "int32")]))

    def test_null_key_cell_rejected(self, tmp_path):
        path = self.write(tmp_path, "id,label\n1,a\n,b\n")
        with pytest.raises(IngestError, match="row 2"):
            ingest_csv(path, KeySchema([FieldSpec("id", "int32")]))

    def test_missing_key_column(self, tmp_path):
        path = self.write(tmp_path, "other,label\n1,a\n")
        with pytest.raises(IngestError, match="id"):
            ingest_csv(path, KeySchema([FieldSpec("id", "int32")]))

    def test_bad_cell_value(self, tmp_path):
        path = self.write(tmp_path, "id,label\n1,a\nxx,b\n")
        with pytest.raises(IngestError, match="row 2"):
            ingest_csv(path, KeySchema([FieldSpec("id", "int32")]))

    def test_quoted_cells_per_rfc4180(self, tmp_path):
        path = self.write(tmp_path, 'id,label\n2,"a,b"\n1,"a""b"\n')
        table = ingest_csv(path, KeySchema([FieldSpec("id", "int32")]))
        assert [r.payload[0] for r in table.head(2)] == ['a"b', "a,b"]

    def test_typed_columns(self, tmp_path):
        rules = parse_rules("<a<b")
        path = self.write(
            tmp_path,
            "flag,when,score,word,label\n"
            "true,1970-01-02T03:04:05.678Z,1.5,ab,x\n"
            "false,1990-01-01T00:00:00Z,-2.25,ba,y\n",
        )
        schema = KeySchema(
            [
                FieldSpec("flag", "bit"),
                FieldSpec("when", "datetime"),
                FieldSpec("score", "float64"),
                FieldSpec("word", "string", max_length=3, rules=rules),
            ]
        )
        table = ingest_csv(path, schema)
        first = table.head(1)[0]
        assert first.key == (False, 631152000000, -2.25, "ba")


class TestRowOrderInvariant:
    @given(st.lists(st.integers(-(2**31), 2**31 - 1), min_size=1, unique=True))
    @settings(max_examples=100, deadline=None)
    def test_iteration_order_is_ordinal_order(self, keys):
        table = int_table(keys)
        got = [r.key[0] for r in table.head(len(keys))]
        assert got == sorted(keys)
