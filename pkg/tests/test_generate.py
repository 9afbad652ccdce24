"""Synthetic generator: determinism, uniqueness, and skew characteristics."""

import hashlib
import statistics

from gridscroll.collation import default_cyrillic_rules
from gridscroll.dataset import ingest_csv
from gridscroll.generate import (
    build_table,
    clustered_cyrillic_rows,
    clustered_int_rows,
    composite_rows,
    composite_schema,
    cyrillic_schema,
    generate,
    uniform_int_rows,
    uniform_int_schema,
    write_csv,
)


def sha256_of(path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class TestDeterminism:
    def test_same_seed_same_bytes(self, tmp_path):
        for mode in ("uniform", "clustered", "cyrillic", "composite"):
            schema, rows, _ = generate(mode, 300, seed=7)
            a = tmp_path / f"{mode}-a.csv"
            b = tmp_path / f"{mode}-b.csv"
            write_csv(a, schema, rows)
            schema2, rows2, _ = generate(mode, 300, seed=7)
            write_csv(b, schema2, rows2)
            assert sha256_of(a) == sha256_of(b)

    def test_different_seed_differs(self, tmp_path):
        schema, rows, _ = generate("uniform", 300, seed=7)
        a = tmp_path / "a.csv"
        write_csv(a, schema, rows)
        schema2, rows2, _ = generate("uniform", 300, seed=8)
        b = tmp_path / "b.csv"
        write_csv(b, schema2, rows2)
        assert sha256_of(a) != sha256_of(b)


class TestRowCountsAndUniqueness:
    def test_requested_rows_produced(self):
        for mode in ("uniform", "clustered", "cyrillic", "composite"):
            _, rows, _ = generate(mode, 421, seed=3)
            assert len(rows) == 421
            assert len({key for key, _ in rows}) == 421

    def test_tables_build_cleanly(self):
        for mode in ("uniform", "clustered", "cyrillic", "composite"):
            schema, rows, _ = generate(mode, 500, seed=5)
            table = build_table(schema, rows)
            assert table.row_count == 500


class TestDistributions:
    def gap_skew(self, ordinals):
        ordered = sorted(ordinals)
        gaps = [b - a for a, b in zip(ordered, ordered[1:])]
        return max(gaps) / max(1, statistics.median(gaps))

    def test_clustered_ints_are_skewed(self):
        schema = uniform_int_schema()
        uniform = [
            schema.encode_key(k) for k, _ in uniform_int_rows(2000, seed=1)
        ]
        clustered = [
            schema.encode_key(k) for k, _ in clustered_int_rows(2000, seed=1)
        ]
        assert self.gap_skew(clustered) > 100 * self.gap_skew(uniform)

    def test_clustered_cyrillic_is_skewed(self):
        schema = cyrillic_schema(8)
        ordinals = [
            schema.encode_key(k) for k, _ in clustered_cyrillic_rows(2000, seed=2)
        ]
        assert self.gap_skew(ordinals) > 50

    def test_cyrillic_rows_fit_rules_and_length(self):
        rules = default_cyrillic_rules()
        for (word,), _ in clustered_cyrillic_rows(500, seed=4, max_length=8):
            assert len(word) <= 8
            for ch in word:
                rules.components_of(ch)


class TestCsvRoundTrip:
    def test_generated_file_ingests_with_matching_count(self, tmp_path):
        schema, rows, _ = generate("cyrillic", 400, seed=9)
        path = tmp_path / "data.csv"
        assert write_csv(path, schema, rows) == 400
        table = ingest_csv(path, schema)
        assert table.count_all() == 400

    def test_composite_round_trip(self, tmp_path):
        schema, rows, _ = generate("composite", 250, seed=10)
        path = tmp_path / "data.csv"
        write_csv(path, schema, rows)
        table = ingest_csv(path, schema)
        assert table.row_count == 250
        first = table.first_last("asc")
        assert len(first.key) == 3
