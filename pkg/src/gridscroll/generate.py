"""Deterministic synthetic datasets with selectable key distributions.

Stands in for a production-size source table when exercising the engine:
uniform integers for the statistical bounds, clustered integers and clustered
Cyrillic strings for heavily skewed ordinal spacing, and a composite
region/street/house key for multi-field behavior.  Everything derives from
one seeded ``random.Random``, so a given (mode, n, seed) always produces the
same rows.
"""

from __future__ import annotations

import csv
import random
from typing import Iterable

from .collation import DEFAULT_CYRILLIC_RULES, default_cyrillic_rules
from .dataset import FieldSpec, IndexedTable, KeySchema

_LOWER = "абвгдеёжзийклмнопрстуфхцчшщъыьэюя"

Entry = tuple[tuple, tuple]


def _sample_unique(rng: random.Random, lo: int, hi: int, n: int) -> list[int]:
    """n distinct uniform ints in [lo, hi); the span may exceed ssize_t."""
    span = hi - lo
    out: list[int] = []
    seen: set[int] = set()
    while len(out) < n:
        value = lo + rng.randrange(span)
        if value not in seen:
            seen.add(value)
            out.append(value)
    return out


def uniform_int_schema(kind: str = "int64", name: str = "id") -> KeySchema:
    return KeySchema([FieldSpec(name, kind)])


def uniform_int_rows(n: int, seed: int, kind: str = "int64") -> list[Entry]:
    """n unique uniformly distributed integers over the full type range."""
    bits = 63 if kind == "int64" else 31
    rng = random.Random(seed)
    keys = _sample_unique(rng, -(2**bits), 2**bits, n)
    return [((k,), (f"row-{i:07d}",)) for i, k in enumerate(keys)]


def clustered_int_rows(
    n: int, seed: int, clusters: int = 64, kind: str = "int64"
) -> list[Entry]:
    """Tight runs of nearby keys separated by huge voids (skewed spacing)."""
    bits = 63 if kind == "int64" else 31
    rng = random.Random(seed)
    per = max(1, n // clusters)
    span = 2**bits
    # Keep centers far enough apart that runs cannot collide.
    run_width = per * 16
    centers = sorted(
        _sample_unique(rng, -span + run_width, span - run_width, clusters)
    )
    for a, b in zip(centers, centers[1:]):
        if b - a <= 2 * run_width:
            raise ValueError("cluster centers collided; use another seed")
    keys: list[int] = []
    for center in centers:
        value = center
        remaining = min(per, n - len(keys))
        for _ in range(remaining):
            keys.append(value)
            value += rng.randint(1, 8)
    i = 0
    while len(keys) < n:  # top up from the first centers, beyond their runs
        keys.append(centers[i] + run_width + rng.randint(0, per))
        i += 1
    keys = sorted(set(keys))
    while len(keys) < n:  # dedup shortfall is tiny; extend the last run
        keys.append(keys[-1] + rng.randint(1, 8))
    return [((k,), (f"row-{i:07d}",)) for i, k in enumerate(keys)]


def cyrillic_schema(max_length: int = 8, name: str = "title") -> KeySchema:
    rules = default_cyrillic_rules()
    return KeySchema([FieldSpec(name, "string", max_length=max_length, rules=rules)])


def _stems(rng: random.Random, count: int, lo: int = 3, hi: int = 5) -> list[str]:
    return [
        "".join(rng.choice(_LOWER) for _ in range(rng.randint(lo, hi)))
        for _ in range(count)
    ]


def clustered_cyrillic_rows(n: int, seed: int, max_length: int = 8) -> list[Entry]:
    """Strings bunched around a small pool of stems: skewed collated ordinals."""
    rng = random.Random(seed)
    stems = _stems(rng, max(8, n // 200))
    seen: set[str] = set()
    out: list[Entry] = []
    while len(out) < n:
        stem = rng.choice(stems)
        room = max_length - len(stem)
        suffix = "".join(rng.choice(_LOWER) for _ in range(rng.randint(0, max(0, room))))
        word = (stem + suffix)[:max_length]
        if rng.random() < 0.5:
            word = word[0].upper() + word[1:]
        if word in seen:
            continue
        seen.add(word)
        out.append(((word,), (f"row-{len(out):07d}",)))
    return out


def composite_schema(max_length: int = 8) -> KeySchema:
    rules = default_cyrillic_rules()
    return KeySchema(
        [
            FieldSpec("region", "string", max_length=max_length, rules=rules),
            FieldSpec("street", "string", max_length=max_length, rules=rules),
            FieldSpec("house", "int32"),
        ]
    )


def composite_rows(n: int, seed: int, max_length: int = 8) -> list[Entry]:
    """Region/street/house triples; regions reused heavily, houses small ints."""
    rng = random.Random(seed)
    regions = _stems(rng, 24, 4, max_length)
    streets = _stems(rng, max(16, n // 500), 3, max_length)
    seen: set[tuple] = set()
    out: list[Entry] = []
    while len(out) < n:
        key = (
            rng.choice(regions)[:max_length],
            rng.choice(streets)[:max_length],
            rng.randint(1, 500),
        )
        if key in seen:
            continue
        seen.add(key)
        out.append((key, (f"row-{len(out):07d}",)))
    return out


def build_table(
    schema: KeySchema,
    rows: Iterable[Entry],
    slow_latency: float = 0.0,
    payload_names: tuple[str, ...] = ("label",),
) -> IndexedTable:
    return IndexedTable.from_rows(
        schema, rows, payload_names=payload_names, slow_latency=slow_latency
    )


def write_csv(
    path,
    schema: KeySchema,
    rows: Iterable[Entry],
    payload_names: tuple[str, ...] = ("label",),
) -> int:
    """Write rows as RFC-4180 CSV; returns the number of data rows written."""
    count = 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(schema.names) + list(payload_names))
        for key, payload in rows:
            cells = [schema.format_cell(i, v) for i, v in enumerate(key)]
            writer.writerow(cells + list(payload))
            count += 1
    return count


def write_rules(path) -> None:
    """Write the bundled Cyrillic collation rules next to a generated CSV."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(DEFAULT_CYRILLIC_RULES + "\n")


MODES = ("uniform", "clustered", "cyrillic", "composite")


def generate(mode: str, n: int, seed: int, max_length: int = 8):
    """(schema, rows, needs_rules_file) for a generator mode."""
    if mode == "uniform":
        return uniform_int_schema(), uniform_int_rows(n, seed), False
    if mode == "clustered":
        return uniform_int_schema(), clustered_int_rows(n, seed), False
    if mode == "cyrillic":
        return (
            cyrillic_schema(max_length),
            clustered_cyrillic_rows(n, seed, max_length),
            True,
        )
    if mode == "composite":
        return composite_schema(max_length), composite_rows(n, seed, max_length), True
    raise ValueError(f"unknown generator mode {mode!r}; pick one of {MODES}")
