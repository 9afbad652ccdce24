"""Independent test-side oracles: brute force, enumeration, linear filtering.

These deliberately avoid the library's own code paths wherever a check would
otherwise be circular; e.g. the string-order oracle sorts with a comparator
built from first principles here, not with the codecs under test.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product


def all_strings(alphabet: str, max_length: int) -> list[str]:
    return [
        "".join(w)
        for length in range(max_length + 1)
        for w in product(alphabet, repeat=length)
    ]


def three_pass_less(slots: dict[str, tuple[int, int, int]],
                    s1: str, s2: str,
                    accent_sensitive: bool = True,
                    case_sensitive: bool = True) -> int:
    """Reference comparator over explicit slot triples; returns -1/0/1."""
    p1 = tuple(slots[c][0] for c in s1)
    p2 = tuple(slots[c][0] for c in s2)
    if p1 != p2:
        return -1 if p1 < p2 else 1
    if accent_sensitive:
        v1 = tuple(slots[c][1] for c in s1)
        v2 = tuple(slots[c][1] for c in s2)
        if v1 != v2:
            return -1 if v1 < v2 else 1
    if case_sensitive:
        c1 = tuple(slots[c][2] for c in s1)
        c2 = tuple(slots[c][2] for c in s2)
        if c1 != c2:
            return -1 if c1 < c2 else 1
    return 0


def enumerate_placements(span: int, max_position: int):
    """Strictly monotone record placements pinned at key offsets 0 and span."""
    for interior in combinations(range(1, span), max_position - 1):
        yield (0,) + interior + (span,)


def rows_below(placement: tuple[int, ...], key_offset: int) -> int:
    return sum(1 for r in placement if r < key_offset)


def exact_mean_and_variance(placements: list[tuple[int, ...]], key_offset: int):
    values = [rows_below(p, key_offset) for p in placements]
    mean = Fraction(sum(values), len(values))
    second = Fraction(sum(v * v for v in values), len(values))
    return mean, second - mean * mean


def linear_seek_ge(rows: list, keys, h: int) -> list:
    return [r for r in rows if r >= keys][:h]


def linear_seek_gt(rows: list, keys, h: int) -> list:
    return [r for r in rows if r > keys][:h]


def linear_seek_lt_desc(rows: list, keys, h: int) -> list:
    return [r for r in reversed(rows) if r < keys][:h]
