"""Exact model of how row numbers distribute over a key segment.

A segment holds records at strictly increasing integer keys, the first pinned
to ``key_min`` (row 0) and the last to ``key_max`` (row ``max_position``).
Every admissible assignment of the interior records to interior key values is
equally likely; counting those assignments gives the exact distribution of
"rows strictly below key k", whose mean drives the interpolator in both
directions.  All arithmetic is exact (big integers / rationals); rounding is
confined to the two ``interpolate_*`` helpers at the bottom.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import DomainError


@dataclass(frozen=True)
class SegmentModel:
    """Key segment with ``max_position + 1`` records pinned at both ends."""

    key_min: int
    key_max: int
    max_position: int

    def __post_init__(self):
        if self.key_max <= self.key_min:
            raise DomainError("key_max must exceed key_min")
        if not 1 <= self.max_position <= self.key_max - self.key_min:
            raise DomainError(
                "max_position must lie in [1, key span]; otherwise no "
                "strictly monotone record placement exists"
            )

    @property
    def span(self) -> int:
        return self.key_max - self.key_min

    # -- exact counts ----------------------------------------------------------

    def total_placements(self) -> int:
        """Number of admissible placements of the interior records."""
        return comb(self.span - 1, self.max_position - 1)

    def placements_through(self, key: int, position: int) -> int:
        """Placements with exactly ``position`` records strictly below ``key``.

        Product of the ways to put ``position - 1`` interior records below
        ``key`` and the remaining interior records at or above it.  Summing
        over ``position`` recovers :meth:`total_placements` (Vandermonde).
        """
        if not self.key_min < key <= self.key_max:
            raise DomainError("key must lie in (key_min, key_max]")
        if not 1 <= position <= self.max_position:
            raise DomainError("position must lie in [1, max_position]")
        below = comb(key - self.key_min - 1, position - 1)
        at_or_above = comb(self.key_max - key, self.max_position - position)
        return below * at_or_above

    # -- exact moments -----------------------------------------------------------

    def expected_position(self, key) -> Fraction:
        """Mean row count below ``key``; 0 at ``key_min``, linear beyond it."""
        if not self.key_min <= key <= self.key_max:
            raise DomainError("key must lie in [key_min, key_max]")
        if key == self.key_min:
            return Fraction(0)
        numerator = (self.max_position - 1) * (key - self.key_min - 1)
        if numerator == 0:
            return Fraction(1)
        return Fraction(numerator, self.span - 1) + 1

    def position_variance(self, key) -> Fraction:
        """Variance of the row count below ``key``; an inverted parabola.

        Zero at both segment ends, largest in the middle, and identically
        zero when the records fill the key range completely.
        """
        if not self.key_min + 1 <= key <= self.key_max:
            raise DomainError("key must lie in [key_min + 1, key_max]")
        numerator = (
            (self.max_position - 1)
            * (key - self.key_min - 1)
            * (self.key_max - key)
            * (self.span - self.max_position)
        )
        if numerator == 0:
            return Fraction(0)
        return Fraction(numerator, (self.span - 1) ** 2 * (self.span - 2))

    def expected_key(self, position) -> Fraction:
        """Minimum-variance unbiased key estimate for a row position.

        Inverse of :meth:`expected_position` on the open segment.  The
        degenerate single-interior-position model maps position 1 to
        ``key_max`` (the only monotone completion).
        """
        if not 0 <= position <= self.max_position:
            raise DomainError("position must lie in [0, max_position]")
        if position == 0:
            return Fraction(self.key_min)
        if self.max_position == 1:
            return Fraction(self.key_max)
        return (
            Fraction((position - 1) * (self.span - 1), self.max_position - 1)
            + self.key_min
            + 1
        )


# -- rounded forms used by the interpolation table -----------------------------


def _div_round_half_up(numerator: int, denominator: int) -> int:
    """Round-half-up integer division for non-negative operands."""
    return (2 * numerator + denominator) // (2 * denominator)


def interpolate_key(key_min: int, key_max: int, max_position: int, position: int) -> int:
    """Rounded :meth:`SegmentModel.expected_key`, clamped into (key_min, key_max]."""
    if position <= 0:
        return key_min
    if position >= max_position or max_position == 1:
        return key_max
    estimate = (
        _div_round_half_up((position - 1) * (key_max - key_min - 1), max_position - 1)
        + key_min
        + 1
    )
    return min(max(estimate, key_min + 1), key_max)


def interpolate_position(key_min: int, key_max: int, max_position: int, key: int) -> int:
    """Rounded :meth:`SegmentModel.expected_position`, clamped into [0, max_position]."""
    if key <= key_min:
        return 0
    if key >= key_max:
        return max_position
    estimate = (
        _div_round_half_up((max_position - 1) * (key - key_min - 1), key_max - key_min - 1)
        + 1
    )
    return min(max(estimate, 1), max_position)
