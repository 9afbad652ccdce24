"""Monotone partial map between row positions and key ordinals.

The table stores sparse exact points of a strictly increasing function from
row positions (small ints) to key ordinals (arbitrary-precision ints) and
interpolates between them with the segment-mean estimator from
:mod:`gridscroll.segment_stats`.  Both endpoints are always present; interior
points arrive from asynchronous counting queries and may be stale, so inserts
repair monotonicity by discarding contradicted points (newest point wins).

Concurrency: single writer / many readers, enforced with one re-entrant lock
around every operation; ``generation`` counts structural edits so background
refinement can detect staleness.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .errors import DomainError, EmptyDomain, RangeError, StaleEndpointConflict
from .segment_stats import interpolate_key, interpolate_position

DEFAULT_MAX_POSITION = 1000
DEFAULT_CAPACITY = 4096


@dataclass(frozen=True)
class EditSummary:
    """Outcome of one mutating call."""

    changed: bool
    removed: tuple[tuple[int, int], ...] = ()
    evicted: tuple[int, int] | None = None
    generation: int = 0


class InterpolationTable:
    """Sparse strictly monotone position -> ordinal map with repair and eviction."""

    def __init__(
        self,
        ordinal_min: int,
        ordinal_max: int,
        max_position: int = DEFAULT_MAX_POSITION,
        capacity: int = DEFAULT_CAPACITY,
    ):
        if ordinal_min >= ordinal_max:
            raise EmptyDomain(
                f"ordinal span [{ordinal_min}, {ordinal_max}] holds fewer than two keys"
            )
        if max_position < 1:
            raise DomainError("max_position must be >= 1")
        if capacity < 2:
            raise DomainError("capacity must admit at least the two endpoints")
        self._positions: list[int] = [0, max_position]
        self._ordinals: list[int] = [ordinal_min, ordinal_max]
        self.capacity = capacity
        self.generation = 0
        self.probe_count = 0
        self._lock = threading.RLock()

    # -- introspection ---------------------------------------------------------

    @property
    def max_position(self) -> int:
        return self._positions[-1]

    @property
    def ordinal_min(self) -> int:
        return self._ordinals[0]

    @property
    def ordinal_max(self) -> int:
        return self._ordinals[-1]

    def __len__(self) -> int:
        with self._lock:
            return len(self._positions)

    def points(self) -> list[tuple[int, int]]:
        with self._lock:
            return list(zip(self._positions, self._ordinals))

    def dump(self) -> str:
        """Diagnostic text: one 'position<TAB>ordinal' line per stored point."""
        return "\n".join(f"{p}\t{o}" for p, o in self.points())

    def reset_probe_count(self) -> None:
        with self._lock:
            self.probe_count = 0

    # -- queries ---------------------------------------------------------------

    def _segment_right_of(self, arr: list, value) -> int:
        """Instrumented bisect: first index whose entry exceeds ``value``."""
        lo, hi = 0, len(arr)
        while lo < hi:
            mid = (lo + hi) // 2
            self.probe_count += 1
            if value < arr[mid]:
                hi = mid
            else:
                lo = mid + 1
        return lo

    def ordinal_at(self, position: int) -> int:
        """Estimated ordinal for a row position (exact at stored points).

        Positions outside [0, max_position] are clamped: scrollbars overshoot.
        """
        with self._lock:
            position = min(max(position, 0), self.max_position)
            right = self._segment_right_of(self._positions, position)
            left = right - 1
            if self._positions[left] == position:
                return self._ordinals[left]
            return interpolate_key(
                self._ordinals[left],
                self._ordinals[right],
                self._positions[right] - self._positions[left],
                position - self._positions[left],
            )

    def position_of(self, ordinal: int) -> int:
        """Estimated row position for an ordinal (exact at stored points).

        Strict monotonicity makes the stored ordinals bisectable; ordinals at
        or below the left endpoint map to position 0, ordinals at or beyond
        the right endpoint to max_position.
        """
        with self._lock:
            if ordinal <= self._ordinals[0]:
                return 0
            if ordinal >= self._ordinals[-1]:
                return self.max_position
            right = self._segment_right_of(self._ordinals, ordinal)
            left = right - 1
            if self._ordinals[left] == ordinal:
                return self._positions[left]
            return self._positions[left] + interpolate_position(
                self._ordinals[left],
                self._ordinals[right],
                self._positions[right] - self._positions[left],
                ordinal,
            )

    def largest_gap(self) -> tuple[int, int]:
        """Adjacent stored positions with the widest spread (ties: leftmost)."""
        with self._lock:
            best = (self._positions[0], self._positions[1])
            best_width = best[1] - best[0]
            for i in range(1, len(self._positions) - 1):
                width = self._positions[i + 1] - self._positions[i]
                if width > best_width:
                    best = (self._positions[i], self._positions[i + 1])
                    best_width = width
            return best

    # -- mutation ----------------------------------------------------------------

    def insert_point(self, position: int, ordinal: int) -> EditSummary:
        """Insert an exact interior point; the newest point wins.

        Stored points the new one contradicts (a left point with an ordinal at
        or above the new one, a right point with an ordinal at or below it)
        are stale and get deleted.  Endpoints are never deleted: a conflict
        with them rejects the insert instead.
        """
        with self._lock:
            if not 0 < position < self.max_position:
                raise RangeError(
                    f"interior position must lie in (0, {self.max_position}), got {position}"
                )
            if ordinal <= self._ordinals[0] or ordinal >= self._ordinals[-1]:
                raise StaleEndpointConflict(
                    f"ordinal {ordinal} contradicts an endpoint ordinal"
                )
            positions, ordinals = self._positions, self._ordinals
            i = self._segment_right_of(positions, position - 1)  # bisect_left
            if (
                i < len(positions)
                and positions[i] == position
                and ordinals[i] == ordinal
            ):
                return EditSummary(changed=False, generation=self.generation)

            lo = i
            while lo > 1 and ordinals[lo - 1] >= ordinal:
                lo -= 1
            hi = i
            if hi < len(positions) and positions[hi] == position:
                hi += 1
            while hi < len(positions) - 1 and ordinals[hi] <= ordinal:
                hi += 1

            removed = tuple(zip(positions[lo:hi], ordinals[lo:hi]))
            positions[lo:hi] = [position]
            ordinals[lo:hi] = [ordinal]
            evicted = None
            if len(positions) > self.capacity:
                evicted = self._evict_most_redundant()
            self.generation += 1
            return EditSummary(
                changed=True,
                removed=removed,
                evicted=evicted,
                generation=self.generation,
            )

    def _evict_most_redundant(self) -> tuple[int, int]:
        """Drop the interior point its neighbors reconstruct best."""
        positions, ordinals = self._positions, self._ordinals
        best_index = 1
        best_error = None
        for j in range(1, len(positions) - 1):
            estimate = interpolate_key(
                ordinals[j - 1],
                ordinals[j + 1],
                positions[j + 1] - positions[j - 1],
                positions[j] - positions[j - 1],
            )
            error = abs(ordinals[j] - estimate)
            if best_error is None or error < best_error:
                best_index = j
                best_error = error
        victim = (positions[best_index], ordinals[best_index])
        del positions[best_index]
        del ordinals[best_index]
        return victim

    def set_max_position(self, max_position: int) -> None:
        """Re-pin the right endpoint once the true record count is known.

        Interior points at or beyond the new maximum are dropped; the right
        endpoint keeps its ordinal.  No-op when the value is unchanged.
        """
        with self._lock:
            if max_position < 1:
                raise DomainError("max_position must be >= 1")
            if max_position == self.max_position:
                return
            top_ordinal = self._ordinals[-1]
            cut = self._segment_right_of(self._positions[:-1], max_position - 1)
            self._positions[cut:] = [max_position]
            self._ordinals[cut:] = [top_ordinal]
            self.generation += 1

    def __repr__(self) -> str:
        return (
            f"<InterpolationTable points={len(self._positions)} "
            f"max_position={self.max_position}>"
        )
