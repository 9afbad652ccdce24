"""Scroll orchestration: estimate, fetch fast, refine asynchronously, bounce.

User-facing operations (scroll, position, small step) run on the caller's
thread and issue only index-seek queries; counting queries run on background
threads and feed their exact results back through the interpolation table.
A generation counter distinguishes the user action each refinement belongs
to: a stale refinement still enriches the table but never moves the thumb.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass

from .dataset import IndexedTable, Row
from .errors import DomainError, RangeError, StaleEndpointConflict
from .interpolation import DEFAULT_CAPACITY, DEFAULT_MAX_POSITION, InterpolationTable

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EngineConfig:
    """Tunables; slow-query latency injection lives on the table itself."""

    window_rows: int = 20
    capacity: int = DEFAULT_CAPACITY
    default_max_position: int = DEFAULT_MAX_POSITION
    warmup_threshold: float = 0.2
    warmup_max_iter: int = 64
    page_size: int | None = None

    @property
    def effective_page_size(self) -> int:
        """Widest jump still served by exact stepping instead of interpolation."""
        return self.page_size if self.page_size is not None else 2 * self.window_rows


@dataclass(frozen=True)
class GridState:
    anchor_keys: tuple | None
    position_estimate: int
    window_rows: int
    generation: int


@dataclass(frozen=True)
class WindowChanged:
    rows: tuple[Row, ...]
    position: int
    generation: int


@dataclass(frozen=True)
class ThumbCorrected:
    position: int
    generation: int


@dataclass(frozen=True)
class MaxPositionChanged:
    max_position: int


@dataclass(frozen=True)
class RefinementOutcome:
    exact_position: int
    for_generation: int
    point_added: bool


class ScrollEngine:
    """Binds one indexed table to one interpolation table and a scroll window."""

    def __init__(
        self,
        table: IndexedTable,
        config: EngineConfig | None = None,
        start_background: bool = True,
    ):
        self.table = table
        self.schema = table.schema
        self.config = config or EngineConfig()
        self._lock = threading.RLock()
        self._events: list = []
        self._events_cond = threading.Condition()

        self._interp: InterpolationTable | None = None
        first = table.first_last("asc")
        last = table.first_last("desc")
        if first is not None and last is not None:
            lo = self.schema.encode_key(first.key)
            hi = self.schema.encode_key(last.key)
            if lo < hi:
                self._interp = InterpolationTable(
                    lo,
                    hi,
                    max_position=self.config.default_max_position,
                    capacity=self.config.capacity,
                )

        self._rows: list[Row] = table.head(self.config.window_rows) if first else []
        self._anchor: tuple | None = self._rows[0].key if self._rows else None
        self._position = 0
        self._position_exact = bool(self._rows)  # first h rows sit at offset 0
        self._generation = 0
        self._max_position_exact = False
        self._row_count_known: int | None = None
        self._last_refinement: RefinementOutcome | None = None

        self._refine_cond = threading.Condition()
        self._refine_pending: tuple[tuple, int] | None = None
        self._refine_running = False
        self._refine_thread: threading.Thread | None = None
        self._background_thread: threading.Thread | None = None
        self._background_done = threading.Event()
        self._closed = False

        if self._rows:
            self._emit(WindowChanged(tuple(self._rows), 0, 0))
        if start_background and self._rows:
            self._background_thread = threading.Thread(
                target=self._background_main, name="gridscroll-count", daemon=True
            )
            self._background_thread.start()
        else:
            self._background_done.set()

    # -- introspection ---------------------------------------------------------

    @property
    def empty(self) -> bool:
        return self._anchor is None

    @property
    def max_position(self) -> int:
        return self._interp.max_position if self._interp else 0

    @property
    def max_position_exact(self) -> bool:
        return self._max_position_exact

    @property
    def generation(self) -> int:
        return self._generation

    @property
    def last_refinement(self) -> RefinementOutcome | None:
        return self._last_refinement

    def state(self) -> GridState:
        with self._lock:
            return GridState(
                self._anchor, self._position, self.config.window_rows, self._generation
            )

    def window(self) -> list[Row]:
        with self._lock:
            return list(self._rows)

    def interpolation_points(self) -> list[tuple[int, int]]:
        return self._interp.points() if self._interp else []

    def dump_interpolation(self) -> str:
        return self._interp.dump() if self._interp else ""

    # -- events ------------------------------------------------------------------

    def _emit(self, event) -> None:
        with self._events_cond:
            self._events.append(event)
            self._events_cond.notify_all()

    def events_since(self, start: int = 0) -> list:
        with self._events_cond:
            return list(self._events[start:])

    def wait_events(self, start: int, timeout: float | None = None) -> list:
        """Events from index ``start`` on, blocking until at least one exists."""
        with self._events_cond:
            self._events_cond.wait_for(lambda: len(self._events) > start, timeout)
            return list(self._events[start:])

    # -- user-facing operations (fast queries only) --------------------------------

    def on_scroll(self, position: int) -> WindowChanged:
        """Window for a thumb position via the interpolated key estimate."""
        with self._lock:
            self._generation += 1
            gen = self._generation
            if not self._rows:
                return WindowChanged((), 0, gen)
            h = self.config.window_rows
            if self._interp is None:
                return self._apply_window(self.table.head(h), 0, True, gen)
            pos = min(max(position, 0), self._interp.max_position)
            ordinal = self._interp.ordinal_at(pos)
            keys = self.schema.decode_key(ordinal, clamp_slots=True)
            rows = self.table.seek_ge(keys, h)
            exact = pos == 0
            if len(rows) < h:
                rows = self.table.tail(h)
                if self._max_position_exact:
                    pos = max(0, self._interp.max_position + 1 - len(rows))
                    exact = True
            return self._apply_window(rows, pos, exact, gen)

    def window_at(self, position: int) -> WindowChanged:
        """Window request router: small deltas step exactly, large ones scroll.

        Repeating the current position re-serves the cached window without
        counting as a new user action.
        """
        with self._lock:
            if self._rows and self._interp is not None:
                target = min(max(position, 0), self._interp.max_position)
                delta = target - self._position
                if delta == 0:
                    return WindowChanged(tuple(self._rows), self._position, self._generation)
                if abs(delta) <= self.config.effective_page_size:
                    return self.small_step(delta)
            return self.on_scroll(position)

    def small_step(self, n: int) -> WindowChanged:
        """Shift the window by up to ``n`` adjacent rows without the interpolator.

        The rows beyond the window edge come from a strict seek relative to a
        known row key, so the displayed content is exactly adjacent and the
        position estimate moves by exactly the number of rows fetched; at the
        table ends the shift truncates.  When the previous position was exact
        the new one still is, and becomes a free interpolation point.
        """
        if n == 0:
            raise DomainError("step must be nonzero")
        if abs(n) > self.config.effective_page_size:
            raise DomainError(
                f"step {n} exceeds page size {self.config.effective_page_size}"
            )
        with self._lock:
            self._generation += 1
            gen = self._generation
            if not self._rows:
                return WindowChanged((), 0, gen)
            rows = self._rows
            pos, exact = self._position, self._position_exact
            if n > 0:
                fetched = self.table.seek_gt(rows[-1].key, n)
                shifted = len(fetched)
                new_rows = (rows + fetched)[shifted : shifted + len(rows)]
                new_pos = pos + shifted
                if shifted < n and self._max_position_exact and self._interp:
                    new_pos = max(0, self._interp.max_position + 1 - len(new_rows))
                    exact = True
            else:
                fetched = self.table.seek_lt_desc(rows[0].key, -n)
                shifted = len(fetched)
                new_rows = list(reversed(fetched)) + rows[: len(rows) - shifted]
                new_pos = pos - shifted
                if shifted < -n:
                    new_pos = 0
                    exact = True
            new_pos = max(new_pos, 0)
            if self._interp is not None:
                new_pos = min(new_pos, self._interp.max_position)
                if exact and shifted:
                    self._insert_exact_point(new_pos, new_rows[0].key)
            return self._apply_window(new_rows, new_pos, exact, gen)

    def position_to(self, keys) -> tuple[list[Row], int]:
        """Jump to a key: rows immediately, thumb estimate, async refinement."""
        keys = tuple(keys)
        target = self.schema.encode_key(keys)  # validates before any state change
        with self._lock:
            self._generation += 1
            gen = self._generation
            if not self._rows:
                return ([], 0)
            h = self.config.window_rows
            rows = self.table.seek_ge(keys, h)
            if len(rows) < h:
                rows = self.table.tail(h)
            pos = self._interp.position_of(target) if self._interp else 0
            self._apply_window(rows, pos, pos == 0, gen)
            self._schedule_refinement(gen)
            return (list(rows), pos)

    def on_scroll_release(self) -> bool:
        """Schedule the exact count for the current anchor; never blocks."""
        with self._lock:
            if self._anchor is None:
                return False
            self._schedule_refinement(self._generation)
            return True

    def estimate_position(self, keys) -> int:
        """Interpolated position of a key tuple; no state change, fast."""
        target = self.schema.encode_key(keys)
        with self._lock:
            return self._interp.position_of(target) if self._interp else 0

    def _apply_window(
        self, rows: list[Row], pos: int, exact: bool, gen: int
    ) -> WindowChanged:
        self._rows = list(rows)
        self._anchor = self._rows[0].key if self._rows else None
        self._position = pos
        self._position_exact = exact and bool(self._rows)
        event = WindowChanged(tuple(self._rows), pos, gen)
        self._emit(event)
        return event

    def _insert_exact_point(self, position: int, anchor_keys: tuple) -> bool:
        interp = self._interp
        if interp is None or not 0 < position < interp.max_position:
            return False
        try:
            summary = interp.insert_point(position, self.schema.encode_key(anchor_keys))
        except (RangeError, StaleEndpointConflict):
            return False
        return summary.changed

    # -- background refinement --------------------------------------------------------

    def _schedule_refinement(self, generation: int) -> None:
        anchor = self._anchor
        if anchor is None:
            return
        with self._refine_cond:
            if self._closed:
                return
            self._refine_pending = (anchor, generation)  # coalesce: newest only
            self._refine_cond.notify_all()
            if self._refine_thread is None:
                self._refine_thread = threading.Thread(
                    target=self._refine_main, name="gridscroll-refine", daemon=True
                )
                self._refine_thread.start()

    def _refine_main(self) -> None:
        while True:
            with self._refine_cond:
                self._refine_cond.wait_for(
                    lambda: self._closed or self._refine_pending is not None
                )
                if self._closed:
                    return
                anchor, generation = self._refine_pending
                self._refine_pending = None
                self._refine_running = True
            try:
                exact = self.table.count_less(anchor)  # slow; no locks held
                self._apply_refinement(anchor, generation, exact)
            except Exception:
                log.exception("refinement failed; state unchanged")
            finally:
                with self._refine_cond:
                    self._refine_running = False
                    self._refine_cond.notify_all()

    def _apply_refinement(self, anchor: tuple, generation: int, exact: int) -> None:
        with self._lock:
            point_added = self._insert_exact_point(exact, anchor)
            self._last_refinement = RefinementOutcome(exact, generation, point_added)
            if generation != self._generation:
                return  # stale: keep the point, suppress the bounce
            mp = self._interp.max_position if self._interp else 0
            pos = min(max(exact, 0), mp)
            self._position = pos
            self._position_exact = exact <= mp
            self._emit(ThumbCorrected(pos, generation))

    # -- startup counting and warmup ------------------------------------------------------

    def _background_main(self) -> None:
        try:
            self.run_count()
            if self.config.warmup_max_iter > 0:
                self.run_warmup()
        except Exception:
            log.exception("startup counting failed")
        finally:
            self._background_done.set()

    def run_count(self) -> int:
        """Exact record count; re-pins the interpolation endpoint (slow query)."""
        n = self.table.count_all()
        with self._lock:
            if self._interp is not None and n >= 2:
                self._interp.set_max_position(n - 1)
                self._position = min(self._position, self._interp.max_position)
            self._max_position_exact = True
            self._row_count_known = n
            self._emit(MaxPositionChanged(max(0, n - 1)))
        return n

    def run_warmup(
        self, threshold: float | None = None, max_iter: int | None = None
    ) -> int:
        """Fill the widest position gaps with exact counts until small enough.

        Each round queries the row at the middle of the largest gap and
        inserts its exact position.  Stops at the threshold, the iteration
        cap, or as soon as a round leaves the table unchanged (no progress
        is possible then: the next round would repeat it exactly).
        """
        if threshold is None:
            threshold = self.config.warmup_threshold
        if max_iter is None:
            max_iter = self.config.warmup_max_iter
        if self._interp is None:
            return 0
        iterations = 0
        for _ in range(max_iter):
            with self._lock:
                interp = self._interp
                mp = interp.max_position
                if self._max_position_exact and mp + 1 <= self.config.window_rows:
                    return iterations  # whole table fits in the window
                lo, hi = interp.largest_gap()
                if hi - lo <= threshold * mp:
                    return iterations
                middle = (lo + hi) // 2
                keys = self.schema.decode_key(
                    interp.ordinal_at(middle), clamp_slots=True
                )
            found = self.table.seek_ge(keys, 1)
            row = found[0] if found else self.table.tail(1)[0]
            exact = self.table.count_less(row.key)  # slow; engine lock released
            iterations += 1
            with self._lock:
                if not 0 < exact < self._interp.max_position:
                    return iterations
                try:
                    summary = self._interp.insert_point(
                        exact, self.schema.encode_key(row.key)
                    )
                except (RangeError, StaleEndpointConflict):
                    return iterations
                if not summary.changed:
                    return iterations
        return iterations

    # -- lifecycle ----------------------------------------------------------------------

    def quiesce(self, timeout: float = 30.0) -> bool:
        """Wait until background counting, warmup and refinement are idle."""
        if not self._background_done.wait(timeout):
            return False
        with self._refine_cond:
            return self._refine_cond.wait_for(
                lambda: self._refine_pending is None and not self._refine_running,
                timeout,
            )

    def close(self) -> None:
        with self._refine_cond:
            self._closed = True
            self._refine_cond.notify_all()
        for thread in (self._refine_thread, self._background_thread):
            if thread is not None and thread.is_alive():
                thread.join(timeout=5)

    def __enter__(self) -> "ScrollEngine":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def start(
    table: IndexedTable,
    config: EngineConfig | None = None,
    start_background: bool = True,
) -> ScrollEngine:
    """Create an engine over an ingested table."""
    return ScrollEngine(table, config=config, start_background=start_background)
