"""Scripted benchmark: estimation error, warmup effect, bounce sizes, costs.

Replays scroll/locate/step traffic against an engine over a synthetic or
configured dataset and reports how far the interpolated thumb positions sit
from the exact ones before and after warmup, how many slow queries ran, and
the index-entry touch costs of the fast path.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .dataset import IndexedTable
from .engine import EngineConfig, ScrollEngine, start
from .errors import GridScrollError


@dataclass
class PhaseStats:
    samples: int = 0
    total_abs_error: int = 0
    max_abs_error: int = 0

    def add(self, error: int) -> None:
        error = abs(error)
        self.samples += 1
        self.total_abs_error += error
        self.max_abs_error = max(self.max_abs_error, error)

    @property
    def mean_abs_error(self) -> float:
        return self.total_abs_error / self.samples if self.samples else 0.0

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "mean_abs_error": round(self.mean_abs_error, 3),
            "max_abs_error": self.max_abs_error,
        }


def _estimation_stats(engine: ScrollEngine, rng: random.Random, probes: int) -> PhaseStats:
    """|estimated - true| over random existing rows, no state mutation."""
    stats = PhaseStats()
    table = engine.table
    for _ in range(probes):
        index = rng.randrange(table.row_count)
        row = table.row_at(index)
        stats.add(engine.estimate_position(row.key) - index)
    return stats


def _bounce_stats(engine: ScrollEngine, rng: random.Random, cycles: int) -> PhaseStats:
    """Thumb correction sizes over scroll-release cycles (runs slow queries)."""
    stats = PhaseStats()
    for _ in range(cycles):
        changed = engine.on_scroll(rng.randint(0, engine.max_position))
        engine.on_scroll_release()
        engine.quiesce()
        stats.add(engine.state().position_estimate - changed.position)
    return stats


def _small_step_stats(
    engine: ScrollEngine, rng: random.Random, checks: int
) -> dict:
    table = engine.table
    h = engine.config.window_rows
    page = engine.config.effective_page_size
    errors = 0
    slow_before = table.slow_query_count
    max_touch = 0
    for _ in range(checks):
        engine.on_scroll(rng.randint(0, engine.max_position))
        first = engine.window()[0]
        true_index = table.ordinal_rank(engine.schema.encode_key(first.key))
        step = rng.choice((1, -1, page, -page))
        touches_before = table.touch_count
        changed = engine.small_step(step)
        max_touch = max(max_touch, table.touch_count - touches_before)
        expected_start = min(
            max(true_index + step, 0), max(table.row_count - len(changed.rows), 0)
        )
        expected = [
            table.row_at(i)
            for i in range(expected_start, expected_start + len(changed.rows))
        ]
        if list(changed.rows) != expected:
            errors += 1
    return {
        "checks": checks,
        "adjacency_errors": errors,
        "window_rows": h,
        "slow_queries_during_steps": table.slow_query_count - slow_before,
        "max_touch_per_step": max_touch,
    }


def replay_script(engine: ScrollEngine, lines: list[str]) -> dict:
    """Run a plain-text action script; returns counts per action kind.

    Commands: ``scroll <lambda>``, ``release``, ``step <n>``,
    ``locate <v1,v2,...>``, ``warmup``, ``quiesce``.
    """
    counts: dict[str, int] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        op, _, arg = line.partition(" ")
        try:
            if op == "scroll":
                engine.on_scroll(int(arg))
            elif op == "release":
                engine.on_scroll_release()
            elif op == "step":
                engine.small_step(int(arg))
            elif op == "locate":
                values = [v.strip() for v in arg.split(",")]
                keys = tuple(
                    engine.schema.parse_cell(i, v) for i, v in enumerate(values)
                )
                engine.position_to(keys)
            elif op == "warmup":
                engine.run_warmup()
            elif op == "quiesce":
                engine.quiesce()
            else:
                raise GridScrollError(f"unknown script command {op!r}")
        except GridScrollError as exc:
            raise GridScrollError(f"script line {lineno}: {exc}") from exc
        counts[op] = counts.get(op, 0) + 1
    engine.quiesce()
    return counts


def run_bench(
    table: IndexedTable,
    engine_config: EngineConfig | None = None,
    seed: int = 1,
    probes: int = 400,
    cycles: int = 100,
    script_lines: list[str] | None = None,
) -> dict:
    rng = random.Random(seed)
    engine = start(table, engine_config, start_background=False)
    try:
        engine.run_count()
        report: dict = {
            "rows": table.row_count,
            "h": engine.config.window_rows,
            "lambda_max": engine.max_position,
        }
        report["estimation_endpoints_only"] = _estimation_stats(
            engine, rng, probes
        ).to_dict()

        slow_before = table.slow_query_count
        report["warmup_iterations"] = engine.run_warmup()
        report["warmup_slow_queries"] = table.slow_query_count - slow_before
        report["estimation_after_warmup"] = _estimation_stats(
            engine, rng, probes
        ).to_dict()
        report["bounce_after_warmup"] = _bounce_stats(engine, rng, cycles).to_dict()
        report["small_step"] = _small_step_stats(engine, rng, min(cycles, 200))
        if script_lines is not None:
            report["script_actions"] = replay_script(engine, script_lines)
        report["slow_queries_total"] = table.slow_query_count
        report["touch_count_total"] = table.touch_count
        report["interpolation_points"] = len(engine.interpolation_points())
        return report
    finally:
        engine.close()
