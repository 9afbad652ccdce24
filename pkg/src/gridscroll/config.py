"""Application configuration: a flat key=value file plus field descriptors.

The format is deliberately small: one ``key = value`` pair per line, ``#`` or
``;`` comments, optional ``[section]`` headers (ignored), optional quotes
around values.  Key fields are declared in order with

    field.1 = region:string:8:rules=ru.rules
    field.2 = street:string:8:rules=ru.rules
    field.3 = house:int32

where the third token is the max length for string fields and the fourth
names either a collation rule file (resolved relative to the config file) or
an inline plain alphabet (``alphabet=abc``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path

from .collation import CollationRules
from .dataset import FieldSpec, KeySchema
from .engine import EngineConfig
from .errors import SchemaError

_LINE = re.compile(r"^\s*([A-Za-z0-9_.\-]+)\s*=\s*(.*?)\s*$")


@dataclass
class AppConfig:
    dataset: str | None = None
    fields: tuple[FieldSpec, ...] = ()
    h: int = 20
    capacity: int = 4096
    default_max_position: int = 1000
    warmup_threshold: float = 0.2
    warmup_max_iter: int = 64
    page_size: int | None = None
    slow_query_latency_ms: float = 0.0
    listen: str = "127.0.0.1:8787"
    seed: int = 1
    static_dir: str = "frontend/dist"

    def schema(self) -> KeySchema:
        if not self.fields:
            raise SchemaError("config declares no key fields")
        return KeySchema(list(self.fields))

    def engine_config(self) -> EngineConfig:
        return EngineConfig(
            window_rows=self.h,
            capacity=self.capacity,
            default_max_position=self.default_max_position,
            warmup_threshold=self.warmup_threshold,
            warmup_max_iter=self.warmup_max_iter,
            page_size=self.page_size,
        )

    @property
    def slow_latency(self) -> float:
        return self.slow_query_latency_ms / 1000.0


def _strip_quotes(value: str) -> str:
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
        return value[1:-1]
    return value


def parse_field_descriptor(text: str, base_dir: Path) -> FieldSpec:
    parts = text.split(":")
    if len(parts) < 2:
        raise SchemaError(f"field descriptor {text!r} needs name:kind")
    name, kind = parts[0].strip(), parts[1].strip()
    max_length = None
    rules = None
    alphabet = None
    if len(parts) >= 3 and parts[2].strip():
        try:
            max_length = int(parts[2])
        except ValueError:
            raise SchemaError(f"bad max_length in field descriptor {text!r}") from None
    if len(parts) >= 4:
        extra = ":".join(parts[3:]).strip()
        if extra.startswith("rules="):
            rules = CollationRules.from_file(base_dir / extra[len("rules="):])
        elif extra.startswith("alphabet="):
            alphabet = extra[len("alphabet="):]
        elif extra:
            rules = CollationRules.from_file(base_dir / extra)
    return FieldSpec(name, kind, max_length=max_length, rules=rules, alphabet=alphabet)


def load_config(path) -> AppConfig:
    path = Path(path)
    base_dir = path.parent
    cfg = AppConfig()
    field_entries: list[tuple[str, str]] = []
    simple: dict[str, str] = {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith(("#", ";", "[")):
            continue
        m = _LINE.match(line)
        if not m:
            raise SchemaError(f"cannot parse config line: {raw!r}")
        key, value = m.group(1).lower(), _strip_quotes(m.group(2))
        if key == "field" or key.startswith("field."):
            field_entries.append((key, value))
        elif key == "fields":
            for chunk in value.split(","):
                if chunk.strip():
                    field_entries.append(("field", chunk.strip()))
        else:
            simple[key] = value

    def take_int(name: str, current: int) -> int:
        return int(simple[name]) if name in simple else current

    def take_float(name: str, current: float) -> float:
        return float(simple[name]) if name in simple else current

    cfg = replace(
        cfg,
        dataset=simple.get("dataset", cfg.dataset),
        h=take_int("h", cfg.h),
        capacity=take_int("capacity", cfg.capacity),
        default_max_position=take_int("default_max_position", cfg.default_max_position),
        warmup_threshold=take_float("warmup_threshold", cfg.warmup_threshold),
        warmup_max_iter=take_int("warmup_max_iter", cfg.warmup_max_iter),
        page_size=int(simple["page_size"]) if "page_size" in simple else None,
        slow_query_latency_ms=take_float(
            "slow_query_latency_ms", cfg.slow_query_latency_ms
        ),
        listen=simple.get("listen", cfg.listen),
        seed=take_int("seed", cfg.seed),
        static_dir=simple.get("static_dir", cfg.static_dir),
    )
    if cfg.dataset is not None and not Path(cfg.dataset).is_absolute():
        cfg = replace(cfg, dataset=str(base_dir / cfg.dataset))

    def field_order(entry: tuple[str, str]):
        key = entry[0]
        if "." in key:
            suffix = key.split(".", 1)[1]
            if suffix.isdigit():
                return (0, int(suffix))
        return (1, 0)  # bare `field =` lines keep file order (stable sort)

    field_entries.sort(key=field_order)
    specs = tuple(parse_field_descriptor(v, base_dir) for _, v in field_entries)
    return replace(cfg, fields=specs)


def split_listen(listen: str) -> tuple[str, int]:
    host, _, port = listen.rpartition(":")
    return host or "127.0.0.1", int(port or "8787")
