"""Run configuration: a YAML document describing the check grid.

Schema (all keys optional, unknown keys rejected)::

    checks: [check_symmetry, ...]        # default: all checks
    n_values: [1, 2, 3]
    k_values: [1, 2, 3]
    metrics:
      - builtin: euclidean               # or diag_linear
      - random: {taylor_degree: 2}       # seed defaults to each run seed
      - random: {taylor_degree: 1, seed: 7}
      - inline: {name: warped, n: 2, entries: [[1, 1, "1 + x1"], [2, 2, "1"]]}
    seeds: [1, 2]
    output: {path: null, format: text}   # text | structured

Inline entries are ``[row, col, polynomial]`` with 1-based indices; a
missing transposed entry is mirrored, other missing entries are 0.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace

import yaml

from .checks import CHECK_NAMES
from .errors import ConfigError, InfvolError
from .metric import BUILTIN_METRICS, MetricSpec, random_metric, validate_metric

FORMATS = ("text", "structured")


@dataclass(frozen=True)
class MetricDescriptor:
    kind: str  # builtin | random | inline
    name: str = ""
    n: int | None = None
    entries: tuple[tuple[int, int, str], ...] = ()
    seed: int | None = None
    taylor_degree: int = 2

    @property
    def uses_run_seed(self) -> bool:
        return self.kind == "random" and self.seed is None

    def resolve(self, n: int, run_seed: int | None) -> MetricSpec | None:
        """The metric for dimension ``n``; None if the descriptor has another n."""
        if self.kind == "builtin":
            return BUILTIN_METRICS[self.name](n)
        if self.kind == "random":
            seed = self.seed if self.seed is not None else run_seed
            return random_metric(n, self.taylor_degree, 0 if seed is None else seed)
        if self.n != n:
            return None
        return self.inline_metric()

    def inline_metric(self) -> MetricSpec:
        grid: list[list[object]] = [[0] * self.n for _ in range(self.n)]
        given = set()
        for row, col, text in self.entries:
            grid[row - 1][col - 1] = text
            given.add((row, col))
        for row, col, text in self.entries:
            if (col, row) not in given:
                grid[col - 1][row - 1] = text
        return validate_metric(grid, name=f"inline:{self.name}")

    def to_data(self) -> dict:
        if self.kind == "builtin":
            return {"builtin": self.name}
        if self.kind == "random":
            body: dict = {"taylor_degree": self.taylor_degree}
            if self.seed is not None:
                body["seed"] = self.seed
            return {"random": body}
        return {
            "inline": {
                "name": self.name,
                "n": self.n,
                "entries": [[r, c, t] for r, c, t in self.entries],
            }
        }


DEFAULT_METRICS = (
    MetricDescriptor("builtin", "euclidean"),
    MetricDescriptor("builtin", "diag_linear"),
    MetricDescriptor("random", taylor_degree=2),
)


@dataclass(frozen=True)
class RunConfig:
    checks: tuple[str, ...] = CHECK_NAMES
    n_values: tuple[int, ...] = (1, 2, 3)
    k_values: tuple[int, ...] = (1, 2, 3)
    metrics: tuple[MetricDescriptor, ...] = DEFAULT_METRICS
    seeds: tuple[int, ...] = (1, 2)
    output_path: str | None = None
    output_format: str = "text"

    def to_data(self) -> dict:
        return {
            "checks": list(self.checks),
            "n_values": list(self.n_values),
            "k_values": list(self.k_values),
            "metrics": [m.to_data() for m in self.metrics],
            "seeds": list(self.seeds),
            "output": {"path": self.output_path, "format": self.output_format},
        }

    def digest(self) -> str:
        """SHA-256 over everything that affects results (output excluded)."""
        data = self.to_data()
        data.pop("output")
        blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return "sha256:" + hashlib.sha256(blob.encode()).hexdigest()

    def render(self) -> str:
        return yaml.safe_dump(self.to_data(), sort_keys=False, default_flow_style=None)

    def with_overrides(self, **changes) -> RunConfig:
        return replace(self, **changes)


_TOP_KEYS = {"checks", "n_values", "k_values", "metrics", "seeds", "output"}


def _int_list(data: dict, key: str, default: tuple[int, ...], minimum: int | None = None) -> tuple[int, ...]:
    if key not in data:
        return default
    value = data[key]
    if not isinstance(value, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in value
    ):
        raise ConfigError(f"{key} must be a list of integers")
    if minimum is not None and any(v < minimum for v in value):
        raise ConfigError(f"{key} entries must be >= {minimum}")
    return tuple(value)


def _reject_unknown(section: str, data: dict, allowed: set[str]) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) in {section}: {', '.join(sorted(map(str, unknown)))}"
        )


def _parse_metric(item: object) -> MetricDescriptor:
    if not isinstance(item, dict) or len(item) != 1:
        raise ConfigError("each metric must be a mapping with exactly one of builtin/random/inline")
    (kind, body), = item.items()
    if kind == "builtin":
        if body not in BUILTIN_METRICS:
            raise ConfigError(
                f"unknown builtin metric {body!r}; valid: {', '.join(sorted(BUILTIN_METRICS))}"
            )
        return MetricDescriptor("builtin", body)
    if kind == "random":
        body = body or {}
        if not isinstance(body, dict):
            raise ConfigError("random metric takes a mapping {taylor_degree, seed}")
        _reject_unknown("random metric", body, {"taylor_degree", "seed"})
        degree = body.get("taylor_degree", 2)
        seed = body.get("seed")
        if not isinstance(degree, int) or degree < 0:
            raise ConfigError("taylor_degree must be a non-negative integer")
        if seed is not None and not isinstance(seed, int):
            raise ConfigError("random metric seed must be an integer")
        return MetricDescriptor("random", seed=seed, taylor_degree=degree)
    if kind == "inline":
        if not isinstance(body, dict):
            raise ConfigError("inline metric takes a mapping {name, n, entries}")
        _reject_unknown("inline metric", body, {"name", "n", "entries"})
        n = body.get("n")
        if not isinstance(n, int) or n < 1:
            raise ConfigError("inline metric needs a positive integer n")
        entries = []
        for e in body.get("entries") or []:
            if (
                not isinstance(e, list) or len(e) != 3
                or not all(isinstance(v, int) for v in e[:2])
                or not isinstance(e[2], (str, int))
            ):
                raise ConfigError(f"inline entry must be [row, col, polynomial], got {e!r}")
            r, c, text = e
            if not (1 <= r <= n and 1 <= c <= n):
                raise ConfigError(f"inline entry index ({r}, {c}) outside 1..{n}")
            entries.append((r, c, str(text)))
        desc = MetricDescriptor("inline", str(body.get("name", "custom")), n, tuple(entries))
        try:
            desc.inline_metric()
        except InfvolError as exc:
            raise ConfigError(f"invalid inline metric {desc.name!r}: {exc}") from exc
        return desc
    raise ConfigError(f"unknown metric kind {kind!r}; valid: builtin, random, inline")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a YAML run configuration."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"parse error at {where}{problem}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    _reject_unknown("configuration", data, _TOP_KEYS)

    checks = data.get("checks", list(CHECK_NAMES))
    if not isinstance(checks, list) or not all(isinstance(c, str) for c in checks):
        raise ConfigError("checks must be a list of names")
    for c in checks:
        if c not in CHECK_NAMES:
            raise ConfigError(f"unknown check {c!r}; valid checks: {', '.join(CHECK_NAMES)}")

    metrics = data.get("metrics")
    if metrics is None:
        parsed_metrics = DEFAULT_METRICS
    elif not isinstance(metrics, list):
        raise ConfigError("metrics must be a list")
    else:
        parsed_metrics = tuple(_parse_metric(m) for m in metrics)

    output = data.get("output") or {}
    if not isinstance(output, dict):
        raise ConfigError("output must be a mapping {path, format}")
    _reject_unknown("output", output, {"path", "format"})
    fmt = output.get("format", "text")
    if fmt not in FORMATS:
        raise ConfigError(f"output format must be one of {', '.join(FORMATS)}")
    path = output.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("output path must be a string")

    return RunConfig(
        checks=tuple(checks),
        n_values=_int_list(data, "n_values", RunConfig.n_values, minimum=1),
        k_values=_int_list(data, "k_values", RunConfig.k_values, minimum=1),
        metrics=parsed_metrics,
        seeds=_int_list(data, "seeds", RunConfig.seeds),
        output_path=path,
        output_format=fmt,
    )
