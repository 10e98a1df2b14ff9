"""Run configuration: JSON-backed, validated, hashable.

One RunConfig drives every CLI stage. Defaults match the reference
operating point; unknown keys in a config file are an error rather than a
silent ignore, so typos never masquerade as defaults.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .aligner import AlignerConfig
from .errors import ConfigError


@dataclass
class RunConfig:
    sigma: float = 6.0
    window: int = 20
    k: int = 100
    n_min: int = 2
    n_max: int = 6
    top: int = 10
    min_count: int = 10
    em_iterations: int = 5
    diagonal_tension: float = 4.0
    null_prob: float = 0.08
    coverage_target: int = 7958
    min_shared_verses: int = 7000
    jsd_threshold: float = 0.5
    map_rounds: int = 4
    map_policy: str = "largest"
    match_mode: str = "both"
    seed: int = 0
    corpus_dir: str | None = None
    queries: str | None = None
    allowlist: str | None = None
    gold: str | None = None
    families: str | None = None
    cache_dir: str | None = None
    out_dir: str | None = None

    def validate(self) -> None:
        if self.sigma <= 0:
            raise ConfigError("sigma must be positive")
        if self.window < 0:
            raise ConfigError("window must be >= 0")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if not 1 <= self.n_min <= self.n_max:
            raise ConfigError("need 1 <= n_min <= n_max")
        if self.top < 1:
            raise ConfigError("top must be >= 1")
        if self.min_count < 1:
            raise ConfigError("min_count must be >= 1")
        if self.em_iterations < 1:
            raise ConfigError("em_iterations must be >= 1")
        if self.diagonal_tension < 0:
            raise ConfigError("diagonal_tension must be >= 0")
        if not 0 <= self.null_prob < 1:
            raise ConfigError("null_prob must lie in [0, 1)")
        if self.coverage_target < 1:
            raise ConfigError("coverage_target must be >= 1")
        if self.min_shared_verses < 0:
            raise ConfigError("min_shared_verses must be >= 0")
        if not 0 <= self.jsd_threshold <= 1:
            raise ConfigError("jsd_threshold must lie in [0, 1]")
        if self.map_rounds < 0:
            raise ConfigError("map_rounds must be >= 0")
        if self.map_policy not in ("largest", "head-containing-chain"):
            raise ConfigError(f"unknown map_policy {self.map_policy!r}")
        if self.match_mode not in ("both", "gold_in_gram", "gram_in_gold"):
            raise ConfigError(f"unknown match_mode {self.match_mode!r}")

    def aligner(self) -> AlignerConfig:
        return AlignerConfig(
            em_iterations=self.em_iterations,
            diagonal_tension=self.diagonal_tension,
            null_prob=self.null_prob,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    def sha256(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def load_config(path: str | Path) -> RunConfig:
    """Read a JSON config; unknown keys or bad values raise ConfigError."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    try:
        cfg = RunConfig(**raw)
    except TypeError as exc:
        raise ConfigError(f"bad config: {exc}") from exc
    for f in fields(RunConfig):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if f.name in ("sigma", "diagonal_tension", "null_prob", "jsd_threshold"):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"{f.name} must be a number")
            setattr(cfg, f.name, float(value))
        elif f.name in (
            "window", "k", "n_min", "n_max", "top", "min_count",
            "em_iterations", "coverage_target", "min_shared_verses",
            "map_rounds", "seed",
        ):
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{f.name} must be an integer")
        elif f.name in (
            "map_policy", "match_mode", "corpus_dir", "queries", "allowlist",
            "gold", "families", "cache_dir", "out_dir",
        ):
            if not isinstance(value, str):
                raise ConfigError(f"{f.name} must be a string")
    cfg.validate()
    return cfg


def save_config(cfg: RunConfig, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
