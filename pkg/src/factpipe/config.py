"""Pipeline configuration: one JSON file plus a few CLI/env overrides."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .classifier import TrainConfig
from .ingest.fetch import DEFAULT_USER_AGENT
from .labels import DomainClass, VerdictClass

ENCODER_ENDPOINT_ENV = "FACTPIPE_ENCODER_ENDPOINT"

TASKS = ("veracity-4", "domain-6")
BACKENDS = ("tfidf", "remote-encoder")


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    sites_dir: str = "sites"
    mapping_table_path: str | None = None  # None = packaged seed table
    corpus_path: str = "corpus.ndjson"
    model_path: str = "model.bin"
    task: str = "veracity-4"
    backend: str = "tfidf"
    seed: int = 0
    min_df: int = 2
    max_terms: int = 50_000
    user_agent: str = DEFAULT_USER_AGENT
    request_timeout_s: float = 10.0
    train: TrainConfig = TrainConfig()
    encoder_endpoint: str = "http://localhost:8900/encode"
    encoder_dims: int = 64
    encoder_batch_limit: int = 32
    encoder_timeout_ms: float = 10_000.0

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.backend not in BACKENDS:
            raise ConfigError(
                f"backend must be one of {BACKENDS}, got {self.backend!r}"
            )

    def class_names(self) -> tuple[str, ...]:
        enum_cls = VerdictClass if self.task == "veracity-4" else DomainClass
        return tuple(member.value for member in enum_cls)

    def k(self) -> int:
        return len(self.class_names())

    def label_field(self) -> str:
        return "verdict_class" if self.task == "veracity-4" else "domain_class"

    def effective_train_config(self) -> TrainConfig:
        return dataclasses.replace(self.train, seed=self.seed)

    def effective_encoder_endpoint(self) -> str:
        return os.environ.get(ENCODER_ENDPOINT_ENV, self.encoder_endpoint)


_TRAIN_KEYS = {"epochs", "batch_size", "learning_rate", "val_fraction", "patience", "l2"}
_TOP_KEYS = {
    "sites_dir", "mapping_table_path", "corpus_path", "model_path", "task",
    "backend", "seed", "min_df", "max_terms", "user_agent",
    "request_timeout_s", "train", "encoder_endpoint", "encoder_dims",
    "encoder_batch_limit", "encoder_timeout_ms",
}


def load_config(path: str | Path) -> PipelineConfig:
    """Parse the JSON config file; unknown keys are rejected, not ignored."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")

    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")

    train_raw = raw.pop("train", {})
    if not isinstance(train_raw, dict):
        raise ConfigError(f"{path}: 'train' must be an object")
    unknown = set(train_raw) - _TRAIN_KEYS
    if unknown:
        raise ConfigError(
            f"{path}: unknown train keys {sorted(unknown)}"
            " (the pipeline seed is the top-level 'seed')"
        )

    try:
        return PipelineConfig(train=TrainConfig(**train_raw), **raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
