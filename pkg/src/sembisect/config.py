"""File-driven run configuration.

One YAML document with a section per subsystem; command-line flags
override file values, and only the backend secret may come from the
environment (SEMBISECT_API_KEY).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .engine import MODE_CLASSIC, MODE_ROBUST, RobustPolicy
from .errors import SembisectError
from .oracle import OracleConfig


class ConfigError(SembisectError):
    pass


@dataclass(frozen=True)
class RunConfig:
    repo_path: str = ""
    good_rev: str = ""
    bad_rev: str = ""
    target_behaviour: str = ""
    mode: str = MODE_ROBUST
    output_dir: str = "sembisect-out"
    oracle: OracleConfig = field(default_factory=OracleConfig)
    policy: RobustPolicy = field(default_factory=RobustPolicy)
    oracle_backend: str = "http"  # http | mock
    mock_script: str = ""
    samples_dir: str = "samples"
    sessions_dir: str = "sessions"
    prompt_char_budget: int = 24_000
    labeling_threshold: float = 0.8

    def __post_init__(self):
        if self.mode not in (MODE_CLASSIC, MODE_ROBUST):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.oracle_backend not in ("http", "mock"):
            raise ConfigError(f"unknown oracle backend {self.oracle_backend!r}")


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from a YAML file plus CLI overrides."""
    doc: dict = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                doc = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping")

    run = doc.get("run", {}) or {}
    oracle = doc.get("oracle", {}) or {}
    bisect = doc.get("bisect", {}) or {}
    labeling = doc.get("labeling", {}) or {}
    paths = doc.get("paths", {}) or {}
    overrides = overrides or {}

    def pick(key: str, section: dict, default):
        if overrides.get(key) is not None:
            return overrides[key]
        return section.get(key, default)

    try:
        oracle_config = OracleConfig(
            endpoint=oracle.get("endpoint", ""),
            model_name=oracle.get("model_name", ""),
            samples_k=oracle.get("samples_k", 3),
            temperature=oracle.get("temperature"),
            confidence_threshold=oracle.get("confidence_threshold", 0.8),
            timeout=oracle.get("timeout", 60.0),
            retries=oracle.get("retries", 2),
            api_key=oracle.get("api_key"),
        )
        policy = RobustPolicy(
            requery_limit=bisect.get("requery_limit", 2),
            suspect_confidence=bisect.get("suspect_confidence", 0.9),
        )
        return RunConfig(
            repo_path=pick("repo_path", run, ""),
            good_rev=pick("good_rev", run, ""),
            bad_rev=pick("bad_rev", run, ""),
            target_behaviour=pick("target_behaviour", run, ""),
            mode=pick("mode", run, MODE_ROBUST),
            output_dir=pick("output_dir", run, "sembisect-out"),
            oracle=oracle_config,
            policy=policy,
            oracle_backend=oracle.get("backend", "http"),
            mock_script=oracle.get("mock_script", ""),
            samples_dir=pick("samples_dir", paths, "samples"),
            sessions_dir=pick("sessions_dir", paths, "sessions"),
            prompt_char_budget=doc.get("prompt", {}).get("char_budget", 24_000)
            if isinstance(doc.get("prompt", {}), dict)
            else 24_000,
            labeling_threshold=labeling.get("confidence_threshold", 0.8),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid configuration value: {exc}") from exc
