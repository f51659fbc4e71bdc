"""Service configuration from a flat key=value file plus env overrides.

File format: one ``key = value`` pair per line, ``#`` comments and blank
lines ignored. Every key can also be set through the environment as
``SVLINK_<KEY>`` (uppercased), which wins over the file. Unknown keys are
rejected rather than ignored so typos surface immediately.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .summarize import BackendConfig
from .svident import SvConfig

ENV_PREFIX = "SVLINK_"


class ConfigError(ValueError):
    pass


def _default_workers() -> int:
    return os.cpu_count() or 1


@dataclass
class ServiceConfig:
    corpus_root: Path = Path("corpus")
    snapshot_path: Path = Path("index-snapshot.json")
    listen_address: str = "127.0.0.1:8040"
    backend: BackendConfig = field(default_factory=BackendConfig)
    sv: SvConfig = field(default_factory=SvConfig)
    worker_count: int = field(default_factory=_default_workers)
    cors_origin: str = "*"

    def __post_init__(self):
        if not str(self.corpus_root):
            raise ConfigError("corpus_root must be nonempty")
        if not str(self.snapshot_path):
            raise ConfigError("snapshot_path must be nonempty")
        if self.worker_count < 1:
            raise ConfigError(f"worker_count must be >= 1, got {self.worker_count}")


def _parse_file(path: Path) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        out[key.strip()] = value.strip()
    return out


_KEYS = (
    "corpus_root",
    "snapshot_path",
    "listen_address",
    "backend_url",
    "backend_timeout_ms",
    "max_summary_tokens",
    "tau_classifier",
    "tau_retrieval",
    "top_k",
    "min_match_sim",
    "worker_count",
    "cors_origin",
)


def load_config(
    path: "Path | str | None" = None, env: Mapping[str, str] | None = None
) -> ServiceConfig:
    """Defaults, overlaid by the file (if given), overlaid by environment."""
    env = os.environ if env is None else env
    values: dict[str, str] = {}
    if path is not None:
        file_path = Path(path)
        if not file_path.is_file():
            raise ConfigError(f"config file not found: {file_path}")
        file_values = _parse_file(file_path)
        unknown = sorted(set(file_values) - set(_KEYS))
        if unknown:
            raise ConfigError(f"{file_path}: unknown keys: {', '.join(unknown)}")
        values.update(file_values)
    for key in _KEYS:
        env_key = ENV_PREFIX + key.upper()
        if env_key in env:
            values[key] = env[env_key]

    def _get(key: str, cast, default):
        if key not in values or values[key] == "":
            return default
        try:
            return cast(values[key])
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {values[key]!r} ({exc})") from exc

    try:
        backend = BackendConfig(
            endpoint_url=values.get("backend_url") or None,
            timeout_ms=_get("backend_timeout_ms", int, 5000),
            max_summary_tokens=_get("max_summary_tokens", int, 30),
        )
        sv = SvConfig(
            tau_classifier=_get("tau_classifier", float, 0.5),
            tau_retrieval=_get("tau_retrieval", float, 0.6),
            top_k=_get("top_k", int, 5),
            min_match_sim=_get("min_match_sim", float, 0.35),
        )
        return ServiceConfig(
            corpus_root=Path(values.get("corpus_root", "corpus")),
            snapshot_path=Path(values.get("snapshot_path", "index-snapshot.json")),
            listen_address=values.get("listen_address", "127.0.0.1:8040"),
            backend=backend,
            sv=sv,
            worker_count=_get("worker_count", int, _default_workers()),
            cors_origin=values.get("cors_origin", "*"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
