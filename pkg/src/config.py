from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()


def _env(key: str, default: str = "") -> str:
    return os.getenv(key, default)


def _env_float(key: str, default: float) -> float:
    raw = os.getenv(key)
    return float(raw) if raw else default


def _env_int(key: str, default: int) -> int:
    raw = os.getenv(key)
    return int(float(raw)) if raw else default


@dataclass(frozen=True)
class Config:
    # LP 허용오차
    feas_tol: float = field(default_factory=lambda: _env_float("POA_FEAS_TOL", 1e-8))
    opt_tol: float = field(default_factory=lambda: _env_float("POA_OPT_TOL", 1e-9))

    # 균형 판정
    nash_tol: float = field(default_factory=lambda: _env_float("POA_NASH_TOL", 1e-9))
    improve_tol: float = field(
        default_factory=lambda: _env_float("POA_IMPROVE_TOL", 1e-12)
    )

    # oracle / dynamics 한도
    oracle_cap: int = field(default_factory=lambda: _env_int("POA_ORACLE_CAP", 1_000_000))
    max_rounds: int = field(default_factory=lambda: _env_int("POA_MAX_ROUNDS", 1000))

    # 실험 하네스
    workers: int = field(default_factory=lambda: _env_int("POA_WORKERS", 1))
    log_level: str = field(default_factory=lambda: _env("POA_LOG_LEVEL", "INFO"))

    # 경로
    data_dir: Path = field(default_factory=lambda: Path(_env("POA_DATA_DIR", "data")))

    def __post_init__(self) -> None:
        if self.workers < 1:
            object.__setattr__(self, "workers", 1)
        if self.oracle_cap < 1:
            object.__setattr__(self, "oracle_cap", 1)

    @property
    def sqlite_path(self) -> Path:
        return self.data_dir / "experiments.db"


_active: Config | None = None


def get_config() -> Config:
    """현재 활성 설정. 최초 호출 시 환경변수에서 로드."""
    global _active
    if _active is None:
        _active = Config()
    return _active


def use_config(config: Config) -> None:
    """활성 설정 교체 (CLI --tol 등)."""
    global _active
    _active = config
