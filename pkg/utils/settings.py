"""
설정 로드 모듈
config/settings.yaml + 환경변수 (.env 포함) 우선순위 병합
"""

import os
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "config" / "settings.yaml"
ENV_PREFIX = "GLS"


class Settings:
    """섹션별 설정값 조회 클래스"""

    def __init__(self, data: Dict[str, Any]):
        """
        Args:
            data: settings.yaml 파싱 결과
        """
        self._data = data or {}

    @classmethod
    def from_file(cls, path: Optional[Path] = None) -> "Settings":
        """
        YAML 설정 파일 로드

        Args:
            path: 설정 파일 경로 (None이면 config/settings.yaml)

        Returns:
            Settings: 설정 객체
        """
        path = Path(path) if path is not None else DEFAULT_CONFIG_PATH

        if not path.exists():
            logger.warning(f"Settings file not found: {path}, using built-in defaults")
            return cls({})

        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}

        logger.debug(f"Settings loaded from {path}")
        return cls(data)

    def get(self, section: str, key: str, default: Any = None) -> Any:
        """
        설정값 조회 (우선순위: 환경변수 > YAML > 기본값)

        Args:
            section: 섹션명 (예: 'numerics')
            key: 키 이름 (예: 'tol')
            default: 기본값

        Returns:
            설정값 (기본값이 숫자면 같은 타입으로 변환)
        """
        # 1순위: 환경변수 (.env 포함)
        env_name = f"{ENV_PREFIX}_{section}_{key}".upper()
        raw = os.getenv(env_name)
        if raw is not None:
            return _coerce(raw, default)

        # 2순위: YAML
        value = self._data.get(section, {}).get(key)
        if value is not None:
            return _coerce(value, default)

        # 기본값
        return default

    def section(self, section: str) -> Dict[str, Any]:
        """섹션 전체 (환경변수 미반영 원본)"""
        return dict(self._data.get(section, {}))


def _coerce(value: Any, default: Any) -> Any:
    """문자열 설정값을 기본값 타입에 맞춰 변환"""
    if default is None or isinstance(default, str):
        return value
    if isinstance(default, bool):
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)
    if isinstance(default, int):
        return int(float(value))
    if isinstance(default, float):
        return float(value)
    return value


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    프로세스 전역 설정 (최초 1회 로드 후 캐시)

    Returns:
        Settings: 설정 객체
    """
    load_dotenv()
    return Settings.from_file()
