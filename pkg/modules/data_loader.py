"""
Data Loader Module
스펙 JSON, 꼬리/ψ 표 (CSV, Excel) 읽기와 결정적 CSV 쓰기
"""

import io
import json
import sys
import logging
from pathlib import Path
from typing import Any, Dict, Optional, TextIO, Tuple, Union

import chardet
import pandas as pd

from modules.errors import SpecParseError
from modules.function_model import (
    FunctionSpec, GeneratingFunction, Tabulated, TabulatedPsi, TailFunction,
    PSI_FAMILIES, TAIL_FAMILIES, psi_from_dict, source_from_dict,
)
from utils.settings import get_settings

logger = logging.getLogger(__name__)

TAIL_COLUMNS = ["t", "T"]
PSI_COLUMNS = ["p", "psi"]


class DataLoader:
    """스펙/표 파일 로드 및 기본 검증"""

    @staticmethod
    def load_file(file_path: Union[str, Path]) -> pd.DataFrame:
        """
        CSV 또는 Excel 표 로드

        Args:
            file_path: 파일 경로

        Returns:
            pd.DataFrame: 로드된 표
        """
        file_path = Path(file_path)

        if not file_path.exists():
            raise FileNotFoundError(f"파일을 찾을 수 없습니다: {file_path}")

        # 파일 확장자에 따라 로드
        if file_path.suffix.lower() == '.csv':
            return DataLoader._load_csv(file_path)
        elif file_path.suffix.lower() in ['.xlsx', '.xls']:
            return pd.read_excel(file_path)
        else:
            raise SpecParseError(f"지원하지 않는 파일 형식: {file_path.suffix}")

    @staticmethod
    def _load_csv(file_path: Path) -> pd.DataFrame:
        """CSV 로드 (인코딩 자동 감지)"""
        with open(file_path, 'rb') as f:
            encoding = chardet.detect(f.read(10000))['encoding'] or 'utf-8'

        for enc in [encoding, 'utf-8', 'latin1']:
            try:
                return pd.read_csv(file_path, encoding=enc, float_precision="round_trip")
            except UnicodeDecodeError:
                continue
            except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
                raise SpecParseError(f"CSV 파일 읽기 실패 ({file_path.name}): {e}") from e
        raise SpecParseError(f"CSV 파일 인코딩을 인식할 수 없습니다: {file_path}")

    @staticmethod
    def validate_required_columns(df: pd.DataFrame, required_columns: list) -> Tuple[bool, list]:
        """
        필수 컬럼 존재 여부 확인

        Returns:
            (bool, list): (검증 통과 여부, 누락된 컬럼 리스트)
        """
        missing_columns = [col for col in required_columns if col not in df.columns]
        return len(missing_columns) == 0, missing_columns

    @staticmethod
    def _numeric_columns(df: pd.DataFrame, columns: list, file_path: Path) -> list:
        df = df.rename(columns=lambda c: str(c).strip())
        is_valid, missing = DataLoader.validate_required_columns(df, columns)
        if not is_valid:
            raise SpecParseError(f"{file_path.name}: 필수 컬럼 누락 {missing} (필요: {columns})")
        try:
            return [tuple(pd.to_numeric(df[col], errors='raise').astype(float)) for col in columns]
        except (ValueError, TypeError) as e:
            raise SpecParseError(f"{file_path.name}: 숫자가 아닌 값이 있습니다 ({e})") from e

    # ==================== 표 ====================

    @staticmethod
    def load_tail_table(file_path: Union[str, Path]) -> Tabulated:
        """(t, T) 두 컬럼 표 → Tabulated 꼬리"""
        file_path = Path(file_path)
        t, T = DataLoader._numeric_columns(DataLoader.load_file(file_path), TAIL_COLUMNS, file_path)
        logger.info(f"Loaded tail table {file_path.name} ({len(t)} rows)")
        return Tabulated(t, T)

    @staticmethod
    def load_psi_table(file_path: Union[str, Path]) -> TabulatedPsi:
        """(p, psi) 두 컬럼 표 → TabulatedPsi"""
        file_path = Path(file_path)
        p, psi = DataLoader._numeric_columns(DataLoader.load_file(file_path), PSI_COLUMNS, file_path)
        logger.info(f"Loaded ψ table {file_path.name} ({len(p)} rows)")
        return TabulatedPsi(p, psi)

    # ==================== JSON 스펙 ====================

    @staticmethod
    def load_json(file_path: Union[str, Path]) -> Dict[str, Any]:
        """JSON 객체 파일 로드"""
        file_path = Path(file_path)
        if not file_path.exists():
            raise FileNotFoundError(f"파일을 찾을 수 없습니다: {file_path}")
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise SpecParseError(f"JSON 파싱 실패 ({file_path.name}): {e}") from e
        if not isinstance(data, dict):
            raise SpecParseError(f"{file_path.name}: 최상위가 JSON 객체가 아닙니다.")
        return data

    @staticmethod
    def _resolve_tables(data: Any, base_dir: Path) -> Any:
        """{"family": "tabulated_tail", "path": "..."} 처럼 표 경로로 주어진 부분을 읽어 채움"""
        if isinstance(data, list):
            return [DataLoader._resolve_tables(item, base_dir) for item in data]
        if not isinstance(data, dict):
            return data

        resolved = {key: DataLoader._resolve_tables(value, base_dir) for key, value in data.items()}
        if "path" in resolved and resolved.get("family") in ("tabulated_tail", "tabulated_psi"):
            table_path = Path(resolved.pop("path"))
            if not table_path.is_absolute():
                table_path = base_dir / table_path
            if resolved["family"] == "tabulated_tail":
                table = DataLoader.load_tail_table(table_path)
            else:
                table = DataLoader.load_psi_table(table_path)
            resolved.update({key: value for key, value in table.to_dict().items() if key != "family"})
        return resolved

    @staticmethod
    def load_source(file_path: Union[str, Path]) -> Union[FunctionSpec, TailFunction]:
        """
        함수 스펙 또는 꼬리 함수 로드

        .json 은 family 로 판별, .csv/.xlsx 는 (t, T) 꼬리 표로 읽는다.
        """
        file_path = Path(file_path)
        if file_path.suffix.lower() != '.json':
            return DataLoader.load_tail_table(file_path)
        data = DataLoader._resolve_tables(DataLoader.load_json(file_path), file_path.parent)
        return source_from_dict(data)

    @staticmethod
    def load_tail(file_path: Union[str, Path]) -> TailFunction:
        """꼬리 함수만 허용 (스펙이면 파싱 오류)"""
        source = DataLoader.load_source(file_path)
        if not isinstance(source, TailFunction):
            raise SpecParseError(f"{Path(file_path).name}: 꼬리 함수가 아닙니다 "
                                 f"(가능한 family: {sorted(TAIL_FAMILIES)})")
        return source

    @staticmethod
    def load_psi(file_path: Union[str, Path]) -> GeneratingFunction:
        """ψ 로드: .json 은 family, .csv/.xlsx 는 (p, psi) 표"""
        file_path = Path(file_path)
        if file_path.suffix.lower() != '.json':
            return DataLoader.load_psi_table(file_path)
        data = DataLoader._resolve_tables(DataLoader.load_json(file_path), file_path.parent)
        if data.get("family") not in PSI_FAMILIES:
            raise SpecParseError(f"{file_path.name}: 알 수 없는 ψ family '{data.get('family')}' "
                                 f"(가능: {sorted(PSI_FAMILIES)})")
        return psi_from_dict(data)

    # ==================== 쓰기 ====================

    @staticmethod
    def write_table(df: pd.DataFrame, output: Optional[Union[str, Path, TextIO]] = None):
        """
        결정적 CSV 출력 (17 유효 숫자, '.' 소수점, '\\n' 줄바꿈)

        Args:
            df: 출력 표
            output: 파일 경로 또는 스트림 (None이면 stdout)
        """
        float_format = get_settings().get("cli", "float_format", "%.17g")
        buffer = io.StringIO()
        df.to_csv(buffer, index=False, float_format=float_format, lineterminator="\n")
        text = buffer.getvalue()

        if output is None:
            sys.stdout.write(text)
        elif hasattr(output, "write"):
            output.write(text)
        else:
            with open(output, 'w', encoding='utf-8', newline='') as f:
                f.write(text)

    @staticmethod
    def psi_frame(psi: TabulatedPsi) -> pd.DataFrame:
        """TabulatedPsi → (p, psi) 표"""
        p, values = psi.nodes()
        return pd.DataFrame({"p": p, "psi": values})
