"""
Command Line Interface
계산 기능을 하위 명령으로 노출 (CSV/JSON 은 stdout 또는 --output, 진단은 stderr)

종료 코드: 0 성공, 2 파싱/파일 오류, 3 도메인/수치 오류
"""

import sys
import json
import math
import logging
import argparse
from dataclasses import replace
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from modules.bounds import verify_domination
from modules.data_loader import DataLoader
from modules.errors import DomainError, SpecParseError
from modules.function_model import (
    FunctionSpec, TabulatedPsi, TailFunction, eval_tail, tail_of,
)
from modules.gls import gls_norm
from modules.moments import lp_norm_closed, lp_norm_direct, lp_norm_from_tail, natural_psi
from modules.numerics import geometric_grid
from modules.orlicz import condition_check
from utils.settings import get_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DOMAIN = 3


def _jsonable(value: Any) -> Any:
    """inf → "inf", nan → null, numpy 스칼라 → float"""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if hasattr(value, "value"):
        return value.value
    return value


def _write_json(data: Dict[str, Any], output: Optional[str] = None, stream=None):
    text = json.dumps(_jsonable(data), indent=2, ensure_ascii=False) + "\n"
    if output:
        with open(output, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
    else:
        (stream or sys.stdout).write(text)


def _log_grid(t_min: float, t_max: float, points: int) -> np.ndarray:
    if not t_min > 0:
        raise DomainError(f"t_min 은 양수여야 합니다 (t_min={t_min})")
    if not t_max > t_min:
        raise DomainError(f"t_max 는 t_min 보다 커야 합니다 ({t_min}, {t_max})")
    return geometric_grid(t_min, t_max, points)


def _as_tail(source) -> TailFunction:
    return source if isinstance(source, TailFunction) else tail_of(source)


def _psi_for(args, source):
    """--psi 가 없으면 --support 위 자연 ψ"""
    if args.psi:
        return DataLoader.load_psi(args.psi)
    a, b = args.support
    return natural_psi(source, (a, b), tol=None)


# ==================== 하위 명령 ====================

def cmd_tail(args) -> int:
    """t, T(t) 를 로그 간격 격자로 출력"""
    tail = _as_tail(DataLoader.load_source(args.spec))
    grid = _log_grid(args.t_min, args.t_max, args.points)
    frame = pd.DataFrame({"t": grid, "T": [eval_tail(tail, float(t)) for t in grid]})
    DataLoader.write_table(frame, args.output)
    return EXIT_OK


def cmd_bound(args) -> int:
    """상한 vs 실제 꼬리 CSV + 요약 JSON"""
    source = DataLoader.load_source(args.spec)
    psi = _psi_for(args, source)
    if args.gamma is not None and not args.gamma > 0:
        raise DomainError(f"γ 는 양수여야 합니다 (γ={args.gamma})")

    grid = _log_grid(args.t_min, args.t_max, args.points)
    report = verify_domination(source, psi, args.gamma, grid, tol=args.tol)
    DataLoader.write_table(report.to_frame(), args.output)

    if args.summary:
        _write_json(report.summary(), args.summary)
    elif args.output:
        _write_json(report.summary())
    else:
        _write_json(report.summary(), stream=sys.stderr)
    return EXIT_OK


def cmd_psi(args) -> int:
    """자연 생성 함수 (p, psi) 표"""
    if args.grid_size < 2:
        raise DomainError(f"grid_size 는 2 이상이어야 합니다 (grid_size={args.grid_size})")
    source = DataLoader.load_source(args.spec)
    psi = natural_psi(source, (args.a, args.b), grid_size=args.grid_size,
                      tol=None, show_progress=args.progress)

    if isinstance(psi, TabulatedPsi):
        frame = DataLoader.psi_frame(psi)
    else:
        p_cap = get_settings().get("moments", "p_grid_cap", 1000.0)
        grid = geometric_grid(args.a, min(args.b, p_cap), args.grid_size)
        # 열린 지지 (a, b) 의 끝점도 포함하도록 닫힌 형식을 (0, ∞) 에서 평가
        closed = replace(psi, support=(0.0, math.inf))
        frame = pd.DataFrame({"p": grid, "psi": [closed.value(float(p)) for p in grid]})
    DataLoader.write_table(frame, args.output)
    return EXIT_OK


def cmd_orlicz_check(args) -> int:
    """핵심 조건 판정 JSON"""
    tail = _as_tail(DataLoader.load_source(args.tail))
    verdict = condition_check(tail, args.k, args.orlicz_tol)
    _write_json(verdict.to_dict(), args.output)
    return EXIT_OK


def cmd_gls_norm(args) -> int:
    """GLS 노름 JSON"""
    source = DataLoader.load_source(args.spec)
    psi = _psi_for(args, source)
    result = gls_norm(source, psi, tol=args.tol)
    _write_json(result.to_dict(), args.output)
    return EXIT_OK


def cmd_norm(args) -> int:
    """L^p 노름 세 가지 경로 비교 JSON"""
    if not args.p > 0:
        raise DomainError(f"p 는 양수여야 합니다 (p={args.p})")
    source = DataLoader.load_source(args.spec)

    data: Dict[str, Any] = {"p": args.p, "closed": None, "direct": None, "from_tail": None}
    if isinstance(source, FunctionSpec):
        data["closed"] = lp_norm_closed(source, args.p)
        data["direct"] = lp_norm_direct(source, args.p)
    data["from_tail"] = lp_norm_from_tail(_as_tail(source), args.p)
    _write_json(data, args.output)
    return EXIT_OK


# ==================== 파서 ====================

def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--tol', type=float, default=settings.get("cli", "tol", 1e-8),
                        help='수치 허용 오차 (기본: 1e-8)')
    common.add_argument('--log-level', type=str, default=settings.get("cli", "log_level", "WARNING"),
                        help='stderr 로그 레벨 (기본: WARNING)')
    common.add_argument('--output', type=str, default=None, help='출력 파일 (기본: stdout)')

    parser = argparse.ArgumentParser(
        prog='gls', description='GLS 꼬리/노름 계산 도구 (Grand Lebesgue Space)')
    sub = parser.add_subparsers(dest='command', required=True)

    p_tail = sub.add_parser('tail', parents=[common], help='꼬리 함수 T(t) 표')
    p_tail.add_argument('--spec', type=str, required=True, help='스펙 JSON 또는 꼬리 표')
    p_tail.add_argument('--t-min', type=float, required=True)
    p_tail.add_argument('--t-max', type=float, required=True)
    p_tail.add_argument('--points', type=int, default=50)
    p_tail.set_defaults(handler=cmd_tail)

    p_bound = sub.add_parser('bound', parents=[common], help='꼬리 상한 검증')
    p_bound.add_argument('--spec', type=str, required=True)
    p_bound.add_argument('--psi', type=str, default=None, help='ψ JSON/CSV (기본: 자연 ψ)')
    p_bound.add_argument('--gamma', type=float, default=None, help='γ (기본: 자연 ψ 면 1, 아니면 GLS 노름)')
    p_bound.add_argument('--support', type=float, nargs=2, default=[0.5, math.inf],
                         metavar=('A', 'B'), help='자연 ψ 지지 (기본: 0.5 inf)')
    p_bound.add_argument('--t-min', type=float, default=3.0)
    p_bound.add_argument('--t-max', type=float, default=100.0)
    p_bound.add_argument('--points', type=int, default=50)
    p_bound.add_argument('--summary', type=str, default=None, help='요약 JSON 파일')
    p_bound.set_defaults(handler=cmd_bound)

    p_psi = sub.add_parser('psi', parents=[common], help='자연 생성 함수 표')
    p_psi.add_argument('--spec', type=str, required=True)
    p_psi.add_argument('--a', type=float, required=True)
    p_psi.add_argument('--b', type=float, default=math.inf)
    p_psi.add_argument('--grid-size', type=int,
                       default=settings.get("moments", "grid_size", 64))
    p_psi.add_argument('--progress', action='store_true', help='진행 표시 (stderr)')
    p_psi.set_defaults(handler=cmd_psi)

    p_orlicz = sub.add_parser('orlicz-check', parents=[common], help='Orlicz 핵심 조건 판정')
    p_orlicz.add_argument('--tail', type=str, required=True)
    p_orlicz.add_argument('--k', type=float, required=True)
    p_orlicz.add_argument('--orlicz-tol', type=float, default=None, help='수렴 판정 허용 오차')
    p_orlicz.set_defaults(handler=cmd_orlicz_check)

    p_gls = sub.add_parser('gls-norm', parents=[common], help='GLS 노름')
    p_gls.add_argument('--spec', type=str, required=True)
    p_gls.add_argument('--psi', type=str, default=None)
    p_gls.add_argument('--support', type=float, nargs=2, default=[0.5, math.inf],
                       metavar=('A', 'B'))
    p_gls.set_defaults(handler=cmd_gls_norm)

    p_norm = sub.add_parser('norm', parents=[common], help='L^p 노름 (닫힌 형식/구적/꼬리)')
    p_norm.add_argument('--spec', type=str, required=True)
    p_norm.add_argument('--p', type=float, required=True)
    p_norm.set_defaults(handler=cmd_norm)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    CLI 진입점

    Args:
        argv: 인자 목록 (None이면 sys.argv[1:])

    Returns:
        int: 종료 코드
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        stream=sys.stderr,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    )

    try:
        return args.handler(args)
    except (SpecParseError, FileNotFoundError) as e:
        print(f"❌ 입력 오류: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, ArithmeticError) as e:
        print(f"❌ 계산 오류 ({type(e).__name__}): {e}", file=sys.stderr)
        return EXIT_DOMAIN
