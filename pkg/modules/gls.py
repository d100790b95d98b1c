"""
GLS Module
Grand Lebesgue Space 노름 ||f||Gψ = sup_{p ∈ supp ψ} ||f||_p / ψ(p) 와 소속 판정
"""

import math
import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Union

import numpy as np

from modules.errors import ConvergenceError, DivergenceError, NormConsistencyError
from modules.function_model import FunctionSpec, GeneratingFunction, TabulatedPsi, TailFunction
from modules.moments import log_lp_power, log_lp_power_closed, log_lp_power_direct
from modules.numerics import maximize_1d, maximize_tabulated, safe_exp
from utils.settings import get_settings

logger = logging.getLogger(__name__)

Source = Union[FunctionSpec, TailFunction]

# 구적 교차 검증을 수행하는 p 범위 (큰 p 는 |f|^p 가 표현 범위를 넘는다)
_CHECK_P_RANGE = (0.05, 20.0)


@dataclass(frozen=True)
class GLSNormResult:
    """
    GLS 노름 결과

    unbounded=True 이면 norm = inf, offending_p 는 발산한 모멘트의 p (있으면)
    """
    norm: float
    argmax_p: float
    unbounded: bool
    attained_interior: bool
    method: str
    offending_p: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _norm_method(source: Source) -> str:
    if isinstance(source, TailFunction):
        return "tail"
    if log_lp_power_closed(source, 1.0) is not None:
        return "closed_form"
    return "quadrature"


def gls_norm(source: Source,
             psi: GeneratingFunction,
             tol: Optional[float] = None) -> GLSNormResult:
    """
    ||f||Gψ = sup_p ||f||_p / ψ(p) 를 로그 공간에서 최대화

    Args:
        source: 함수 스펙 (닫힌 형식 우선, 없으면 구적) 또는 꼬리 함수
        psi: 생성 함수
        tol: argmax 허용 오차 (None이면 설정값)

    Returns:
        GLSNormResult

    Raises:
        NormConsistencyError: 닫힌 형식과 구적 노름이 상대 1e-5 이상 불일치
    """
    if tol is None:
        tol = get_settings().get("cli", "tol", 1e-8)
    method = _norm_method(source)

    def objective(p: float) -> float:
        log_power = log_lp_power(source, p)
        if log_power == -math.inf:
            return -math.inf
        return log_power / p - psi.log_value(p)

    try:
        if isinstance(psi, TabulatedPsi):
            p_nodes, psi_nodes = psi.nodes()
            values = np.array([objective(float(p)) for p in p_nodes])
            res = maximize_tabulated(p_nodes, values)
        else:
            res = maximize_1d(objective, psi.support, tol=tol)
    except DivergenceError as e:
        logger.info(f"||f||_p diverges at p={e.p}: norm is +inf")
        return GLSNormResult(math.inf, e.p if e.p is not None else math.nan,
                             True, False, method, offending_p=e.p)

    if res.unbounded:
        logger.info(f"||f||_p / ψ(p) unbounded on {psi.support}: norm is +inf")
        return GLSNormResult(math.inf, res.argmax, True, False, method)

    if method == "closed_form":
        _check_consistency(source, psi, res.argmax)

    norm = safe_exp(res.max_value)
    logger.info(f"GLS norm {norm:.12g} at p={res.argmax:.6g} ({method})")
    return GLSNormResult(norm, res.argmax, False, res.attained_interior, method)


def _check_consistency(spec: FunctionSpec, psi: GeneratingFunction, argmax: float):
    """최대점 근처에서 닫힌 형식 노름과 직접 구적 노름 비교"""
    rtol = get_settings().get("moments", "closed_direct_rtol", 1e-5)
    lo, hi = _CHECK_P_RANGE

    candidates = [argmax, 1.0, 2.0]
    p_check = next((p for p in candidates
                    if lo <= p <= hi and math.isfinite(p) and psi.in_support(p)), None)
    if p_check is None:
        logger.debug(f"no quadrature cross-check point for argmax={argmax}")
        return

    closed = safe_exp(log_lp_power_closed(spec, p_check) / p_check)
    try:
        direct = safe_exp(log_lp_power_direct(spec, p_check) / p_check)
    except ConvergenceError as e:
        logger.warning(f"quadrature cross-check skipped at p={p_check:.6g}: {e}")
        return

    if abs(closed - direct) > rtol * abs(closed):
        raise NormConsistencyError(
            f"닫힌 형식 노름 {closed:.12g} 과 구적 노름 {direct:.12g} 이 불일치 (p={p_check:.6g})",
            p=p_check, closed=closed, direct=direct)


def membership(source: Source, psi: GeneratingFunction) -> bool:
    """f ∈ Gψ ⇔ ||f||Gψ < ∞"""
    return not gls_norm(source, psi).unbounded
