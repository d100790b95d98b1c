"""
Young-Fenchel Transform Module
ν(p) = p·ln ψ(p) 와 지지 위로 제한한 켤레 ν*(u) = sup_{p ∈ supp ψ} (p·u - ν(p))
"""

import math
import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np

from modules.errors import DomainError
from modules.function_model import (
    ConstantPsi, GeneratingFunction, NaturalStretchedExp, PowerPsi, TabulatedPsi,
)
from modules.numerics import MaxResult, maximize_1d, maximize_tabulated, safe_exp
from utils.settings import get_settings

logger = logging.getLogger(__name__)

CLOSED_FORM = "closed_form"
NUMERIC = "numeric"


@dataclass(frozen=True)
class ConjugateResult:
    """
    ν*(u) 계산 결과

    value 가 inf 이면 목적 함수가 지지 위에서 유계가 아님.
    argmax_p 는 지지 끝점이면 그 끝점 (무한이면 inf), attained_interior 로 구분.
    """
    u: float
    value: float
    argmax_p: float
    method: str
    attained_interior: bool = True

    @property
    def is_infinite(self) -> bool:
        return self.value == math.inf

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def nu(psi: GeneratingFunction, p: float) -> float:
    """
    ν(p) = p·ln ψ(p) = ln ψ(p)^p

    Args:
        psi: 생성 함수
        p: 지지 안의 점

    Returns:
        float: ν(p)

    Raises:
        DomainError: p 가 지지 밖
    """
    if not psi.in_support(p):
        raise DomainError(f"p={p} 가 ψ 의 지지 {psi.support} 밖입니다.")
    return psi.nu(p)


def fenchel_conjugate(psi: GeneratingFunction,
                      u: float,
                      tol: Optional[float] = None,
                      prefer_closed_form: bool = True) -> ConjugateResult:
    """
    지지 위로 제한한 Young-Fenchel 켤레 ν*(u)

    닫힌 형식 (PowerPsi, ConstantPsi, NaturalStretchedExp) 이 있으면 사용하고,
    표 ψ 는 노드 최대 + 3점 포물선, 나머지는 maximize_1d 로 계산한다.

    Args:
        psi: 생성 함수
        u: 켤레 인자
        tol: argmax 허용 오차 (None이면 설정값)
        prefer_closed_form: False 면 닫힌 형식이 있어도 수치 경로 사용

    Returns:
        ConjugateResult
    """
    if math.isnan(u):
        raise DomainError("u 가 NaN 입니다.")
    if tol is None:
        tol = get_settings().get("cli", "tol", 1e-8)

    if isinstance(psi, TabulatedPsi):
        return _conjugate_tabulated(psi, u)

    if prefer_closed_form:
        if isinstance(psi, PowerPsi):
            return _conjugate_power(psi, u)
        if isinstance(psi, NaturalStretchedExp):
            return _conjugate_natural_stretched(psi, u)
        if isinstance(psi, ConstantPsi):
            return _conjugate_linear(psi, u)

    return _conjugate_numeric(psi, u, tol)


# ==================== 닫힌 형식 ====================

def _objective(psi: GeneratingFunction, u: float, p: float) -> float:
    return p * u - psi.nu(p)


def _boundary_result(psi: GeneratingFunction, u: float, p_edge: float) -> ConjugateResult:
    """목적 함수가 끝점 p_edge 로 갈 때의 상한"""
    if p_edge == 0.0:
        # 닫힌 형식 족 모두 p → 0 에서 p·u - ν(p) → 0 (NaturalStretchedExp 는 -inf)
        value = -math.inf if isinstance(psi, NaturalStretchedExp) else 0.0
        return ConjugateResult(u, value, 0.0, CLOSED_FORM, attained_interior=False)

    a, b = psi.support
    inside = min(max(p_edge, a), b)
    # 열린 끝점에서의 극한값: 닫힌 식을 끝점에서 직접 계산
    if isinstance(psi, PowerPsi):
        nu_edge = inside * math.log(psi.C1) + inside * math.log(inside) / psi.m
    elif isinstance(psi, NaturalStretchedExp):
        nu_edge = psi.nu_constant - math.log(inside) / psi.theta
    else:
        nu_edge = inside * math.log(psi.C)
    return ConjugateResult(u, inside * u - nu_edge, inside, CLOSED_FORM, attained_interior=False)


def _conjugate_power(psi: PowerPsi, u: float) -> ConjugateResult:
    # 정류점: u - ln C₁ - (ln p + 1)/m = 0
    log_p = psi.m * (u - math.log(psi.C1)) - 1.0
    p_star = safe_exp(log_p)
    a, b = psi.support
    if math.isinf(p_star) and math.isinf(b):
        return ConjugateResult(u, math.inf, math.inf, CLOSED_FORM, attained_interior=False)
    if a < p_star < b:
        return ConjugateResult(u, p_star / psi.m, p_star, CLOSED_FORM)
    # 목적 함수가 오목하므로 정류점이 지지 밖이면 가까운 끝점이 sup
    return _boundary_result(psi, u, a if p_star <= a else b)


def _conjugate_natural_stretched(psi: NaturalStretchedExp, u: float) -> ConjugateResult:
    a, b = psi.support
    if u >= 0:
        # p·u + (1/θ) ln p 는 증가 함수
        if math.isinf(b):
            return ConjugateResult(u, math.inf, math.inf, CLOSED_FORM, attained_interior=False)
        return _boundary_result(psi, u, b)

    p_star = -1.0 / (psi.theta * u)
    if a < p_star < b:
        value = -1.0 / psi.theta + math.log(p_star) / psi.theta - psi.nu_constant
        return ConjugateResult(u, value, p_star, CLOSED_FORM)
    return _boundary_result(psi, u, a if p_star <= a else b)


def _conjugate_linear(psi: ConstantPsi, u: float) -> ConjugateResult:
    a, b = psi.support
    slope = u - math.log(psi.C)
    if slope > 0:
        if math.isinf(b):
            return ConjugateResult(u, math.inf, math.inf, CLOSED_FORM, attained_interior=False)
        return _boundary_result(psi, u, b)
    return _boundary_result(psi, u, a)


# ==================== 수치 ====================

def _conjugate_tabulated(psi: TabulatedPsi, u: float) -> ConjugateResult:
    p_nodes, psi_nodes = psi.nodes()
    objective = p_nodes * u - p_nodes * np.log(psi_nodes)
    res: MaxResult = maximize_tabulated(p_nodes, objective)
    return ConjugateResult(u, res.max_value, res.argmax, NUMERIC, res.attained_interior)


def _conjugate_numeric(psi: GeneratingFunction, u: float, tol: float) -> ConjugateResult:
    scan_points = get_settings().get("fenchel", "scan_points", 512)

    def h(p: float) -> float:
        value = psi.nu(p)
        return -math.inf if value == math.inf else p * u - value

    res = maximize_1d(h, psi.support, tol=tol, scan_points=scan_points)
    logger.debug(f"numeric conjugate u={u:.6g}: value={res.max_value:.10g} at p={res.argmax:.6g}")
    return ConjugateResult(u, res.max_value, res.argmax, NUMERIC, res.attained_interior)
