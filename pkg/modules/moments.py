"""
Moments Module
L^p 노름 (닫힌 형식 / 정의역 직접 구적 / 꼬리 적분) 과 자연 생성 함수 ψ_f

로그 공간에서 계산한다: ln ||f||_p^p 를 먼저 구하고 p 로 나눈다.
"""

import math
import logging
from typing import Optional, Tuple, Union

import numpy as np
from scipy import optimize, special
from tqdm import tqdm

from modules.errors import ConvergenceError, DivergenceError, DomainError
from modules.function_model import (
    DisjointUnion, FunctionSpec, GeneratingFunction, Indicator01Scaled, LogSingular,
    NaturalStretchedExp, Scaled, StretchedExp, TabulatedPsi, TailFunction, TruncatedExp,
    _logsumexp,
)
from modules.numerics import geometric_grid, integrate, log_gamma, safe_exp
from utils.settings import get_settings

logger = logging.getLogger(__name__)

Source = Union[FunctionSpec, TailFunction]

# 구적이 요청 오차에 못 미쳐도 이 배율 안이면 결과를 받아들인다
_ACCEPT_SLACK = 100.0


def _check_p(p: float):
    if not (p > 0 and math.isfinite(p)):
        raise DomainError(f"p 는 유한한 양수여야 합니다 (p={p})")


# ==================== 닫힌 형식 ====================

def log_lp_power_closed(spec: FunctionSpec, p: float) -> Optional[float]:
    """
    ln ||f||_p^p 닫힌 형식 (지원하지 않는 변형이면 None)

    Args:
        spec: 함수 스펙
        p: 지수 (> 0)

    Returns:
        Optional[float]: ln ∫|f|^p dμ
    """
    _check_p(p)

    if isinstance(spec, StretchedExp):
        # ∫_0^∞ e^{-cp x^θ} dx = Γ(1/θ) / (θ (cp)^{1/θ})
        return log_gamma(1.0 / spec.theta) - math.log(spec.theta) \
            - math.log(spec.c * p) / spec.theta
    if isinstance(spec, LogSingular):
        return log_gamma(p + 1.0)
    if isinstance(spec, TruncatedExp):
        return -math.log(p)
    if isinstance(spec, Indicator01Scaled):
        inner = spec.inner
        if isinstance(inner, TruncatedExp):
            inner = StretchedExp(1.0, 1.0)
        if not isinstance(inner, StretchedExp):
            return None
        full = log_lp_power_closed(inner, p)
        lower = float(special.gammainc(1.0 / inner.theta, inner.c * p))
        return full + math.log(lower) if lower > 0 else -math.inf
    if isinstance(spec, DisjointUnion):
        parts = [log_lp_power_closed(part, p) for part in spec.parts]
        if any(v is None for v in parts):
            return None
        return _logsumexp(parts)
    if isinstance(spec, Scaled):
        inner = log_lp_power_closed(spec.inner, p)
        return None if inner is None else p * math.log(spec.lam) + inner
    return None


def lp_norm_closed(spec: FunctionSpec, p: float) -> Optional[float]:
    """
    ||f||_p 닫힌 형식

    Examples:
        StretchedExp(1, 1), p = 4 → 4^{-1/4}
        LogSingular, p = 5 → Γ(6)^{1/5} = 120^{1/5}

    Returns:
        Optional[float]: 노름 (닫힌 형식이 없으면 None)
    """
    log_power = log_lp_power_closed(spec, p)
    if log_power is None:
        return None
    return safe_exp(log_power / p)


# ==================== 정의역 직접 구적 ====================

def log_lp_power_direct(spec: FunctionSpec, p: float, tol: Optional[float] = None) -> float:
    """ln ∫|f|^p dμ 를 정의역 구간별 적응형 구적으로 계산"""
    _check_p(p)
    if tol is None:
        tol = get_settings().get("numerics", "tol", 1e-10)

    def integrand(x: float) -> float:
        log_abs = spec.log_abs(x)
        if log_abs == -math.inf:
            return 0.0
        return safe_exp(p * log_abs)

    total, error = 0.0, 0.0
    points = spec.quadrature_points(p)
    for lo, hi in spec.domain():
        inner = sorted(x for x in points if lo < x < hi)
        if math.isinf(hi) and inner:
            # 유한 앞부분 + QAGI 꼬리
            pieces = [(lo, inner[-1], inner[:-1]), (inner[-1], hi, None)]
        else:
            pieces = [(lo, hi, inner)]

        for a, b, pts in pieces:
            result = integrate(integrand, a, b, tol=tol, rtol=tol, points=pts)
            if not result.converged and \
                    result.abs_error_estimate > _ACCEPT_SLACK * max(tol, tol * abs(result.value)):
                raise ConvergenceError(
                    f"|f|^p 구적 미수렴 (p={p}, 구간 ({a}, {b}), "
                    f"오차 {result.abs_error_estimate:.3e})",
                    best_estimate=total + result.value)
            total += result.value
            error += result.abs_error_estimate

    logger.debug(f"direct ∫|f|^{p} = {total:.12g} (±{error:.2e})")
    return math.log(total) if total > 0 else -math.inf


def lp_norm_direct(spec: FunctionSpec, p: float, tol: Optional[float] = None) -> float:
    """
    ||f||_p 정의역 직접 구적

    Args:
        spec: 함수 스펙
        p: 지수 (> 0)
        tol: 허용 오차 (절대/상대 모두에 사용)

    Returns:
        float: (∫|f|^p)^{1/p}

    Raises:
        DomainError: p ≤ 0
        ConvergenceError: 구적 미수렴 (best_estimate 에 부분 합)
    """
    return safe_exp(log_lp_power_direct(spec, p, tol) / p)


# ==================== 꼬리 적분 ====================

def log_lp_power_from_tail(T: TailFunction, p: float, tol: Optional[float] = None) -> float:
    """
    ln ||f||_p^p = ln(p ∫_0^∞ t^{p-1} T(t) dt)

    s = ln t 로 바꿔 ln p + ln ∫ exp(p·s + ln T(e^s)) ds 를 계산한다.
    s ∈ [-W, W] 스캔 (작은 p 를 위해 왼쪽은 등비로 -10^5·W 까지 연장) 에서
    피크를 찾고, 스캔 양 끝이 피크보다 margin 이상 작지 않으면 발산.

    Raises:
        DivergenceError: 적분이 발산 (p 포함)
    """
    _check_p(p)
    settings = get_settings()
    if tol is None:
        tol = settings.get("numerics", "tol", 1e-10)
    window = settings.get("moments", "log_window", 700.0)
    margin = settings.get("moments", "decay_margin", 50.0)

    def phi(s: float) -> float:
        lv = T.log_value_at_log(s)
        if lv == -math.inf:
            return -math.inf
        return p * s + lv

    far_left = -np.geomspace(1e5 * window, window, 41)[:-1]
    grid = np.concatenate([far_left, np.linspace(-window, window, int(2 * window) + 1)])
    values = np.array([phi(float(s)) for s in grid])
    if np.isposinf(values).any():
        raise DivergenceError(f"꼬리 적분 발산: T 가 유한하지 않습니다 (p={p})", p=p)
    if np.isneginf(values).all():
        return -math.inf

    k = int(np.argmax(values))
    peak, s_peak = float(values[k]), float(grid[k])
    if values[0] > peak - margin or values[-1] > peak - margin:
        raise DivergenceError(f"∫ t^(p-1) T(t) dt 발산 (p={p})", p=p)

    # 격자 사이 피크 정밀화 (큰 p 에서는 피크 폭이 1/p 수준)
    lo_cell, hi_cell = float(grid[max(k - 1, 0)]), float(grid[min(k + 1, len(grid) - 1)])
    res = optimize.minimize_scalar(
        lambda s: -phi(s) if phi(s) > -math.inf else 1e300,
        bounds=(lo_cell, hi_cell), method="bounded", options={"xatol": 1e-12})
    if -res.fun > peak:
        peak, s_peak = float(-res.fun), float(res.x)

    breaks = {0.0, s_peak}
    breaks.update(math.log(t) for t in T.breakpoints() if 0 < t and abs(math.log(t)) < window)
    breaks = sorted(breaks)
    edges = [-math.inf] + breaks + [math.inf]

    def shifted(s: float) -> float:
        v = phi(s)
        return 0.0 if v == -math.inf else safe_exp(v - peak)

    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        result = integrate(shifted, lo, hi, tol=tol, rtol=tol)
        if not result.converged and \
                result.abs_error_estimate > _ACCEPT_SLACK * max(tol, tol * abs(result.value)):
            raise ConvergenceError(f"꼬리 적분 미수렴 (p={p}, 구간 ({lo}, {hi}))",
                                   best_estimate=math.log(p) + peak + math.log(max(total, 1e-300)))
        total += result.value

    if total <= 0:
        return -math.inf
    return math.log(p) + peak + math.log(total)


def lp_norm_from_tail(T: TailFunction, p: float, tol: Optional[float] = None) -> float:
    """
    꼬리 함수로부터 ||f||_p = (p ∫_0^∞ t^{p-1} T(t) dt)^{1/p}

    Examples:
        LogPowerTail(1) (= e^{-x} 의 꼬리), p = 2 → 1/√2
        StretchedExpTail(1, 1) (= |ln|x|| on (-1,0)), p = 3 → Γ(4)^{1/3} = 6^{1/3}

    Raises:
        DomainError: p ≤ 0
        DivergenceError: 발산
    """
    return safe_exp(log_lp_power_from_tail(T, p, tol) / p)


def log_lp_power(source: Source, p: float, tol: Optional[float] = None) -> float:
    """ln ||f||_p^p: 닫힌 형식 > 직접 구적 (스펙), 꼬리 적분 (꼬리)"""
    if isinstance(source, TailFunction):
        return log_lp_power_from_tail(source, p, tol)
    closed = log_lp_power_closed(source, p)
    if closed is not None:
        return closed
    return log_lp_power_direct(source, p, tol)


def lp_norm(source: Source, p: float, tol: Optional[float] = None) -> Tuple[float, str]:
    """
    가장 정확한 경로로 ||f||_p

    Returns:
        (노름, 방법) 방법은 'closed_form' | 'quadrature' | 'tail'
    """
    if isinstance(source, TailFunction):
        method = "tail"
    elif log_lp_power_closed(source, p) is not None:
        method = "closed_form"
    else:
        method = "quadrature"
    return safe_exp(log_lp_power(source, p, tol) / p), method


# ==================== 자연 생성 함수 ====================

def natural_psi(source: Source,
                support: Tuple[float, float],
                grid_size: Optional[int] = None,
                tol: Optional[float] = None,
                show_progress: bool = False) -> GeneratingFunction:
    """
    자연 생성 함수 ψ_f(p) = ||f||_p (호출자가 지지 (a, b) 지정)

    닫힌 형식 족은 NaturalStretchedExp, 나머지는 등비 격자 [a, min(b, cap)]
    위 TabulatedPsi 로 만든다.

    Args:
        source: FunctionSpec 또는 TailFunction
        support: (a, b), 0 < a < b ≤ ∞
        grid_size: 표 노드 수 (None이면 설정값)
        tol: 노름 계산 허용 오차
        show_progress: tqdm 진행 표시

    Returns:
        GeneratingFunction

    Raises:
        DomainError: 지지 구간 오류 또는 0 함수
        DivergenceError: 어떤 p 에서 노름 발산 (해당 p 포함)
    """
    settings = get_settings()
    a, b = float(support[0]), float(support[1])
    if not (a > 0 and b > a):
        raise DomainError(f"지지 구간은 0 < a < b 여야 합니다: ({a}, {b})")

    if isinstance(source, StretchedExp):
        return NaturalStretchedExp(source.c, source.theta, (a, b))
    if isinstance(source, TruncatedExp):
        return NaturalStretchedExp(1.0, 1.0, (a, b))

    if grid_size is None:
        grid_size = settings.get("moments", "grid_size", 64)
    p_cap = settings.get("moments", "p_grid_cap", 1000.0)
    upper = min(b, p_cap)
    if upper <= a:
        raise DomainError(f"표 작성 구간이 비어 있습니다: [{a}, {upper}]")

    nodes = geometric_grid(a, upper, grid_size)
    values = []
    for p in tqdm(nodes, desc="natural ψ", disable=not show_progress):
        try:
            log_power = log_lp_power(source, float(p), tol)
        except DivergenceError as e:
            raise DivergenceError(f"p={p:.6g} 에서 ||f||_p 발산", p=float(p)) from e
        if log_power == -math.inf:
            raise DomainError("0 함수의 자연 생성 함수는 정의되지 않습니다.")
        values.append(safe_exp(log_power / float(p)))

    logger.info(f"natural ψ tabulated on [{a:.4g}, {upper:.4g}] with {grid_size} nodes")
    return TabulatedPsi(tuple(float(p) for p in nodes), tuple(values), source)
