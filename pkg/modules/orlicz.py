"""
Orlicz Module
꼬리 함수로부터 Young-Orlicz 함수 N[T] 구성, 핵심 적분 조건 판정, Orlicz 모듈러 계산

N(u) = 1/T(u)        (u ≥ 1)
N(u) = u²/T(1)       (0 ≤ u < 1, 2차 연장)

적분은 모두 s = ln t 좌표의 Stieltjes 밀도 t·|T'(t)| 로 계산한다.
"""

import math
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from modules.errors import ConvergenceError, DomainError, OrliczConstructionError
from modules.function_model import FunctionSpec, TailFunction
from modules.numerics import integrate, safe_exp
from utils.settings import get_settings

logger = logging.getLogger(__name__)

# 피적분 함수 로그값 상한 (넘으면 모듈러가 발산하는 규모)
_LOG_INTEGRAND_CAP = 700.0


class Verdict(str, Enum):
    CONVERGENT = "Convergent"
    DIVERGENT = "Divergent"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class OrliczFunction:
    """꼬리 함수에서 만든 Young-Orlicz 함수 N[T]"""
    source_tail: TailFunction

    def log_value(self, u: float) -> float:
        """ln N(u) (N(0) = 0 → -inf)"""
        if u < 0 or math.isnan(u):
            raise DomainError(f"N 의 인자는 음수일 수 없습니다 (u={u})")
        if u == 0:
            return -math.inf
        if u < 1:
            return 2.0 * math.log(u) - self.source_tail.log_value(1.0)
        return -self.source_tail.log_value(u)

    def log_value_at_log(self, s: float) -> float:
        """ln N(e^s)"""
        if s < 0:
            return 2.0 * s - self.source_tail.log_value_at_log(0.0)
        return -self.source_tail.log_value_at_log(s)

    def value(self, u: float) -> float:
        """N(u) (T(u) = 0 이면 +inf)"""
        return safe_exp(self.log_value(u))

    def __call__(self, u: float) -> float:
        return self.value(u)


@dataclass
class ConditionVerdict:
    """절단 적분열 판정 결과 (partial_values: (ε, M, 값))"""
    verdict: Verdict
    k: float
    partial_values: List[Tuple[float, float, float]] = field(default_factory=list)
    tol: float = 1e-4

    @property
    def value(self) -> float:
        return self.partial_values[-1][2] if self.partial_values else math.nan

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "k": self.k,
            "tol": self.tol,
            "partial_values": [
                {"epsilon": eps, "M": M, "value": value}
                for eps, M, value in self.partial_values
            ],
        }


def young_orlicz_from_tail(T: TailFunction) -> OrliczFunction:
    """
    N[T](u) = 1/T(u) (u ≥ 1), u²/T(1) (u < 1)

    Raises:
        OrliczConstructionError: T(1) = 0 (sup|f| ≤ 1 이면 [1, ∞) 에서 정의 불가)
    """
    t1 = T.value(1.0)
    if not t1 > 0:
        raise OrliczConstructionError("T(1) = 0 이므로 [1, ∞) 에서 N = 1/T 를 만들 수 없습니다.")
    if math.isinf(t1):
        raise OrliczConstructionError("T(1) = ∞ 이므로 N(1) 이 0 이 됩니다.")

    # 감소성 점검 (표 꼬리의 평탄 구간은 N 의 순증가를 깨뜨린다)
    probe = np.geomspace(1.0, 1e3, 31)
    logs = [T.log_value(float(t)) for t in probe]
    positive = [v for v in logs if v > -math.inf]
    if any(b >= a for a, b in zip(positive[:-1], positive[1:])):
        logger.warning("tail is not strictly decreasing on [1, 1e3]; N is not strictly increasing")

    return OrliczFunction(T)


# ==================== 절단 적분열 ====================

def _truncation_pairs(count: int) -> List[Tuple[float, float]]:
    return [(10.0 ** (-2 * j), 10.0 ** j) for j in range(1, count + 1)]


def _truncated_sequence(log_integrand: Callable[[float], float],
                        breakpoints: List[float],
                        count: int) -> Tuple[List[Tuple[float, float, float]], bool]:
    """
    ∫_{ln ε_j}^{ln M_j} exp(g(s)) ds 의 부분값 목록

    Returns:
        (partial_values, overflowed)
    """
    pairs = _truncation_pairs(count)
    s_lo = [math.log(eps) for eps, _ in pairs]
    s_hi = [math.log(M) for _, M in pairs]
    edges = sorted(set(s_lo + s_hi + [b for b in breakpoints if s_lo[-1] < b < s_hi[-1]]))

    overflow = []

    def integrand(s: float) -> float:
        g = log_integrand(s)
        if g > _LOG_INTEGRAND_CAP:
            overflow.append(s)
            g = _LOG_INTEGRAND_CAP
        return 0.0 if g == -math.inf else math.exp(g)

    pieces = {}
    for lo, hi in zip(edges[:-1], edges[1:]):
        result = integrate(integrand, lo, hi, tol=1e-13, rtol=1e-10)
        pieces[(lo, hi)] = result.value

    partial = []
    for (eps, M), lo_j, hi_j in zip(pairs, s_lo, s_hi):
        total = sum(v for (lo, hi), v in pieces.items() if lo >= lo_j and hi <= hi_j)
        partial.append((eps, M, total))
    return partial, bool(overflow)


def _classify(partial: List[Tuple[float, float, float]], overflowed: bool, tol: float) -> Verdict:
    settings = get_settings()
    factor = settings.get("orlicz", "divergence_factor", 2.0)
    ratio_floor = settings.get("orlicz", "increment_ratio", 0.5)

    values = [v for _, _, v in partial]
    if overflowed or not all(math.isfinite(v) for v in values):
        return Verdict.DIVERGENT
    if abs(values[-1] - values[-2]) < tol * (1.0 + abs(values[-1])):
        return Verdict.CONVERGENT

    # 세 번의 연속 절단에 걸쳐 2배 이상 증가
    for j in range(len(values) - 2):
        if values[j] > 0 and values[j + 2] >= factor * values[j] \
                and values[j] <= values[j + 1] <= values[j + 2]:
            if all(values[i] <= values[i + 1] for i in range(j, len(values) - 1)):
                return Verdict.DIVERGENT

    # 증분이 기하적으로 줄지 않음 (로그-로그 증가)
    increments = np.diff(values)[-4:]
    if len(increments) == 4 and np.all(increments > 0):
        ratios = increments[1:] / increments[:-1]
        if np.all(ratios >= ratio_floor):
            return Verdict.DIVERGENT

    return Verdict.INDETERMINATE


def condition_check(T: TailFunction, k: float, tol: Optional[float] = None) -> ConditionVerdict:
    """
    핵심 조건 ∫_0^∞ |dT(t)| / T(t/k) < ∞ 판정

    절단 (ε_j, M_j) = (10^{-2j}, 10^j) 부분 적분열로 Convergent / Divergent / Indeterminate

    Args:
        T: 꼬리 함수
        k: 이동 상수 (> 1)
        tol: 수렴 판정 허용 오차 (None이면 설정값)

    Raises:
        DomainError: k ≤ 1
    """
    settings = get_settings()
    if tol is None:
        tol = settings.get("orlicz", "tol", 1e-4)
    count = settings.get("orlicz", "truncations", 8)
    if not (k > 1 and math.isfinite(k)):
        raise DomainError(f"k 는 1 보다 커야 합니다 (k={k})")
    log_k = math.log(k)

    def log_integrand(s: float) -> float:
        mass = T.log_mass_at_log(s)
        if mass == -math.inf:
            return -math.inf
        return mass - T.log_value_at_log(s - log_k)

    breaks = [math.log(t) for t in T.breakpoints() if t > 0]
    breaks += [b + log_k for b in breaks]
    partial, overflowed = _truncated_sequence(log_integrand, breaks, count)
    verdict = _classify(partial, overflowed, tol)

    logger.info(f"key condition k={k}: {verdict.value} (last partial {partial[-1][2]:.6g})")
    return ConditionVerdict(verdict, k, partial, tol)


def orlicz_modular(T_f: TailFunction,
                   N: OrliczFunction,
                   K: float,
                   tol: Optional[float] = None) -> float:
    """
    Orlicz 모듈러 ∫_0^∞ N(t/K)·|dT_f(t)|

    Args:
        T_f: f 의 꼬리
        N: Young-Orlicz 함수
        K: 척도 (> 0)
        tol: 절단 수렴 허용 오차

    Returns:
        float: 모듈러 (절단열이 발산하면 inf)

    Raises:
        DomainError: K ≤ 0
        ConvergenceError: 판정 불가 (best_estimate 에 마지막 부분값)
    """
    settings = get_settings()
    if tol is None:
        tol = settings.get("orlicz", "tol", 1e-4)
    count = settings.get("orlicz", "truncations", 8)
    if not (K > 0 and math.isfinite(K)):
        raise DomainError(f"K 는 유한한 양수여야 합니다 (K={K})")
    log_K = math.log(K)

    def log_integrand(s: float) -> float:
        mass = T_f.log_mass_at_log(s)
        if mass == -math.inf:
            return -math.inf
        return N.log_value_at_log(s - log_K) + mass

    breaks = [log_K] + [math.log(t) for t in T_f.breakpoints() if t > 0]
    breaks += [math.log(t) + log_K for t in N.source_tail.breakpoints() if t > 0]
    partial, overflowed = _truncated_sequence(log_integrand, breaks, count)
    verdict = _classify(partial, overflowed, tol)

    if verdict is Verdict.DIVERGENT:
        logger.info(f"Orlicz modular diverges at K={K}")
        return math.inf
    if verdict is Verdict.INDETERMINATE:
        raise ConvergenceError(f"Orlicz 모듈러 절단열 판정 불가 (K={K})",
                               best_estimate=partial[-1][2])
    return partial[-1][2]


def modular_direct(spec: FunctionSpec,
                   N: OrliczFunction,
                   K: float,
                   tol: float = 1e-12) -> float:
    """
    정의역 직접 구적 모듈러 ∫ N(|f(x)|/K) dx (orlicz_modular 교차 검증용)

    Raises:
        DomainError: K ≤ 0
        ConvergenceError: 구적 미수렴
    """
    if not (K > 0 and math.isfinite(K)):
        raise DomainError(f"K 는 유한한 양수여야 합니다 (K={K})")

    def integrand(x: float) -> float:
        value = spec.evaluate(x)
        if value <= 0:
            return 0.0
        return safe_exp(N.log_value(value / K))

    points = spec.level_crossings(K) + spec.level_crossings(K * 1e-3) + spec.quadrature_points(1.0)
    total = 0.0
    for lo, hi in spec.domain():
        inner = sorted(x for x in points if lo < x < hi)
        if math.isinf(hi) and inner:
            pieces = [(lo, inner[-1], inner[:-1]), (inner[-1], hi, None)]
        else:
            pieces = [(lo, hi, inner)]
        for a, b, pts in pieces:
            result = integrate(integrand, a, b, tol=tol, rtol=1e-10, points=pts)
            if not result.converged and result.abs_error_estimate > 1e-6 * max(1.0, abs(result.value)):
                raise ConvergenceError(f"직접 모듈러 구적 미수렴 ({a}, {b})",
                                       best_estimate=total + result.value)
            total += result.value
    return total


def find_finite_scale(T_f: TailFunction,
                      N: OrliczFunction,
                      k_hint: float,
                      tol: Optional[float] = None) -> float:
    """
    모듈러가 유한한 K > k_hint 탐색 (2·k_hint 부터 배증)

    Raises:
        OrliczConstructionError: N 의 원천 꼬리가 k_hint 에서 Convergent 가 아님
        ConvergenceError: 배증 예산 안에 유한한 모듈러가 없음 (판정과 모순)
    """
    max_doublings = get_settings().get("orlicz", "max_doublings", 20)

    check = condition_check(N.source_tail, k_hint, tol)
    if check.verdict is not Verdict.CONVERGENT:
        raise OrliczConstructionError(
            f"k={k_hint} 에서 핵심 조건이 {check.verdict.value} 이므로 척도 탐색 전제가 깨집니다.")

    K = 2.0 * k_hint
    for _ in range(max_doublings + 1):
        try:
            modular = orlicz_modular(T_f, N, K, tol)
        except ConvergenceError as e:
            logger.debug(f"modular indeterminate at K={K:.6g}: {e}")
            modular = math.inf
        if math.isfinite(modular):
            logger.info(f"finite Orlicz modular {modular:.6g} at K={K:.6g}")
            return K
        K *= 2.0

    raise ConvergenceError(
        f"Convergent 판정과 달리 K ≤ {K / 2:.6g} 에서 유한한 모듈러를 찾지 못했습니다.")
