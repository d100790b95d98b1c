"""
Bounds Module
Young-Fenchel 꼬리 상한 T(t) ≤ exp(-ν*(ln(t/γ))) 과 실제 꼬리 대비 검증

- tail_upper_bound: 상한 값 (t > e·γ 밖이어도 계산하고 플래그로 표시)
- verify_domination: t 격자 위 상한 vs 실제 꼬리 보고서
- sharpness_ratio: StretchedExp(1,θ) 자연 ψ 상한과 실제 꼬리의 비 (상수 배)
- subgaussian_bound / markov_bound / growth_exponent
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from modules.errors import DomainError
from modules.fenchel import ConjugateResult, fenchel_conjugate
from modules.function_model import (
    FunctionSpec, GeneratingFunction, LogPowerTail, NaturalStretchedExp, StretchedExp,
    TabulatedPsi, TailFunction, TruncatedExp, tail_of,
)
from modules.numerics import log_gamma, safe_exp
from utils.settings import get_settings

logger = logging.getLogger(__name__)

Source = Union[FunctionSpec, TailFunction]


@dataclass(frozen=True)
class TailBound:
    """
    단일 t 의 꼬리 상한

    log_value = -ν*(ln(t/γ)) 는 value 가 언더플로해도 유한하다.
    """
    value: float
    in_theorem_region: bool
    log_value: float
    conjugate: Optional[ConjugateResult] = None


@dataclass
class BoundReport:
    """상한 vs 실제 꼬리 비교 보고서"""
    t_grid: List[float]
    bound: List[float]
    actual: List[float]
    in_region: List[bool]
    dominated: bool
    ratio_range: Tuple[float, float]
    validity_region_start: float
    gamma: float
    gamma_source: str = "given"
    excluded_points: int = 0
    violations: List[float] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        """CSV 용 (t, bound, actual, in_region) 표"""
        return pd.DataFrame({
            "t": self.t_grid,
            "bound": self.bound,
            "actual": self.actual,
            "in_region": self.in_region,
        })

    def summary(self) -> Dict[str, Any]:
        """JSON 요약 (키 순서 고정)"""
        return {
            "dominated": self.dominated,
            "ratio_range": list(self.ratio_range),
            "validity_region_start": self.validity_region_start,
            "gamma": self.gamma,
            "gamma_source": self.gamma_source,
            "points": len(self.t_grid),
            "theorem_points": int(sum(self.in_region)),
            "excluded_points": self.excluded_points,
            "violations": list(self.violations),
        }


def tail_upper_bound(psi: GeneratingFunction,
                     gamma_: float,
                     t: float,
                     tol: Optional[float] = None,
                     prefer_closed_form: bool = True) -> TailBound:
    """
    꼬리 상한 exp(-ν*(ln(t/γ)))

    Args:
        psi: 생성 함수
        gamma_: γ = ||f||Gψ ∈ (0, ∞)
        t: 꼬리 인자 (> 0)
        tol: 켤레 계산 허용 오차
        prefer_closed_form: 켤레 닫힌 형식 사용 여부

    Returns:
        TailBound: ν* = +∞ 이면 value = 0, in_theorem_region = (t > e·γ)

    Raises:
        DomainError: γ ≤ 0 또는 t ≤ 0
    """
    if not (gamma_ > 0 and math.isfinite(gamma_)):
        raise DomainError(f"γ 는 유한한 양수여야 합니다 (γ={gamma_})")
    if not (t > 0 and math.isfinite(t)):
        raise DomainError(f"t 는 유한한 양수여야 합니다 (t={t})")

    conj = fenchel_conjugate(psi, math.log(t / gamma_), tol, prefer_closed_form)
    log_value = -conj.value
    return TailBound(safe_exp(log_value), t > math.e * gamma_, log_value, conj)


def markov_bound(psi: GeneratingFunction, p: float, t: float) -> float:
    """
    단일 p Markov-Tchebychev 상한 ψ(p)^p / t^p = exp(ν(p) - p·ln t)

    Raises:
        DomainError: p 가 지지 밖 또는 t ≤ 0
    """
    if not t > 0:
        raise DomainError(f"t 는 양수여야 합니다 (t={t})")
    if not psi.in_support(p):
        raise DomainError(f"p={p} 가 ψ 의 지지 {psi.support} 밖입니다.")
    return safe_exp(psi.nu(p) - p * math.log(t))


def is_natural_for(psi: GeneratingFunction, source: Source) -> bool:
    """ψ 가 source 의 자연 생성 함수인지 (γ = 1 기본값 판단용)"""
    natural = psi.natural_source
    if natural is None:
        return False
    if natural == source:
        return True
    # e^{-y} 는 StretchedExp(1, 1) 과 같은 함수
    return isinstance(source, TruncatedExp) and natural == StretchedExp(1.0, 1.0)


def verify_domination(source: Source,
                      psi: GeneratingFunction,
                      gamma_: Optional[float] = None,
                      t_grid: Sequence[float] = (),
                      tol: Optional[float] = None) -> BoundReport:
    """
    t 격자 위에서 상한 exp(-ν*(ln(t/γ))) 과 실제 꼬리 비교

    Args:
        source: 함수 스펙 (tail_of 로 실제 꼬리) 또는 꼬리 함수
        psi: 생성 함수
        gamma_: γ (None이면 자연 ψ → 1, 아니면 gls_norm)
        t_grid: 양수 t 목록
        tol: 켤레 허용 오차

    Returns:
        BoundReport: t > e·γ 인 모든 점에서 bound ≥ actual·(1 - rtol) 이면 dominated
    """
    rtol = get_settings().get("bounds", "domination_rtol", 1e-9)
    tail = source if isinstance(source, TailFunction) else tail_of(source)

    if gamma_ is None:
        if is_natural_for(psi, source):
            gamma_, gamma_source = 1.0, "natural"
        else:
            from modules.gls import gls_norm
            result = gls_norm(source, psi)
            if result.unbounded:
                raise DomainError("f 가 Gψ 에 속하지 않아 γ 를 정할 수 없습니다 (||f||Gψ = ∞).")
            gamma_, gamma_source = result.norm, "gls_norm"
    else:
        gamma_source = "given"

    t_values = [float(t) for t in t_grid]
    if not t_values:
        raise DomainError("t 격자가 비어 있습니다.")

    bounds, actuals, flags, violations = [], [], [], []
    for t in t_values:
        bound = tail_upper_bound(psi, gamma_, t, tol)
        actual = tail.value(t)
        bounds.append(bound.value)
        actuals.append(actual)
        flags.append(bound.in_theorem_region)
        if bound.in_theorem_region and bound.value < actual * (1.0 - rtol):
            violations.append(t)
            logger.warning(f"domination violated at t={t:.6g}: bound={bound.value:.6g} < actual={actual:.6g}")

    ratios = [b / a for b, a in zip(bounds, actuals)
              if a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)]
    ratio_range = (min(ratios), max(ratios)) if ratios else (math.nan, math.nan)

    report = BoundReport(
        t_grid=t_values,
        bound=bounds,
        actual=actuals,
        in_region=flags,
        dominated=not violations,
        ratio_range=ratio_range,
        validity_region_start=math.e * gamma_,
        gamma=gamma_,
        gamma_source=gamma_source,
        excluded_points=len(t_values) - len(ratios),
        violations=violations,
    )
    logger.info(f"domination check: dominated={report.dominated}, γ={gamma_:.6g} ({gamma_source}), "
                f"{report.excluded_points} points excluded from ratio")
    return report


def sharpness_constant(theta: float) -> float:
    """C(θ) = e^{1/θ}·θ^{1/θ - 1}·Γ(1/θ)"""
    if not theta > 0:
        raise DomainError(f"θ 는 양수여야 합니다 (θ={theta})")
    return math.exp(1.0 / theta + (1.0 / theta - 1.0) * math.log(theta) + log_gamma(1.0 / theta))


def sharpness_ratio(theta: float,
                    t_grid: Sequence[float],
                    prefer_closed_form: bool = True) -> Tuple[float, float]:
    """
    자연 ψ 상한 / 실제 꼬리 (ln(1/t))^{1/θ} 의 비 범위, t ∈ (0, 1)

    상한은 t < 1 (정리 영역 밖) 에서 계산된 값이다.

    Returns:
        (min_ratio, max_ratio)
    """
    if not theta > 0:
        raise DomainError(f"θ 는 양수여야 합니다 (θ={theta})")
    t_values = [float(t) for t in t_grid]
    if not t_values or any(not 0 < t < 1 for t in t_values):
        raise DomainError("sharpness_ratio 의 t 격자는 (0, 1) 안이어야 합니다.")

    psi = NaturalStretchedExp(1.0, theta)
    actual_tail = LogPowerTail(theta)
    ratios = []
    for t in t_values:
        bound = tail_upper_bound(psi, 1.0, t, prefer_closed_form=prefer_closed_form)
        # 두 값 모두 로그로 비교
        ratios.append(math.exp(bound.log_value - actual_tail.log_value(t)))
    return min(ratios), max(ratios)


def subgaussian_constant(m: float, C1: float) -> float:
    """exp(-c·t^m) 형태의 허용 상수 c(m) = 1/(m·e·C₁^m)"""
    if not (m > 0 and C1 > 0):
        raise DomainError(f"m, C₁ 는 양수여야 합니다 (m={m}, C1={C1})")
    return 1.0 / (m * math.e * C1 ** m)


def subgaussian_bound(m: float, C1: float, t: float) -> float:
    """
    ||f||_p ≤ C₁·p^{1/m} 일 때 꼬리 상한 exp(-(t/C₁)^m / (m·e))

    Examples:
        m=2, C₁=1, t=√(2e) → e^{-1}
    """
    if not (m > 0 and C1 > 0):
        raise DomainError(f"m, C₁ 는 양수여야 합니다 (m={m}, C1={C1})")
    if not t > 0:
        raise DomainError(f"t 는 양수여야 합니다 (t={t})")
    return math.exp(-(t / C1) ** m / (m * math.e))


def growth_exponent(psi: GeneratingFunction,
                    p_grid: Optional[Sequence[float]] = None,
                    top: int = 8) -> float:
    """
    큰 p 에서 ln ψ 대 ln p 기울기 (ψ(p) ~ p^{1/m} 이면 1/m)

    Args:
        psi: 생성 함수 (표 ψ 는 노드 사용)
        p_grid: 평가 격자 (표 ψ 가 아니면 필수)
        top: 기울기 맞춤에 쓰는 상위 점 수
    """
    if p_grid is None:
        if not isinstance(psi, TabulatedPsi):
            raise DomainError("표가 아닌 ψ 는 p_grid 가 필요합니다.")
        p_values, psi_values = psi.nodes()
    else:
        p_values = np.asarray(sorted(p_grid), dtype=float)
        psi_values = np.array([psi.value(float(p)) for p in p_values])

    if len(p_values) < 2:
        raise DomainError("기울기 계산에는 2개 이상의 점이 필요합니다.")
    p_top, psi_top = p_values[-top:], psi_values[-top:]
    slope, _ = np.polyfit(np.log(p_top), np.log(psi_top), 1)
    return float(slope)
