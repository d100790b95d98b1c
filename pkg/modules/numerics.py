"""
Numerics Module
특수 함수, 적응형 구적 (유한/반무한 구간), 열린 구간 1차원 최대화

모든 함수는 입력만으로 결과가 정해지는 순수 함수 (스레드 안전)
"""

import math
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate as sci_integrate
from scipy import optimize, special

from modules.errors import ConvergenceError, DomainError, IntegrandError
from utils.settings import get_settings

logger = logging.getLogger(__name__)

# QAGS 한 구간당 21점 Gauss-Kronrod
_POINTS_PER_SUBINTERVAL = 21


@dataclass(frozen=True)
class IntegralResult:
    """적분 결과"""
    value: float
    abs_error_estimate: float
    converged: bool
    evaluations: int


@dataclass(frozen=True)
class MaxResult:
    """
    1차원 최대화 결과

    unbounded=True 이면 상한이 +∞ (max_value = inf, argmax = 구간 끝)
    """
    argmax: float
    max_value: float
    attained_interior: bool
    unbounded: bool = False


# exp 인자 상한 (float64 최댓값 근처)
_EXP_MAX = 709.78


def safe_exp(x: float) -> float:
    """오버플로 대신 inf 를 돌려주는 exp"""
    if x > _EXP_MAX:
        return math.inf
    return math.exp(x)


# ==================== 특수 함수 ====================

def gamma(x: float) -> float:
    """
    Euler Gamma 함수 Γ(x), x > 0

    Args:
        x: 양의 실수

    Returns:
        float: Γ(x) (표현 범위를 넘으면 inf)

    Raises:
        DomainError: x ≤ 0
    """
    if not x > 0:
        raise DomainError(f"gamma: x > 0 이어야 합니다 (x={x})")

    value = float(special.gamma(x))
    if math.isinf(value):
        logger.warning(f"gamma overflow at x={x}, returning +inf")
    return value


def log_gamma(x: float) -> float:
    """ln Γ(x), x > 0 (오버플로 없는 경로)"""
    if not x > 0:
        raise DomainError(f"log_gamma: x > 0 이어야 합니다 (x={x})")
    return float(special.gammaln(x))


# ==================== 구적 ====================

def integrate(f: Callable[[float], float],
              lower: float,
              upper: float,
              tol: Optional[float] = None,
              rtol: float = 0.0,
              points: Optional[Sequence[float]] = None) -> IntegralResult:
    """
    적응형 구적 ∫_lower^upper f(u) du

    유한 구간은 QAGS (끝점을 평가하지 않는 Gauss-Kronrod + 외삽)로
    |ln u|^p 같은 적분 가능한 끝점 특이점을 처리하고,
    무한 끝은 QAGI 변수 변환 u = l + (1-s)/s 으로 처리한다.

    Args:
        f: 피적분 함수
        lower: 하한 (-inf 허용)
        upper: 상한 (inf 허용)
        tol: 절대 허용 오차 (None이면 설정값)
        rtol: 상대 허용 오차
        points: 내부 분할점 (유한 구간에서만 사용)

    Returns:
        IntegralResult: 값, 오차 추정, 수렴 여부, 평가 횟수

    Raises:
        DomainError: lower > upper
        IntegrandError: 피적분 함수가 NaN 반환
    """
    settings = get_settings()
    if tol is None:
        tol = settings.get("numerics", "tol", 1e-10)
    budget = settings.get("numerics", "max_evaluations", 1_000_000)

    if math.isnan(lower) or math.isnan(upper):
        raise DomainError("적분 구간에 NaN이 있습니다.")
    if lower > upper:
        raise DomainError(f"적분 하한이 상한보다 큽니다: ({lower}, {upper})")
    if lower == upper:
        return IntegralResult(0.0, 0.0, True, 1)

    def guarded(u: float) -> float:
        y = f(u)
        if math.isnan(y):
            raise IntegrandError(f"피적분 함수가 NaN을 반환했습니다 (u={u})")
        return y

    finite = math.isfinite(lower) and math.isfinite(upper)
    inner = None
    if points is not None and finite:
        inner = sorted(p for p in points if lower < p < upper) or None

    limit = max(50, budget // _POINTS_PER_SUBINTERVAL)
    out = sci_integrate.quad(guarded, lower, upper, epsabs=tol, epsrel=rtol,
                             limit=limit, points=inner, full_output=1)
    value, abserr, info = out[0], out[1], out[2]

    if math.isnan(value):
        raise IntegrandError(f"적분 결과가 NaN 입니다 ({lower}, {upper})")

    requested = max(tol, rtol * abs(value))
    converged = len(out) == 3 and abserr <= requested
    if not converged:
        message = out[3] if len(out) > 3 else "tolerance not reached"
        logger.warning(f"integrate({lower}, {upper}) not converged: "
                       f"abserr={abserr:.3e}, {str(message).strip()[:80]}")

    return IntegralResult(float(value), float(abserr), bool(converged),
                          int(info.get("neval", 0)) or 1)


# ==================== 최대화 ====================

def geometric_grid(a: float, b: float, n: int) -> np.ndarray:
    """
    [a, b] 등비 격자 (양 끝 포함)

    Args:
        a: 시작점 (> 0)
        b: 끝점 (> a)
        n: 점 수 (≥ 2)
    """
    if n < 2:
        raise DomainError(f"격자 점 수는 2 이상이어야 합니다 (n={n})")
    if not (0 < a < b) or not math.isfinite(b):
        raise DomainError(f"등비 격자는 0 < a < b < ∞ 가 필요합니다: ({a}, {b})")
    return np.geomspace(a, b, n)


def _evaluate(h: Callable[[float], float], xs: np.ndarray) -> np.ndarray:
    """격자 위 목적 함수 평가 (NaN 금지, -inf 는 제외점)"""
    values = np.empty(len(xs))
    for idx, x in enumerate(xs):
        y = float(h(float(x)))
        if math.isnan(y):
            raise IntegrandError(f"목적 함수가 NaN을 반환했습니다 (x={x})")
        values[idx] = y
    return values


def _scan_grid(lo: float, hi: float, n: int) -> np.ndarray:
    if lo > 0 and hi / lo >= 100:
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def maximize_1d(h: Callable[[float], float],
                interval: Tuple[float, float],
                tol: float = 1e-8,
                scan_points: Optional[int] = None) -> MaxResult:
    """
    열린 구간 (a, b) 위 sup h 계산 (b = inf 허용)

    격자 스캔 → 최적 셀 주변 bounded Brent(황금분할 + 포물선) 정밀화.
    무한 구간에서 끝까지 증가하면 상한 cap 까지 등비 확장하고,
    cap 에서도 증가가 줄지 않으면 +∞ 로 보고한다.

    Args:
        h: 목적 함수 (-inf 는 제외점으로 취급)
        interval: (a, b), a 유한
        tol: argmax 허용 오차
        scan_points: 초기 격자 점 수 (None이면 설정값)

    Returns:
        MaxResult: argmax, 최댓값, 내부 도달 여부, +∞ 여부

    Raises:
        DomainError: 빈 구간 또는 a 가 유한하지 않음
        IntegrandError: h 가 NaN 반환
    """
    settings = get_settings()
    n = scan_points or settings.get("numerics", "scan_points", 512)
    offset = settings.get("numerics", "boundary_offset", 1e-9)
    floor = settings.get("numerics", "lower_floor", 1e-9)
    cap = settings.get("numerics", "expansion_cap", 1e6)
    factor = settings.get("numerics", "expansion_factor", 10.0)
    initial_upper = settings.get("numerics", "initial_upper", 1e3)

    a, b = float(interval[0]), float(interval[1])
    if not math.isfinite(a) or math.isnan(b) or not b > a:
        raise DomainError(f"빈 구간이거나 하한이 유한하지 않습니다: ({a}, {b})")

    bounded = math.isfinite(b)
    if bounded:
        eps = offset * (b - a)
        lo, hi = a + eps, b - eps
    else:
        lo = a + offset * max(1.0, abs(a)) if a != 0 else floor
        hi = max(initial_upper, 10.0 * max(1.0, abs(lo)))
        cap = max(cap, hi)

    xs = _scan_grid(lo, hi, n)
    ys = _evaluate(h, xs)

    if np.isposinf(ys).any():
        j = int(np.argmax(np.isposinf(ys)))
        return MaxResult(float(xs[j]), math.inf, True, unbounded=True)
    if np.isneginf(ys).all():
        raise ConvergenceError(f"목적 함수가 구간 ({a}, {b}) 전체에서 -inf 입니다.")

    i = int(np.argmax(ys))

    # 무한 끝으로 증가 → 등비 확장
    if not bounded and i == len(xs) - 1:
        current = hi
        while current < cap and i == len(xs) - 1:
            new_hi = min(current * factor, cap)
            seg = np.geomspace(current, new_hi, 65)[1:]
            xs = np.concatenate([xs, seg])
            ys = np.concatenate([ys, _evaluate(h, seg)])
            current = new_hi
            i = int(np.argmax(ys))
            if np.isposinf(ys[-1]):
                return MaxResult(math.inf, math.inf, False, unbounded=True)

        if i == len(xs) - 1:
            return _supremum_at_infinity(h, cap, factor, tol)

    # 최적 셀 정밀화
    j0, j1 = max(i - 1, 0), min(i + 1, len(xs) - 1)
    x_best, f_best = float(xs[i]), float(ys[i])
    if j1 > j0:
        def negated(x: float) -> float:
            y = h(x)
            if math.isnan(y):
                raise IntegrandError(f"목적 함수가 NaN을 반환했습니다 (x={x})")
            return -y if math.isfinite(y) else 1e300

        res = optimize.minimize_scalar(negated, bounds=(float(xs[j0]), float(xs[j1])),
                                       method="bounded", options={"xatol": tol})
        if -res.fun > f_best:
            x_best, f_best = float(res.x), float(-res.fun)

    # 정밀화가 격자 끝점을 넘지 못하면 sup 은 열린 끝점에서 접근
    edge = 2.0 * tol + 1e-12 * abs(x_best)
    if x_best <= lo + edge:
        return MaxResult(a, f_best, False)
    if bounded and x_best >= hi - edge:
        return MaxResult(b, f_best, False)

    return MaxResult(x_best, f_best, True)


def _supremum_at_infinity(h: Callable[[float], float], cap: float,
                          factor: float, tol: float) -> MaxResult:
    """cap 에서도 증가 중일 때: 증분이 줄지 않으면 +∞, 줄면 Aitken 외삽"""
    f2 = float(h(cap / factor ** 2))
    f1 = float(h(cap / factor))
    f0 = float(h(cap))
    d_prev, d_last = f1 - f2, f0 - f1

    if d_last > tol * (1.0 + abs(f0)) and d_last >= 0.5 * d_prev:
        logger.debug(f"objective still growing at cap={cap:.3g} (increment {d_last:.3g}), +inf")
        return MaxResult(math.inf, math.inf, False, unbounded=True)

    extrapolated = f0
    if d_prev > 0 and 0 <= d_last < d_prev:
        r = d_last / d_prev
        extrapolated = f0 + d_last * r / (1.0 - r)
    return MaxResult(math.inf, extrapolated, False)


def maximize_tabulated(xs: Sequence[float], ys: Sequence[float]) -> MaxResult:
    """
    격자 노드 위 이산 최대 + 3점 포물선 정밀화

    노드 사이 구조를 만들어내지 않도록, 정밀화 값은 세 점의 값 범위만큼만
    최댓값을 넘을 수 있다.

    Args:
        xs: 증가하는 노드
        ys: 노드 값 (-inf 는 제외점)

    Returns:
        MaxResult: 끝 노드에서 최대이면 attained_interior=False
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) == 0 or len(xs) != len(ys):
        raise DomainError("노드와 값의 길이가 맞지 않거나 비어 있습니다.")
    if np.isnan(ys).any():
        raise IntegrandError("노드 값에 NaN이 있습니다.")
    if np.isposinf(ys).any():
        j = int(np.argmax(np.isposinf(ys)))
        return MaxResult(float(xs[j]), math.inf, True, unbounded=True)
    if np.isneginf(ys).all():
        raise ConvergenceError("모든 노드 값이 -inf 입니다.")

    i = int(np.argmax(ys))
    if i == 0 or i == len(xs) - 1:
        return MaxResult(float(xs[i]), float(ys[i]), False)

    x3, y3 = xs[i - 1:i + 2], ys[i - 1:i + 2]
    if not np.isfinite(y3).all():
        return MaxResult(float(xs[i]), float(ys[i]), True)

    # x_i 기준 이동 좌표에서 2차 맞춤
    a2, a1, a0 = np.polyfit(x3 - xs[i], y3, 2)
    if a2 < 0:
        shift = -a1 / (2.0 * a2)
        if x3[0] - xs[i] < shift < x3[2] - xs[i]:
            vertex = a0 - a1 * a1 / (4.0 * a2)
            ceiling = float(ys[i]) + float(y3.max() - y3.min())
            return MaxResult(float(xs[i] + shift), float(min(max(vertex, ys[i]), ceiling)), True)

    return MaxResult(float(xs[i]), float(ys[i]), True)
