"""
Function Model Module
실수 구간 위 가측 함수 (Lebesgue 측도), 꼬리 함수, 생성 함수 ψ 데이터 모델

- FunctionSpec: 닫힌 형식 함수족 또는 서로소 합
- TailFunction: T(t) = μ{|f| > t}, 로그 공간 표현 ln T, ln(t·|T'(t)|) 제공
- GeneratingFunction: 열린 지지 (a, b) 위의 ψ(p), 지지 밖은 +∞

모든 객체는 생성 후 불변 (frozen dataclass)
"""

import math
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize, special

from modules.errors import DomainError, SpecParseError, UnsupportedSpecError
from modules.numerics import log_gamma, safe_exp

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} 는 유한한 양수여야 합니다 ({name}={value})")
    return value


def _logsumexp(values: Sequence[float]) -> float:
    """+inf 를 보존하는 logsumexp"""
    values = list(values)
    if any(v == math.inf for v in values):
        return math.inf
    finite = [v for v in values if v != -math.inf]
    if not finite:
        return -math.inf
    return float(special.logsumexp(finite))


def _float_or_inf(value: Any) -> float:
    """JSON 의 'inf' / null 표기를 float 으로"""
    if value is None:
        return math.inf
    if isinstance(value, str):
        return float(value.strip().lower().replace("infinity", "inf"))
    return float(value)


def _dump_float(value: float) -> Union[float, str]:
    return "inf" if value == math.inf else float(value)


# ==================== FunctionSpec ====================

class FunctionSpec(ABC):
    """실수 구간 위 가측 함수 (모든 함수족은 f ≥ 0)"""

    family: ClassVar[str] = ""

    @abstractmethod
    def domain(self) -> List[Interval]:
        """정의역 (서로소 열린 구간 목록)"""

    @abstractmethod
    def evaluate(self, x: float) -> float:
        """|f(x)| (정의역 밖은 0)"""

    def log_abs(self, x: float) -> float:
        """ln|f(x)| (f = 0 이면 -inf)"""
        value = self.evaluate(x)
        return math.log(value) if value > 0 else -math.inf

    def quadrature_points(self, p: float) -> List[float]:
        """|f|^p 구적용 내부 분할점"""
        return []

    def level_crossings(self, level: float) -> List[float]:
        """|f(x)| = level 인 점들 (구적 분할용)"""
        return []

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """JSON 직렬화"""


@dataclass(frozen=True)
class StretchedExp(FunctionSpec):
    """f(x) = exp(-c·x^θ), x ∈ (0, ∞)"""
    c: float
    theta: float
    family: ClassVar[str] = "stretched_exp"

    def __post_init__(self):
        object.__setattr__(self, "c", _check_positive("c", self.c))
        object.__setattr__(self, "theta", _check_positive("theta", self.theta))

    def domain(self) -> List[Interval]:
        return [(0.0, math.inf)]

    def evaluate(self, x: float) -> float:
        if not 0 < x < math.inf:
            return 0.0
        return math.exp(self.log_abs(x))

    def log_abs(self, x: float) -> float:
        if not 0 < x < math.inf:
            return -math.inf
        return -self.c * x ** self.theta

    def quadrature_points(self, p: float) -> List[float]:
        # c·p·x^θ = 1 인 특성 길이
        return [(self.c * p) ** (-1.0 / self.theta)]

    def level_crossings(self, level: float) -> List[float]:
        if not 0 < level < 1:
            return []
        return [(math.log(1.0 / level) / self.c) ** (1.0 / self.theta)]

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "c": self.c, "theta": self.theta}


@dataclass(frozen=True)
class LogSingular(FunctionSpec):
    """f(x) = |ln|x||, x ∈ (-1, 0)"""
    family: ClassVar[str] = "log_singular"

    def domain(self) -> List[Interval]:
        return [(-1.0, 0.0)]

    def evaluate(self, x: float) -> float:
        if not -1 < x < 0:
            return 0.0
        return abs(math.log(-x))

    def quadrature_points(self, p: float) -> List[float]:
        # |ln|x||^p 질량은 |x| ~ e^{-p} 부근에 몰림
        depths = sorted({1.0, 0.5 * p, p, 2.0 * p, 4.0 * p})
        return [-math.exp(-d) for d in depths if d < 700]

    def level_crossings(self, level: float) -> List[float]:
        if level <= 0 or level > 700:
            return []
        return [-math.exp(-level)]

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family}


@dataclass(frozen=True)
class TruncatedExp(FunctionSpec):
    """f(y) = e^{-y}, y ∈ (0, ∞)"""
    family: ClassVar[str] = "truncated_exp"

    def domain(self) -> List[Interval]:
        return [(0.0, math.inf)]

    def evaluate(self, x: float) -> float:
        if not 0 < x < math.inf:
            return 0.0
        return math.exp(-x)

    def log_abs(self, x: float) -> float:
        if not 0 < x < math.inf:
            return -math.inf
        return -x

    def quadrature_points(self, p: float) -> List[float]:
        return [1.0 / p]

    def level_crossings(self, level: float) -> List[float]:
        if not 0 < level < 1:
            return []
        return [math.log(1.0 / level)]

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family}


@dataclass(frozen=True)
class Indicator01Scaled(FunctionSpec):
    """f(x) = h₀(x)·1[x ∈ (0,1)]"""
    inner: FunctionSpec
    family: ClassVar[str] = "indicator01_scaled"

    def __post_init__(self):
        if not self.domain():
            raise DomainError(
                f"내부 함수 '{self.inner.family}' 의 정의역이 (0,1) 과 겹치지 않습니다.")

    def domain(self) -> List[Interval]:
        clipped = []
        for a, b in self.inner.domain():
            lo, hi = max(a, 0.0), min(b, 1.0)
            if lo < hi:
                clipped.append((lo, hi))
        return clipped

    def evaluate(self, x: float) -> float:
        if not 0 < x < 1:
            return 0.0
        return self.inner.evaluate(x)

    def log_abs(self, x: float) -> float:
        if not 0 < x < 1:
            return -math.inf
        return self.inner.log_abs(x)

    def quadrature_points(self, p: float) -> List[float]:
        return [x for x in self.inner.quadrature_points(p) if 0 < x < 1]

    def level_crossings(self, level: float) -> List[float]:
        return [x for x in self.inner.level_crossings(level) if 0 < x < 1]

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class DisjointUnion(FunctionSpec):
    """정의역이 서로소인 함수들의 합 (생성 시 서로소 검사)"""
    parts: Tuple[FunctionSpec, ...]
    family: ClassVar[str] = "disjoint_union"

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise DomainError("DisjointUnion 에는 최소 1개의 부분이 필요합니다.")

        intervals = [(iv, idx) for idx, part in enumerate(self.parts) for iv in part.domain()]
        for i, ((a1, b1), k1) in enumerate(intervals):
            for (a2, b2), k2 in intervals[i + 1:]:
                if k1 != k2 and max(a1, a2) < min(b1, b2):
                    raise DomainError(
                        f"부분 {k1} ({a1}, {b1}) 과 부분 {k2} ({a2}, {b2}) 의 정의역이 겹칩니다.")

    def domain(self) -> List[Interval]:
        return [iv for part in self.parts for iv in part.domain()]

    def _part_at(self, x: float) -> Optional[FunctionSpec]:
        for part in self.parts:
            if any(a < x < b for a, b in part.domain()):
                return part
        return None

    def evaluate(self, x: float) -> float:
        part = self._part_at(x)
        return part.evaluate(x) if part is not None else 0.0

    def log_abs(self, x: float) -> float:
        part = self._part_at(x)
        return part.log_abs(x) if part is not None else -math.inf

    def quadrature_points(self, p: float) -> List[float]:
        return [x for part in self.parts for x in part.quadrature_points(p)]

    def level_crossings(self, level: float) -> List[float]:
        return [x for part in self.parts for x in part.level_crossings(level)]

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "parts": [part.to_dict() for part in self.parts]}


@dataclass(frozen=True)
class Scaled(FunctionSpec):
    """f = λ·inner, λ > 0"""
    inner: FunctionSpec
    lam: float
    family: ClassVar[str] = "scaled"

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_positive("lam", self.lam))

    def domain(self) -> List[Interval]:
        return self.inner.domain()

    def evaluate(self, x: float) -> float:
        return self.lam * self.inner.evaluate(x)

    def log_abs(self, x: float) -> float:
        return math.log(self.lam) + self.inner.log_abs(x)

    def quadrature_points(self, p: float) -> List[float]:
        return self.inner.quadrature_points(p)

    def level_crossings(self, level: float) -> List[float]:
        return self.inner.level_crossings(level / self.lam)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "inner": self.inner.to_dict(), "lam": self.lam}


# ==================== TailFunction ====================

class TailFunction(ABC):
    """
    꼬리 함수 T(t) = μ{|f| > t}

    하위 클래스는 s = ln t 좌표의 두 로그 함수를 구현한다.
      log_value_at_log(s) = ln T(e^s)          (T = 0 이면 -inf)
      log_mass_at_log(s)  = ln(t·|T'(t)|)       (Stieltjes 밀도, ds 기준)
    """

    family: ClassVar[str] = ""

    @abstractmethod
    def log_value_at_log(self, s: float) -> float:
        """ln T(e^s)"""

    @abstractmethod
    def log_mass_at_log(self, s: float) -> float:
        """ln(t·|T'(t)|), t = e^s"""

    def breakpoints(self) -> List[float]:
        """성질이 바뀌는 t 값들 (구적 분할용)"""
        return []

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """JSON 직렬화"""

    def value(self, t: float) -> float:
        """T(t), t ≥ 0 (t = 0 은 극한값)"""
        if t < 0 or math.isnan(t):
            raise DomainError(f"꼬리 함수 인자는 음수일 수 없습니다 (t={t})")
        s = math.log(t) if t > 0 else -math.inf
        return safe_exp(self.log_value_at_log(s))

    def log_value(self, t: float) -> float:
        """ln T(t), t > 0"""
        if not t > 0:
            raise DomainError(f"t > 0 이어야 합니다 (t={t})")
        return self.log_value_at_log(math.log(t))

    def exponent(self, t: float) -> float:
        """지수 표현 T(t) = exp(-w(t)) 의 w(t) (T = 0 이면 +inf)"""
        return -self.log_value(t)


@dataclass(frozen=True)
class StretchedExpTail(TailFunction):
    """T(t) = exp(-C·t^m), t > 0"""
    C: float
    m: float
    family: ClassVar[str] = "stretched_exp_tail"

    def __post_init__(self):
        object.__setattr__(self, "C", _check_positive("C", self.C))
        object.__setattr__(self, "m", _check_positive("m", self.m))

    def log_value_at_log(self, s: float) -> float:
        return -self.C * safe_exp(self.m * s)

    def log_mass_at_log(self, s: float) -> float:
        # t|T'| = C m t^m exp(-C t^m)
        tm = safe_exp(self.m * s)
        if tm == math.inf:
            return -math.inf
        return math.log(self.C * self.m) + self.m * s - self.C * tm

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "C": self.C, "m": self.m}


@dataclass(frozen=True)
class LogPowerTail(TailFunction):
    """T(t) = scale·(ln(1/t))^{1/θ}, t ∈ (0,1); 0, t ≥ 1"""
    theta: float
    scale: float = 1.0
    family: ClassVar[str] = "log_power_tail"

    def __post_init__(self):
        object.__setattr__(self, "theta", _check_positive("theta", self.theta))
        object.__setattr__(self, "scale", _check_positive("scale", self.scale))

    def log_value_at_log(self, s: float) -> float:
        if s >= 0:
            return -math.inf
        return math.log(self.scale) + math.log(-s) / self.theta

    def log_mass_at_log(self, s: float) -> float:
        # t|T'| = (scale/θ)·L^{1/θ - 1}, L = -s
        if s >= 0:
            return -math.inf
        return math.log(self.scale / self.theta) + (1.0 / self.theta - 1.0) * math.log(-s)

    def breakpoints(self) -> List[float]:
        return [1.0]

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "theta": self.theta, "scale": self.scale}


@dataclass(frozen=True)
class PiecewiseSum(TailFunction):
    """서로소 함수들의 꼬리 합 Σ T_i"""
    parts: Tuple[TailFunction, ...]
    family: ClassVar[str] = "piecewise_sum"

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise DomainError("PiecewiseSum 에는 최소 1개의 부분이 필요합니다.")

    def value(self, t: float) -> float:
        # 합을 그대로 더해 부분 꼬리 합과 정확히 일치시킨다
        return float(sum(part.value(t) for part in self.parts))

    def log_value_at_log(self, s: float) -> float:
        return _logsumexp(part.log_value_at_log(s) for part in self.parts)

    def log_mass_at_log(self, s: float) -> float:
        return _logsumexp(part.log_mass_at_log(s) for part in self.parts)

    def breakpoints(self) -> List[float]:
        return sorted({t for part in self.parts for t in part.breakpoints()})

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "parts": [part.to_dict() for part in self.parts]}


@dataclass(frozen=True)
class ScaledTail(TailFunction):
    """λ·f 의 꼬리: T(t) = T_base(t/λ)"""
    base: TailFunction
    lam: float
    family: ClassVar[str] = "scaled_tail"

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_positive("lam", self.lam))

    def log_value_at_log(self, s: float) -> float:
        return self.base.log_value_at_log(s - math.log(self.lam))

    def log_mass_at_log(self, s: float) -> float:
        return self.base.log_mass_at_log(s - math.log(self.lam))

    def breakpoints(self) -> List[float]:
        return [self.lam * t for t in self.base.breakpoints()]

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "base": self.base.to_dict(), "lam": self.lam}


@dataclass(frozen=True)
class CappedTail(TailFunction):
    """T(t) = min(T_base(t), cap): (0,1) 로 자른 감소 함수의 꼬리"""
    base: TailFunction
    cap: float
    family: ClassVar[str] = "capped_tail"

    def __post_init__(self):
        object.__setattr__(self, "cap", _check_positive("cap", self.cap))

    def log_value_at_log(self, s: float) -> float:
        return min(self.base.log_value_at_log(s), math.log(self.cap))

    def log_mass_at_log(self, s: float) -> float:
        if self.base.log_value_at_log(s) >= math.log(self.cap):
            return -math.inf
        return self.base.log_mass_at_log(s)

    def crossing(self) -> Optional[float]:
        """T_base(t) = cap 인 t (없으면 None)"""
        log_cap = math.log(self.cap)

        def gap(s: float) -> float:
            return max(self.base.log_value_at_log(s), -1e300) - log_cap

        lo, hi = -700.0, 700.0
        if gap(lo) <= 0 or gap(hi) >= 0:
            return None
        return math.exp(optimize.brentq(gap, lo, hi, xtol=1e-14))

    def breakpoints(self) -> List[float]:
        points = list(self.base.breakpoints())
        cross = self.crossing()
        if cross is not None:
            points.append(cross)
        return sorted(points)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "base": self.base.to_dict(), "cap": self.cap}


@dataclass(frozen=True, eq=False)
class Tabulated(TailFunction):
    """
    표로 주어진 꼬리 (t 순증가, T 비증가)

    양수 구간은 ln T 선형 보간, 0 이 낀 구간은 선형 보간.
    첫 점 왼쪽은 첫 값, 마지막 점 오른쪽은 마지막 값 (외삽 플래그).
    """
    t: Tuple[float, ...]
    T: Tuple[float, ...]
    family: ClassVar[str] = "tabulated_tail"
    _t: np.ndarray = field(init=False, repr=False, compare=False)
    _T: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        T = np.asarray(self.T, dtype=float)
        if t.ndim != 1 or t.shape != T.shape or len(t) < 2:
            raise DomainError("꼬리 표는 길이가 같은 2개 이상의 (t, T) 쌍이어야 합니다.")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(T)):
            raise DomainError("꼬리 표에 유한하지 않은 값이 있습니다.")
        if t[0] <= 0 or np.any(np.diff(t) <= 0):
            raise DomainError("꼬리 표의 t 는 양수이고 순증가해야 합니다.")
        if np.any(T < 0) or np.any(np.diff(T) > 0):
            raise DomainError("꼬리 표의 T 는 음이 아니고 비증가해야 합니다.")

        object.__setattr__(self, "t", tuple(float(v) for v in t))
        object.__setattr__(self, "T", tuple(float(v) for v in T))
        object.__setattr__(self, "_t", t)
        object.__setattr__(self, "_T", T)

    def _log_extension(self, t: float) -> float:
        """마지막 노드 너머의 ln T(t)"""
        grid, values = self._t, self._T
        if values[-1] == 0:
            return -math.inf
        log_last = math.log(values[-1])
        slope = (log_last - math.log(values[-2])) / (grid[-1] - grid[-2])
        if slope == 0:
            return log_last
        return log_last + slope * (t - grid[-1])

    def lookup(self, t: float) -> Tuple[float, bool]:
        """
        보간값과 외삽 여부

        마지막 노드 너머는 마지막 구간의 로그 기울기로 연장한다 (마지막 값이 0 이면 0).

        Returns:
            (T(t), extrapolated)
        """
        grid, values = self._t, self._T
        if t < grid[0]:
            return float(values[0]), True
        if t > grid[-1]:
            return safe_exp(self._log_extension(t)), True

        k = min(int(np.searchsorted(grid, t, side="right")) - 1, len(grid) - 2)
        t0, t1 = grid[k], grid[k + 1]
        v0, v1 = values[k], values[k + 1]
        w = (t - t0) / (t1 - t0)
        if v0 > 0 and v1 > 0:
            return float(math.exp((1 - w) * math.log(v0) + w * math.log(v1))), False
        return float((1 - w) * v0 + w * v1), False

    def value(self, t: float) -> float:
        if t < 0 or math.isnan(t):
            raise DomainError(f"꼬리 함수 인자는 음수일 수 없습니다 (t={t})")
        value, extrapolated = self.lookup(t)
        if extrapolated:
            logger.warning(f"tabulated tail extrapolated at t={t}")
        return value

    def log_value_at_log(self, s: float) -> float:
        t = safe_exp(s)
        if t > self._t[-1]:
            return self._log_extension(t)
        value, _ = self.lookup(t)
        return math.log(value) if value > 0 else -math.inf

    def log_mass_at_log(self, s: float) -> float:
        t = safe_exp(s)
        grid, values = self._t, self._T
        if t <= grid[0] or (t >= grid[-1] and values[-1] == 0):
            return -math.inf

        k = min(int(np.searchsorted(grid, t, side="right")) - 1, len(grid) - 2)
        t0, t1 = grid[k], grid[k + 1]
        v0, v1 = values[k], values[k + 1]
        if v0 == v1:
            return -math.inf
        if v0 > 0 and v1 > 0:
            slope = (math.log(v0) - math.log(v1)) / (t1 - t0)
            return s + self.log_value_at_log(s) + math.log(slope)
        return s + math.log((v0 - v1) / (t1 - t0))

    def breakpoints(self) -> List[float]:
        return list(self.t)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "t": list(self.t), "T": list(self.T)}


# ==================== GeneratingFunction ====================

class GeneratingFunction(ABC):
    """열린 지지 (a, b), 0 < a < b ≤ ∞ 위의 ψ(p); 지지 밖은 +∞"""

    family: ClassVar[str] = ""
    support: Interval

    def _validate_support(self):
        a, b = float(self.support[0]), float(self.support[1])
        if not (a >= 0 and b > a) or math.isnan(b):
            raise DomainError(f"지지 구간은 0 ≤ a < b ≤ ∞ 여야 합니다: ({a}, {b})")
        object.__setattr__(self, "support", (a, b))

    def in_support(self, p: float) -> bool:
        a, b = self.support
        return a < p < b

    @abstractmethod
    def log_value(self, p: float) -> float:
        """ln ψ(p) (지지 밖 +inf)"""

    def value(self, p: float) -> float:
        """ψ(p) (지지 밖 +inf)"""
        return safe_exp(self.log_value(p))

    def nu(self, p: float) -> float:
        """ν(p) = p·ln ψ(p)"""
        return p * self.log_value(p)

    @property
    def natural_source(self) -> Optional[Union[FunctionSpec, TailFunction]]:
        """이 ψ 를 자연 생성 함수로 갖는 원천 (없으면 None)"""
        return None

    @property
    def is_closed_form(self) -> bool:
        return False

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """JSON 직렬화"""


@dataclass(frozen=True)
class PowerPsi(GeneratingFunction):
    """ψ(p) = C₁·p^{1/m}"""
    C1: float
    m: float
    support: Interval = (0.0, math.inf)
    family: ClassVar[str] = "power_psi"

    def __post_init__(self):
        object.__setattr__(self, "C1", _check_positive("C1", self.C1))
        object.__setattr__(self, "m", _check_positive("m", self.m))
        self._validate_support()

    def log_value(self, p: float) -> float:
        if not self.in_support(p):
            return math.inf
        return math.log(self.C1) + math.log(p) / self.m

    def nu(self, p: float) -> float:
        if not self.in_support(p):
            return math.inf
        return p * math.log(self.C1) + p * math.log(p) / self.m

    @property
    def is_closed_form(self) -> bool:
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "C1": self.C1, "m": self.m,
                "support": [_dump_float(v) for v in self.support]}


@dataclass(frozen=True)
class ConstantPsi(GeneratingFunction):
    """ψ(p) ≡ C (유계 지지와 함께 L^a ∩ L^b 형태의 공간)"""
    C: float
    support: Interval = (1.0, 2.0)
    family: ClassVar[str] = "constant_psi"

    def __post_init__(self):
        object.__setattr__(self, "C", _check_positive("C", self.C))
        self._validate_support()

    def log_value(self, p: float) -> float:
        if not self.in_support(p):
            return math.inf
        return math.log(self.C)

    def nu(self, p: float) -> float:
        if not self.in_support(p):
            return math.inf
        return p * math.log(self.C)

    @property
    def is_closed_form(self) -> bool:
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "C": self.C,
                "support": [_dump_float(v) for v in self.support]}


@dataclass(frozen=True)
class NaturalStretchedExp(GeneratingFunction):
    """ψ(p) = θ^{-1/p}·(cp)^{-1/(pθ)}·Γ(1/θ)^{1/p} = ||exp(-c x^θ)||_p"""
    c: float
    theta: float
    support: Interval = (0.0, math.inf)
    family: ClassVar[str] = "natural_stretched_exp"

    def __post_init__(self):
        object.__setattr__(self, "c", _check_positive("c", self.c))
        object.__setattr__(self, "theta", _check_positive("theta", self.theta))
        self._validate_support()

    @property
    def nu_constant(self) -> float:
        """ν(p) = K₀ - (1/θ)·ln p 의 K₀ = ln Γ(1/θ) - ln θ - (1/θ) ln c"""
        return log_gamma(1.0 / self.theta) - math.log(self.theta) - math.log(self.c) / self.theta

    def nu(self, p: float) -> float:
        if not self.in_support(p):
            return math.inf
        return self.nu_constant - math.log(p) / self.theta

    def log_value(self, p: float) -> float:
        if not self.in_support(p):
            return math.inf
        return self.nu(p) / p

    @property
    def natural_source(self) -> FunctionSpec:
        return StretchedExp(self.c, self.theta)

    @property
    def is_closed_form(self) -> bool:
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "c": self.c, "theta": self.theta,
                "support": [_dump_float(v) for v in self.support]}


@dataclass(frozen=True, eq=False)
class TabulatedPsi(GeneratingFunction):
    """
    격자 (p_i, ψ_i) 로 주어진 ψ

    지지는 노드 범위 [p_0, p_n] (노드 포함), 노드 사이는 (ln p, ln ψ) 선형 보간
    """
    p: Tuple[float, ...]
    psi: Tuple[float, ...]
    source: Optional[Union[FunctionSpec, TailFunction]] = None
    family: ClassVar[str] = "tabulated_psi"
    support: Interval = field(init=False)
    _log_p: np.ndarray = field(init=False, repr=False, compare=False)
    _log_psi: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        psi = np.asarray(self.psi, dtype=float)
        if p.ndim != 1 or p.shape != psi.shape or len(p) < 2:
            raise DomainError("ψ 표는 길이가 같은 2개 이상의 (p, ψ) 쌍이어야 합니다.")
        if p[0] <= 0 or np.any(np.diff(p) <= 0):
            raise DomainError("ψ 표의 p 는 양수이고 순증가해야 합니다.")
        if not np.all(np.isfinite(psi)) or np.any(psi <= 0):
            raise DomainError("ψ 표의 값은 유한한 양수여야 합니다 (inf ψ > 0).")

        object.__setattr__(self, "p", tuple(float(v) for v in p))
        object.__setattr__(self, "psi", tuple(float(v) for v in psi))
        object.__setattr__(self, "support", (float(p[0]), float(p[-1])))
        object.__setattr__(self, "_log_p", np.log(p))
        object.__setattr__(self, "_log_psi", np.log(psi))

    def in_support(self, p: float) -> bool:
        return self.support[0] <= p <= self.support[1]

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """(p_i, ψ_i) 배열"""
        return np.asarray(self.p), np.asarray(self.psi)

    def log_value(self, p: float) -> float:
        if not self.in_support(p):
            return math.inf
        return float(np.interp(math.log(p), self._log_p, self._log_psi))

    def value(self, p: float) -> float:
        if not self.in_support(p):
            return math.inf
        k = int(np.searchsorted(self.p, p))
        if k < len(self.p) and self.p[k] == p:
            return self.psi[k]
        return safe_exp(self.log_value(p))

    @property
    def natural_source(self) -> Optional[Union[FunctionSpec, TailFunction]]:
        return self.source

    def to_dict(self) -> Dict[str, Any]:
        data = {"family": self.family, "p": list(self.p), "psi": list(self.psi)}
        if self.source is not None:
            data["source"] = self.source.to_dict()
        return data


@dataclass(frozen=True)
class NumericNatural(GeneratingFunction):
    """ψ(p) = ||source||_p 를 필요할 때 수치 계산 (FunctionSpec 또는 꼬리)"""
    source: Union[FunctionSpec, TailFunction]
    support: Interval = (0.0, math.inf)
    tol: float = 1e-10
    family: ClassVar[str] = "numeric_natural"

    def __post_init__(self):
        self._validate_support()

    def log_value(self, p: float) -> float:
        if not self.in_support(p):
            return math.inf
        from modules.moments import log_lp_power
        return log_lp_power(self.source, p, self.tol) / p

    @property
    def natural_source(self) -> Union[FunctionSpec, TailFunction]:
        return self.source

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "source": self.source.to_dict(),
                "support": [_dump_float(v) for v in self.support]}


# ==================== 연산 ====================

def tail_of(spec: FunctionSpec) -> TailFunction:
    """
    함수의 정확한 꼬리 함수 T(t) = μ{x: |f(x)| > t}

    Args:
        spec: 지원 함수족

    Returns:
        TailFunction: 해석적 꼬리

    Raises:
        UnsupportedSpecError: 지원하지 않는 중첩 변형
    """
    if isinstance(spec, StretchedExp):
        # ((1/c) ln(1/t))^{1/θ} = c^{-1/θ}·(ln(1/t))^{1/θ}
        return LogPowerTail(spec.theta, spec.c ** (-1.0 / spec.theta))
    if isinstance(spec, LogSingular):
        return StretchedExpTail(1.0, 1.0)
    if isinstance(spec, TruncatedExp):
        return LogPowerTail(1.0, 1.0)
    if isinstance(spec, Indicator01Scaled):
        if isinstance(spec.inner, (StretchedExp, TruncatedExp)):
            # 0 에서 감소하는 함수: μ{x ∈ (0,1): h₀ > t} = min(1, T_h₀(t))
            return CappedTail(tail_of(spec.inner), 1.0)
        raise UnsupportedSpecError(
            f"Indicator01Scaled 내부 함수 '{spec.inner.family}' 의 꼬리는 지원하지 않습니다.")
    if isinstance(spec, DisjointUnion):
        return PiecewiseSum(tuple(tail_of(part) for part in spec.parts))
    if isinstance(spec, Scaled):
        return ScaledTail(tail_of(spec.inner), spec.lam)
    raise UnsupportedSpecError(f"지원하지 않는 함수 변형: {type(spec).__name__}")


def eval_tail(T: TailFunction, t: float) -> float:
    """
    꼬리 함수 값 T(t)

    Raises:
        DomainError: t ≤ 0
    """
    if not t > 0:
        raise DomainError(f"eval_tail: t > 0 이어야 합니다 (t={t})")
    return T.value(t)


def eval_psi(psi: GeneratingFunction, p: float) -> float:
    """
    생성 함수 값 ψ(p), 지지 밖은 +∞

    Raises:
        DomainError: p ≤ 0
    """
    if not p > 0:
        raise DomainError(f"eval_psi: p > 0 이어야 합니다 (p={p})")
    return psi.value(p)


# ==================== 직렬화 ====================

def spec_from_dict(data: Dict[str, Any]) -> FunctionSpec:
    """JSON 사전 → FunctionSpec"""
    family = _family(data)
    try:
        if family == StretchedExp.family:
            return StretchedExp(float(data["c"]), float(data["theta"]))
        if family == LogSingular.family:
            return LogSingular()
        if family == TruncatedExp.family:
            return TruncatedExp()
        if family == Indicator01Scaled.family:
            return Indicator01Scaled(spec_from_dict(data["inner"]))
        if family == DisjointUnion.family:
            return DisjointUnion(tuple(spec_from_dict(part) for part in data["parts"]))
        if family == Scaled.family:
            return Scaled(spec_from_dict(data["inner"]), float(data["lam"]))
    except KeyError as e:
        raise SpecParseError(f"'{family}' 스펙에 필드 {e} 가 없습니다.") from e
    except (TypeError, ValueError) as e:
        if isinstance(e, DomainError):
            raise
        raise SpecParseError(f"'{family}' 스펙 필드 형식 오류: {e}") from e
    raise SpecParseError(f"알 수 없는 함수족: '{family}'")


def tail_from_dict(data: Dict[str, Any]) -> TailFunction:
    """JSON 사전 → TailFunction (표는 't', 'T' 배열)"""
    family = _family(data)
    try:
        if family == StretchedExpTail.family:
            return StretchedExpTail(float(data["C"]), float(data["m"]))
        if family == LogPowerTail.family:
            return LogPowerTail(float(data["theta"]), float(data.get("scale", 1.0)))
        if family == PiecewiseSum.family:
            return PiecewiseSum(tuple(tail_from_dict(part) for part in data["parts"]))
        if family == ScaledTail.family:
            return ScaledTail(tail_from_dict(data["base"]), float(data["lam"]))
        if family == CappedTail.family:
            return CappedTail(tail_from_dict(data["base"]), float(data["cap"]))
        if family == Tabulated.family:
            return Tabulated(tuple(data["t"]), tuple(data["T"]))
    except KeyError as e:
        raise SpecParseError(f"'{family}' 꼬리에 필드 {e} 가 없습니다.") from e
    except (TypeError, ValueError) as e:
        if isinstance(e, DomainError):
            raise
        raise SpecParseError(f"'{family}' 꼬리 필드 형식 오류: {e}") from e
    raise SpecParseError(f"알 수 없는 꼬리 함수족: '{family}'")


def psi_from_dict(data: Dict[str, Any]) -> GeneratingFunction:
    """JSON 사전 → GeneratingFunction"""
    family = _family(data)
    try:
        support = tuple(_float_or_inf(v) for v in data.get("support", [0.0, "inf"]))
        if family == PowerPsi.family:
            return PowerPsi(float(data["C1"]), float(data["m"]), support)
        if family == ConstantPsi.family:
            return ConstantPsi(float(data["C"]), support)
        if family == NaturalStretchedExp.family:
            return NaturalStretchedExp(float(data["c"]), float(data["theta"]), support)
        if family == TabulatedPsi.family:
            source = source_from_dict(data["source"]) if "source" in data else None
            return TabulatedPsi(tuple(data["p"]), tuple(data["psi"]), source)
        if family == NumericNatural.family:
            return NumericNatural(source_from_dict(data["source"]), support)
    except KeyError as e:
        raise SpecParseError(f"'{family}' ψ 에 필드 {e} 가 없습니다.") from e
    except (TypeError, ValueError) as e:
        if isinstance(e, DomainError):
            raise
        raise SpecParseError(f"'{family}' ψ 필드 형식 오류: {e}") from e
    raise SpecParseError(f"알 수 없는 생성 함수족: '{family}'")


def source_from_dict(data: Dict[str, Any]) -> Union[FunctionSpec, TailFunction]:
    """함수족 이름으로 FunctionSpec / TailFunction 판별"""
    family = _family(data)
    if family in TAIL_FAMILIES:
        return tail_from_dict(data)
    return spec_from_dict(data)


def _family(data: Dict[str, Any]) -> str:
    if not isinstance(data, dict) or "family" not in data:
        raise SpecParseError("스펙은 'family' 키를 가진 JSON 객체여야 합니다.")
    return str(data["family"]).strip().lower()


TAIL_FAMILIES = {cls.family for cls in (StretchedExpTail, LogPowerTail, PiecewiseSum,
                                        ScaledTail, CappedTail, Tabulated)}
PSI_FAMILIES = {cls.family for cls in (PowerPsi, ConstantPsi, NaturalStretchedExp, TabulatedPsi,
                                       NumericNatural)}
