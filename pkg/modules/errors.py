"""
Error Types
계산 모듈 공통 예외 정의

입력 오류는 ValueError 계열, 수치 실패는 ArithmeticError 계열로 둔다.
CLI는 이 구분으로 종료 코드를 정한다 (파싱 2, 도메인/수치 3).
"""

from typing import Optional


class DomainError(ValueError):
    """연산의 정의역을 벗어난 인자 (t ≤ 0, 빈 구간, 지지 밖의 p 등)"""


class SpecParseError(ValueError):
    """스펙/테이블 파일 형식 오류"""


class UnsupportedSpecError(ValueError):
    """연산이 지원하지 않는 함수/꼬리 변형"""


class OrliczConstructionError(ValueError):
    """Young-Orlicz 함수 구성 불가 (T(1) = 0 등)"""


class IntegrandError(ArithmeticError):
    """피적분 함수나 목적 함수가 NaN을 반환"""


class ConvergenceError(ArithmeticError):
    """허용 오차에 도달하지 못함 (best_estimate 보존)"""

    def __init__(self, message: str, best_estimate: Optional[float] = None):
        super().__init__(message)
        self.best_estimate = best_estimate


class DivergenceError(ArithmeticError):
    """발산하는 모멘트/모듈러 적분"""

    def __init__(self, message: str, p: Optional[float] = None):
        super().__init__(message)
        self.p = p


class NormConsistencyError(ArithmeticError):
    """닫힌 형식 노름과 구적 노름의 불일치"""

    def __init__(self, message: str, p: float, closed: float, direct: float):
        super().__init__(message)
        self.p = p
        self.closed = closed
        self.direct = direct
