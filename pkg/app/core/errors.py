"""
도메인 예외 정의
"""

from typing import Any, Optional


class PlannerError(Exception):
    """모든 도메인 오류의 기본 클래스"""


class ConfigError(PlannerError, ValueError):
    """네트워크 설정 오류 (키 이름 포함)"""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class DomainError(PlannerError, ValueError):
    """특수 함수 인자 정의역 오류"""


class QuadratureError(PlannerError):
    """수치 적분 실패 (비유한 피적분 함수 또는 수렴 실패)"""


class SeriesConvergenceError(PlannerError):
    """급수가 항 수 상한 내에서 수렴하지 않음"""

    def __init__(self, message: str, terms_used: int, last_term: float):
        self.terms_used = terms_used
        self.last_term = last_term
        super().__init__(message)


class InfeasibleTargetError(PlannerError):
    """전력 상한 또는 BREP 상한으로 목표 달성 불가"""

    def __init__(self, message: str, plan: Optional[Any] = None):
        self.plan = plan
        super().__init__(message)


class ConfigMismatchError(PlannerError):
    """해석/시뮬레이션 입력의 설정 해시 불일치"""


class SweepAxisError(PlannerError, ValueError):
    """스윕 축 정의 오류"""
