"""
도메인 예외 → HTTP 오류 변환
"""

import logging

from fastapi import HTTPException

from app.core.errors import (
    ConfigError,
    ConfigMismatchError,
    DomainError,
    PlannerError,
    SweepAxisError,
)

logger = logging.getLogger(__name__)


def to_http_error(error: Exception) -> HTTPException:
    if isinstance(error, ConfigError):
        return HTTPException(
            status_code=422, detail={"key": error.key, "message": str(error)}
        )
    if isinstance(error, (SweepAxisError, DomainError)):
        return HTTPException(status_code=422, detail=str(error))
    if isinstance(error, ConfigMismatchError):
        return HTTPException(status_code=409, detail=str(error))
    if isinstance(error, PlannerError):
        logger.error("수치 계산 오류: %s", error)
        return HTTPException(status_code=500, detail=str(error))
    logger.exception("API 처리 중 예기치 않은 오류")
    return HTTPException(status_code=500, detail="내부 서버 오류가 발생했습니다.")
