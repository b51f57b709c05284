"""
FastAPI 메인 애플리케이션
"""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.api.v1 import metrics, planning
from app.core.config import get_settings
from app.core.logging import setup_logging

settings = get_settings()
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """애플리케이션 라이프사이클 관리"""
    setup_logging(settings.log_level)
    logger.info("애플리케이션 시작 (결과 경로: %s)", settings.output_dir)

    yield

    logger.info("애플리케이션 종료...")


# FastAPI 앱 생성
app = FastAPI(
    title=settings.project_name,
    description="위성-HAP-지상 중계 상향링크 성능 분석 및 전력 계획 API",
    version="1.0.0",
    lifespan=lifespan,
)

# CORS 설정
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# API 라우터 등록
app.include_router(metrics.router, prefix=settings.api_v1_str, tags=["metrics"])

app.include_router(planning.router, prefix=settings.api_v1_str, tags=["planning"])


@app.get("/")
async def root():
    """루트 엔드포인트"""
    return {
        "message": "HAP Relay Planner API",
        "version": "1.0.0",
        "docs": "/docs",
        "status": "running",
    }


@app.get("/health")
async def health_check():
    """헬스 체크 엔드포인트"""
    return {"status": "healthy", "service": "hap-relay-planner"}


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "app.main:app", host="0.0.0.0", port=8000, reload=settings.debug
    )
