"""
로깅 설정
"""

import logging

_FORMAT = "%(asctime)s %(levelname)s [%(name)s] %(message)s"


def setup_logging(level: str = "INFO") -> None:
    """루트 로거 초기화 (중복 핸들러 방지)"""
    root = logging.getLogger()
    if not any(getattr(h, "_hap_planner", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_FORMAT))
        handler._hap_planner = True
        root.addHandler(handler)
    root.setLevel(level.upper())
