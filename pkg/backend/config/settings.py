"""
Django settings for the circlemax project.

Django is used for its app registry, management commands and test runner;
there is no database, URL configuration or web server.
"""

# Standard library imports
from pathlib import Path

# Third-party imports
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Security Settings - 서버를 띄우지 않으므로 기본값을 허용
SECRET_KEY = config("SECRET_KEY", default="circlemax-local-only")
DEBUG = config("DEBUG", default=False, cast=bool)
ALLOWED_HOSTS = []

# Application definition - 타입별 분류로 가독성 향상
DJANGO_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
]

THIRD_PARTY_APPS = [
    "rest_framework",
]

LOCAL_APPS = [
    "circle",  # PL 원 사상, 포텐셜, 국소 위상동형
    "birkhoff",  # Birkhoff 합, 재귀, 첫 귀환
    "measure",  # Ulam LP 상한과 주기 궤도 하한
    "perturb",  # 닫는 섭동 구성
    "certify",  # 인증서
    "cli",  # 관리 명령
]

INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + LOCAL_APPS

# Database - 사용하지 않음 (SimpleTestCase 만 사용)
DATABASES = {}

# Django REST Framework - 시리얼라이저/렌더러만 사용
REST_FRAMEWORK = {
    "DEFAULT_RENDERER_CLASSES": [
        "rest_framework.renderers.JSONRenderer",
    ],
    "DEFAULT_PARSER_CLASSES": [
        "rest_framework.parsers.JSONParser",
    ],
    "UNAUTHENTICATED_USER": None,
}

# circlemax 실행 기본값 - 명령행 옵션이 없을 때만 사용
CIRCLEMAX = {
    "EPSILON": config("CIRCLEMAX_EPSILON", default=0.1, cast=float),
    "GRID": config("CIRCLEMAX_GRID", default=16384, cast=int),
    "BINS": config("CIRCLEMAX_BINS", default=4096, cast=int),
    "HORIZON_FACTOR": config("CIRCLEMAX_HORIZON_FACTOR", default=64, cast=int),
    "TOL": config("CIRCLEMAX_TOL", default=1e-3, cast=float),
    "ETA": config("CIRCLEMAX_ETA", default=1e-6, cast=float),
    "SEED": config("CIRCLEMAX_SEED", default=7, cast=int),
    "OUTPUT_DIR": config("CIRCLEMAX_OUTPUT_DIR", default="out"),
    "MIN_SLOPE": config("CIRCLEMAX_MIN_SLOPE", default=1e-3, cast=float),
    "BRANCH_CAP": config("CIRCLEMAX_BRANCH_CAP", default=200000, cast=int),
    "RANDOM_ORBITS": config("CIRCLEMAX_RANDOM_ORBITS", default=10000, cast=int),
    "ORBIT_LENGTH": config("CIRCLEMAX_ORBIT_LENGTH", default=1000, cast=int),
    "RETRIES": config("CIRCLEMAX_RETRIES", default=3, cast=int),
}

# Logging - 서비스 모듈은 logging.getLogger(__name__) 만 쓴다
LOG_LEVEL = config("LOG_LEVEL", default="INFO")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {
            "format": "{asctime} {levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "loggers": {
        app: {"handlers": ["console"], "level": LOG_LEVEL, "propagate": False}
        for app in LOCAL_APPS
    },
}

# Internationalization
LANGUAGE_CODE = "ko-kr"
TIME_ZONE = "Asia/Seoul"
USE_I18N = True
USE_TZ = True

# Default primary key field type
DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"
