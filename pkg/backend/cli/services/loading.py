"""
입력 문서 읽기와 JSON 산출물 쓰기
Why: 명령마다 파일 처리 규칙이 달라지지 않도록 파싱·검증·렌더링을 한곳에 모은다
"""

import io
import logging
from pathlib import Path
from typing import Union

from rest_framework.exceptions import ParseError
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from circle.serializers import (
    FourierPotentialSerializer,
    PLMapSerializer,
    PotentialSerializer,
    SampledMapSerializer,
)
from circle.services.approximation import SampledMap
from circle.services.pl_map import PLMap
from circle.services.potential import Potential
from perturb.serializers import PerturbationPlanSerializer
from perturb.services.plan import PerturbationPlan

from ..exceptions import InputError, OutputError
from ..serializers import RunConfigSerializer
from .config import RunConfig

logger = logging.getLogger(__name__)


def load_json(path) -> dict:
    if path is None:
        raise InputError("입력 파일 경로가 없습니다.")
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"{path} 를 읽을 수 없습니다: {e}")
    try:
        data = JSONParser().parse(io.BytesIO(raw))
    except ParseError as e:
        raise InputError(f"{path} 는 JSON 이 아닙니다: {e.detail}")
    if not isinstance(data, dict):
        raise InputError(f"{path} 의 최상위 값은 객체여야 합니다.")
    return data


def _build(serializer_class, data: dict, path):
    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        raise InputError(f"{path}: {serializer.errors}")
    return serializer.save()


def build_config(document: dict, overrides: dict) -> RunConfig:
    """Config file values first, then every flag that was actually given."""
    data = dict(document)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return _build(RunConfigSerializer, data, "config")


def load_map(path) -> Union[PLMap, SampledMap]:
    data = load_json(path)
    if "breakpoints" in data:
        return _build(PLMapSerializer, data, path)
    if "samples" in data:
        return _build(SampledMapSerializer, data, path)
    raise InputError(f"{path}: breakpoints 나 samples 가 있어야 합니다.")


def load_potential(path) -> Potential:
    data = load_json(path)
    if "fourier" in data:
        return _build(FourierPotentialSerializer, data, path)
    return _build(PotentialSerializer, data, path)


def load_plan(path) -> PerturbationPlan:
    return _build(PerturbationPlanSerializer, load_json(path), path)


def write_json(data, path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(
            JSONRenderer().render(data, renderer_context={"indent": 2}) + b"\n"
        )
    except OSError as e:
        raise OutputError(f"{path} 에 쓸 수 없습니다: {e}")
    logger.info("저장: %s", path)
    return path
