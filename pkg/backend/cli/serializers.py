"""
cli 앱 시리얼라이저
Why: --config 파일과 명령행 옵션을 같은 규칙으로 검증하고, 빠진 값은 settings.CIRCLEMAX 에서 채운다
"""

from django.conf import settings
from rest_framework import serializers

from .services.config import RunConfig


def _setting(key):
    # 호출 시점에 읽어야 override_settings 가 먹힌다
    def default():
        return settings.CIRCLEMAX[key]

    return default


def power_of_two(value):
    if value < 16 or value & (value - 1):
        raise serializers.ValidationError("16 이상의 2의 거듭제곱이어야 합니다.")


class RunConfigSerializer(serializers.Serializer):
    """
    Every key is camelCase in the --config document; flags override the file.
    """

    map = serializers.CharField(source="map_path")
    potential = serializers.CharField(
        source="potential_path", required=False, allow_null=True, default=None
    )
    plan = serializers.CharField(
        source="plan_path", required=False, allow_null=True, default=None
    )
    epsilon = serializers.FloatField(default=_setting("EPSILON"))
    grid = serializers.IntegerField(default=_setting("GRID"), validators=[power_of_two])
    bins = serializers.IntegerField(default=_setting("BINS"), validators=[power_of_two])
    horizonFactor = serializers.IntegerField(
        source="horizon_factor", min_value=1, default=_setting("HORIZON_FACTOR")
    )
    tol = serializers.FloatField(min_value=0.0, default=_setting("TOL"))
    eta = serializers.FloatField(min_value=0.0, default=_setting("ETA"))
    seed = serializers.IntegerField(min_value=0, default=_setting("SEED"))
    out = serializers.CharField(source="output_dir", default=_setting("OUTPUT_DIR"))
    minSlope = serializers.FloatField(
        source="min_slope", min_value=0.0, default=_setting("MIN_SLOPE")
    )
    branchCap = serializers.IntegerField(
        source="branch_cap", min_value=1, default=_setting("BRANCH_CAP")
    )
    randomOrbits = serializers.IntegerField(
        source="random_orbits", min_value=0, default=_setting("RANDOM_ORBITS")
    )
    orbitLength = serializers.IntegerField(
        source="orbit_length", min_value=1, default=_setting("ORBIT_LENGTH")
    )
    retries = serializers.IntegerField(min_value=0, default=_setting("RETRIES"))
    pMax = serializers.IntegerField(source="p_max", min_value=1, default=8)

    def validate_epsilon(self, value):
        if not 0.0 < value < 0.5:
            raise serializers.ValidationError("epsilon 은 (0, 1/2) 안에 있어야 합니다.")
        return value

    def create(self, validated_data):
        return RunConfig(**validated_data)
