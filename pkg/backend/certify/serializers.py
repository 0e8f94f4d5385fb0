"""
certify 앱 시리얼라이저
Why: 인증서 JSON 의 필드 이름은 고정이라 읽기와 쓰기를 한 시리얼라이저로 묶는다
"""

from rest_framework import serializers

from perturb.services.plan import CaseTag

from .services.certificate import Certificate
from .services.checks import LemmaCheck


class LemmaCheckSerializer(serializers.Serializer):
    passed = serializers.BooleanField()
    checked = serializers.IntegerField(min_value=0)
    violations = serializers.IntegerField(min_value=0)

    def create(self, validated_data):
        return LemmaCheck(**validated_data)


class CertificateSerializer(serializers.Serializer):
    epsilon = serializers.FloatField()
    distance = serializers.FloatField()
    orbit = serializers.ListField(child=serializers.FloatField(), min_length=1)
    period = serializers.IntegerField(min_value=1)
    orbitAverage = serializers.FloatField(source="orbit_average")
    upperBound = serializers.FloatField(source="upper_bound", allow_null=True)
    upperBoundError = serializers.FloatField(source="upper_bound_error", allow_null=True)
    lowerBoundOracle = serializers.FloatField(source="lower_bound_oracle", allow_null=True)
    lemmaChecks = serializers.DictField(child=LemmaCheckSerializer(), source="lemma_checks")
    verdict = serializers.BooleanField()
    tol = serializers.FloatField()
    bins = serializers.IntegerField(min_value=1)
    grid = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField()
    tag = serializers.ChoiceField(choices=[t.value for t in CaseTag])
    baseUpperBound = serializers.FloatField(
        source="base_upper_bound", allow_null=True, required=False, default=None
    )

    def validate(self, attrs):
        if len(attrs["orbit"]) != attrs["period"]:
            raise serializers.ValidationError("orbit 길이와 period 가 다릅니다.")
        return attrs

    def create(self, validated_data):
        checks = {
            name: LemmaCheck(**data) for name, data in validated_data.pop("lemma_checks").items()
        }
        orbit = tuple(validated_data.pop("orbit"))
        return Certificate(orbit=orbit, lemma_checks=checks, **validated_data)
