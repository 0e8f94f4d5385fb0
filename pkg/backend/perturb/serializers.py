"""
perturb 앱 시리얼라이저
Why: 저장된 계획 JSON 을 다시 읽어 같은 f̂ 를 재조립하고 인증할 수 있어야 한다
"""

from rest_framework import serializers

from circle.serializers import LocalHomeoSerializer

from .exceptions import PerturbError
from .services.plan import AlphaSchedule, CaseTag, PerturbationPlan


class AlphaScheduleSerializer(serializers.Serializer):
    alpha = serializers.FloatField()
    nQ = serializers.IntegerField(min_value=1, source="n_q")
    R1 = serializers.FloatField(min_value=0.0)
    R2 = serializers.FloatField(min_value=0.0)
    s = serializers.ListField(child=serializers.FloatField(), min_length=1)
    r = serializers.ListField(child=serializers.FloatField())

    def validate(self, attrs):
        try:
            attrs["instance"] = AlphaSchedule(
                attrs["alpha"],
                attrs["n_q"],
                attrs["R1"],
                attrs["R2"],
                tuple(attrs["s"]),
                tuple(attrs["r"]),
            )
        except PerturbError as e:
            raise serializers.ValidationError(str(e))
        return attrs


class PerturbationPlanSerializer(serializers.Serializer):
    """Reads the layout written by PerturbationPlan.to_dict; supportArcs is derived and ignored."""

    tag = serializers.ChoiceField(choices=[t.value for t in CaseTag])
    periodicPoint = serializers.FloatField(source="periodic_point")
    period = serializers.IntegerField(min_value=1)
    steps = LocalHomeoSerializer(many=True)
    schedule = AlphaScheduleSerializer(allow_null=True, required=False, default=None)
    context = serializers.DictField(required=False, default=dict)

    def create(self, validated_data):
        steps = tuple(LocalHomeoSerializer().create(step) for step in validated_data["steps"])
        schedule = validated_data["schedule"]
        return PerturbationPlan(
            CaseTag(validated_data["tag"]),
            validated_data["periodic_point"],
            validated_data["period"],
            steps,
            schedule["instance"] if schedule else None,
            dict(validated_data["context"]),
        )
