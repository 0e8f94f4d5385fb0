"""
circle 앱 시리얼라이저
Why: 사상/포텐셜 JSON 문서를 검증하고 도메인 객체로 바꾸는 유일한 입구
"""

import numpy as np
from rest_framework import serializers

from .exceptions import CircleError
from .services.approximation import SampledMap
from .services.geometry import Arc
from .services.homeo import LocalHomeo
from .services.pl_map import PLMap
from .services.potential import Potential


class PLMapSerializer(serializers.Serializer):
    """
    {"breakpoints": [...], "liftValues": [...], "degree": n}
    """

    breakpoints = serializers.ListField(child=serializers.FloatField(), min_length=2)
    liftValues = serializers.ListField(
        child=serializers.FloatField(), min_length=2, source="lift_values"
    )
    degree = serializers.IntegerField()

    def validate(self, attrs):
        """
        Why: 연속성·단조성 검사는 PLMap 생성자가 하므로 여기서 한 번 만들어 본다
        """
        try:
            attrs["instance"] = PLMap(
                attrs["breakpoints"], attrs["lift_values"], attrs["degree"]
            )
        except CircleError as e:
            raise serializers.ValidationError(str(e))
        return attrs

    def create(self, validated_data):
        return validated_data["instance"]


class PotentialSerializer(serializers.Serializer):
    """
    {"samples": [...], "lipschitz": L}
    """

    samples = serializers.ListField(child=serializers.FloatField(), min_length=2)
    lipschitz = serializers.FloatField(min_value=0.0)

    def validate(self, attrs):
        try:
            attrs["instance"] = Potential(attrs["samples"], attrs["lipschitz"])
        except CircleError as e:
            raise serializers.ValidationError(str(e))
        return attrs

    def create(self, validated_data):
        return validated_data["instance"]


class SampledMapSerializer(serializers.Serializer):
    """Sampled circle map fed to pl_approximate; same layout as a potential."""

    samples = serializers.ListField(child=serializers.FloatField(), min_length=2)
    lipschitz = serializers.FloatField(min_value=0.0)

    def create(self, validated_data):
        return SampledMap(validated_data["samples"], validated_data["lipschitz"])


class ArcSerializer(serializers.Serializer):
    center = serializers.FloatField(min_value=0.0, max_value=1.0)
    radius = serializers.FloatField(min_value=0.0, max_value=0.5)
    closed = serializers.BooleanField(default=True)

    def create(self, validated_data):
        try:
            return Arc(**validated_data)
        except CircleError as e:
            raise serializers.ValidationError(str(e))


class LocalHomeoSerializer(serializers.Serializer):
    support = ArcSerializer(allow_null=True)
    knots = serializers.ListField(
        child=serializers.ListField(
            child=serializers.FloatField(), min_length=2, max_length=2
        )
    )

    def create(self, validated_data):
        support_data = validated_data["support"]
        if support_data is None:
            return LocalHomeo.identity()
        try:
            return LocalHomeo(Arc(**support_data), validated_data["knots"])
        except CircleError as e:
            raise serializers.ValidationError(str(e))


class FourierPotentialSerializer(serializers.Serializer):
    """
    {"fourier": [[k, a_k, b_k], ...], "resolution": n, "shift": c}
    φ(x) = Σ a_k cos(2πkx) + b_k sin(2πkx) − c, sampled on i/n.
    """

    fourier = serializers.ListField(
        child=serializers.ListField(
            child=serializers.FloatField(), min_length=3, max_length=3
        ),
        min_length=1,
    )
    resolution = serializers.IntegerField(min_value=16)
    shift = serializers.FloatField(default=0.0)

    def create(self, validated_data):
        terms = [(int(k), a, b) for k, a, b in validated_data["fourier"]]
        shift = validated_data["shift"]

        def phi(x):
            total = np.zeros_like(x) - shift
            for k, a, b in terms:
                total = total + a * np.cos(2 * np.pi * k * x) + b * np.sin(2 * np.pi * k * x)
            return total

        return Potential.from_function(phi, validated_data["resolution"])
