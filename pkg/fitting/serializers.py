from rest_framework import serializers

from .models import RunRecord


class SolveReportSerializer(serializers.Serializer):
    frame_id = serializers.IntegerField()
    method = serializers.CharField()
    objective_trace = serializers.ListField(child=serializers.FloatField())
    coordinate_visits = serializers.IntegerField()
    degenerate_visits = serializers.IntegerField()
    wall_time = serializers.FloatField()
    pre_clip_cardinality = serializers.IntegerField(allow_null=True)


class MetricSummarySerializer(serializers.Serializer):
    method = serializers.CharField(allow_null=True)
    passes = serializers.IntegerField(allow_null=True)
    alpha = serializers.FloatField(allow_null=True)
    ordering = serializers.CharField(allow_null=True, allow_blank=True)
    frame_count = serializers.IntegerField()
    rmse_mean = serializers.FloatField()
    rmse_p95 = serializers.FloatField()
    cardinality = serializers.FloatField()
    l1_norm = serializers.FloatField()
    roughness = serializers.FloatField()
    roughness_aggregate = serializers.CharField()
    solve_time_s = serializers.FloatField()


class ManifestSerializer(serializers.Serializer):
    command = serializers.CharField()
    format_version = serializers.IntegerField()
    config = serializers.DictField()
    seeds = serializers.DictField(child=serializers.IntegerField(), required=False)
    files = serializers.ListField(child=serializers.CharField())


class RunRecordSerializer(serializers.ModelSerializer):
    class Meta:
        model = RunRecord
        fields = '__all__'


class FitReportSerializer(serializers.Serializer):
    method = serializers.CharField()
    passes = serializers.IntegerField()
    alpha = serializers.FloatField()
    ordering = serializers.CharField(allow_blank=True)
    frames = SolveReportSerializer(many=True)
