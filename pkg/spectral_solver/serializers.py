from rest_framework import serializers

from index_lab.serializers import parse_json, render_json
from spectral_solver.forms import FormReport


class FormReportSerializer(serializers.Serializer):
    alpha = serializers.FloatField()
    trials = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField()
    continuity_constant = serializers.FloatField(allow_null=True)
    continuity_bound = serializers.FloatField(allow_null=True)
    continuity_trend = serializers.FloatField(allow_null=True)
    garding_c2 = serializers.FloatField(allow_null=True)
    garding_c3 = serializers.FloatField(allow_null=True)
    garding_trend = serializers.FloatField(allow_null=True)
    garding_margin = serializers.FloatField(allow_null=True)
    continuity_passed = serializers.BooleanField()
    garding_passed = serializers.BooleanField()

    def validate_alpha(self, value):
        if not 0.0 < value <= 2.0:
            raise serializers.ValidationError("alpha must lie in (0, 2]")
        return value

    def create(self, validated_data):
        return FormReport(**validated_data)


def form_report_to_json(report: FormReport, header: dict = None) -> bytes:
    data = dict(FormReportSerializer(report).data)
    data["passed"] = report.passed
    if header is not None:
        data = {"defaults": header, **data}
    return render_json(data)


def form_report_from_json(raw: bytes) -> FormReport:
    data = parse_json(raw)
    data.pop("defaults", None)
    data.pop("passed", None)
    serializer = FormReportSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()
