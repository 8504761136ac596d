import io

from rest_framework import serializers
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from index_lab.fitting import clean
from index_lab.sobolev import IndexReport


def render_json(data) -> bytes:
    """Stable JSON bytes: fixed indent, keys in insertion order, trailing newline."""
    return JSONRenderer().render(clean(data), renderer_context={"indent": 2}) + b"\n"


def parse_json(raw: bytes):
    return JSONParser().parse(io.BytesIO(raw))


class IndexReportSerializer(serializers.Serializer):
    """Flat record of an index estimate; ``save()`` rebuilds the IndexReport."""
    alpha_cont = serializers.FloatField(allow_null=True)
    alpha_gard = serializers.FloatField(allow_null=True)
    sobolev_index = serializers.FloatField(allow_null=True)
    beta = serializers.FloatField(allow_null=True, required=False, default=None)
    gamma = serializers.FloatField(allow_null=True, required=False, default=None)
    verdicts = serializers.JSONField(required=False, default=dict)
    diagnostics = serializers.JSONField(required=False, default=dict)

    def validate_sobolev_index(self, value):
        if value is not None and not 0.0 < value <= 2.0:
            raise serializers.ValidationError("sobolev_index must lie in (0, 2]")
        return value

    def create(self, validated_data):
        return IndexReport(**validated_data)


def report_to_json(report: IndexReport, header: dict = None) -> bytes:
    data = dict(IndexReportSerializer(report).data)
    if header is not None:
        data = {"defaults": header, **data}
    return render_json(data)


def report_from_json(raw: bytes) -> IndexReport:
    data = parse_json(raw)
    data.pop("defaults", None)
    serializer = IndexReportSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()
