"""
Flat records for the parameter families.

A record is a mapping with a ``family`` key plus the family's parameters;
vectors and matrices are comma lists (matrices row-major). Records come from
run files as strings, so every field parses text as well as native values.
"""
import enum
from pathlib import Path

from decouple import Csv
from rest_framework import serializers

from symbol_core.constants import DriftConvention, Family, Truncation
from symbol_core.families import (
    BrownianParams,
    CauchyParams,
    CGMYParams,
    DensityParams,
    GHParams,
    NIGParams,
    StableParams,
    StudentTParams,
)
from symbol_core.utils import InvalidParams


class FloatListField(serializers.ListField):
    child = serializers.FloatField()

    def to_internal_value(self, data):
        if isinstance(data, str):
            data = Csv()(data)
        elif not isinstance(data, (list, tuple)):
            data = [data]
        return super().to_internal_value(list(data))


class FamilyRecordSerializer(serializers.Serializer):
    params_class = None

    def build(self, attrs):
        return self.params_class(**attrs)

    def validate(self, attrs):
        try:
            attrs["_params"] = self.build(attrs)
        except InvalidParams as exc:
            raise serializers.ValidationError(str(exc))
        return attrs

    def create(self, validated_data):
        return validated_data["_params"]

    def to_representation(self, instance):
        data = super().to_representation(instance)
        data = {key: value.value if isinstance(value, enum.Enum) else value for key, value in data.items()}
        return {"family": instance.family.value, **data}


class BrownianSerializer(FamilyRecordSerializer):
    params_class = BrownianParams

    sigma = FloatListField(default=[1.0])
    drift = FloatListField(default=[0.0])


class NIGSerializer(FamilyRecordSerializer):
    params_class = NIGParams

    alpha = serializers.FloatField()
    beta = FloatListField(default=[0.0])
    delta = serializers.FloatField(default=1.0)
    mu = FloatListField(required=False, allow_null=True, default=None)
    Delta = FloatListField(required=False, allow_null=True, default=None)


class CauchySerializer(FamilyRecordSerializer):
    params_class = CauchyParams

    c = serializers.FloatField(default=1.0)
    gamma = FloatListField(default=[0.0])


class StudentTSerializer(FamilyRecordSerializer):
    params_class = StudentTParams

    f = serializers.FloatField()
    delta = serializers.FloatField(default=1.0)
    mu = serializers.FloatField(default=0.0)


class CGMYSerializer(FamilyRecordSerializer):
    params_class = CGMYParams

    C = serializers.FloatField()
    G = serializers.FloatField()
    M = serializers.FloatField()
    Y = serializers.FloatField()
    drift_convention = serializers.ChoiceField(
        choices=[convention.value for convention in DriftConvention],
        required=False,
        allow_null=True,
        default=None,
    )

    def validate_Y(self, value):
        if not 0.0 <= value < 2.0:
            raise serializers.ValidationError(f"CGMY requires 0 <= Y < 2 (got Y={value:g})")
        return value


class StableSerializer(FamilyRecordSerializer):
    params_class = StableParams

    alpha = serializers.FloatField()
    c = serializers.FloatField(default=1.0)
    beta = serializers.FloatField(default=0.0)
    tau = serializers.FloatField(default=0.0)


class DensityTableField(serializers.CharField):
    """Path of a two-column (x, f) CSV; must exist when the record is parsed."""

    def to_internal_value(self, data):
        path = Path(super().to_internal_value(data))
        if not path.is_file():
            raise serializers.ValidationError(f"density table {path} does not exist")
        return path


class GHSerializer(FamilyRecordSerializer):
    params_class = GHParams

    C1 = serializers.FloatField()
    C2 = serializers.FloatField(default=0.0)
    C3 = serializers.FloatField(default=0.0)
    density_table = DensityTableField(write_only=True)
    drift = serializers.FloatField(default=0.0)

    def build(self, attrs):
        from levy_measure.densities import load_density_table

        table_x, table_f = load_density_table(attrs["density_table"])
        return GHParams(
            C1=attrs["C1"], C2=attrs["C2"], C3=attrs["C3"],
            table_x=table_x, table_f=table_f, drift=attrs["drift"],
        )


class DensitySerializer(FamilyRecordSerializer):
    params_class = DensityParams

    density_table = DensityTableField(write_only=True)
    hint_Y = serializers.FloatField(required=False, allow_null=True, default=None, write_only=True)
    hint_C = serializers.FloatField(required=False, allow_null=True, default=None, write_only=True)
    drift = serializers.FloatField(default=0.0)
    sigma = serializers.FloatField(default=0.0)
    truncation = serializers.ChoiceField(choices=[t.value for t in Truncation], default=Truncation.IDENTITY.value)

    def build(self, attrs):
        from levy_measure.densities import load_density_table, tabulated_density

        table_x, table_f = load_density_table(attrs["density_table"])
        density = tabulated_density(
            table_x, table_f, hint_Y=attrs["hint_Y"], hint_C=attrs["hint_C"],
            label=attrs["density_table"].stem,
        )
        return DensityParams(
            density=density, drift=attrs["drift"], sigma=attrs["sigma"],
            truncation=attrs["truncation"], label=attrs["density_table"].stem,
        )


FAMILY_SERIALIZERS = {
    Family.BROWNIAN: BrownianSerializer,
    Family.NIG: NIGSerializer,
    Family.CAUCHY: CauchySerializer,
    Family.STUDENT_T: StudentTSerializer,
    Family.CGMY: CGMYSerializer,
    Family.STABLE: StableSerializer,
    Family.GH: GHSerializer,
    Family.FROM_DENSITY: DensitySerializer,
}


def params_from_record(record: dict):
    """Parameter record for a flat mapping; raises ``serializers.ValidationError``."""
    data = dict(record)
    try:
        family = Family(str(data.pop("family", "")).strip().lower())
        serializer_class = FAMILY_SERIALIZERS[family]
    except (ValueError, KeyError):
        raise serializers.ValidationError({"family": f"unknown process family {record.get('family')!r}"})
    serializer = serializer_class(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def record_from_params(params) -> dict:
    return dict(FAMILY_SERIALIZERS[params.family](params).data)
