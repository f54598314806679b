import enum
from dataclasses import dataclass, field

from rest_framework import serializers

from fronts.dispersion import DispersionModel, Kind, SourceSpec
from fronts.exceptions import DomainError
from fronts.oracle import QuadratureSettings


class RunMethod(str, enum.Enum):
    ORACLE = "oracle"
    ANALYTIC = "analytic"
    BOTH = "both"


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"


@dataclass(frozen=True)
class Grid:
    x: tuple
    t: tuple

    def points(self):
        """Grid points in output order: x outer, t inner."""
        return [(x, t) for x in self.x for t in self.t]


@dataclass(frozen=True)
class OutputSpec:
    format: OutputFormat = OutputFormat.CSV
    path: str | None = None


@dataclass(frozen=True)
class RunConfig:
    model: DispersionModel
    source: SourceSpec
    grid: Grid
    method: RunMethod = RunMethod.ORACLE
    settings: QuadratureSettings = field(default_factory=QuadratureSettings)
    output: OutputSpec = field(default_factory=OutputSpec)


@dataclass
class RunRecord:
    """
    One finished run. ``timing`` is kept for logging only; writers never
    put it into a file.
    """

    command: str
    config: RunConfig | None
    columns: list
    rows: list
    versions: dict
    extra: dict = field(default_factory=dict)
    timing: float = 0.0

    @property
    def failures(self):
        return [row for row in self.rows if row.get("error")]


class ComplexField(serializers.Field):
    """
    A complex number as ``[re, im]``; a bare number is read as real.
    """

    default_error_messages = {
        "invalid": "Expected a number or an [re, im] pair.",
    }

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail("invalid")
        if isinstance(data, (int, float)):
            return complex(data)
        if isinstance(data, (list, tuple)) and len(data) == 2:
            if all(isinstance(part, (int, float)) and not isinstance(part, bool) for part in data):
                return complex(data[0], data[1])
        self.fail("invalid")

    def to_representation(self, value):
        value = complex(value)
        return [value.real, value.imag]


class EnumChoiceField(serializers.ChoiceField):
    """ChoiceField over a str-valued Enum; validated data holds enum members."""

    def __init__(self, enum_class, **kwargs):
        self.enum_class = enum_class
        super().__init__(choices=[member.value for member in enum_class], **kwargs)

    def to_internal_value(self, data):
        return self.enum_class(super().to_internal_value(data))

    def to_representation(self, value):
        return self.enum_class(value).value


class DispersionModelSerializer(serializers.Serializer):
    """
    Medium block. Physical units are accepted; ``hbar`` says how they relate
    to the ℏ = 1 units used internally.
    """

    kind = EnumChoiceField(Kind)
    mass = serializers.FloatField()
    potential = serializers.FloatField(default=0.0)
    light_speed = serializers.FloatField(required=False, allow_null=True, default=None)
    hbar = serializers.FloatField(default=1.0)

    def validate_mass(self, value):
        if value <= 0:
            raise serializers.ValidationError("Mass must be greater than zero.")
        return value

    def validate_hbar(self, value):
        if value <= 0:
            raise serializers.ValidationError("hbar must be greater than zero.")
        return value

    def validate_light_speed(self, value):
        if value is not None and value <= 0:
            raise serializers.ValidationError("Light speed must be greater than zero.")
        return value

    def validate(self, attrs):
        if attrs["kind"] is Kind.RELATIVISTIC and attrs.get("light_speed") is None:
            raise serializers.ValidationError({"light_speed": "Required for the relativistic model."})
        return attrs

    def create(self, validated_data):
        return DispersionModel(**validated_data)


class SourceSpecSerializer(serializers.Serializer):
    amplitude = ComplexField(default=1.0)
    carrier = serializers.FloatField()
    band = serializers.FloatField(required=False, allow_null=True, default=None)

    def validate_amplitude(self, value):
        if value == 0:
            raise serializers.ValidationError("Amplitude must be nonzero.")
        return value

    def validate_band(self, value):
        if value is not None and value <= 0:
            raise serializers.ValidationError("Band half-width must be greater than zero.")
        return value

    def create(self, validated_data):
        return SourceSpec(**validated_data)


class GridSerializer(serializers.Serializer):
    x = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    t = serializers.ListField(child=serializers.FloatField(), allow_empty=False)

    def validate_x(self, value):
        if any(x < 0 for x in value):
            raise serializers.ValidationError("Positions must be non-negative (the source sits at x = 0).")
        return value

    def create(self, validated_data):
        return Grid(x=tuple(validated_data["x"]), t=tuple(validated_data["t"]))


class QuadratureSettingsSerializer(serializers.Serializer):
    """Every field is optional; missing ones come from ``settings.FRONTWAVES``."""

    rel_tol = serializers.FloatField(required=False)
    abs_tol = serializers.FloatField(required=False)
    max_subdivisions = serializers.IntegerField(required=False)
    pv_window = serializers.FloatField(required=False)

    def validate_rel_tol(self, value):
        if value <= 0:
            raise serializers.ValidationError("rel_tol must be greater than zero.")
        return value

    def validate_abs_tol(self, value):
        if value < 0:
            raise serializers.ValidationError("abs_tol must not be negative.")
        return value

    def validate_max_subdivisions(self, value):
        if value < 64:
            raise serializers.ValidationError("max_subdivisions must be at least 64.")
        return value

    def validate_pv_window(self, value):
        if value <= 0:
            raise serializers.ValidationError("pv_window must be greater than zero.")
        return value

    def create(self, validated_data):
        return QuadratureSettings.from_settings(**validated_data)


class OutputSerializer(serializers.Serializer):
    format = EnumChoiceField(OutputFormat, default=OutputFormat.CSV)
    path = serializers.CharField(required=False, allow_null=True, default=None)

    def create(self, validated_data):
        return OutputSpec(**validated_data)


class RunConfigSerializer(serializers.Serializer):
    """
    Whole run configuration. ``save()`` builds a RunConfig; serializing a
    RunConfig back gives JSON that re-parses to an equal RunConfig.
    """

    model = DispersionModelSerializer()
    source = SourceSpecSerializer()
    grid = GridSerializer()
    method = EnumChoiceField(RunMethod, default=RunMethod.ORACLE)
    settings = QuadratureSettingsSerializer(required=False)
    output = OutputSerializer(required=False)

    def validate(self, attrs):
        model = DispersionModelSerializer().create(attrs["model"])
        source = SourceSpecSerializer().create(attrs["source"])
        if source.is_band_limited:
            if model.is_relativistic and attrs["method"] is not RunMethod.ORACLE:
                raise serializers.ValidationError(
                    {"method": "The analytic decomposition does not cover relativistic band-limited sources."}
                )
            try:
                source.check_band(model)
            except DomainError as exc:
                raise serializers.ValidationError({"source": str(exc)})
        return attrs

    def create(self, validated_data):
        settings = QuadratureSettingsSerializer().create(validated_data.get("settings") or {})
        output = OutputSerializer().create(validated_data.get("output") or {"format": OutputFormat.CSV, "path": None})
        return RunConfig(
            model=DispersionModelSerializer().create(validated_data["model"]),
            source=SourceSpecSerializer().create(validated_data["source"]),
            grid=GridSerializer().create(validated_data["grid"]),
            method=validated_data["method"],
            settings=settings,
            output=output,
        )


def flatten_errors(errors, prefix=""):
    """DRF error dicts as ``field.path: message`` lines."""
    lines = []
    if isinstance(errors, dict):
        for key, value in errors.items():
            path = key if not prefix else f"{prefix}.{key}"
            if key == "non_field_errors" and prefix:
                path = prefix
            lines.extend(flatten_errors(value, path))
    elif isinstance(errors, list):
        for index, value in enumerate(errors):
            if isinstance(value, (dict, list)):
                lines.extend(flatten_errors(value, f"{prefix}[{index}]"))
            else:
                lines.append(f"{prefix}: {value}")
    else:
        lines.append(f"{prefix}: {errors}")
    return lines


def parse_config(data):
    """Validate a decoded config mapping and return a RunConfig."""
    if not isinstance(data, dict) or not data:
        raise serializers.ValidationError({"non_field_errors": ["The configuration is empty."]})
    serializer = RunConfigSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def config_payload(config):
    return RunConfigSerializer(config).data
