from dataclasses import asdict, dataclass, field

from django import forms

from .conf import DEFAULTS
from .phase import GaugeSpec
from .verification import SUITE_CHOICES

SUBCOMMANDS = ('info', 'truncate', 'tsvd', 'geomean', 'lti', 'verify')
CERTIFY_CHOICES = ('none', 'gain', 'phase')


class PathListField(forms.Field):
    """One path or a list of paths"""

    def to_python(self, value):
        if value in self.empty_values:
            return []
        if isinstance(value, (str, bytes)) or not hasattr(value, '__iter__'):
            value = [value]
        return [str(v) for v in value]


class ToleranceField(forms.Field):
    """``KEY=VALUE`` overrides of the TPHASE settings"""

    def to_python(self, value):
        if value in self.empty_values:
            return {}
        if isinstance(value, dict):
            items = list(value.items())
        else:
            if isinstance(value, str):
                value = [value]
            items = []
            for item in value:
                key, sep, raw = str(item).partition('=')
                if not sep:
                    raise forms.ValidationError(f"tolerance override '{item}' is not KEY=VALUE")
                items.append((key.strip(), raw.strip()))

        overrides = {}
        for key, raw in items:
            key = key.upper()
            if key not in DEFAULTS:
                raise forms.ValidationError(f"unknown setting '{key}'")
            kind = type(DEFAULTS[key])
            try:
                overrides[key] = kind(float(raw)) if kind is int else float(raw)
            except (TypeError, ValueError):
                raise forms.ValidationError(f"{key} needs a number, got '{raw}'")
        return dict(sorted(overrides.items()))


class RunConfigForm(forms.Form):
    """Validates the options of one command run; unknown keys are errors"""
    subcommand = forms.ChoiceField(choices=[(c, c) for c in SUBCOMMANDS])
    inputs = PathListField(required=False)
    r = forms.IntegerField(required=False, min_value=0)
    gauge = forms.CharField(required=False)
    grid_points = forms.IntegerField(required=False, min_value=2)
    freq_min = forms.FloatField(required=False)
    freq_max = forms.FloatField(required=False)
    seed = forms.IntegerField(required=False, min_value=0)
    trials = forms.IntegerField(required=False, min_value=1)
    suite = forms.ChoiceField(required=False, choices=[(c, c) for c in SUITE_CHOICES])
    with_system = forms.CharField(required=False)
    certify = forms.ChoiceField(required=False, choices=[(c, c) for c in CERTIFY_CHOICES])
    tol = ToleranceField(required=False)
    output = forms.CharField(required=False)
    sidecar = forms.CharField(required=False)
    csv = forms.CharField(required=False)

    def clean(self):
        cleaned = super().clean()
        unknown = sorted(set(self.data) - set(self.fields))
        if unknown:
            raise forms.ValidationError(f"unknown option(s): {', '.join(unknown)}")
        return cleaned

    def clean_gauge(self):
        text = self.cleaned_data.get('gauge')
        if not text:
            return ''
        try:
            return str(GaugeSpec.parse(text))
        except ValueError as exc:
            raise forms.ValidationError(str(exc))

    def clean_freq_min(self):
        value = self.cleaned_data.get('freq_min')
        if value is not None and value <= 0:
            raise forms.ValidationError('the lowest sweep frequency must be positive')
        return value

    def clean_freq_max(self):
        value = self.cleaned_data.get('freq_max')
        low = self.cleaned_data.get('freq_min')
        if value is not None and low is not None and value <= low:
            raise forms.ValidationError('freq_max must exceed freq_min')
        return value

    def errors_as_text(self):
        messages = []
        for name, errors in self.errors.items():
            prefix = '' if name == '__all__' else f'{name}: '
            messages.extend(f'{prefix}{error}' for error in errors)
        return '; '.join(messages)

    def to_config(self):
        data = {name: value for name, value in self.cleaned_data.items() if value not in (None, '')}
        return RunConfig(**data)


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    inputs: list = field(default_factory=list)
    r: int = None
    gauge: str = ''
    grid_points: int = None
    freq_min: float = None
    freq_max: float = None
    seed: int = None
    trials: int = None
    suite: str = None
    with_system: str = None
    certify: str = None
    tol: dict = field(default_factory=dict)
    output: str = None
    sidecar: str = None
    csv: str = None

    @property
    def psi(self):
        return GaugeSpec.parse(self.gauge) if self.gauge else None

    def as_dict(self):
        """Canonical form: defaults and empty values dropped"""
        return {key: value for key, value in asdict(self).items() if value not in (None, '', [], {})}

    @classmethod
    def from_dict(cls, data):
        form = RunConfigForm(data)
        if not form.is_valid():
            raise ValueError(form.errors_as_text())
        return form.to_config()
