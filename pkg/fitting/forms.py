from django import forms
from django.core.exceptions import ValidationError

from .exceptions import ContractError
from .ordering import STATIC_KINDS, OrderingKind, OrderingStrategy
from .solvers import Method
from .synthetic import CHARACTER_PRESETS, preset

METHOD_CHOICES = [(m.value, m.value) for m in Method]
ORDERING_CHOICES = [(k.value, k.value) for k in OrderingKind]
CHARACTER_CHOICES = [(name, name) for name in CHARACTER_PRESETS]


class NumberListField(forms.Field):
    """Comma-separated numbers (or an already parsed sequence)."""

    def __init__(self, *, number=float, min_value=None, **kwargs):
        self.number = number
        self.min_value = min_value
        super().__init__(**kwargs)

    def to_python(self, value):
        if value in self.empty_values:
            return ()
        if isinstance(value, str):
            value = [part.strip() for part in value.split(',') if part.strip()]
        try:
            return tuple(self.number(v) for v in value)
        except (TypeError, ValueError):
            raise ValidationError('Enter a comma-separated list of numbers.', code='invalid')

    def validate(self, value):
        super().validate(value)
        if self.min_value is not None and any(v < self.min_value for v in value):
            raise ValidationError(f'Every value must be >= {self.min_value}.', code='min_value')


class ChoiceListField(NumberListField):
    def __init__(self, *, choices, **kwargs):
        self.choices = [value for value, _ in choices]
        super().__init__(number=str, **kwargs)

    def validate(self, value):
        super().validate(value)
        unknown = [v for v in value if v not in self.choices]
        if unknown:
            raise ValidationError(f'Unknown choice(s): {", ".join(unknown)}.', code='invalid_choice')


def ordering_strategy(cleaned_data, kind):
    return OrderingStrategy(
        kind,
        seed=cleaned_data['seed'] if kind == OrderingKind.RANDOM else None,
        normalized=cleaned_data.get('normalized_correlation', False),
    )


class OutputForm(forms.Form):
    out = forms.CharField()
    seed = forms.IntegerField(min_value=0)


class GenerateForm(OutputForm):
    character = forms.ChoiceField(choices=CHARACTER_CHOICES)
    blendshapes = forms.IntegerField(min_value=1, required=False)
    vertices = forms.IntegerField(min_value=1, required=False)
    pairs = forms.IntegerField(min_value=0, required=False)
    triplets = forms.IntegerField(min_value=0, required=False)
    quads = forms.IntegerField(min_value=0, required=False)
    no_corrections = forms.BooleanField(required=False)
    orthogonal = forms.BooleanField(required=False)
    frames = forms.IntegerField(min_value=0, required=False)
    sparsity = forms.IntegerField(min_value=0)
    sigma2 = forms.FloatField(min_value=0)
    correction_scale = forms.FloatField(min_value=0)
    binary = forms.BooleanField(required=False)

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        overrides = {
            'm': cleaned_data.get('blendshapes'),
            'n': cleaned_data.get('vertices'),
            'pairs': cleaned_data.get('pairs'),
            'triplets': cleaned_data.get('triplets'),
            'quads': cleaned_data.get('quads'),
            'sparsity': cleaned_data['sparsity'],
            'correction_scale': cleaned_data['correction_scale'],
            'orthogonal': cleaned_data.get('orthogonal', False),
            'seed': cleaned_data['seed'],
        }
        if cleaned_data.get('no_corrections'):
            overrides.update(pairs=0, triplets=0, quads=0)
        try:
            cleaned_data['spec'] = preset(cleaned_data['character'], **overrides)
        except ContractError as exc:
            raise ValidationError(str(exc))
        return cleaned_data


class SequenceForm(OutputForm):
    """A rig, the noisy targets to fit and the clean meshes to score against."""

    rig = forms.CharField()
    frames = forms.CharField()
    reference = forms.CharField(required=False)
    threads = forms.IntegerField(min_value=1)
    omit_timing = forms.BooleanField(required=False)


class FitForm(SequenceForm):
    method = forms.ChoiceField(choices=METHOD_CHOICES)
    alpha = forms.FloatField(min_value=0)
    passes = forms.IntegerField(min_value=1)
    ordering = forms.ChoiceField(choices=ORDERING_CHOICES)
    normalized_correlation = forms.BooleanField(required=False)
    seol_clip = forms.BooleanField(required=False)
    check_descent = forms.BooleanField(required=False)

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        kind = OrderingKind(cleaned_data['ordering'])
        method = Method(cleaned_data['method'])
        if method == Method.SEOL and kind not in STATIC_KINDS:
            raise ValidationError('Seol accepts static orderings only.')
        cleaned_data['strategy'] = ordering_strategy(cleaned_data, kind)
        return cleaned_data


class EvalForm(OutputForm):
    rig = forms.CharField()
    weights = forms.CharField()
    reference = forms.CharField()
    reports = forms.CharField(required=False)
    omit_timing = forms.BooleanField(required=False)


class SweepForm(SequenceForm):
    reference = forms.CharField()
    methods = ChoiceListField(choices=METHOD_CHOICES)
    alpha_grid = NumberListField(min_value=0)
    passes_grid = NumberListField(number=int, min_value=1)
    ordering = forms.ChoiceField(choices=ORDERING_CHOICES)
    normalized_correlation = forms.BooleanField(required=False)

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        kind = OrderingKind(cleaned_data['ordering'])
        if Method.SEOL.value in cleaned_data['methods'] and kind not in STATIC_KINDS:
            raise ValidationError('Seol accepts static orderings only.')
        cleaned_data['strategy'] = ordering_strategy(cleaned_data, kind)
        return cleaned_data


class CompareOrderingsForm(SequenceForm):
    reference = forms.CharField()
    method = forms.ChoiceField(choices=[(m.value, m.value) for m in (Method.CD_QUARTIC, Method.CD_LINEAR)])
    alpha = forms.FloatField(min_value=0)
    passes = forms.IntegerField(min_value=1)
    orderings = ChoiceListField(choices=ORDERING_CHOICES)
    normalized_correlation = forms.BooleanField(required=False)


class BenchmarkForm(SequenceForm):
    reference = forms.CharField()
    weights = forms.CharField()
    character = forms.ChoiceField(choices=CHARACTER_CHOICES)
    passes = forms.IntegerField(min_value=1)


class NoiseStudyForm(OutputForm):
    rig = forms.CharField()
    reference = forms.CharField()
    frames = forms.IntegerField(min_value=1)
    sigma2_grid = NumberListField(min_value=0)
    alpha_grid = NumberListField(min_value=0)
    passes = forms.IntegerField(min_value=1)
    threads = forms.IntegerField(min_value=1)
