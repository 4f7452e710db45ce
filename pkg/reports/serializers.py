"""
Сериализаторы конфигурации запуска и строк выходных таблиц.
"""
import numpy as np
from django.conf import settings
from django.db import models
from rest_framework import serializers

from oscillator.exceptions import OscillatorError
from oscillator.params import DeformationParams, PhysicalParams, UnitsMode, derive_coefficients
from oscillator.spectrum import check_beta


class RunCommand(models.TextChoices):
    SPECTRUM = 'spectrum', 'Spectrum'
    WAVEFUNCTION = 'wavefunction', 'Wavefunction'
    VERIFY = 'verify', 'Verify'
    SWEEP = 'sweep', 'Sweep'


class BranchChoice(models.TextChoices):
    PLUS = 'plus', 'Plus'
    MINUS = 'minus', 'Minus'
    BOTH = 'both', 'Both'


class OutputFormat(models.TextChoices):
    CSV = 'csv', 'CSV'
    JSON = 'json', 'JSON'


class SweepParam(models.TextChoices):
    BETA = 'beta', 'beta'
    B_FIELD = 'b-field', 'b_field'


def sweep_values(start: float, stop: float, steps: int) -> list:
    return [float(value) for value in np.linspace(start, stop, steps)]


class RunConfigSerializer(serializers.Serializer):
    """
    Валидация слитой конфигурации (умолчания, файл, флаги).

    Значения из файла приходят строками, поля приводят их к числам.
    """
    command = serializers.ChoiceField(choices=RunCommand.choices)
    units = serializers.ChoiceField(choices=UnitsMode.choices)
    m0 = serializers.FloatField()
    omega = serializers.FloatField()
    c = serializers.FloatField()
    hbar = serializers.FloatField()
    e_abs = serializers.FloatField()
    b_field = serializers.FloatField(min_value=0.0)
    theta = serializers.FloatField()
    thetabar = serializers.FloatField()
    beta = serializers.FloatField(min_value=0.0)
    n_max = serializers.IntegerField(min_value=0)
    m_quantum = serializers.IntegerField()
    branch = serializers.ChoiceField(choices=BranchChoice.choices)
    grid_n = serializers.IntegerField(min_value=4)
    p_max = serializers.FloatField()
    format = serializers.ChoiceField(choices=OutputFormat.choices)
    out = serializers.CharField(allow_null=True, allow_blank=True, default=None)
    tolerance = serializers.FloatField()
    sweep_param = serializers.ChoiceField(choices=SweepParam.choices)
    sweep_start = serializers.FloatField()
    sweep_stop = serializers.FloatField()
    sweep_steps = serializers.IntegerField(min_value=1)

    def validate_p_max(self, value):
        if not value > 0:
            raise serializers.ValidationError("p_max должен быть положительным.")
        return value

    def validate_tolerance(self, value):
        if not value > 0:
            raise serializers.ValidationError("tolerance должен быть положительным.")
        return value

    def validate_out(self, value):
        return value or None

    def validate(self, data):
        """
        Проверки, требующие нескольких полей: ω̃ > 0, ϱ₁, ϱ₂ > 0 и β < β₀(m).
        Для sweep проверяется каждая точка диапазона.
        """
        points = [(data['beta'], data['b_field'])]
        if data['command'] == RunCommand.SWEEP:
            values = sweep_values(data['sweep_start'], data['sweep_stop'], data['sweep_steps'])
            if data['sweep_param'] == SweepParam.BETA:
                points = [(value, data['b_field']) for value in values]
            else:
                points = [(data['beta'], value) for value in values]

        for beta, b_field in points:
            try:
                phys = PhysicalParams(
                    m0=data['m0'], omega=data['omega'], c=data['c'], hbar=data['hbar'],
                    B=b_field, e_abs=data['e_abs'],
                )
                deformation = DeformationParams(theta_tilde=data['theta'], theta_bar=data['thetabar'], beta=beta)
                coeffs = derive_coefficients(phys, deformation, data['units'])
                check_beta(coeffs, beta, data['m_quantum'])
            except OscillatorError as exc:
                raise serializers.ValidationError(str(exc))
        return data


class SignificantFloatField(serializers.FloatField):
    """Число, округлённое до DIRAC_OUTPUT_DIGITS значащих цифр"""

    def to_representation(self, value):
        return float(f"{float(value):.{settings.DIRAC_OUTPUT_DIGITS - 1}e}")


class SpectrumRowSerializer(serializers.Serializer):
    n = serializers.IntegerField()
    m = serializers.IntegerField()
    branch = serializers.CharField()
    energy = SignificantFloatField()
    energy_expansion = SignificantFloatField()
    beta0 = SignificantFloatField(allow_null=True)
    dxmin_bound = SignificantFloatField(allow_null=True)

    columns = ('n', 'm', 'branch', 'energy', 'energy_expansion', 'beta0', 'dxmin_bound')


class BetaSweepRowSerializer(SpectrumRowSerializer):
    beta = SignificantFloatField()

    columns = ('beta',) + SpectrumRowSerializer.columns


class FieldSweepRowSerializer(SpectrumRowSerializer):
    b_field = SignificantFloatField()

    columns = ('b_field',) + SpectrumRowSerializer.columns


class WavefunctionRowSerializer(serializers.Serializer):
    p = SignificantFloatField()
    psi1 = SignificantFloatField()
    psi2 = SignificantFloatField()

    columns = ('p', 'psi1', 'psi2')


class VerificationRowSerializer(serializers.Serializer):
    mode = serializers.CharField()
    n = serializers.IntegerField()
    computed = SignificantFloatField()
    target = SignificantFloatField()
    rel_err = SignificantFloatField()
    passed = serializers.BooleanField()

    columns = ('mode', 'n', 'computed', 'target', 'rel_err', 'pass')

    def to_representation(self, instance):
        data = super().to_representation(instance)
        data['pass'] = data.pop('passed')
        return data
