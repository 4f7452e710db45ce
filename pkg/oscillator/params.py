"""
Физические параметры и производные коэффициенты деформированного
осциллятора Дирака.

Магнитное поле входит только через эффективную частоту
ω̃ = ω − ωc/2, поэтому все формулы ниже работают с ω̃, а вариант без поля
получается при B = 0 тем же путём.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from django.db import models

from .exceptions import BetaOutOfRange, InvalidDeformation, NonPositiveFrequency, OscillatorError, ZeroBeta

logger = logging.getLogger(__name__)


class UnitsMode(models.TextChoices):
    NATURAL = 'natural', 'Natural'
    GENERAL = 'general', 'General'


@dataclass(frozen=True)
class PhysicalParams:
    m0: float = 1.0
    omega: float = 1.0
    c: float = 1.0
    hbar: float = 1.0
    B: float = 0.0
    e_abs: float = 1.0

    def __post_init__(self):
        for name in ('m0', 'omega', 'c', 'hbar', 'e_abs'):
            value = getattr(self, name)
            if not value > 0:
                raise OscillatorError(f"{name} must be positive, got {value}")
        if not self.B >= 0:
            raise OscillatorError(f"B must be non-negative, got {self.B}")

    def in_units(self, units: str) -> 'PhysicalParams':
        """В натуральных единицах m0 = ω = c = ħ = 1, поле и заряд сохраняются"""
        if units == UnitsMode.NATURAL:
            return PhysicalParams(m0=1.0, omega=1.0, c=1.0, hbar=1.0, B=self.B, e_abs=self.e_abs)
        return self

    @property
    def cyclotron_frequency(self) -> float:
        return self.e_abs * self.B / (self.m0 * self.c)


@dataclass(frozen=True)
class DeformationParams:
    theta_tilde: float = 0.0
    theta_bar: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not self.beta >= 0:
            raise BetaOutOfRange(f"beta must be non-negative, got {self.beta}")


@dataclass(frozen=True)
class QuantumNumbers:
    n: int
    m: int

    def __post_init__(self):
        if self.n < 0:
            raise OscillatorError(f"n must be non-negative, got {self.n}")

    @property
    def abs_m(self) -> int:
        return abs(self.m)


@dataclass(frozen=True)
class DeformedCoefficients:
    """
    Все производные величины, которые потребляют спектр, волновые функции
    и оракулы.

    lam: λ = ϱ₂·m0·ħ·ω̃ (импульс²), k = ϱ₁/λ, u = λ√β.
    """
    rho1: float
    rho2: float
    lam: float
    omega_eff: float
    k: float
    u: float
    m0: float
    c: float
    hbar: float
    beta: float
    omega_c: float
    units: str

    @property
    def rest_energy(self) -> float:
        return self.m0 * self.c ** 2

    def zetas(self, m: int, beta: Optional[float] = None) -> Tuple[float, float]:
        """
        Параметры формы Пёшля-Теллера для канала m.

        Returns:
            (ζ₁, ζ₂) с ζ₁ = |m| + 1/2 и ζ₂ = 1/2 − (|m| + 1 − ϱ₁/(βλ))
        """
        beta = self.beta if beta is None else beta
        if beta <= 0:
            raise ZeroBeta("zeta parameters need beta > 0")
        abs_m = abs(m)
        zeta1 = abs_m + 0.5
        zeta2 = 0.5 - (abs_m + 1 - self.rho1 / (beta * self.lam))
        return zeta1, zeta2

    def u_for(self, beta: float) -> float:
        return self.lam * math.sqrt(beta)

    def characteristic_length(self) -> float:
        """l = √(ħ/(m0·ω̃)), характерная длина осциллятора"""
        return math.sqrt(self.hbar / (self.m0 * self.omega_eff))


def derive_coefficients(
    phys: PhysicalParams,
    deformation: DeformationParams,
    units: str = UnitsMode.NATURAL,
    with_field: bool = True,
) -> DeformedCoefficients:
    """
    Вычисляет ϱ₁, ϱ₂, λ, ω̃, k, u.

    Args:
        phys: физические константы и поле
        deformation: θ̃, θ̄ и β
        units: natural (m0 = ω = c = ħ = 1) или general
        with_field: учитывать ли сдвиг частоты магнитным полем

    Raises:
        NonPositiveFrequency: если ω̃ ≤ 0
        InvalidDeformation: если ϱ₁ ≤ 0 или ϱ₂ ≤ 0
    """
    phys = phys.in_units(units)
    omega_c = phys.cyclotron_frequency if with_field else 0.0
    omega_eff = phys.omega - omega_c / 2 if with_field else phys.omega
    if not omega_eff > 0:
        raise NonPositiveFrequency(
            f"effective frequency omega - omega_c/2 = {omega_eff} is not positive "
            f"(omega_c = {omega_c})"
        )

    rho1 = 1 + phys.m0 * omega_eff * deformation.theta_tilde / (2 * phys.hbar)
    rho2 = 1 + deformation.theta_bar / (2 * phys.m0 * omega_eff * phys.hbar)
    if not (rho1 > 0 and rho2 > 0):
        raise InvalidDeformation(f"rho1 = {rho1}, rho2 = {rho2}; both must be positive")

    lam = rho2 * phys.m0 * phys.hbar * omega_eff
    coeffs = DeformedCoefficients(
        rho1=rho1,
        rho2=rho2,
        lam=lam,
        omega_eff=omega_eff,
        k=rho1 / lam,
        u=lam * math.sqrt(deformation.beta),
        m0=phys.m0,
        c=phys.c,
        hbar=phys.hbar,
        beta=deformation.beta,
        omega_c=omega_c,
        units=units,
    )
    logger.debug(f"Derived coefficients: rho1={rho1}, rho2={rho2}, lambda={lam}, omega_eff={omega_eff}")
    return coeffs
