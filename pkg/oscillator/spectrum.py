"""
Замкнутые формулы спектра: некоммутативный случай, случай минимальной
длины, граница β₀, разложение первого порядка и асимптотика больших n.

Каноническая форма записана в общих единицах:
    E² − m0²c⁴ = 4c²·ϱ₁·λ·n + 4c²·β·λ²·n²
Натуральные единицы задаются выбором параметров, отдельного пути нет.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional

from django.db import models

from .exceptions import BetaOutOfRange, InvalidM, ZeroBeta
from .params import DeformedCoefficients

logger = logging.getLogger(__name__)


class Branch(models.TextChoices):
    PLUS = 'plus', '+'
    MINUS = 'minus', '−'

    @property
    def sign(self) -> float:
        return 1.0 if self == Branch.PLUS else -1.0


@dataclass(frozen=True)
class EnergyLevel:
    n: int
    branch: str
    value: float


@dataclass(frozen=True)
class BetaBound:
    beta0: float
    dx_min_bound: float


def _level(n: int, branch: str, magnitude: float) -> EnergyLevel:
    branch = Branch(branch)
    return EnergyLevel(n=n, branch=branch.value, value=branch.sign * magnitude)


def _check_n(n: int):
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")


def beta_limit(coeffs: DeformedCoefficients, m: int) -> float:
    """Порог ζ₂ > 1 для канала |m|: β < ϱ₁ / ((|m| + 3/2)·λ)"""
    return coeffs.rho1 / ((abs(m) + 1.5) * coeffs.lam)


def beta_bound(coeffs: DeformedCoefficients, m: int) -> BetaBound:
    """
    Максимальное допустимое β и соответствующая граница минимальной длины.

    Raises:
        InvalidM: если m < 1
    """
    if m < 1:
        raise InvalidM(f"beta bound is defined for m >= 1, got m = {m}")
    beta0 = beta_limit(coeffs, m)
    return BetaBound(beta0=beta0, dx_min_bound=coeffs.hbar * math.sqrt(beta0))


def check_beta(coeffs: DeformedCoefficients, beta: float, m: Optional[int] = None):
    """
    Проверяет β для выбранного канала m.

    Raises:
        BetaOutOfRange: если β < 0 или β ≥ β₀(m)
    """
    if beta < 0:
        raise BetaOutOfRange(f"beta must be non-negative, got {beta}")
    if beta == 0 or m is None:
        return
    if m == 0:
        logger.warning("m = 0 gives zeta1 = 1/2; the spectrum is evaluated but the bound-state construction needs |m| >= 1")
    limit = beta_limit(coeffs, m)
    if beta >= limit:
        raise BetaOutOfRange(f"beta = {beta} must stay below beta0 = {limit} for m = {m}")


def energy_from_zeta(coeffs: DeformedCoefficients, n: int, zeta: float, branch: str = Branch.PLUS) -> EnergyLevel:
    """
    E = ±√(m0²c⁴ + c²ζ), ζ = (E² − m0²c⁴)/c².

    При отрицательном подкоренном выражении модуль берётся со знаком минус.
    """
    radicand = coeffs.rest_energy ** 2 + coeffs.c ** 2 * zeta
    return _level(n, branch, math.copysign(math.sqrt(abs(radicand)), radicand))


def energy_nc(coeffs: DeformedCoefficients, n: int, branch: str = Branch.PLUS) -> EnergyLevel:
    """±√(m0²c⁴ + 4c²·ϱ₁·λ·n); при ω → ω̃ это же уровень в магнитном поле"""
    _check_n(n)
    return energy_from_zeta(coeffs, n, 4 * coeffs.rho1 * coeffs.lam * n, branch)


def energy_ml(coeffs: DeformedCoefficients, beta: float, n: int, branch: str = Branch.PLUS,
              m: Optional[int] = None) -> EnergyLevel:
    """
    ±√(m0²c⁴ + 4c²ϱ₁λn + 4c²βλ²n²).

    Не зависит от m; m передаётся только чтобы проверить β < β₀(m).
    """
    _check_n(n)
    check_beta(coeffs, beta, m)
    zeta = 4 * coeffs.rho1 * coeffs.lam * n + 4 * beta * coeffs.lam ** 2 * n ** 2
    return energy_from_zeta(coeffs, n, zeta, branch)


def xi_bar_squared(coeffs: DeformedCoefficients, beta: float, n: int, m: int) -> float:
    """ξ̄²_n = u²(ζ₁ + ζ₂ + 2n)²"""
    zeta1, zeta2 = coeffs.zetas(m, beta)
    return coeffs.u_for(beta) ** 2 * (zeta1 + zeta2 + 2 * n) ** 2


def energy_from_xi_bar_squared(coeffs: DeformedCoefficients, beta: float, n: int, value: float,
                               branch: str = Branch.PLUS) -> EnergyLevel:
    """ξ² = ξ̄² − ϱ₁²/β, затем E = ±√(m0²c⁴ + c²ξ²)"""
    if beta <= 0:
        raise ZeroBeta("Pöschl-Teller mapping needs beta > 0")
    xi_sq = value - coeffs.rho1 ** 2 / beta
    return energy_from_zeta(coeffs, n, xi_sq, branch)


def energy_pt(coeffs: DeformedCoefficients, beta: float, n: int, m: int, branch: str = Branch.PLUS) -> EnergyLevel:
    """Тот же уровень через квантование Пёшля-Теллера в канале m"""
    _check_n(n)
    check_beta(coeffs, beta, m)
    return energy_from_xi_bar_squared(coeffs, beta, n, xi_bar_squared(coeffs, beta, n, m), branch)


def energy_ml_expansion(coeffs: DeformedCoefficients, beta: float, n: int, branch: str = Branch.PLUS,
                        m: Optional[int] = None) -> EnergyLevel:
    """
    Первый порядок по β: E⁰_n·(1 + β·Δ_n), Δ_n = 2c²λ²n²/(E⁰_n)².

    В натуральных единицах при ϱ₂ = 1 совпадает с множителем
    1 + 2βn²/(1 + 4ϱ₁n).
    """
    check_beta(coeffs, beta, m)
    base = energy_nc(coeffs, n, Branch.PLUS).value
    delta = 2 * coeffs.c ** 2 * coeffs.lam ** 2 * n ** 2 / base ** 2
    return _level(n, branch, base * (1 + beta * delta))


def large_n_frequency(coeffs: DeformedCoefficients, beta: float) -> float:
    """
    ω̄ = 2c√β·λ/ħ, частота «жёсткого» осциллятора при больших n.

    Raises:
        ZeroBeta: при β = 0
    """
    if beta <= 0:
        raise ZeroBeta("large-n frequency is defined for beta > 0")
    return 2 * coeffs.c * math.sqrt(beta) * coeffs.lam / coeffs.hbar


def large_n_asymptote(coeffs: DeformedCoefficients, beta: float, n: int) -> float:
    """ħω̄·(n + ϱ₁/(2βλ)): асимптота вместе с постоянным сдвигом"""
    omega_bar = large_n_frequency(coeffs, beta)
    return coeffs.hbar * omega_bar * (n + coeffs.rho1 / (2 * beta * coeffs.lam))


def energy_levels(coeffs: DeformedCoefficients, beta: float, n_values: Iterable[int],
                  branches: Iterable[str] = (Branch.PLUS, Branch.MINUS),
                  m: Optional[int] = None) -> List[EnergyLevel]:
    """Лестница уровней, упорядоченная по n, затем по ветви"""
    branches = list(branches)
    levels = []
    for n in n_values:
        for branch in branches:
            levels.append(energy_ml(coeffs, beta, n, branch, m))
    return levels
