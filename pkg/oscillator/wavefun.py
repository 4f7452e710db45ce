"""
Радиальные волновые функции в импульсном представлении, замены
переменных p ↔ q ↔ z, нормировка и сборка спинора.

Все функции берут |m|: отрицательное m использует тот же радиальный профиль.
"""
import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from django.db import models
from scipy.integrate import simpson

from .exceptions import (
    BetaOutOfRange,
    DenominatorZero,
    GridTooCoarse,
    InvalidM,
    TailTooHeavy,
    ZeroBeta,
)
from .params import DeformedCoefficients
from .specfun import hyp1f1_poly, hyp2f1_poly
from .spectrum import Branch, EnergyLevel, beta_limit, energy_ml, energy_nc

logger = logging.getLogger(__name__)

TAIL_FRACTION = 0.1
TAIL_TOLERANCE = 1e-10


class RadialWeight(models.TextChoices):
    PLAIN_POLAR = 'plain_polar', 'p dp'
    DEFORMED = 'deformed', 'p dp / (1 + beta p^2)'


@dataclass(frozen=True, eq=False)
class RadialTable:
    grid: np.ndarray
    values: np.ndarray
    weight: str
    norm: float
    beta: float = 0.0

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def __len__(self):
        return len(self.grid)


@dataclass(frozen=True, eq=False)
class SpinorPair:
    upper: RadialTable
    lower: RadialTable
    m: int
    energy: EnergyLevel

    @property
    def lower_fraction(self) -> float:
        """Доля нормы, приходящаяся на нижнюю компоненту"""
        return self.lower.norm ** 2


def make_grid(size: int, p_max: float) -> np.ndarray:
    """Равномерная сетка p_j = j·p_max/size, j = 0..size"""
    if size < 4:
        raise GridTooCoarse(f"grid needs at least 5 points, got size {size}")
    if not p_max > 0:
        raise GridTooCoarse(f"p_max must be positive, got {p_max}")
    return np.linspace(0.0, p_max, size + 1)


def measure(grid: np.ndarray, beta: float) -> np.ndarray:
    """w(p) = p при β = 0 и p/(1 + βp²) при β > 0"""
    if beta > 0:
        return grid / (1 + beta * grid ** 2)
    return grid.copy()


def _weighted_integral(grid, integrand):
    return 2 * np.pi * simpson(integrand, x=grid)


def _norm(grid, values, beta) -> float:
    return float(np.sqrt(_weighted_integral(grid, values ** 2 * measure(grid, beta))))


def _table(grid, values, beta: float) -> RadialTable:
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    weight = RadialWeight.DEFORMED if beta > 0 else RadialWeight.PLAIN_POLAR
    return RadialTable(grid=grid, values=values, weight=weight.value, norm=_norm(grid, values, beta), beta=beta)


def z_of_p(beta: float, p):
    """z = βp²/(1 + βp²) ∈ [0, 1)"""
    if beta <= 0:
        raise ZeroBeta("z variable needs beta > 0")
    p = np.asarray(p, dtype=float)
    bp2 = beta * p ** 2
    z = bp2 / (1 + bp2)
    return z if z.ndim else float(z)


def p_of_z(beta: float, z):
    if beta <= 0:
        raise ZeroBeta("z variable needs beta > 0")
    z = np.asarray(z, dtype=float)
    p = np.sqrt(z / (beta * (1 - z)))
    return p if p.ndim else float(p)


def q_of_p(coeffs: DeformedCoefficients, beta: float, p):
    """q = arctan(√β·p)/(λ√β), q ∈ [0, π/(2u))"""
    if beta <= 0:
        raise ZeroBeta("q variable needs beta > 0")
    root = np.sqrt(beta)
    q = np.arctan(root * np.asarray(p, dtype=float)) / (coeffs.lam * root)
    return q if q.ndim else float(q)


def p_of_q(coeffs: DeformedCoefficients, beta: float, q):
    if beta <= 0:
        raise ZeroBeta("q variable needs beta > 0")
    root = np.sqrt(beta)
    p = np.tan(np.asarray(q, dtype=float) * coeffs.lam * root) / root
    return p if p.ndim else float(p)


def radial_nc(coeffs: DeformedCoefficients, n: int, m: int, grid) -> RadialTable:
    """
    f(p) = p^|m|·exp(−kp²/2)·₁F₁(−n; |m|+1; kp²), без нормировки.

    Args:
        coeffs: коэффициенты, k = ϱ₁/λ
        n: радиальное число
        m: угловое число
        grid: импульсная сетка
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    grid = np.asarray(grid, dtype=float)
    abs_m = abs(m)
    kp2 = coeffs.k * grid ** 2
    values = grid ** abs_m * np.exp(-kp2 / 2) * hyp1f1_poly(n, abs_m + 1, kp2)
    return _table(grid, values, 0.0)


def radial_ml(coeffs: DeformedCoefficients, beta: float, n: int, m: int, grid) -> RadialTable:
    """
    Решение с минимальной длиной:
        p^{−1/2}·z^{ζ₁/2}·(1 − z)^{ζ₂/2}·₂F₁(−n, ζ₁+ζ₂+n; |m|+1; z).

    Множитель p^{−1/2}·z^{ζ₁/2} сокращается до β^{ζ₁/2}·p^|m|·(1+βp²)^{−ζ₁/2},
    поэтому значение в p = 0 конечно.

    Raises:
        InvalidM: при m = 0 (ζ₁ = 1/2)
        BetaOutOfRange: если β ≥ β₀(m), т.е. ζ₂ ≤ 1
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    abs_m = abs(m)
    if abs_m < 1:
        raise InvalidM("minimal-length wavefunction needs |m| >= 1")
    if beta <= 0:
        raise ZeroBeta("minimal-length wavefunction needs beta > 0")
    if beta >= beta_limit(coeffs, abs_m):
        raise BetaOutOfRange(f"beta = {beta} gives zeta2 <= 1 for m = {m}")

    grid = np.asarray(grid, dtype=float)
    zeta1, zeta2 = coeffs.zetas(abs_m, beta)
    z = z_of_p(beta, grid)
    envelope = np.exp(
        zeta1 / 2 * np.log(beta) + abs_m * np.log(np.where(grid > 0, grid, 1.0))
        - (zeta1 + zeta2) / 2 * np.log1p(beta * grid ** 2)
    )
    if abs_m:
        envelope = np.where(grid > 0, envelope, 0.0)
    values = envelope * hyp2f1_poly(n, zeta1 + zeta2 + n, abs_m + 1, z)
    return _table(grid, values, beta)


def overlap(a: RadialTable, b: RadialTable, beta: Optional[float] = None) -> float:
    """2π∫ a·b·w dp на общей сетке"""
    if len(a) != len(b) or not np.array_equal(a.grid, b.grid):
        raise GridTooCoarse("overlap needs both tables on the same grid")
    beta = a.beta if beta is None else beta
    return float(_weighted_integral(a.grid, a.values * b.values * measure(a.grid, beta)))


def normalize(table: RadialTable, beta: Optional[float] = None) -> RadialTable:
    """
    Масштабирует таблицу к 2π∫|f|²w dp = 1 (составная формула Симпсона).

    Raises:
        TailTooHeavy: если последние 10% сетки дают больше 1e−10 интеграла
    """
    beta = table.beta if beta is None else beta
    integrand = table.values ** 2 * measure(table.grid, beta)
    total = _weighted_integral(table.grid, integrand)
    if not total > 0:
        raise TailTooHeavy("radial function has zero norm on the grid")

    start = int(len(table.grid) * (1 - TAIL_FRACTION))
    tail = _weighted_integral(table.grid[start:], integrand[start:])
    if tail > TAIL_TOLERANCE * total:
        raise TailTooHeavy(
            f"last {TAIL_FRACTION:.0%} of the grid carries {tail / total:.3e} of the norm; increase p_max"
        )
    values = table.values / np.sqrt(total)
    weight = RadialWeight.DEFORMED if beta > 0 else RadialWeight.PLAIN_POLAR
    return replace(table, values=values, norm=1.0, weight=weight.value, beta=beta)


def _uniform_step(grid: np.ndarray, min_points: int) -> float:
    if len(grid) < min_points:
        raise GridTooCoarse(f"finite differences need at least {min_points} points, got {len(grid)}")
    steps = np.diff(grid)
    step = steps[0]
    if not step > 0 or not np.allclose(steps, step, rtol=1e-9, atol=0.0):
        raise GridTooCoarse("finite differences need a uniform increasing grid")
    return float(step)


def first_derivative(values: np.ndarray, step: float, order: int = 4) -> np.ndarray:
    """f′ центральными разностями; на краях односторонние шаблоны того же порядка"""
    f = np.asarray(values, dtype=float)
    if order == 2:
        return np.gradient(f, step, edge_order=2)
    if order != 4:
        raise ValueError(f"unsupported finite-difference order {order}")

    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / 12
    d[0] = -25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]
    d[1] = -3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]
    d[0] /= 12
    d[1] /= 12
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / 12
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / 12
    return d / step


def second_derivative(values: np.ndarray, step: float, order: int = 4) -> np.ndarray:
    f = np.asarray(values, dtype=float)
    d = np.empty_like(f)
    if order == 2:
        d[1:-1] = f[:-2] - 2 * f[1:-1] + f[2:]
        d[0] = 2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]
        d[-1] = 2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]
        return d / step ** 2
    if order != 4:
        raise ValueError(f"unsupported finite-difference order {order}")

    d[2:-2] = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / 12
    d[0] = (45 * f[0] - 154 * f[1] + 214 * f[2] - 156 * f[3] + 61 * f[4] - 10 * f[5]) / 12
    d[1] = (10 * f[0] - 15 * f[1] - 4 * f[2] + 14 * f[3] - 6 * f[4] + f[5]) / 12
    d[-1] = (45 * f[-1] - 154 * f[-2] + 214 * f[-3] - 156 * f[-4] + 61 * f[-5] - 10 * f[-6]) / 12
    d[-2] = (10 * f[-1] - 15 * f[-2] - 4 * f[-3] + 14 * f[-4] - 6 * f[-5] + f[-6]) / 12
    return d / step ** 2


def divide_by_p(values: np.ndarray, grid: np.ndarray, derivative: np.ndarray) -> np.ndarray:
    """f/p с пределом f′(0) в точке p = 0 (там f(0) = 0)"""
    safe = np.where(grid > 0, grid, 1.0)
    return np.where(grid > 0, values / safe, derivative)


def apply_ladder_plus(coeffs: DeformedCoefficients, beta: float, table: RadialTable, m: int) -> RadialTable:
    """
    Радиальная часть P₊: ϱ₁p·f + λ(1 + βp²)(f′ − |m|·f/p).

    Raises:
        GridTooCoarse: меньше 5 точек или неравномерная сетка
    """
    step = _uniform_step(table.grid, 5)
    p = table.grid
    f = table.values
    df = first_derivative(f, step)
    values = coeffs.rho1 * p * f + coeffs.lam * (1 + beta * p ** 2) * (df - abs(m) * divide_by_p(f, p, df))
    return _table(p, values, table.beta)


def apply_ladder_minus(coeffs: DeformedCoefficients, beta: float, table: RadialTable, m: int) -> RadialTable:
    """
    Радиальная часть P₋, сопряжённого к P₊ по мере w:
    ϱ₁p·g − λ(1 + βp²)(g′ + (|m|+1)·g/p), где g живёт в канале m+1.
    """
    step = _uniform_step(table.grid, 5)
    p = table.grid
    g = table.values
    dg = first_derivative(g, step)
    values = coeffs.rho1 * p * g - coeffs.lam * (1 + beta * p ** 2) * (dg + (abs(m) + 1) * divide_by_p(g, p, dg))
    return _table(p, values, table.beta)


def assemble_spinor(coeffs: DeformedCoefficients, beta: float, n: int, m: int, branch: str, grid) -> SpinorPair:
    """
    Собирает спинор (ψ₁, ψ₂) для уровня (n, m, ветвь).

    ψ₁: нормированная радиальная функция, ψ₂ = c·P₊ψ₁/(ε + m0c²).
    Затем весь спинор нормируется на единицу.

    Raises:
        DenominatorZero: если ε + m0c² = 0 (ветвь − при n = 0)
    """
    if beta > 0:
        energy = energy_ml(coeffs, beta, n, branch, m)
        upper = normalize(radial_ml(coeffs, beta, n, m, grid), beta)
    else:
        energy = energy_nc(coeffs, n, branch)
        upper = normalize(radial_nc(coeffs, n, m, grid), 0.0)

    denominator = energy.value + coeffs.rest_energy
    if abs(denominator) <= 1e-12 * coeffs.rest_energy:
        raise DenominatorZero(f"epsilon + m0 c^2 = 0 for n = {n}, branch {Branch(branch).value}")

    lifted = apply_ladder_plus(coeffs, beta, upper, m)
    lower_values = coeffs.c * lifted.values / denominator
    lower_norm_sq = _norm(upper.grid, lower_values, beta) ** 2
    scale = 1 / np.sqrt(1 + lower_norm_sq)
    logger.debug(f"Spinor n={n} m={m} {branch}: lower norm^2 before scaling {lower_norm_sq:.6e}")

    upper = replace(upper, values=upper.values * scale, norm=float(scale))
    lower = _table(upper.grid, lower_values * scale, beta)
    return SpinorPair(upper=upper, lower=lower, m=m, energy=energy)
