"""
Независимые конечно-разностные оракулы для замкнутых формул спектра.

Каждый оракул возвращает OracleReport: вычисленные значения, целевые
значения из замкнутых формул и относительные ошибки.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from django.db import models

from oscillator.exceptions import BetaOutOfRange, CutoffTooSmall, GridTooCoarse, InvalidM, ZeroBeta
from oscillator.params import DeformedCoefficients
from oscillator.spectrum import (
    Branch,
    beta_limit,
    energy_from_xi_bar_squared,
    energy_from_zeta,
    energy_ml,
    energy_nc,
)
from oscillator.wavefun import (
    RadialTable,
    apply_ladder_minus,
    apply_ladder_plus,
    divide_by_p,
    first_derivative,
    make_grid,
    radial_ml,
    radial_nc,
    second_derivative,
)

from .tridiagonal import TridiagonalOperator, tridiag_eigs

logger = logging.getLogger(__name__)

# e^{−k·p_max²/2} < 1e−12
CUTOFF_EXPONENT = 12 * math.log(10)
MIN_GRID_SIZE = 10
MIN_RESIDUAL_GRID = 100
# точек у каждого края, где композиция P₋P₊ использует односторонние шаблоны
COMPOSITION_MARGIN = 4
# доля β₀(m), выше которой verify не поднимает подставленное β
VERIFY_BETA_FRACTION = 0.5


class OracleMode(models.TextChoices):
    KUMMER_RADIAL = 'kummer_radial', 'Kummer radial'
    POSCHL_TELLER = 'poschl_teller', 'Pöschl-Teller'
    OPERATOR_EXPANSION = 'operator_expansion', 'Operator expansion'
    ODE_RESIDUAL = 'ode_residual', 'ODE residual'


def relative_error(computed: float, target: float) -> float:
    """|c − t|/|t|, при t = 0 берётся абсолютная ошибка"""
    if target == 0:
        return abs(computed - target)
    return abs(computed - target) / abs(target)


@dataclass(frozen=True)
class OracleReport:
    mode: str
    grid_size: int
    cutoffs: Tuple[float, float]
    computed: Tuple[float, ...]
    targets: Tuple[float, ...]
    rel_errors: Tuple[float, ...]
    levels: Tuple[int, ...] = ()
    energies: Tuple[float, ...] = ()
    energy_targets: Tuple[float, ...] = ()
    m: Optional[int] = None
    beta: float = 0.0
    # размер второй сетки (2N+1) при экстраполяции Ричардсона
    fine_grid_size: Optional[int] = None

    def __post_init__(self):
        if not len(self.computed) == len(self.targets) == len(self.rel_errors):
            raise ValueError("computed, targets and rel_errors must have equal length")
        if not self.levels:
            object.__setattr__(self, 'levels', tuple(range(len(self.computed))))

    def passes(self, tolerance: float) -> List[bool]:
        return [error <= tolerance for error in self.rel_errors]

    @property
    def energy_rel_errors(self) -> Tuple[float, ...]:
        return tuple(relative_error(c, t) for c, t in zip(self.energies, self.energy_targets))


def _report(mode, grid_size, cutoffs, computed, targets, **extra) -> OracleReport:
    computed = tuple(float(value) for value in computed)
    targets = tuple(float(value) for value in targets)
    return OracleReport(
        mode=OracleMode(mode).value,
        grid_size=grid_size,
        cutoffs=(float(cutoffs[0]), float(cutoffs[1])),
        computed=computed,
        targets=targets,
        rel_errors=tuple(relative_error(c, t) for c, t in zip(computed, targets)),
        **extra,
    )


def _check_grid(grid_size: int, count: int):
    if grid_size < MIN_GRID_SIZE or count > grid_size:
        raise GridTooCoarse(f"grid of {grid_size} points cannot resolve {count} levels")


def kummer_operator(k: float, m: int, grid_size: int, p_max: float) -> TridiagonalOperator:
    """
    Консервативная схема для −(1/p)(p·f′)′ + (m²/p² + k²p²)·f на ячейках
    p_j = (j − ½)·h, h = p_max/N, с нулевым потоком через p = 0 и
    условием Дирихле в p_max + h/2.

    После симметризации g = √p·f это дискретизация
    −g″ + [k²p² + (m² − ¼)/p²]·g.
    """
    step = p_max / grid_size
    centers = (np.arange(1, grid_size + 1) - 0.5) * step
    faces = np.arange(1, grid_size) * step
    diag = 2 / step ** 2 + m ** 2 / centers ** 2 + k ** 2 * centers ** 2
    offdiag = -faces / (step ** 2 * np.sqrt(centers[:-1] * centers[1:]))
    return TridiagonalOperator(diag=diag, offdiag=offdiag, step=step, domain=(float(centers[0]), p_max))


def kummer_oracle(coeffs: DeformedCoefficients, m: int, grid_size: int, p_max: float, count: int) -> OracleReport:
    """
    Нижние κ² радиального уравнения без минимальной длины против
    κ²_n = 2k(|m|+1) + 4kn и соответствующие энергии против energy_nc.

    Raises:
        GridTooCoarse: слишком мало точек для count уровней
        CutoffTooSmall: e^{−k·p_max²/2} ≥ 1e−12
    """
    abs_m = abs(m)
    _check_grid(grid_size, count)
    if coeffs.k * p_max ** 2 / 2 < CUTOFF_EXPONENT:
        raise CutoffTooSmall(f"p_max = {p_max} leaves exp(-k p_max^2 / 2) above 1e-12 for k = {coeffs.k}")

    operator = kummer_operator(coeffs.k, abs_m, grid_size, p_max)
    computed = tridiag_eigs(operator, count)
    targets = [2 * coeffs.k * (abs_m + 1) + 4 * coeffs.k * n for n in range(count)]

    energies = []
    for n, kappa_sq in enumerate(computed):
        zeta = coeffs.lam ** 2 * kappa_sq - 2 * coeffs.lam * coeffs.rho1 * (abs_m + 1)
        energies.append(energy_from_zeta(coeffs, n, zeta).value)
    energy_targets = [energy_nc(coeffs, n).value for n in range(count)]

    logger.info(f"Kummer oracle m={m} N={grid_size} p_max={p_max}: {computed}")
    return _report(
        OracleMode.KUMMER_RADIAL, grid_size, operator.domain, computed, targets,
        energies=tuple(energies), energy_targets=tuple(energy_targets), m=m,
    )


def poschl_teller_operator(zeta1: float, zeta2: float, u: float, grid_size: int) -> TridiagonalOperator:
    """
    Трёхточечная схема для −d²/dq² + u²[ζ₁(ζ₁−1)/sin²(uq) + ζ₂(ζ₂−1)/cos²(uq)]
    на q ∈ (0, π/(2u)) с условиями Дирихле; q_j = j·h, h = L/(N+1).
    """
    if grid_size < 1:
        raise GridTooCoarse("Pöschl-Teller grid needs at least one interior point")
    length = math.pi / (2 * u)
    step = length / (grid_size + 1)
    q = np.arange(1, grid_size + 1) * step
    potential = u ** 2 * (
        zeta1 * (zeta1 - 1) / np.sin(u * q) ** 2 + zeta2 * (zeta2 - 1) / np.cos(u * q) ** 2
    )
    diag = 2 / step ** 2 + potential
    offdiag = np.full(grid_size - 1, -1 / step ** 2)
    return TridiagonalOperator(diag=diag, offdiag=offdiag, step=step, domain=(step, length - step))


def poschl_teller_levels(zeta1: float, zeta2: float, u: float, grid_size: int, count: int,
                         richardson: bool = True) -> List[float]:
    """
    Нижние собственные значения; с richardson=True добавляется сетка 2N+1
    (вдвое меньший шаг) и исключается главный член ошибки O(h²).
    """
    coarse = tridiag_eigs(poschl_teller_operator(zeta1, zeta2, u, grid_size), count)
    if not richardson:
        return coarse
    fine = tridiag_eigs(poschl_teller_operator(zeta1, zeta2, u, 2 * grid_size + 1), count)
    return [(4 * f - c) / 3 for c, f in zip(coarse, fine)]


def pt_oracle(coeffs: DeformedCoefficients, beta: float, m: int, grid_size: int, count: int,
              richardson: bool = True) -> OracleReport:
    """
    Оракул для случая минимальной длины: собственные значения задачи
    Пёшля-Теллера против ξ̄²_n = u²(ζ₁ + ζ₂ + 2n)², энергии против energy_ml.

    Raises:
        InvalidM: при m = 0 (ζ₁ = 1/2)
        BetaOutOfRange: если β ≥ β₀(m)
        GridTooCoarse: слишком мало точек
    """
    abs_m = abs(m)
    if abs_m < 1:
        raise InvalidM("Pöschl-Teller oracle needs |m| >= 1")
    if beta <= 0:
        raise ZeroBeta("Pöschl-Teller oracle needs beta > 0")
    if beta >= beta_limit(coeffs, abs_m):
        raise BetaOutOfRange(f"beta = {beta} gives zeta2 <= 1 for m = {m}")
    _check_grid(grid_size, count)

    zeta1, zeta2 = coeffs.zetas(abs_m, beta)
    u = coeffs.u_for(beta)
    computed = poschl_teller_levels(zeta1, zeta2, u, grid_size, count, richardson)
    targets = [u ** 2 * (zeta1 + zeta2 + 2 * n) ** 2 for n in range(count)]

    energies = [energy_from_xi_bar_squared(coeffs, beta, n, value).value for n, value in enumerate(computed)]
    energy_targets = [energy_ml(coeffs, beta, n, Branch.PLUS, abs_m).value for n in range(count)]

    length = math.pi / (2 * u)
    step = length / (grid_size + 1)
    logger.info(f"Pöschl-Teller oracle m={m} beta={beta} N={grid_size} richardson={richardson}: {computed}")
    return _report(
        OracleMode.POSCHL_TELLER, grid_size, (step, length - step), computed, targets,
        energies=tuple(energies), energy_targets=tuple(energy_targets), m=m, beta=beta,
        fine_grid_size=2 * grid_size + 1 if richardson else None,
    )


def expanded_operator(coeffs: DeformedCoefficients, beta: float, table: RadialTable, m: int,
                      order: int = 4) -> np.ndarray:
    """
    P₋P₊ в раскрытом виде:
        ϱ₁²p²f − 2λϱ₁W(|m|+1)f − 2βλ²W(p·f′ − |m|f) − λ²W²(f″ + f′/p − m²f/p²),
    W = 1 + βp². В p = 0 значение не определено (nan).
    """
    p = table.grid
    f = table.values
    step = table.step
    abs_m = abs(m)
    df = first_derivative(f, step, order)
    d2f = second_derivative(f, step, order)
    weight = 1 + beta * p ** 2
    with np.errstate(divide='ignore', invalid='ignore'):
        laplacian = d2f + df / p - abs_m ** 2 * f / p ** 2
        return (
            coeffs.rho1 ** 2 * p ** 2 * f
            - 2 * coeffs.lam * coeffs.rho1 * weight * (abs_m + 1) * f
            - 2 * beta * coeffs.lam ** 2 * weight * (p * df - abs_m * f)
            - coeffs.lam ** 2 * weight ** 2 * laplacian
        )


def operator_expansion_check(coeffs: DeformedCoefficients, beta: float, test_fn: RadialTable,
                             m: int) -> OracleReport:
    """
    Сравнивает композицию P₋(P₊f) из двух операторов первого порядка
    с раскрытым выражением на внутренних точках сетки.

    Масштаб ошибки: max(max|раскрытое|, ϱ₁λ·max|f|).

    Raises:
        GridTooCoarse: если внутренних точек не остаётся
    """
    if len(test_fn) < 2 * COMPOSITION_MARGIN + 1:
        raise GridTooCoarse(f"operator check needs more than {2 * COMPOSITION_MARGIN} points")
    composed = apply_ladder_minus(coeffs, beta, apply_ladder_plus(coeffs, beta, test_fn, m), m).values
    expanded = expanded_operator(coeffs, beta, test_fn, m)

    interior = slice(COMPOSITION_MARGIN, -COMPOSITION_MARGIN)
    f = test_fn.values[interior]
    scale = max(np.max(np.abs(expanded[interior])), coeffs.rho1 * coeffs.lam * np.max(np.abs(f)))
    discrepancy = np.max(np.abs(composed[interior] - expanded[interior])) / scale

    cutoffs = (test_fn.grid[COMPOSITION_MARGIN], test_fn.grid[-COMPOSITION_MARGIN - 1])
    logger.debug(f"Operator expansion check m={m} beta={beta}: discrepancy {discrepancy:.3e}")
    return _report(
        OracleMode.OPERATOR_EXPANSION, len(test_fn) - 1, cutoffs, [discrepancy], [0.0], m=m, beta=beta,
    )


def ode_residual(table: RadialTable, coeffs: DeformedCoefficients, n: int, m: int,
                 order: int = 4, p_min: Optional[float] = None) -> OracleReport:
    """
    Невязка радиального уравнения на сеточных значениях замкнутой формулы:
        −(P₋P₊f − ξ²f)/λ², ξ² = 4ϱ₁λn + 4βλ²n²,
    при β = 0 это f″ + f′/p − m²f/p² + (κ² − k²p²)f.

    Args:
        table: сеточные значения (β берётся из таблицы)
        order: порядок разностных производных, 2 или 4
        p_min: нижняя граница внутренней области, по умолчанию 10 шагов

    Returns:
        OracleReport с одной строкой max|невязка|/max|f|
    """
    if len(table) < MIN_RESIDUAL_GRID + 1:
        raise GridTooCoarse(f"residual check needs N >= {MIN_RESIDUAL_GRID}, got {len(table) - 1}")
    beta = table.beta
    p = table.grid
    p_min = 10 * table.step if p_min is None else p_min
    xi_sq = 4 * coeffs.rho1 * coeffs.lam * n + 4 * beta * coeffs.lam ** 2 * n ** 2

    residual = -(expanded_operator(coeffs, beta, table, m, order) - xi_sq * table.values) / coeffs.lam ** 2
    interior = np.zeros(len(p), dtype=bool)
    interior[2:-2] = True
    interior &= p >= p_min
    if not interior.any():
        raise GridTooCoarse(f"no interior points above p_min = {p_min}")

    value = np.max(np.abs(residual[interior])) / np.max(np.abs(table.values))
    logger.debug(f"ODE residual n={n} m={m} beta={beta} order={order}: {value:.3e}")
    return _report(
        OracleMode.ODE_RESIDUAL, len(p) - 1, (p_min, p[-3]), [value], [0.0], levels=(n,), m=m, beta=beta,
    )


def run_verification_suite(coeffs: DeformedCoefficients, beta: float, m: int, grid_size: int, p_max: float,
                           count: Optional[int] = None) -> List[OracleReport]:
    """
    Полный набор проверок для команды verify.

    Args:
        coeffs: коэффициенты выбранной конфигурации
        beta: β для оракула Пёшля-Теллера; при 0 берётся DIRAC_VERIFY_BETA,
            но не больше VERIFY_BETA_FRACTION·β₀(m)
        m: угловой канал; оракул Куммера дополнительно проверяет m = 0
        grid_size: число шагов сетки
        p_max: верхняя граница импульса
        count: сколько уровней проверять, по умолчанию DIRAC_ORACLE_COUNT

    Returns:
        Список OracleReport в фиксированном порядке
    """
    count = count or settings.DIRAC_ORACLE_COUNT
    abs_m = abs(m)
    if not beta:
        beta = min(settings.DIRAC_VERIFY_BETA, VERIFY_BETA_FRACTION * beta_limit(coeffs, max(abs_m, 1)))
        logger.info(f"Verification beta for m={m}: {beta}")
    reports = []

    for channel in sorted({0, abs_m}):
        reports.append(kummer_oracle(coeffs, channel, grid_size, p_max, count))

    if abs_m >= 1:
        reports.append(pt_oracle(coeffs, beta, abs_m, grid_size, count))
    else:
        logger.warning("m = 0 has zeta1 = 1/2; the Pöschl-Teller oracle is skipped")

    # шаг не больше 1e−3 для проверки операторного тождества
    fine_grid = make_grid(max(grid_size, int(math.ceil(p_max / 1e-3))), p_max)
    reports.append(operator_expansion_check(coeffs, 0.0, radial_nc(coeffs, 0, 0, fine_grid), 0))
    reports.append(operator_expansion_check(coeffs, 0.0, radial_nc(coeffs, 0, 1, fine_grid), 1))
    reports.append(operator_expansion_check(coeffs, beta, radial_nc(coeffs, 0, abs_m, fine_grid), abs_m))

    grid = make_grid(grid_size, p_max)
    for channel in range(0, 3):
        for n in range(0, 4):
            reports.append(ode_residual(radial_nc(coeffs, n, channel, grid), coeffs, n, channel))
    if abs_m >= 1:
        for n in range(0, 2):
            reports.append(ode_residual(radial_ml(coeffs, beta, n, abs_m, grid), coeffs, n, abs_m))
    return reports


def summarize(reports: Sequence[OracleReport], tolerance: float) -> Tuple[int, int]:
    """(число строк, число провалов) для журнала"""
    rows = sum(len(report.computed) for report in reports)
    failures = sum(passed.count(False) for passed in (report.passes(tolerance) for report in reports))
    return rows, failures
