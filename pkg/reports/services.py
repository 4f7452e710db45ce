"""
Построение строк таблиц для команд и их запись в CSV или JSON.
"""
import io
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Type

import pandas as pd
from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

from oracles.services import OracleMode, OracleReport, kummer_oracle, pt_oracle
from oscillator.params import DeformationParams, PhysicalParams, UnitsMode, derive_coefficients
from oscillator.spectrum import Branch, beta_bound, check_beta, energy_ml, energy_ml_expansion
from oscillator.wavefun import assemble_spinor, make_grid

from .config import RunConfig
from .serializers import (
    BetaSweepRowSerializer,
    FieldSweepRowSerializer,
    OutputFormat,
    SpectrumRowSerializer,
    SweepParam,
    VerificationRowSerializer,
    WavefunctionRowSerializer,
)

logger = logging.getLogger(__name__)

# конфигурации эталонных таблиц: имя файла -> (режим, m, β, N)
GOLDEN_RUNS = {
    'kummer_m0.csv': (OracleMode.KUMMER_RADIAL, 0, 0.0, 3000),
    'kummer_m1.csv': (OracleMode.KUMMER_RADIAL, 1, 0.0, 3000),
    'poschl_teller.csv': (OracleMode.POSCHL_TELLER, 1, 0.04, 4000),
}
GOLDEN_P_MAX = 12.0
GOLDEN_COUNT = 5


def spectrum_rows(config: RunConfig) -> List[dict]:
    """
    Одна строка на пару (n, ветвь), упорядоченно по n, затем по ветви.

    β₀ и граница минимальной длины определены только при |m| ≥ 1,
    для m = 0 в таблицу попадает nan.
    """
    coeffs = config.coefficients()
    beta = config.beta
    check_beta(coeffs, beta, config.m)
    abs_m = abs(config.m)
    bound = beta_bound(coeffs, abs_m) if abs_m >= 1 else None

    rows = []
    for n in config.n_values:
        for branch in config.branches:
            rows.append({
                'n': n,
                'm': config.m,
                'branch': Branch(branch).value,
                'energy': energy_ml(coeffs, beta, n, branch).value,
                'energy_expansion': energy_ml_expansion(coeffs, beta, n, branch).value,
                'beta0': bound.beta0 if bound else None,
                'dxmin_bound': bound.dx_min_bound if bound else None,
            })
    return rows


def wavefunction_rows(config: RunConfig) -> List[dict]:
    """Строки p, ψ₁, ψ₂ для n = n_max; при branch=both берётся ветвь +"""
    coeffs = config.coefficients()
    branch = config.branches[0]
    grid = make_grid(config.grid_size, config.p_max)
    spinor = assemble_spinor(coeffs, config.beta, config.n_max, config.m, branch, grid)
    logger.info(
        f"Wavefunction n={config.n_max} m={config.m} {branch}: "
        f"E = {spinor.energy.value}, lower fraction {spinor.lower_fraction:.6e}"
    )
    return [
        {'p': p, 'psi1': psi1, 'psi2': psi2}
        for p, psi1, psi2 in zip(grid, spinor.upper.values, spinor.lower.values)
    ]


def sweep_rows(config: RunConfig) -> List[dict]:
    """Таблица spectrum для каждой точки развёртки с ведущим столбцом параметра"""
    column = config.sweep.column
    rows = []
    for value in config.sweep.values():
        for row in spectrum_rows(config.at_sweep_point(value)):
            rows.append({column: value, **row})
    logger.info(f"Sweep over {column}: {config.sweep.steps} points, {len(rows)} rows")
    return rows


def verification_rows(reports: Sequence[OracleReport], tolerance: float) -> List[dict]:
    rows = []
    for report in reports:
        for level, computed, target, error, passed in zip(
            report.levels, report.computed, report.targets, report.rel_errors, report.passes(tolerance)
        ):
            if not passed:
                logger.warning(
                    f"{report.mode} n={level} m={report.m} beta={report.beta}: "
                    f"rel_err {error:.3e} exceeds tolerance {tolerance:.1e}"
                )
            rows.append({
                'mode': report.mode,
                'n': level,
                'computed': computed,
                'target': target,
                'rel_err': error,
                'passed': passed,
            })
    return rows


def sweep_serializer(config: RunConfig) -> Type[serializers.Serializer]:
    if config.sweep.param == SweepParam.BETA:
        return BetaSweepRowSerializer
    return FieldSweepRowSerializer


def render_rows(rows: List[dict], serializer_class, output_format: str) -> str:
    """
    Детерминированный текст таблицы: фиксированный порядок столбцов,
    числа в формате %.8e, перевод строки '\\n'.
    """
    columns = list(serializer_class.columns)
    data = [
        {column: item[column] for column in columns}
        for item in serializer_class(rows, many=True).data
    ]
    if output_format == OutputFormat.JSON:
        return JSONRenderer().render(data).decode('utf-8') + '\n'

    frame = pd.DataFrame(data, columns=columns)
    for column in frame.select_dtypes(include='bool').columns:
        frame[column] = frame[column].map({True: 'true', False: 'false'})
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format='%.8e', lineterminator='\n', na_rep='nan')
    return buffer.getvalue()


def write_text(text: str, path) -> Path:
    """
    Raises:
        OSError: если файл не удаётся записать
    """
    path = Path(path)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        handle.write(text)
    return path


def golden_tables(count: Optional[int] = None) -> Dict[str, str]:
    """
    CSV эталонных прогонов оракулов: натуральные единицы, ϱ₁ = ϱ₂ = 1,
    Куммер для m = 0 и m = 1 при N = 3000, Пёшль-Теллер при β = 0.04, m = 1, N = 4000.
    """
    count = count or GOLDEN_COUNT
    coeffs = derive_coefficients(PhysicalParams(), DeformationParams(), UnitsMode.NATURAL)
    tables = {}
    for name, (mode, m, beta, grid_size) in GOLDEN_RUNS.items():
        if mode == OracleMode.KUMMER_RADIAL:
            report = kummer_oracle(coeffs, m, grid_size, GOLDEN_P_MAX, count)
        else:
            report = pt_oracle(coeffs, beta, m, grid_size, count)
        rows = verification_rows([report], 1e-4)
        tables[name] = render_rows(rows, VerificationRowSerializer, OutputFormat.CSV)
    return tables

