"""
Конфигурация запуска: умолчания из settings, файл key=value и флаги.

Приоритет: флаги > файл конфигурации > DIRAC_DEFAULTS.
"""
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

from django.conf import settings
from django.core.management import load_command_class
from django.core.management.base import CommandError
from dotenv import dotenv_values

from oscillator.params import DeformationParams, DeformedCoefficients, PhysicalParams, derive_coefficients
from oscillator.spectrum import Branch

from .serializers import BranchChoice, RunCommand, RunConfigSerializer, SweepParam, sweep_values

logger = logging.getLogger(__name__)

CONFIG_ERROR = 2

# ключи конфигурации; в файле допускаются и дефисы, и подчёркивания
CONFIG_KEYS = (
    'units', 'm0', 'omega', 'c', 'hbar', 'e_abs', 'b_field', 'theta', 'thetabar', 'beta',
    'n_max', 'm_quantum', 'branch', 'grid_n', 'p_max', 'format', 'out', 'tolerance',
    'sweep_param', 'sweep_start', 'sweep_stop', 'sweep_steps',
)


@dataclass(frozen=True)
class SweepRange:
    param: str
    start: float
    stop: float
    steps: int

    @property
    def column(self) -> str:
        return SweepParam(self.param).label

    def values(self) -> List[float]:
        return sweep_values(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class RunConfig:
    command: str
    physical: PhysicalParams
    deformation: DeformationParams
    units: str
    n_max: int
    m: int
    branch: str
    grid_size: int
    p_max: float
    output_format: str
    out: Optional[str]
    tolerance: float
    sweep: Optional[SweepRange] = None

    @property
    def beta(self) -> float:
        return self.deformation.beta

    @property
    def n_values(self) -> range:
        return range(self.n_max + 1)

    @property
    def branches(self) -> List[str]:
        if self.branch == BranchChoice.BOTH:
            return [Branch.PLUS, Branch.MINUS]
        return [Branch(self.branch)]

    def coefficients(self) -> DeformedCoefficients:
        return derive_coefficients(self.physical, self.deformation, self.units)

    def at_sweep_point(self, value: float) -> 'RunConfig':
        """Копия конфигурации со значением параметра развёртки"""
        if self.sweep is None:
            raise ValueError("config has no sweep range")
        if self.sweep.param == SweepParam.BETA:
            return replace(self, deformation=replace(self.deformation, beta=value))
        return replace(self, physical=replace(self.physical, B=value))


def config_error(message: str) -> CommandError:
    return CommandError(message, returncode=CONFIG_ERROR)


def _normalize_key(key: str) -> str:
    return key.strip().lower().replace('-', '_')


def read_config_file(path) -> Dict[str, str]:
    """
    Читает файл key=value (комментарии через #).

    Raises:
        CommandError: файла нет или в нём неизвестный ключ (код 2)
    """
    path = Path(path)
    if not path.is_file():
        raise config_error(f"config file not found: {path}")
    values = {}
    for key, value in dotenv_values(path).items():
        name = _normalize_key(key)
        if name not in CONFIG_KEYS:
            raise config_error(f"unknown config key '{key}' in {path}")
        if value is None:
            raise config_error(f"config key '{key}' in {path} has no value")
        values[name] = value
    logger.debug(f"Read {len(values)} keys from {path}")
    return values


def _one_line(errors) -> str:
    parts = []
    for field, messages in errors.items():
        text = ' '.join(str(message) for message in messages)
        parts.append(text if field == 'non_field_errors' else f"{field}: {text}")
    return '; '.join(parts).replace('\n', ' ')


def build_config(command: str, options: Mapping[str, Any]) -> RunConfig:
    """
    Сливает умолчания, файл конфигурации и флаги и валидирует результат.

    Args:
        command: имя команды из RunCommand
        options: словарь опций management-команды; None означает «флаг не задан»

    Raises:
        CommandError: с кодом 2 при любой ошибке конфигурации
    """
    merged = dict(settings.DIRAC_DEFAULTS)
    if options.get('config'):
        merged.update(read_config_file(options['config']))
    merged.update({key: options[key] for key in CONFIG_KEYS if options.get(key) is not None})
    merged['command'] = command

    serializer = RunConfigSerializer(data=merged)
    if not serializer.is_valid():
        raise config_error(_one_line(serializer.errors))
    data = serializer.validated_data

    sweep = None
    if data['command'] == RunCommand.SWEEP:
        sweep = SweepRange(data['sweep_param'], data['sweep_start'], data['sweep_stop'], data['sweep_steps'])
    config = RunConfig(
        command=data['command'],
        physical=PhysicalParams(
            m0=data['m0'], omega=data['omega'], c=data['c'], hbar=data['hbar'],
            B=data['b_field'], e_abs=data['e_abs'],
        ),
        deformation=DeformationParams(theta_tilde=data['theta'], theta_bar=data['thetabar'], beta=data['beta']),
        units=data['units'],
        n_max=data['n_max'],
        m=data['m_quantum'],
        branch=data['branch'],
        grid_size=data['grid_n'],
        p_max=data['p_max'],
        output_format=data['format'],
        out=data['out'],
        tolerance=data['tolerance'],
        sweep=sweep,
    )
    logger.info(f"Run config: {config}")
    return config


def parse_config(argv: Sequence[str], config_file: Optional[str] = None) -> RunConfig:
    """
    Разбирает командную строку вида `spectrum --beta 0.1 --n-max 5`.

    Ошибки argparse (неизвестный флаг, нечисловое значение) завершают
    процесс с кодом 2, как при запуске через manage.py.

    Args:
        argv: имя команды и её флаги
        config_file: файл конфигурации, если --config не задан

    Raises:
        CommandError: ошибка конфигурации (код 2)
        SystemExit: ошибка разбора флагов (код 2)
    """
    if not argv or argv[0] not in RunCommand.values:
        raise config_error(f"command must be one of {', '.join(RunCommand.values)}")
    command = load_command_class('reports', argv[0])
    command._called_from_command_line = True
    parser = command.create_parser('manage.py', argv[0])
    options = vars(parser.parse_args(list(argv[1:])))
    if config_file and not options.get('config'):
        options['config'] = config_file
    return build_config(argv[0], options)
