"""
Общая основа management-команд осциллятора: флаги, сборка конфигурации,
вывод таблицы и коды выхода.
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from oscillator.exceptions import OscillatorError
from oscillator.params import UnitsMode

from reports.config import build_config, config_error
from reports.serializers import BranchChoice, OutputFormat
from reports.services import render_rows, write_text

logger = logging.getLogger(__name__)

IO_ERROR = 4


class DiracCommand(BaseCommand):
    """
    Подклассы задают command_name и build_rows(config) -> (строки, сериализатор).

    Все флаги по умолчанию None: незаданный флаг не перекрывает файл
    конфигурации и DIRAC_DEFAULTS.
    """
    command_name = None

    def add_arguments(self, parser):
        physical = parser.add_argument_group('physical parameters')
        physical.add_argument('--m0', type=float, help='Масса покоя m0')
        physical.add_argument('--omega', type=float, help='Частота осциллятора ω')
        physical.add_argument('--c', type=float, help='Скорость света c')
        physical.add_argument('--hbar', type=float, help='Постоянная Планка ħ')
        physical.add_argument('--e-abs', type=float, help='Модуль заряда |e|')
        physical.add_argument('--b-field', type=float, help='Магнитное поле B ≥ 0')
        physical.add_argument('--units', choices=UnitsMode.values, help='natural (m0 = ω = c = ħ = 1) или general')

        deformation = parser.add_argument_group('deformation')
        deformation.add_argument('--theta', type=float, help='Некоммутативность координат θ̃')
        deformation.add_argument('--thetabar', type=float, help='Некоммутативность импульсов θ̄')
        deformation.add_argument('--beta', type=float, help='Параметр минимальной длины β ≥ 0')

        quantum = parser.add_argument_group('quantum numbers and grid')
        quantum.add_argument('--n-max', type=int, help='Наибольшее радиальное число n')
        quantum.add_argument('--m-quantum', type=int, help='Угловое число m')
        quantum.add_argument('--branch', choices=BranchChoice.values, help='Ветвь энергии')
        quantum.add_argument('--grid-n', type=int, help='Число шагов импульсной сетки')
        quantum.add_argument('--p-max', type=float, help='Верхняя граница импульса')

        output = parser.add_argument_group('output')
        output.add_argument('--format', choices=OutputFormat.values, help='Формат таблицы')
        output.add_argument('--out', help='Файл для таблицы вместо stdout')
        output.add_argument('--tolerance', type=float, help='Относительный допуск для verify')
        output.add_argument('--config', help='Файл key=value с параметрами')

        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def build_rows(self, config):
        raise NotImplementedError

    def handle(self, *args, **options):
        config = build_config(self.command_name, options)
        try:
            rows, serializer_class = self.build_rows(config)
        except OscillatorError as exc:
            raise config_error(str(exc))
        self.emit(config, rows, serializer_class)
        self.finish(config, rows)

    def emit(self, config, rows, serializer_class):
        text = render_rows(rows, serializer_class, config.output_format)
        try:
            if config.out:
                path = write_text(text, config.out)
            else:
                self.stdout.write(text, ending='')
        except OSError as exc:
            logger.error(f"Cannot write {config.out or 'stdout'}", exc_info=True)
            raise CommandError(f"cannot write output: {exc}", returncode=IO_ERROR)
        if config.out:
            self.stdout.write(self.style.SUCCESS(f'Записано строк: {len(rows)} в {path}'))

    def finish(self, config, rows):
        pass
