"""
Management команда: таблица spectrum по диапазону β или B.
"""
from reports.management.base import DiracCommand
from reports.serializers import RunCommand, SweepParam
from reports.services import sweep_rows, sweep_serializer


class Command(DiracCommand):
    help = 'Повторяет spectrum для равномерной развёртки β или B'
    command_name = RunCommand.SWEEP

    def add_command_arguments(self, parser):
        sweep = parser.add_argument_group('sweep')
        sweep.add_argument('--sweep-param', choices=SweepParam.values, help='Параметр развёртки')
        sweep.add_argument('--sweep-start', type=float, help='Начало диапазона')
        sweep.add_argument('--sweep-stop', type=float, help='Конец диапазона (включительно)')
        sweep.add_argument('--sweep-steps', type=int, help='Число точек')

    def build_rows(self, config):
        return sweep_rows(config), sweep_serializer(config)
