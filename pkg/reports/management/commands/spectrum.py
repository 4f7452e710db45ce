"""
Management команда: таблица уровней энергии n = 0..n_max.
"""
from reports.management.base import DiracCommand
from reports.serializers import RunCommand, SpectrumRowSerializer
from reports.services import spectrum_rows


class Command(DiracCommand):
    help = 'Печатает уровни энергии, разложение по β и границы β₀, Δx_min'
    command_name = RunCommand.SPECTRUM

    def build_rows(self, config):
        return spectrum_rows(config), SpectrumRowSerializer
