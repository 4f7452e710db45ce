"""
Management команда: радиальные компоненты спинора на импульсной сетке.
"""
from reports.management.base import DiracCommand
from reports.serializers import RunCommand, WavefunctionRowSerializer
from reports.services import wavefunction_rows


class Command(DiracCommand):
    help = 'Печатает p, ψ₁, ψ₂ для уровня n = --n-max (ветвь + при --branch both)'
    command_name = RunCommand.WAVEFUNCTION

    def build_rows(self, config):
        return wavefunction_rows(config), WavefunctionRowSerializer
