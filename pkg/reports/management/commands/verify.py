"""
Management команда: полный набор оракулов с таблицей pass/fail.
"""
import logging

from django.core.management.base import CommandError

from oracles.services import run_verification_suite
from reports.management.base import DiracCommand
from reports.serializers import RunCommand, VerificationRowSerializer
from reports.services import verification_rows

logger = logging.getLogger(__name__)

VERIFY_FAILED = 3


class Command(DiracCommand):
    help = 'Сверяет замкнутые формулы с конечно-разностными оракулами; код 3 при провале'
    command_name = RunCommand.VERIFY

    def build_rows(self, config):
        reports = run_verification_suite(
            config.coefficients(), config.beta, config.m, config.grid_size, config.p_max,
        )
        return verification_rows(reports, config.tolerance), VerificationRowSerializer

    def finish(self, config, rows):
        failures = [row for row in rows if not row['passed']]
        if failures:
            logger.warning(f"Verification failed: {len(failures)} of {len(rows)} rows")
            raise CommandError(
                f"{len(failures)} of {len(rows)} verification rows exceed tolerance {config.tolerance}",
                returncode=VERIFY_FAILED,
            )
        logger.info(f"Verification passed: {len(rows)} rows within {config.tolerance}")
