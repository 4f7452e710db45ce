"""
Management команда для перезаписи эталонных CSV оракулов.
"""
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from reports.services import golden_tables, write_text


class Command(BaseCommand):
    help = 'Пересчитывает эталонные таблицы оракулов Куммера и Пёшля-Теллера'

    def add_arguments(self, parser):
        parser.add_argument(
            '--dir',
            default=None,
            help='Каталог для файлов (по умолчанию DIRAC_GOLDEN_DIR)',
        )
        parser.add_argument(
            '--dry-run',
            action='store_true',
            help='Показать, какие файлы изменятся, без записи',
        )

    def handle(self, *args, **options):
        directory = Path(options['dir'] or settings.DIRAC_GOLDEN_DIR)
        tables = golden_tables()

        changed = 0
        for name, text in tables.items():
            path = directory / name
            current = path.read_text(encoding='utf-8') if path.is_file() else None
            if current == text:
                continue
            changed += 1
            if options['dry_run']:
                self.stdout.write(self.style.WARNING(f'Изменится: {path}'))
                continue
            try:
                directory.mkdir(parents=True, exist_ok=True)
                write_text(text, path)
            except OSError as exc:
                raise CommandError(f"cannot write {path}: {exc}", returncode=4)
            self.stdout.write(f'Записан: {path}')

        if changed == 0:
            self.stdout.write(self.style.SUCCESS('Эталонные таблицы актуальны'))
            return
        verb = 'Изменится' if options['dry_run'] else 'Обновлено'
        self.stdout.write(self.style.SUCCESS(f'{verb} таблиц: {changed}'))
