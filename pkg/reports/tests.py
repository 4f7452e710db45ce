import json
import math
import shutil
import tempfile
from io import StringIO
from pathlib import Path
from unittest.mock import patch

import numpy as np
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from numpy.testing import assert_allclose
from scipy.integrate import simpson

from oracles.services import OracleMode, OracleReport

from .config import parse_config
from .serializers import SpectrumRowSerializer, VerificationRowSerializer
from .services import golden_tables, render_rows

SPECTRUM_HEADER = 'n,m,branch,energy,energy_expansion,beta0,dxmin_bound'


def run(command, *args):
    out = StringIO()
    call_command(command, *args, stdout=out)
    return out.getvalue()


def csv_rows(text):
    lines = text.splitlines()
    return lines[0], [line.split(',') for line in lines[1:]]


class ParseConfigTest(SimpleTestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def write_config(self, text):
        path = Path(self.temp_dir) / 'run.env'
        path.write_text(text, encoding='utf-8')
        return str(path)

    def assertConfigError(self, argv, config_file=None):
        with self.assertRaises(CommandError) as ctx:
            parse_config(argv, config_file)
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertNotIn('\n', str(ctx.exception))

    def test_flags_merge_with_defaults(self):
        config = parse_config(['spectrum', '--beta', '0.1', '--n-max', '5'])
        self.assertEqual(config.command, 'spectrum')
        self.assertEqual(config.beta, 0.1)
        self.assertEqual(list(config.n_values), [0, 1, 2, 3, 4, 5])
        self.assertEqual(config.m, 1)
        self.assertEqual(config.units, 'natural')
        self.assertEqual((config.grid_size, config.p_max), (4000, 12.0))
        self.assertEqual(config.output_format, 'csv')
        self.assertIsNone(config.out)
        self.assertEqual(config.tolerance, 1e-4)
        self.assertEqual(config.deformation.theta_tilde, 0.0)
        self.assertEqual(config.physical.B, 0.0)
        self.assertEqual(config.branches, ['plus', 'minus'])

    def test_negative_beta(self):
        self.assertConfigError(['spectrum', '--beta', '-1'])

    def test_beta_above_bound(self):
        # β₀ = 0.4 при m = 1 и ϱ₁ = λ = 1
        self.assertConfigError(['spectrum', '--beta', '0.4'])
        self.assertEqual(parse_config(['spectrum', '--beta', '0.39']).beta, 0.39)

    def test_overcritical_field(self):
        self.assertConfigError(['spectrum', '--b-field', '2'])

    def test_invalid_deformation(self):
        self.assertConfigError(['spectrum', '--theta', '-2'])

    def test_config_file_precedence(self):
        path = self.write_config('# run\nbeta=0.05\nn-max=3\nm_quantum=2\n')
        config = parse_config(['spectrum', '--beta', '0.1'], config_file=path)
        self.assertEqual(config.beta, 0.1)
        self.assertEqual(config.n_max, 3)
        self.assertEqual(config.m, 2)
        self.assertEqual(parse_config(['spectrum', '--config', path]).beta, 0.05)

    def test_unknown_config_key(self):
        path = self.write_config('beta=0.05\ncolour=blue\n')
        self.assertConfigError(['spectrum'], config_file=path)

    def test_non_numeric_config_value(self):
        path = self.write_config('beta=abc\n')
        self.assertConfigError(['spectrum'], config_file=path)

    def test_missing_config_file(self):
        self.assertConfigError(['spectrum'], config_file=str(Path(self.temp_dir) / 'absent.env'))

    def test_unknown_command(self):
        self.assertConfigError(['plot'])

    @patch('sys.stderr', new_callable=StringIO)
    def test_unknown_flag(self, mock_stderr):
        with self.assertRaises(SystemExit) as ctx:
            parse_config(['spectrum', '--bogus', '1'])
        self.assertEqual(ctx.exception.code, 2)

    @patch('sys.stderr', new_callable=StringIO)
    def test_non_numeric_flag(self, mock_stderr):
        with self.assertRaises(SystemExit) as ctx:
            parse_config(['spectrum', '--beta', 'abc'])
        self.assertEqual(ctx.exception.code, 2)

    def test_sweep_range(self):
        config = parse_config(['sweep', '--sweep-param', 'b-field', '--sweep-stop', '1', '--sweep-steps', '3'])
        self.assertEqual(config.sweep.column, 'b_field')
        self.assertEqual(config.sweep.values(), [0.0, 0.5, 1.0])
        self.assertEqual(config.at_sweep_point(0.5).physical.B, 0.5)

    def test_sweep_range_checked_at_every_point(self):
        self.assertConfigError(['sweep', '--sweep-param', 'beta', '--sweep-stop', '0.5'])
        self.assertConfigError(['sweep', '--sweep-param', 'b-field', '--sweep-stop', '2'])


class SpectrumCommandTest(SimpleTestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_default_table(self):
        header, rows = csv_rows(run('spectrum'))
        self.assertEqual(header, SPECTRUM_HEADER)
        self.assertEqual(len(rows), 22)
        self.assertEqual(rows[0], ['0', '1', 'plus', '1.00000000e+00', '1.00000000e+00',
                                   '4.00000000e-01', '6.32455532e-01'])
        self.assertEqual(rows[1][:4], ['0', '1', 'minus', '-1.00000000e+00'])
        self.assertEqual(rows[3][:4], ['1', '1', 'minus', f'{-math.sqrt(5):.8e}'])

    def test_noncommutative_level(self):
        _, rows = csv_rows(run('spectrum', '--theta', '1', '--thetabar', '1', '--n-max', '1'))
        plus = [row for row in rows if row[0] == '1' and row[2] == 'plus']
        self.assertEqual(plus[0][3], '3.16227766e+00')

    def test_minimal_length_level(self):
        _, rows = csv_rows(run('spectrum', '--beta', '0.04', '--n-max', '2', '--branch', 'plus'))
        self.assertEqual([row[2] for row in rows], ['plus'] * 3)
        self.assertAlmostEqual(float(rows[2][3]), math.sqrt(9.64), places=7)
        # первый порядок по β: 3·(1 + 0.04·8/9)
        self.assertAlmostEqual(float(rows[2][4]), 3 * (1 + 0.04 * 8 / 9), places=7)

    def test_zero_angular_momentum_has_no_bound(self):
        _, rows = csv_rows(run('spectrum', '--m-quantum', '0', '--n-max', '0', '--branch', 'plus'))
        self.assertEqual(rows, [['0', '0', 'plus', '1.00000000e+00', '1.00000000e+00', 'nan', 'nan']])

    def test_json_output(self):
        data = json.loads(run('spectrum', '--n-max', '0', '--format', 'json'))
        self.assertEqual(data[0], {
            'n': 0, 'm': 1, 'branch': 'plus', 'energy': 1.0, 'energy_expansion': 1.0,
            'beta0': 0.4, 'dxmin_bound': 0.632455532,
        })
        self.assertEqual(data[1]['energy'], -1.0)
        self.assertEqual(list(data[0]), list(SpectrumRowSerializer.columns))

    def test_deterministic(self):
        args = ('--theta', '0.3', '--thetabar', '0.2', '--beta', '0.02', '--b-field', '0.4')
        self.assertEqual(run('spectrum', *args), run('spectrum', *args))

    def test_out_file(self):
        path = Path(self.temp_dir) / 'spectrum.csv'
        out = run('spectrum', '--n-max', '3', '--out', str(path))
        self.assertIn('Записано строк: 8', out)
        self.assertEqual(path.read_text(encoding='utf-8'), run('spectrum', '--n-max', '3'))

    @patch('reports.management.base.write_text')
    def test_io_failure(self, mock_write_text):
        mock_write_text.side_effect = OSError('disk full')
        with self.assertLogs('reports.management.base', level='ERROR'):
            with self.assertRaises(CommandError) as ctx:
                run('spectrum', '--out', str(Path(self.temp_dir) / 'x.csv'))
        self.assertEqual(ctx.exception.returncode, 4)

    def test_missing_directory(self):
        with self.assertLogs('reports.management.base', level='ERROR'):
            with self.assertRaises(CommandError) as ctx:
                run('spectrum', '--out', str(Path(self.temp_dir) / 'absent' / 'x.csv'))
        self.assertEqual(ctx.exception.returncode, 4)

    def test_invalid_beta(self):
        with self.assertRaises(CommandError) as ctx:
            run('spectrum', '--beta', '-1')
        self.assertEqual(ctx.exception.returncode, 2)


class WavefunctionCommandTest(SimpleTestCase):
    def test_ground_state_table(self):
        header, rows = csv_rows(run('wavefunction', '--n-max', '0', '--grid-n', '400'))
        self.assertEqual(header, 'p,psi1,psi2')
        self.assertEqual(len(rows), 401)
        self.assertEqual(rows[0], ['0.00000000e+00', '0.00000000e+00', '0.00000000e+00'])

        values = np.array(rows, dtype=float)
        p, psi1, psi2 = values.T
        total = 2 * math.pi * simpson((psi1 ** 2 + psi2 ** 2) * p, x=p)
        self.assertAlmostEqual(total, 1.0, places=5)

    def test_minimal_length_table(self):
        _, rows = csv_rows(run('wavefunction', '--n-max', '1', '--grid-n', '400', '--beta', '0.04'))
        values = np.array(rows, dtype=float)
        p, psi1, psi2 = values.T
        weight = p / (1 + 0.04 * p ** 2)
        total = 2 * math.pi * simpson((psi1 ** 2 + psi2 ** 2) * weight, x=p)
        self.assertAlmostEqual(total, 1.0, places=5)

    def test_minimal_length_needs_angular_momentum(self):
        with self.assertRaises(CommandError) as ctx:
            run('wavefunction', '--beta', '0.04', '--m-quantum', '0', '--grid-n', '400')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_negative_branch_ground_state(self):
        with self.assertRaises(CommandError) as ctx:
            run('wavefunction', '--n-max', '0', '--branch', 'minus', '--grid-n', '400')
        self.assertEqual(ctx.exception.returncode, 2)


class VerifyCommandTest(SimpleTestCase):
    def report(self, error):
        return OracleReport(
            mode=OracleMode.KUMMER_RADIAL, grid_size=100, cutoffs=(0.1, 12.0),
            computed=(4.0 * (1 + error),), targets=(4.0,), rel_errors=(error,),
        )

    def test_default_suite_passes(self):
        header, rows = csv_rows(run('verify'))
        self.assertEqual(header, 'mode,n,computed,target,rel_err,pass')
        self.assertEqual({row[5] for row in rows}, {'true'})
        modes = [row[0] for row in rows]
        for mode in OracleMode.values:
            self.assertIn(mode, modes)

    def test_deterministic(self):
        args = ('--grid-n', '1000', '--tolerance', '1e-2')
        self.assertEqual(run('verify', *args), run('verify', *args))

    @patch('reports.management.commands.verify.run_verification_suite')
    def test_failure_exit_code(self, mock_suite):
        mock_suite.return_value = [self.report(1e-6), self.report(1e-2)]
        out = StringIO()
        with self.assertLogs('reports', level='WARNING'):
            with self.assertRaises(CommandError) as ctx:
                call_command('verify', stdout=out)
        self.assertEqual(ctx.exception.returncode, 3)
        _, rows = csv_rows(out.getvalue())
        self.assertEqual([row[5] for row in rows], ['true', 'false'])

    @patch('reports.management.commands.verify.run_verification_suite')
    def test_tolerance_flag(self, mock_suite):
        mock_suite.return_value = [self.report(1e-2)]
        _, rows = csv_rows(run('verify', '--tolerance', '0.05'))
        self.assertEqual(rows[0][5], 'true')

    @patch('reports.management.commands.verify.run_verification_suite')
    def test_json_pass_flag(self, mock_suite):
        mock_suite.return_value = [self.report(1e-6)]
        data = json.loads(run('verify', '--format', 'json'))
        self.assertEqual(list(data[0]), ['mode', 'n', 'computed', 'target', 'rel_err', 'pass'])
        self.assertIs(data[0]['pass'], True)


class SweepCommandTest(SimpleTestCase):
    def test_beta_sweep(self):
        header, rows = csv_rows(run(
            'sweep', '--sweep-param', 'beta', '--sweep-start', '0', '--sweep-stop', '0.1',
            '--sweep-steps', '3', '--n-max', '1', '--branch', 'plus',
        ))
        self.assertEqual(header, 'beta,' + SPECTRUM_HEADER)
        self.assertEqual([row[0] for row in rows],
                         ['0.00000000e+00'] * 2 + ['5.00000000e-02'] * 2 + ['1.00000000e-01'] * 2)
        self.assertEqual(rows[1][4], f'{math.sqrt(5):.8e}')

    def test_field_sweep(self):
        header, rows = csv_rows(run(
            'sweep', '--sweep-param', 'b-field', '--sweep-stop', '1', '--sweep-steps', '2',
            '--n-max', '1', '--branch', 'plus',
        ))
        self.assertEqual(header, 'b_field,' + SPECTRUM_HEADER)
        # ω̃ = 1/2 при ωc = 1: E₁ = √3, β₀ = 0.8
        self.assertEqual(rows[3][0], '1.00000000e+00')
        self.assertEqual(rows[3][4], f'{math.sqrt(3):.8e}')
        self.assertEqual(rows[3][6], '8.00000000e-01')


class RenderTest(SimpleTestCase):
    def test_boolean_column_in_csv(self):
        rows = [{'mode': 'ode_residual', 'n': 2, 'computed': 1e-9, 'target': 0.0, 'rel_err': 1e-9, 'passed': False}]
        text = render_rows(rows, VerificationRowSerializer, 'csv')
        self.assertEqual(text, 'mode,n,computed,target,rel_err,pass\n'
                               'ode_residual,2,1.00000000e-09,0.00000000e+00,1.00000000e-09,false\n')

    def test_significant_digits(self):
        rows = [{'n': 0, 'm': 1, 'branch': 'plus', 'energy': math.pi, 'energy_expansion': math.pi,
                 'beta0': None, 'dxmin_bound': None}]
        data = json.loads(render_rows(rows, SpectrumRowSerializer, 'json'))
        self.assertEqual(data[0]['energy'], 3.14159265)
        self.assertIsNone(data[0]['beta0'])


class GoldenFileTest(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.tables = golden_tables()

    def test_tables_pass(self):
        self.assertEqual(sorted(self.tables), ['kummer_m0.csv', 'kummer_m1.csv', 'poschl_teller.csv'])
        for name, text in self.tables.items():
            header, rows = csv_rows(text)
            self.assertEqual(header, 'mode,n,computed,target,rel_err,pass')
            self.assertEqual(len(rows), 5, name)
            self.assertEqual({row[5] for row in rows}, {'true'}, name)

    def test_committed_files_match(self):
        for name, text in self.tables.items():
            path = Path(settings.DIRAC_GOLDEN_DIR) / name
            self.assertTrue(path.is_file(), f'{path} is missing; run manage.py refresh_golden')
            committed_header, committed = csv_rows(path.read_text(encoding='utf-8'))
            header, rows = csv_rows(text)
            self.assertEqual(committed_header, header, name)
            self.assertEqual(len(committed), len(rows), name)
            for column in (0, 1, 3, 5):
                self.assertEqual([row[column] for row in committed], [row[column] for row in rows], name)
            # последний знак может сдвинуться от ulp в sin/cos
            assert_allclose([float(row[2]) for row in committed], [float(row[2]) for row in rows], rtol=1e-8)
            assert_allclose([float(row[4]) for row in committed], [float(row[4]) for row in rows], rtol=0, atol=1e-12)


class RefreshGoldenCommandTest(SimpleTestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    @patch('reports.management.commands.refresh_golden.golden_tables')
    def test_writes_and_skips_unchanged(self, mock_tables):
        mock_tables.return_value = {'kummer_m0.csv': 'mode,n\nkummer_radial,0\n'}
        out = run('refresh_golden', '--dir', self.temp_dir)
        self.assertIn('Обновлено таблиц: 1', out)
        path = Path(self.temp_dir) / 'kummer_m0.csv'
        self.assertEqual(path.read_text(encoding='utf-8'), 'mode,n\nkummer_radial,0\n')
        self.assertIn('актуальны', run('refresh_golden', '--dir', self.temp_dir))

    @patch('reports.management.commands.refresh_golden.golden_tables')
    def test_dry_run(self, mock_tables):
        mock_tables.return_value = {'poschl_teller.csv': 'x\n'}
        out = run('refresh_golden', '--dir', self.temp_dir, '--dry-run')
        self.assertIn('Изменится', out)
        self.assertFalse((Path(self.temp_dir) / 'poschl_teller.csv').exists())
