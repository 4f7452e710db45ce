import math
from dataclasses import replace

import numpy as np
from django.test import SimpleTestCase, override_settings
from numpy.testing import assert_allclose
from scipy.linalg import eigh_tridiagonal

from oscillator.exceptions import BetaOutOfRange, CutoffTooSmall, EmptyOperator, GridTooCoarse, InvalidM
from oscillator.params import DeformationParams, PhysicalParams, UnitsMode, derive_coefficients
from oscillator.spectrum import beta_limit, energy_nc
from oscillator.wavefun import (
    RadialTable,
    RadialWeight,
    apply_ladder_minus,
    apply_ladder_plus,
    make_grid,
    radial_ml,
    radial_nc,
)

from .services import (
    OracleMode,
    OracleReport,
    kummer_oracle,
    ode_residual,
    operator_expansion_check,
    poschl_teller_levels,
    pt_oracle,
    relative_error,
    run_verification_suite,
    summarize,
)
from .tridiagonal import TridiagonalOperator, gershgorin_bounds, sturm_count, tridiag_eigs


def natural(theta=0.0, beta=0.0):
    return derive_coefficients(PhysicalParams(), DeformationParams(theta_tilde=theta, beta=beta), UnitsMode.NATURAL)


class TridiagonalEigenvalueTest(SimpleTestCase):
    def test_three_by_three(self):
        values = tridiag_eigs(TridiagonalOperator([2.0, 2.0, 2.0], [-1.0, -1.0]), 3)
        assert_allclose(values, [2 - math.sqrt(2), 2.0, 2 + math.sqrt(2)], rtol=0, atol=1e-13)

    def test_one_by_one(self):
        self.assertAlmostEqual(tridiag_eigs(TridiagonalOperator([5.0], []), 1)[0], 5.0, places=13)

    def test_decoupled(self):
        assert_allclose(tridiag_eigs(TridiagonalOperator([3.0, 3.0], [0.0]), 2), [3.0, 3.0], rtol=0, atol=1e-13)

    def test_empty_operator(self):
        operator = TridiagonalOperator([], [])
        with self.assertRaises(EmptyOperator):
            tridiag_eigs(operator, 0)
        with self.assertRaises(EmptyOperator):
            sturm_count(operator, 1.0)

    def test_count_out_of_range(self):
        with self.assertRaises(ValueError):
            tridiag_eigs(TridiagonalOperator([1.0, 2.0], [0.5]), 3)

    def test_offdiag_length_checked(self):
        with self.assertRaises(ValueError):
            TridiagonalOperator([1.0, 2.0], [0.5, 0.5])

    def test_matches_lapack(self):
        rng = np.random.default_rng(7)
        diag = rng.uniform(-5, 5, 200)
        offdiag = rng.uniform(-2, 2, 199)
        expected = eigh_tridiagonal(diag, offdiag, eigvals_only=True)
        values = tridiag_eigs(TridiagonalOperator(diag, offdiag), 10)
        assert_allclose(values, expected[:10], rtol=0, atol=1e-11)
        lower, upper = gershgorin_bounds(TridiagonalOperator(diag, offdiag))
        self.assertLessEqual(lower, expected[0])
        self.assertGreaterEqual(upper, expected[-1])

    def test_sturm_count_consistency(self):
        """Число отрицательных ведущих элементов совпадает с числом собственных значений ниже сдвига"""
        rng = np.random.default_rng(11)
        diag = rng.uniform(0, 10, 60)
        offdiag = rng.uniform(-1, 1, 59)
        operator = TridiagonalOperator(diag, offdiag)
        expected = eigh_tridiagonal(diag, offdiag, eigvals_only=True)
        shifts = 0.5 * (expected[:-1] + expected[1:])
        for index, shift in enumerate(shifts):
            self.assertEqual(sturm_count(operator, shift), index + 1)
        self.assertEqual(sturm_count(operator, expected[0] - 1), 0)
        self.assertEqual(sturm_count(operator, expected[-1] + 1), 60)


class KummerOracleTest(SimpleTestCase):
    def test_commutative_channels(self):
        for m, targets in ((0, [2, 6, 10, 14, 18]), (1, [4, 8, 12, 16, 20])):
            report = kummer_oracle(natural(), m, 3000, 12.0, 5)
            self.assertEqual(report.mode, OracleMode.KUMMER_RADIAL)
            assert_allclose(report.targets, targets)
            self.assertTrue(all(report.passes(1e-4)), report.rel_errors)
            self.assertTrue(all(error <= 1e-4 for error in report.energy_rel_errors))

    def test_mapped_energy(self):
        report = kummer_oracle(natural(), 0, 3000, 12.0, 2)
        self.assertAlmostEqual(report.energies[1] / math.sqrt(5), 1.0, delta=1e-4)
        self.assertEqual(report.energy_targets[1], energy_nc(natural(), 1).value)

    def test_scaled_width(self):
        coeffs = natural(theta=2.0)
        self.assertEqual(coeffs.k, 2.0)
        report = kummer_oracle(coeffs, 0, 3000, 12.0, 3)
        assert_allclose(report.computed, [4, 12, 20], rtol=1e-4)

    def test_refinement_improves_agreement(self):
        errors = [kummer_oracle(natural(), 0, size, 12.0, 5).rel_errors for size in (1000, 2000, 4000)]
        for level in range(5):
            self.assertGreater(errors[0][level], errors[1][level])
            self.assertGreater(errors[1][level], errors[2][level])

    def test_cutoff_too_small(self):
        with self.assertRaises(CutoffTooSmall):
            kummer_oracle(natural(), 0, 3000, 5.0, 3)

    def test_grid_too_coarse(self):
        with self.assertRaises(GridTooCoarse):
            kummer_oracle(natural(), 0, 5, 12.0, 3)


class PoschlTellerOracleTest(SimpleTestCase):
    def setUp(self):
        self.coeffs = natural(beta=0.04)

    def test_particle_in_a_box(self):
        """При ζ₁ = ζ₂ = 1 потенциал исчезает: ящик ширины π/2"""
        assert_allclose(poschl_teller_levels(1.0, 1.0, 1.0, 2000, 3), [4.0, 16.0, 36.0], rtol=1e-8)
        assert_allclose(poschl_teller_levels(1.0, 1.0, 1.0, 2000, 3, richardson=False), [4.0, 16.0, 36.0], rtol=1e-5)

    def test_deformed_levels(self):
        report = pt_oracle(self.coeffs, 0.04, 1, 4000, 5)
        self.assertEqual(report.mode, OracleMode.POSCHL_TELLER)
        assert_allclose(report.targets, [0.04 * (25 + 2 * n) ** 2 for n in range(5)], rtol=1e-12)
        assert_allclose(report.targets[:3], [25.0, 29.16, 33.64], rtol=1e-12)
        self.assertTrue(all(report.passes(1e-4)), report.rel_errors)
        self.assertLessEqual(abs(report.energies[0] - 1.0), 1e-6)
        self.assertTrue(all(error <= 1e-4 for error in report.energy_rel_errors))

    def test_ground_energy_below_rest_energy(self):
        report = pt_oracle(self.coeffs, 0.04, 1, 1000, 5)
        self.assertLess(report.computed[0], report.targets[0])
        self.assertLess(report.energies[0], 1.0)
        self.assertGreater(report.energy_rel_errors[0], 1e-7)
        self.assertLess(report.energy_rel_errors[0], 1e-6)

    def test_refinement_improves_agreement(self):
        errors = [pt_oracle(self.coeffs, 0.04, 1, size, 5).rel_errors for size in (1000, 2000, 4000)]
        for level in range(5):
            self.assertGreater(errors[0][level], errors[1][level])
            self.assertGreater(errors[1][level], errors[2][level])

    def test_grid_sizes_recorded(self):
        report = pt_oracle(self.coeffs, 0.04, 1, 1000, 3)
        self.assertEqual(report.grid_size, 1000)
        self.assertEqual(report.fine_grid_size, 2001)
        self.assertIsNone(pt_oracle(self.coeffs, 0.04, 1, 1000, 3, richardson=False).fine_grid_size)

    def test_plain_three_point_scheme(self):
        report = pt_oracle(self.coeffs, 0.04, 1, 4000, 5, richardson=False)
        self.assertTrue(all(report.passes(1e-4)), report.rel_errors)

    def test_mirror_symmetry(self):
        zeta1, zeta2 = self.coeffs.zetas(1)
        direct = poschl_teller_levels(zeta1, zeta2, 0.2, 1000, 4, richardson=False)
        mirrored = poschl_teller_levels(zeta2, zeta1, 0.2, 1000, 4, richardson=False)
        assert_allclose(mirrored, direct, rtol=1e-6)

    def test_invalid_inputs(self):
        with self.assertRaises(InvalidM):
            pt_oracle(self.coeffs, 0.04, 0, 4000, 5)
        with self.assertRaises(BetaOutOfRange):
            pt_oracle(self.coeffs, 0.4, 1, 4000, 5)
        with self.assertRaises(GridTooCoarse):
            pt_oracle(self.coeffs, 0.04, 1, 4, 5)


class OperatorExpansionTest(SimpleTestCase):
    def setUp(self):
        self.coeffs = natural()
        self.grid = make_grid(10000, 10.0)

    def gaussian(self, power, width):
        values = self.grid ** power * np.exp(-width * self.grid ** 2)
        return RadialTable(grid=self.grid, values=values, weight=RadialWeight.PLAIN_POLAR, norm=0.0)

    def test_ground_state_is_annihilated(self):
        ground = radial_nc(self.coeffs, 0, 0, self.grid)
        composed = apply_ladder_minus(self.coeffs, 0.0, apply_ladder_plus(self.coeffs, 0.0, ground, 0), 0)
        self.assertLessEqual(np.max(np.abs(composed.values[4:-4])), 1e-6 * np.max(np.abs(ground.values)))
        report = operator_expansion_check(self.coeffs, 0.0, ground, 0)
        self.assertLessEqual(report.computed[0], 1e-6)

    def test_commutative_expansion(self):
        report = operator_expansion_check(self.coeffs, 0.0, self.gaussian(1, 0.5), 1)
        self.assertEqual(report.mode, OracleMode.OPERATOR_EXPANSION)
        self.assertLessEqual(report.rel_errors[0], 1e-6)

    def test_deformed_expansion(self):
        for m, power, width in ((0, 0, 0.35), (1, 1, 0.7), (2, 2, 0.4)):
            report = operator_expansion_check(self.coeffs, 0.05, self.gaussian(power, width), m)
            self.assertLessEqual(report.rel_errors[0], 1e-6)

    def test_channel_dependence(self):
        """Тождество выполняется в любом канале, а сами каналы различимы"""
        table = self.gaussian(1, 0.5)
        report = operator_expansion_check(self.coeffs, 0.0, table, 2)
        self.assertLessEqual(report.rel_errors[0], 1e-6)
        composed = apply_ladder_minus(self.coeffs, 0.0, apply_ladder_plus(self.coeffs, 0.0, table, 1), 1).values
        expected = apply_ladder_minus(self.coeffs, 0.0, apply_ladder_plus(self.coeffs, 0.0, table, 2), 2).values
        self.assertGreater(np.max(np.abs(composed - expected)[4:-4]), 1e-2)

    def test_grid_too_coarse(self):
        table = radial_nc(self.coeffs, 0, 0, make_grid(6, 1.0))
        with self.assertRaises(GridTooCoarse):
            operator_expansion_check(self.coeffs, 0.0, table, 0)


class OdeResidualTest(SimpleTestCase):
    def setUp(self):
        self.coeffs = natural()
        self.grid = make_grid(2000, 10.0)

    def test_closed_form_satisfies_equation(self):
        for m in range(0, 3):
            for n in range(0, 4):
                report = ode_residual(radial_nc(self.coeffs, n, m, self.grid), self.coeffs, n, m, p_min=0.05)
                self.assertEqual(report.levels, (n,))
                self.assertLessEqual(report.computed[0], 1e-6, (n, m))

    def test_minimal_length_solution(self):
        grid = make_grid(4000, 12.0)
        for n in range(0, 3):
            table = radial_ml(self.coeffs, 0.04, n, 1, grid)
            self.assertLessEqual(ode_residual(table, self.coeffs, n, 1).computed[0], 1e-6)

    def test_detects_perturbation(self):
        table = radial_nc(self.coeffs, 1, 1, self.grid)
        perturbed = replace(table, values=table.values * (1 + 0.01 * self.grid))
        self.assertGreater(ode_residual(perturbed, self.coeffs, 1, 1, p_min=0.05).computed[0], 1e-3)

    def test_wrong_level_detected(self):
        table = radial_nc(self.coeffs, 2, 0, self.grid)
        self.assertGreater(ode_residual(table, self.coeffs, 1, 0, p_min=0.05).computed[0], 1e-1)

    def test_second_order_convergence(self):
        residuals = []
        for size in (1000, 2000):
            table = radial_nc(self.coeffs, 2, 1, make_grid(size, 10.0))
            residuals.append(ode_residual(table, self.coeffs, 2, 1, order=2, p_min=0.5).computed[0])
        ratio = residuals[0] / residuals[1]
        self.assertGreaterEqual(ratio, 3.5)
        self.assertLessEqual(ratio, 4.5)

    def test_grid_too_coarse(self):
        table = radial_nc(self.coeffs, 0, 0, make_grid(50, 10.0))
        with self.assertRaises(GridTooCoarse):
            ode_residual(table, self.coeffs, 0, 0)


class OracleReportTest(SimpleTestCase):
    def test_relative_error(self):
        self.assertEqual(relative_error(2.0, 4.0), 0.5)
        self.assertEqual(relative_error(1e-9, 0.0), 1e-9)

    def test_lengths_must_match(self):
        with self.assertRaises(ValueError):
            OracleReport(mode=OracleMode.ODE_RESIDUAL, grid_size=10, cutoffs=(0.0, 1.0),
                         computed=(1.0,), targets=(1.0, 2.0), rel_errors=(0.0,))

    @override_settings(DIRAC_VERIFY_BETA=0.04, DIRAC_ORACLE_COUNT=3)
    def test_verification_suite(self):
        reports = run_verification_suite(natural(), 0.0, 1, 2000, 12.0)
        modes = [report.mode for report in reports]
        self.assertEqual(modes[:3], [OracleMode.KUMMER_RADIAL, OracleMode.KUMMER_RADIAL, OracleMode.POSCHL_TELLER])
        self.assertEqual(reports[2].beta, 0.04)
        self.assertEqual(len(reports[0].computed), 3)
        self.assertIn(OracleMode.OPERATOR_EXPANSION, modes)
        self.assertIn(OracleMode.ODE_RESIDUAL, modes)
        rows, failures = summarize(reports, 1e-4)
        self.assertEqual(failures, 0)
        self.assertEqual(rows, sum(len(report.computed) for report in reports))

    @override_settings(DIRAC_VERIFY_BETA=0.04)
    def test_verification_beta_capped_by_limit(self):
        coeffs = derive_coefficients(PhysicalParams(), DeformationParams(theta_bar=20.0), UnitsMode.NATURAL)
        self.assertLess(beta_limit(coeffs, 1), 0.04)
        reports = run_verification_suite(coeffs, 0.0, 1, 1000, 40.0, 2)
        pt_report = next(report for report in reports if report.mode == OracleMode.POSCHL_TELLER)
        self.assertEqual(pt_report.beta, 0.5 * beta_limit(coeffs, 1))
        self.assertLess(pt_report.beta, beta_limit(coeffs, 1))

    @override_settings(DIRAC_ORACLE_COUNT=2)
    def test_suite_without_angular_momentum(self):
        with self.assertLogs('oracles.services', level='WARNING'):
            reports = run_verification_suite(natural(), 0.0, 0, 2000, 12.0)
        self.assertNotIn(OracleMode.POSCHL_TELLER, [report.mode for report in reports])
