import math
from dataclasses import asdict

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose
from scipy import special

from .exceptions import (
    BetaOutOfRange,
    DenominatorPole,
    DenominatorZero,
    GridTooCoarse,
    InvalidDeformation,
    InvalidM,
    NonPositiveFrequency,
    OscillatorError,
    TailTooHeavy,
    ZeroBeta,
)
from .params import DeformationParams, PhysicalParams, QuantumNumbers, UnitsMode, derive_coefficients
from .specfun import hyp1f1_poly, hyp1f1_poly_recurrence, hyp1f1_term_scale, hyp2f1_poly, pochhammer
from .spectrum import (
    Branch,
    beta_bound,
    energy_levels,
    energy_ml,
    energy_ml_expansion,
    energy_from_xi_bar_squared,
    energy_nc,
    energy_pt,
    large_n_asymptote,
    large_n_frequency,
)
from .wavefun import (
    RadialWeight,
    apply_ladder_plus,
    assemble_spinor,
    first_derivative,
    make_grid,
    normalize,
    overlap,
    p_of_q,
    p_of_z,
    q_of_p,
    radial_ml,
    radial_nc,
    second_derivative,
    z_of_p,
)


def natural(theta=0.0, thetabar=0.0, beta=0.0, b_field=0.0):
    return derive_coefficients(
        PhysicalParams(B=b_field),
        DeformationParams(theta_tilde=theta, theta_bar=thetabar, beta=beta),
        UnitsMode.NATURAL,
    )


class DeriveCoefficientsTest(SimpleTestCase):
    def test_commutative_limit(self):
        coeffs = natural()
        self.assertEqual(coeffs.rho1, 1.0)
        self.assertEqual(coeffs.rho2, 1.0)
        self.assertEqual(coeffs.lam, 1.0)
        self.assertEqual(coeffs.k, 1.0)
        self.assertEqual(coeffs.omega_eff, 1.0)

    def test_noncommutative_substitution(self):
        coeffs = natural(theta=1.0, thetabar=1.0)
        self.assertEqual(coeffs.rho1, 1.5)
        self.assertEqual(coeffs.rho2, 1.5)
        self.assertEqual(coeffs.lam, 1.5)
        # в спектр входит произведение ϱ₁λ
        self.assertEqual(coeffs.rho1 * coeffs.lam, 2.25)
        self.assertAlmostEqual(coeffs.k * coeffs.lam, coeffs.rho1, places=15)

    def test_field_reduces_frequency(self):
        coeffs = natural(b_field=1.0)
        self.assertEqual(coeffs.omega_c, 1.0)
        self.assertEqual(coeffs.omega_eff, 0.5)

    def test_zetas_and_u(self):
        coeffs = natural(beta=0.04)
        self.assertAlmostEqual(coeffs.u, 0.2, places=15)
        zeta1, zeta2 = coeffs.zetas(1)
        self.assertEqual(zeta1, 1.5)
        self.assertAlmostEqual(zeta2, 23.5, places=12)
        for m in range(-3, 6):
            zeta1, zeta2 = coeffs.zetas(m)
            self.assertAlmostEqual(zeta1 + zeta2, coeffs.rho1 / (0.04 * coeffs.lam), places=12)

    def test_zetas_need_beta(self):
        with self.assertRaises(ZeroBeta):
            natural().zetas(1)

    def test_overcritical_field_rejected(self):
        with self.assertRaises(NonPositiveFrequency):
            natural(b_field=2.0)

    def test_invalid_deformation(self):
        with self.assertRaises(InvalidDeformation):
            natural(theta=-4.0)
        with self.assertRaises(InvalidDeformation):
            natural(thetabar=-3.0)

    def test_invalid_physical_params(self):
        with self.assertRaises(OscillatorError):
            PhysicalParams(m0=0.0)
        with self.assertRaises(OscillatorError):
            PhysicalParams(B=-1.0)
        with self.assertRaises(BetaOutOfRange):
            DeformationParams(beta=-0.1)
        with self.assertRaises(OscillatorError):
            QuantumNumbers(n=-1, m=0)
        self.assertEqual(QuantumNumbers(n=2, m=-3).abs_m, 3)

    def test_zero_field_matches_no_field(self):
        """with_field при B = 0 даёт тот же результат, что и без поля"""
        phys = PhysicalParams(omega=2.0, B=0.0)
        deformation = DeformationParams(theta_tilde=0.3, theta_bar=0.7, beta=0.01)
        with_field = derive_coefficients(phys, deformation, UnitsMode.GENERAL, with_field=True)
        without = derive_coefficients(phys, deformation, UnitsMode.GENERAL, with_field=False)
        self.assertEqual(with_field, without)

    def test_natural_equals_general_at_unit_constants(self):
        deformation = DeformationParams(theta_tilde=0.4, theta_bar=0.2, beta=0.02)
        natural_coeffs = asdict(derive_coefficients(PhysicalParams(m0=5.0, omega=3.0), deformation, UnitsMode.NATURAL))
        general_coeffs = asdict(derive_coefficients(PhysicalParams(), deformation, UnitsMode.GENERAL))
        natural_coeffs.pop('units')
        general_coeffs.pop('units')
        self.assertEqual(natural_coeffs, general_coeffs)

    def test_characteristic_length(self):
        coeffs = derive_coefficients(PhysicalParams(m0=2.0, omega=2.0), DeformationParams(), UnitsMode.GENERAL)
        self.assertAlmostEqual(coeffs.characteristic_length(), 0.5, places=15)


class SpecialFunctionsTest(SimpleTestCase):
    def test_pochhammer(self):
        self.assertEqual(pochhammer(3, 2), 12)
        self.assertEqual(pochhammer(0.7, 0), 1)
        self.assertEqual(pochhammer(-2, 4), 0)

    def test_hyp1f1_small_degrees(self):
        self.assertEqual(hyp1f1_poly(0, 3.5, 7.0), 1.0)
        self.assertAlmostEqual(hyp1f1_poly(1, 2, 1), 0.5, places=15)
        self.assertAlmostEqual(hyp1f1_poly(2, 1, 1), 0.5, places=15)

    def test_hyp2f1_small_degrees(self):
        self.assertEqual(hyp2f1_poly(0, 2.0, 3.0, 0.5), 1.0)
        self.assertAlmostEqual(hyp2f1_poly(1, 3, 2, 1), -0.5, places=15)
        self.assertEqual(hyp2f1_poly(7, 2.5, 1.5, 0.0), 1.0)

    def test_denominator_pole(self):
        with self.assertRaises(DenominatorPole):
            hyp1f1_poly(2, -1, 0.3)
        with self.assertRaises(DenominatorPole):
            hyp2f1_poly(3, 1.0, 0, 0.3)
        # c = −1 не мешает полиному первой степени
        self.assertAlmostEqual(hyp1f1_poly(1, -1, 2.0), 3.0, places=15)

    def test_array_input(self):
        x = np.array([0.0, 1.0, 2.0])
        assert_allclose(hyp1f1_poly(1, 1, x), 1 - x, rtol=0, atol=1e-15)

    def test_recurrence_agreement_negative_argument(self):
        x = np.linspace(-50, 0, 41)
        for n in (0, 1, 5, 20, 50):
            for c in range(1, 11):
                assert_allclose(hyp1f1_poly(n, c, x), hyp1f1_poly_recurrence(n, c, x), rtol=1e-12)

    def test_recurrence_agreement_positive_argument(self):
        """При x > 0 члены ряда чередуются, сравнение идёт относительно суммы модулей"""
        x = np.linspace(0, 50, 41)
        for n in (1, 5, 20, 50):
            for c in range(1, 11):
                scale = hyp1f1_term_scale(n, c, x)
                diff = np.abs(hyp1f1_poly(n, c, x) - hyp1f1_poly_recurrence(n, c, x))
                self.assertTrue(np.all(diff <= 1e-12 * scale))

    def test_matches_scipy(self):
        for n, c, x in [(3, 1.0, 0.7), (6, 2.5, 4.0), (10, 3.0, -2.0)]:
            assert_allclose(hyp1f1_poly(n, c, x), special.hyp1f1(-n, c, x), rtol=1e-9, atol=1e-9)
            assert_allclose(hyp2f1_poly(n, 2.5, c, 0.3), special.hyp2f1(-n, 2.5, c, 0.3), rtol=1e-9, atol=1e-9)

    def test_chu_vandermonde(self):
        for n in range(0, 11):
            for b in range(1, 5):
                for c in range(5, 10):
                    expected = pochhammer(c - b, n) / pochhammer(c, n)
                    actual = hyp2f1_poly(n, b, c, 1.0)
                    # при z = −1 все члены положительны: это сумма модулей ряда в z = 1
                    scale = hyp2f1_poly(n, b, c, -1.0)
                    self.assertLessEqual(abs(actual - expected), 1e-12 * scale)
            if n <= 3:
                self.assertAlmostEqual(hyp2f1_poly(n, 1, 5, 1.0) / (pochhammer(4, n) / pochhammer(5, n)), 1.0, delta=1e-12)

    def test_exact_degree(self):
        x = np.linspace(0.0, 1.0, 12)
        for n in range(0, 6):
            self.assertLess(np.max(np.abs(np.diff(hyp1f1_poly(n, 2.0, x), n + 1))), 1e-10)
            self.assertLess(np.max(np.abs(np.diff(hyp2f1_poly(n, 1.5, 2.0, x), n + 1))), 1e-10)


class SpectrumTest(SimpleTestCase):
    def setUp(self):
        self.coeffs = natural()

    def test_ground_state_is_rest_energy(self):
        self.assertEqual(energy_nc(self.coeffs, 0).value, 1.0)
        self.assertEqual(energy_ml(self.coeffs, 0.1, 0, m=1).value, 1.0)
        self.assertEqual(energy_nc(self.coeffs, 0, Branch.MINUS).value, -1.0)

    def test_closed_form_values(self):
        self.assertAlmostEqual(energy_nc(self.coeffs, 1).value, math.sqrt(5), places=14)
        self.assertAlmostEqual(energy_nc(natural(theta=1, thetabar=1), 1).value, math.sqrt(10), places=14)
        self.assertAlmostEqual(energy_ml(self.coeffs, 0.1, 1, m=1).value, math.sqrt(5.4), places=14)

    def test_general_units(self):
        coeffs = derive_coefficients(
            PhysicalParams(m0=2.0, omega=3.0, c=2.0, hbar=0.5), DeformationParams(), UnitsMode.GENERAL
        )
        self.assertAlmostEqual(energy_nc(coeffs, 1).value, math.sqrt(112), places=12)

    def test_no_gup_limit(self):
        for n in range(0, 11):
            self.assertEqual(energy_ml(self.coeffs, 0.0, n).value, energy_nc(self.coeffs, n).value)
            exact = energy_nc(self.coeffs, n).value
            self.assertLessEqual(abs(energy_ml(self.coeffs, 1e-6, n, m=1).value - exact), 1e-5 * exact)

    def test_branch_symmetry_and_monotonicity(self):
        previous = 0.0
        for n in range(0, 20):
            plus = energy_ml(self.coeffs, 0.05, n, Branch.PLUS).value
            minus = energy_ml(self.coeffs, 0.05, n, Branch.MINUS).value
            self.assertEqual(minus, -plus)
            self.assertGreater(plus, previous)
            self.assertGreaterEqual(plus, 1.0)
            previous = plus
        self.assertGreater(energy_ml(self.coeffs, 0.06, 3).value, energy_ml(self.coeffs, 0.05, 3).value)

    def test_beta_bound(self):
        bound = beta_bound(self.coeffs, 1)
        self.assertAlmostEqual(bound.beta0, 0.4, places=15)
        self.assertAlmostEqual(bound.dx_min_bound, math.sqrt(0.4), places=12)
        self.assertEqual(bound.dx_min_bound, self.coeffs.hbar * math.sqrt(bound.beta0))
        self.assertAlmostEqual(beta_bound(natural(theta=1.0), 1).beta0, 0.6, places=15)

    def test_beta_bound_rejects_m_zero(self):
        with self.assertRaises(InvalidM):
            beta_bound(self.coeffs, 0)

    def test_beta_out_of_range(self):
        with self.assertRaises(BetaOutOfRange):
            energy_ml(self.coeffs, 0.4, 1, m=1)
        with self.assertRaises(BetaOutOfRange):
            energy_ml(self.coeffs, -1.0, 1)
        # без канала m значение формулы не ограничено
        self.assertGreater(energy_ml(self.coeffs, 0.4, 1).value, 0)

    def test_m_zero_is_advisory(self):
        with self.assertLogs('oscillator.spectrum', level='WARNING'):
            value = energy_ml(self.coeffs, 0.04, 2, m=0).value
        self.assertAlmostEqual(value, math.sqrt(9.64), places=14)

    def test_m_independence(self):
        reference = energy_ml(self.coeffs, 0.04, 3).value
        for m in range(1, 6):
            self.assertAlmostEqual(energy_pt(self.coeffs, 0.04, 3, m).value / reference, 1.0, delta=1e-12)
            self.assertEqual(energy_ml(self.coeffs, 0.04, 3, m=m).value, reference)

    def test_expansion(self):
        self.assertEqual(energy_ml_expansion(self.coeffs, 0.0, 4).value, energy_nc(self.coeffs, 4).value)
        self.assertAlmostEqual(energy_ml_expansion(self.coeffs, 1e-3, 2).value, 3 * (1 + 1e-3 * 8 / 9), places=14)
        self.assertAlmostEqual(energy_ml(self.coeffs, 1e-3, 2).value, math.sqrt(9.016), places=14)

    def test_expansion_gap_is_second_order(self):
        def gap(beta):
            return abs(energy_ml(self.coeffs, beta, 2).value - energy_ml_expansion(self.coeffs, beta, 2).value)

        for beta in (1e-3, 5e-4):
            ratio = gap(beta) / gap(beta / 2)
            self.assertGreaterEqual(ratio, 3.5)
            self.assertLessEqual(ratio, 4.5)

    def test_expansion_uses_rho2_squared(self):
        coeffs = natural(thetabar=1.0)
        self.assertEqual(coeffs.rho2, 1.5)
        base = math.sqrt(13.0)
        self.assertAlmostEqual(energy_ml_expansion(coeffs, 1e-3, 2).value, base * (1 + 1e-3 * 18 / 13), places=14)

        def gap(beta):
            return abs(energy_ml(coeffs, beta, 2).value - energy_ml_expansion(coeffs, beta, 2).value)

        ratio = gap(1e-3) / gap(5e-4)
        self.assertGreaterEqual(ratio, 3.5)
        self.assertLessEqual(ratio, 4.5)

    def test_xi_below_threshold_keeps_sign(self):
        beta = 0.04
        threshold = self.coeffs.rho1 ** 2 / beta
        below = energy_from_xi_bar_squared(self.coeffs, beta, 0, threshold - 0.5)
        self.assertAlmostEqual(below.value, math.sqrt(0.5), places=12)
        self.assertLess(below.value, self.coeffs.rest_energy)
        far_below = energy_from_xi_bar_squared(self.coeffs, beta, 0, threshold - 10.0)
        self.assertAlmostEqual(far_below.value, -3.0, places=12)

    def test_large_n_frequency(self):
        self.assertAlmostEqual(large_n_frequency(self.coeffs, 0.01), 0.2, places=15)
        self.assertLess(large_n_frequency(self.coeffs, 1e-12), 1e-5)
        with self.assertRaises(ZeroBeta):
            large_n_frequency(self.coeffs, 0.0)

    def test_large_n_asymptote(self):
        omega_bar = large_n_frequency(self.coeffs, 0.01)
        n = 10 ** 6
        ratio = energy_ml(self.coeffs, 0.01, n).value / (self.coeffs.hbar * omega_bar * n)
        self.assertGreaterEqual(ratio, 0.999)
        self.assertLessEqual(ratio, 1.001)
        # с постоянным сдвигом асимптота работает уже при n = 10⁴
        n = 10 ** 4
        ratio = energy_ml(self.coeffs, 0.01, n).value / large_n_asymptote(self.coeffs, 0.01, n)
        self.assertAlmostEqual(ratio, 1.0, delta=1e-4)

    def test_hard_confinement(self):
        n = 10 ** 6
        value = energy_ml(self.coeffs, 0.01, n).value
        self.assertAlmostEqual(value ** 2 / n ** 2 / (4 * 0.01), 1.0, delta=1e-3)

    def test_magnetic_mapping(self):
        """Поле с ωc = 1 эквивалентно ω → ω̃ = 0.5 без поля"""
        with_field = natural(theta=0.3, thetabar=0.2, b_field=1.0)
        shifted = derive_coefficients(
            PhysicalParams(omega=0.5),
            DeformationParams(theta_tilde=0.3, theta_bar=0.2),
            UnitsMode.GENERAL,
        )
        for n in range(0, 11):
            self.assertEqual(energy_nc(with_field, n).value, energy_nc(shifted, n).value)
            self.assertEqual(energy_ml(with_field, 0.02, n).value, energy_ml(shifted, 0.02, n).value)

    def test_energy_levels_order(self):
        levels = energy_levels(self.coeffs, 0.0, range(0, 4))
        self.assertEqual(len(levels), 8)
        self.assertEqual([(level.n, level.branch) for level in levels[:2]], [(0, 'plus'), (0, 'minus')])
        self.assertEqual(levels[-1].n, 3)


class CoordinateTransformTest(SimpleTestCase):
    def setUp(self):
        self.coeffs = natural(beta=0.04)

    def test_z_values(self):
        self.assertEqual(z_of_p(0.1, 0.0), 0.0)
        self.assertAlmostEqual(z_of_p(0.1, 3.0), 0.9 / 1.9, places=15)
        self.assertAlmostEqual(z_of_p(0.1, 1e9), 1.0, places=12)
        with self.assertRaises(ZeroBeta):
            z_of_p(0.0, 1.0)

    def test_q_values(self):
        self.assertEqual(q_of_p(self.coeffs, 0.04, 0.0), 0.0)
        self.assertAlmostEqual(q_of_p(self.coeffs, 0.04, 1e12), math.pi / (2 * 0.2), places=9)
        with self.assertRaises(ZeroBeta):
            q_of_p(self.coeffs, 0.0, 1.0)

    def test_round_trips(self):
        p = np.linspace(0.0, 1e3, 2001)
        assert_allclose(p_of_q(self.coeffs, 0.04, q_of_p(self.coeffs, 0.04, p)), p, rtol=1e-12, atol=0)
        p = np.linspace(0.0, 100.0, 2001)
        assert_allclose(p_of_z(0.01, z_of_p(0.01, p)), p, rtol=1e-12, atol=0)


class RadialFunctionTest(SimpleTestCase):
    def setUp(self):
        self.coeffs = natural()
        self.grid = make_grid(4000, 12.0)

    def test_point_values(self):
        grid = make_grid(4, 2.0)
        self.assertEqual(radial_nc(self.coeffs, 0, 0, grid).values[0], 1.0)
        self.assertEqual(radial_nc(self.coeffs, 1, 0, grid).values[2], 0.0)
        self.assertAlmostEqual(radial_nc(self.coeffs, 0, 2, grid).values[4], 4 * math.exp(-2), places=14)
        self.assertAlmostEqual(radial_nc(self.coeffs, 0, -2, grid).values[4], 4 * math.exp(-2), places=14)

    def test_make_grid(self):
        grid = make_grid(4, 2.0)
        assert_allclose(grid, [0.0, 0.5, 1.0, 1.5, 2.0])
        with self.assertRaises(GridTooCoarse):
            make_grid(3, 2.0)

    def test_ground_state_normalization(self):
        table = normalize(radial_nc(self.coeffs, 0, 0, self.grid), 0.0)
        self.assertEqual(table.norm, 1.0)
        self.assertEqual(table.weight, RadialWeight.PLAIN_POLAR)
        self.assertAlmostEqual(table.values[0], 1 / math.sqrt(math.pi), delta=1e-10)

    def test_normalize_idempotent(self):
        once = normalize(radial_nc(self.coeffs, 2, 1, self.grid))
        twice = normalize(once)
        assert_allclose(twice.values, once.values, rtol=1e-13, atol=0)

    def test_tail_too_heavy(self):
        with self.assertRaises(TailTooHeavy):
            normalize(radial_nc(self.coeffs, 0, 0, make_grid(400, 3.0)))

    def test_orthonormality(self):
        for m in (0, 1, 2):
            states = [normalize(radial_nc(self.coeffs, n, m, self.grid)) for n in range(4)]
            gram = np.array([[overlap(a, b) for b in states] for a in states])
            assert_allclose(gram, np.eye(4), rtol=0, atol=1e-8)

    def test_minimal_length_orthonormality(self):
        beta = 0.04
        states = [normalize(radial_ml(self.coeffs, beta, n, 1, self.grid), beta) for n in range(3)]
        self.assertEqual(states[0].weight, RadialWeight.DEFORMED)
        gram = np.array([[overlap(a, b) for b in states] for a in states])
        assert_allclose(gram, np.eye(3), rtol=0, atol=1e-8)

    def test_minimal_length_nodes(self):
        beta = 0.04
        ground = radial_ml(self.coeffs, beta, 0, 1, self.grid)
        self.assertTrue(np.all(ground.values[1:] > 0))

        excited = radial_ml(self.coeffs, beta, 1, 1, self.grid)
        signs = np.sign(excited.values[1:])
        crossings = np.nonzero(np.diff(signs))[0]
        self.assertEqual(len(crossings), 1)
        # узел при z* = c/b, c = |m| + 1, b = ζ₁ + ζ₂ + n
        node = p_of_z(beta, 2.0 / 26.0)
        index = crossings[0] + 1
        self.assertLessEqual(self.grid[index], node)
        self.assertGreaterEqual(self.grid[index + 1], node)

    def test_minimal_length_polynomial_sign_changes(self):
        z = np.linspace(1e-6, 1 - 1e-6, 20001)
        zeta_sum = 25.0
        for n in range(0, 6):
            signs = np.sign(hyp2f1_poly(n, zeta_sum + n, 2, z))
            self.assertEqual(np.count_nonzero(np.diff(signs)), n)

    def test_minimal_length_limit(self):
        """При β → 0 функция с минимальной длиной пропорциональна некоммутативной"""
        beta = 1e-6
        bulk = (self.grid >= 0.5) & (self.grid <= 4.0)
        for n in (0, 1):
            ml = radial_ml(self.coeffs, beta, n, 1, self.grid).values
            nc = radial_nc(self.coeffs, n, 1, self.grid).values
            mask = bulk & (np.abs(nc) > 1e-2 * np.max(np.abs(nc)))
            ratio = ml[mask] / nc[mask]
            self.assertLess(np.max(np.abs(ratio / ratio[0] - 1)), 1e-3)

    def test_minimal_length_errors(self):
        with self.assertRaises(InvalidM):
            radial_ml(self.coeffs, 0.04, 0, 0, self.grid)
        with self.assertRaises(BetaOutOfRange):
            radial_ml(self.coeffs, 0.4, 0, 1, self.grid)


class FiniteDifferenceTest(SimpleTestCase):
    def test_first_derivative_of_closed_form(self):
        grid = make_grid(12000, 12.0)
        f = (1 - grid ** 2) * np.exp(-grid ** 2 / 2)
        exact = grid * (grid ** 2 - 3) * np.exp(-grid ** 2 / 2)
        error = np.max(np.abs(first_derivative(f, grid[1] - grid[0]) - exact))
        self.assertLessEqual(error, 1e-6 * np.max(np.abs(exact)))

    def test_stencils_exact_on_polynomials(self):
        grid = np.linspace(0.0, 1.0, 11)
        step = grid[1] - grid[0]
        f = grid ** 4 - 2 * grid ** 3 + grid
        assert_allclose(first_derivative(f, step), 4 * grid ** 3 - 6 * grid ** 2 + 1, atol=1e-11)
        assert_allclose(second_derivative(f, step), 12 * grid ** 2 - 12 * grid, atol=1e-9)
        g = grid ** 2
        assert_allclose(first_derivative(g, step, order=2), 2 * grid, atol=1e-12)
        assert_allclose(second_derivative(g, step, order=2), np.full_like(grid, 2.0), atol=1e-9)


class LadderAndSpinorTest(SimpleTestCase):
    def setUp(self):
        self.coeffs = natural()
        self.grid = make_grid(4000, 12.0)

    def test_ground_state_annihilated(self):
        table = radial_nc(self.coeffs, 0, 0, self.grid)
        result = apply_ladder_plus(self.coeffs, 0.0, table, 0)
        self.assertLessEqual(np.max(np.abs(result.values)), 1e-8 * np.max(np.abs(table.values)))

    def test_negative_m_uses_modulus(self):
        positive = apply_ladder_plus(self.coeffs, 0.0, radial_nc(self.coeffs, 1, 1, self.grid), 1)
        negative = apply_ladder_plus(self.coeffs, 0.0, radial_nc(self.coeffs, 1, -1, self.grid), -1)
        assert_allclose(negative.values, positive.values, rtol=0, atol=0)
        ground = radial_nc(self.coeffs, 0, -1, self.grid)
        result = apply_ladder_plus(self.coeffs, 0.0, ground, -1)
        self.assertLessEqual(np.max(np.abs(result.values)), 1e-8 * np.max(np.abs(ground.values)))

    def test_deformed_ground_state_annihilated(self):
        coeffs = natural(theta=0.5, thetabar=0.3)
        table = radial_ml(coeffs, 0.04, 0, 2, self.grid)
        result = apply_ladder_plus(coeffs, 0.04, table, 2)
        self.assertLessEqual(np.max(np.abs(result.values)), 1e-8 * np.max(np.abs(table.values)))

    def test_ladder_needs_uniform_grid(self):
        with self.assertRaises(GridTooCoarse):
            apply_ladder_plus(self.coeffs, 0.0, radial_nc(self.coeffs, 0, 0, make_grid(4, 1.0)[:4]), 0)
        grid = np.array([0.0, 0.1, 0.3, 0.4, 0.5, 0.6])
        with self.assertRaises(GridTooCoarse):
            apply_ladder_plus(self.coeffs, 0.0, radial_nc(self.coeffs, 0, 0, grid), 0)

    def test_ground_spinor(self):
        spinor = assemble_spinor(self.coeffs, 0.0, 0, 1, Branch.PLUS, self.grid)
        self.assertLessEqual(np.max(np.abs(spinor.lower.values)), 1e-8 * np.max(np.abs(spinor.upper.values)))
        self.assertAlmostEqual(spinor.upper.norm, 1.0, delta=1e-12)
        self.assertEqual(spinor.energy.value, 1.0)

    def test_excited_spinor_split(self):
        spinor = assemble_spinor(self.coeffs, 0.0, 1, 0, Branch.PLUS, self.grid)
        energy = math.sqrt(5)
        self.assertAlmostEqual(spinor.lower_fraction, (energy - 1) / (2 * energy), delta=1e-6)
        self.assertAlmostEqual(spinor.upper.norm ** 2 + spinor.lower.norm ** 2, 1.0, delta=1e-12)
        self.assertAlmostEqual(overlap(spinor.upper, spinor.upper), spinor.upper.norm ** 2, delta=1e-12)

    def test_deformed_spinor_split(self):
        spinor = assemble_spinor(self.coeffs, 0.04, 1, 1, Branch.PLUS, self.grid)
        energy = math.sqrt(5.16)
        self.assertAlmostEqual(spinor.energy.value, energy, places=14)
        self.assertAlmostEqual(spinor.lower_fraction, (energy - 1) / (2 * energy), delta=1e-6)

    def test_negative_branch_ground_state(self):
        with self.assertRaises(DenominatorZero):
            assemble_spinor(self.coeffs, 0.0, 0, 1, Branch.MINUS, self.grid)

    def test_spinor_grid_convergence(self):
        coarse = assemble_spinor(self.coeffs, 0.0, 2, 1, Branch.PLUS, make_grid(2000, 12.0))
        fine = assemble_spinor(self.coeffs, 0.0, 2, 1, Branch.PLUS, make_grid(4000, 12.0))
        for a, b in ((coarse.upper, fine.upper), (coarse.lower, fine.lower)):
            diff = np.max(np.abs(a.values - b.values[::2]))
            self.assertLessEqual(diff, 1e-6 * np.max(np.abs(b.values)))
