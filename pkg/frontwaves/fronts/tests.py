import cmath
import math

import numpy as np
from django.test import SimpleTestCase
from scipy import special

from .decomposition import (
    MiddleFormula,
    band_segments,
    band_tail_estimates,
    decompose,
    front_jumps,
    front_proximity,
    gauss_validity,
    near_front_limit,
    phase_matching_residual,
    phase_matching_velocity,
    pole_contribution,
    saddle_gauss,
)
from .dispersion import (
    DispersionModel,
    Kind,
    Sheet,
    SourceSpec,
    WaveKind,
    classify,
    front_velocity,
    group_velocity,
    kinetic_frequency,
    traversal_time,
    wavenumber,
)
from .exceptions import (
    BranchCutError,
    CausalRegionError,
    DomainError,
    RegimeError,
    ThresholdError,
    WindowError,
)
from .oracle import (
    Method,
    QuadratureSettings,
    band_quadrature,
    best_oracle,
    contour_quadrature,
    exact_nonrel_sharp,
    schrodinger_residual,
)
from .phase import (
    Branch,
    StphPath,
    detect_crossing_time,
    phase,
    phase_on_stph,
    phase_point,
    pole_crossing_time,
    saddle,
    saddle_residual,
    stph_line,
    stph_support,
)

NONREL = DispersionModel(Kind.NONRELATIVISTIC, mass=1.0)
REL = DispersionModel(Kind.RELATIVISTIC, mass=1.0, light_speed=1.0)


def sharp(carrier, amplitude=1.0):
    return SourceSpec(amplitude=amplitude, carrier=carrier)


class DispersionTests(SimpleTestCase):
    def test_kinetic_frequency(self):
        self.assertEqual(kinetic_frequency(NONREL, 3.0), 3.0)
        shifted = DispersionModel(Kind.NONRELATIVISTIC, mass=1.0, potential=5.0)
        self.assertEqual(kinetic_frequency(shifted, 3.0), -2.0)
        self.assertEqual(kinetic_frequency(shifted, 5.0), 0.0)

    def test_physical_units_are_rescaled(self):
        model = DispersionModel(Kind.NONRELATIVISTIC, mass=2.0, potential=4.0, hbar=2.0)
        natural = model.natural()
        self.assertEqual((natural.mass, natural.potential, natural.hbar), (1.0, 2.0, 1.0))
        self.assertAlmostEqual(front_velocity(model, 2.0), 2.0)

    def test_outgoing_wavenumbers(self):
        self.assertAlmostEqual(wavenumber(NONREL, 2.0, Sheet.UPPER), 2.0)
        self.assertAlmostEqual(wavenumber(NONREL, -2.0), 2j)
        self.assertAlmostEqual(wavenumber(REL, 0.5), 1j * math.sqrt(0.75))
        self.assertAlmostEqual(wavenumber(REL, -1.25, Sheet.UPPER), -0.75)

    def test_point_on_cut_needs_a_sheet(self):
        with self.assertRaises(BranchCutError):
            wavenumber(NONREL, 2.0)
        with self.assertRaises(BranchCutError):
            wavenumber(REL, -3.0)

    def test_branch_rule_on_real_axis(self):
        for model, omegas in ((NONREL, [-3.0, -0.1, 0.2, 5.0]), (REL, [-4.0, -0.5, 0.3, 1.7])):
            for omega in omegas:
                k = wavenumber(model, omega, Sheet.UPPER)
                if classify(model, omega) is WaveKind.EVANESCENT:
                    self.assertGreater(k.imag, 0)
                else:
                    self.assertEqual(k.imag, 0)
                    self.assertGreater(k.real * omega, 0)

    def test_lower_sheet_is_conjugate_of_upper(self):
        rng = np.random.default_rng(7)
        omegas = rng.normal(size=50) * 3 + 1j * rng.normal(size=50) * 3
        for model in (NONREL, REL):
            lower = wavenumber(model, np.conj(omegas), Sheet.LOWER)
            upper = wavenumber(model, omegas, Sheet.UPPER)
            np.testing.assert_allclose(lower, np.conj(upper), rtol=1e-13)

    def test_dispersion_residual(self):
        rng = np.random.default_rng(11)
        omegas = rng.normal(size=200) * 5 + 1j * rng.normal(size=200) * 5
        for sheet in Sheet:
            k = wavenumber(NONREL, omegas, sheet)
            np.testing.assert_allclose(k ** 2 / 2.0, omegas, rtol=1e-12)
            k = wavenumber(REL, omegas, sheet)
            np.testing.assert_allclose(k ** 2 + 1.0, omegas ** 2, rtol=1e-12, atol=1e-12)

    def test_classify(self):
        self.assertIs(classify(NONREL, -2.0), WaveKind.EVANESCENT)
        self.assertIs(classify(REL, 1.25), WaveKind.PROPAGATING)
        self.assertIs(classify(REL, 0.6), WaveKind.EVANESCENT)
        with self.assertRaises(ThresholdError):
            classify(NONREL, 0.0)
        with self.assertRaises(ThresholdError):
            classify(REL, -1.0)

    def test_front_velocity(self):
        self.assertAlmostEqual(front_velocity(NONREL, -2.0), 2.0)
        self.assertAlmostEqual(front_velocity(REL, 0.6), 0.8)
        self.assertAlmostEqual(front_velocity(REL, 1.25), 0.6)
        with self.assertRaises(ThresholdError):
            front_velocity(REL, 1.0)

    def test_relativistic_front_stays_below_light_speed(self):
        for omega in np.concatenate([np.linspace(0.01, 0.99, 25), np.linspace(1.01, 50.0, 25)]):
            velocity = front_velocity(REL, omega)
            self.assertGreater(velocity, 0)
            self.assertLess(velocity, 1.0)
        self.assertLess(front_velocity(REL, 0.999), 0.05)
        self.assertGreater(front_velocity(REL, 1e-4), 0.999)

    def test_traversal_time(self):
        self.assertAlmostEqual(traversal_time(NONREL, 2.0, 4.0), 2.0)
        self.assertEqual(traversal_time(NONREL, 2.0, 0.0), 0.0)
        self.assertAlmostEqual(traversal_time(REL, 0.6, 0.8), 1.0)

    def test_group_velocity_matches_front_velocity_when_propagating(self):
        self.assertAlmostEqual(group_velocity(NONREL, 2.0), 2.0)
        self.assertAlmostEqual(group_velocity(REL, 1.25), 0.6)
        for omega in (0.3, 1.0, 7.5):
            self.assertAlmostEqual(group_velocity(NONREL, omega), front_velocity(NONREL, omega), places=12)
        for omega in (1.1, 2.0, -3.0):
            self.assertAlmostEqual(group_velocity(REL, omega), front_velocity(REL, omega), places=12)
        with self.assertRaises(DomainError):
            group_velocity(NONREL, -1.0)

    def test_invalid_models(self):
        with self.assertRaises(DomainError):
            DispersionModel(Kind.RELATIVISTIC, mass=1.0)
        with self.assertRaises(DomainError):
            DispersionModel(Kind.NONRELATIVISTIC, mass=0.0)
        with self.assertRaises(DomainError):
            SourceSpec(amplitude=0, carrier=1.0)


class PhaseTests(SimpleTestCase):
    def test_phase_values(self):
        self.assertAlmostEqual(phase(NONREL, 2.0, Sheet.UPPER, 2.0, 1.0), -2.0)
        self.assertAlmostEqual(phase(REL, 1.25, Sheet.UPPER, 3.0, 5.0), 4.0)
        self.assertAlmostEqual(phase(NONREL, -1.5, None, 0.0, 2.0), -3.0)

    def test_nonrelativistic_saddle(self):
        (info,) = saddle(NONREL, 2.0, 1.0)
        self.assertAlmostEqual(info.omega_s, 2.0)
        self.assertAlmostEqual(info.k_s, 2.0)
        self.assertAlmostEqual(info.phi_s, -2.0)
        self.assertAlmostEqual(info.curvature, 0.25)

    def test_relativistic_saddles(self):
        plus, minus = saddle(REL, 3.0, 5.0)
        self.assertAlmostEqual(plus.theta, 4.0)
        self.assertAlmostEqual(plus.omega_s, 1.25)
        self.assertAlmostEqual(plus.k_s, 0.75)
        self.assertAlmostEqual(plus.phi_s, 4.0)
        self.assertAlmostEqual(plus.curvature, 64.0 / 9.0)
        self.assertEqual(
            (minus.omega_s, minus.k_s, minus.phi_s, minus.curvature),
            (-plus.omega_s, -plus.k_s, -plus.phi_s, -plus.curvature),
        )

    def test_saddle_outside_light_cone(self):
        with self.assertRaises(CausalRegionError):
            saddle(REL, 3.0, 2.0)
        with self.assertRaises(DomainError):
            saddle(NONREL, 0.0, 1.0)

    def test_phase_is_stationary_at_saddle(self):
        for x, t in ((1.0, 0.7), (2.5, 3.0)):
            (info,) = saddle(NONREL, x, t)
            h = 1e-5 * max(info.omega_s, 1.0)

            def f(omega):
                return phase(NONREL, omega, Sheet.UPPER, x, t).real

            slope = (f(info.omega_s + h) - f(info.omega_s - h)) / (2 * h)
            curvature = (f(info.omega_s + h) - 2 * f(info.omega_s) + f(info.omega_s - h)) / h ** 2
            self.assertLess(abs(slope), 1e-8 * info.curvature * info.omega_s + 1e-9)
            self.assertAlmostEqual(curvature / info.curvature, 1.0, places=3)

    def test_saddle_residual_over_random_points(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            x, t = rng.uniform(0.1, 5.0), rng.uniform(0.2, 5.0)
            residual = saddle_residual(NONREL, x, t)
            self.assertLess(residual.slope, 1e-8)
            self.assertLess(residual.curvature, 1e-6)
        for _ in range(100):
            t = rng.uniform(0.2, 5.0)
            x = t * rng.uniform(0.2, 0.9)
            for branch in (Branch.PLUS, Branch.MINUS):
                residual = saddle_residual(REL, x, t, branch)
                self.assertLess(residual.slope, 1e-8)
                self.assertLess(residual.curvature, 1e-6)

    def test_lower_sheet_phase_is_conjugate_of_upper(self):
        for model, omega in ((NONREL, 0.7 + 0.3j), (NONREL, -1.2 - 0.4j), (REL, 1.4 + 0.2j), (REL, 0.3 - 0.5j)):
            lower = phase_point(model, omega, Sheet.LOWER, 1.5, 2.0)
            upper = phase_point(model, omega.conjugate(), Sheet.UPPER, 1.5, 2.0)
            self.assertIs(lower.sheet, Sheet.LOWER)
            self.assertAlmostEqual(lower.value, upper.value.conjugate(), places=12)
        self.assertIs(phase_point(NONREL, -1.0, None, 1.0, 1.0).sheet, Sheet.UPPER)

    def test_nonrelativistic_stph_line(self):
        self.assertAlmostEqual(stph_line(NONREL, 2.0, 1.0, 0.0), 1.0)
        self.assertAlmostEqual(stph_line(NONREL, 2.0, 1.0, 2.0), 0.0)
        self.assertAlmostEqual(stph_line(NONREL, 2.0, 1.0, -2.0), 0.0)

    def test_relativistic_stph_line(self):
        self.assertAlmostEqual(stph_line(REL, 3.0, 5.0, 0.8), 0.0, places=12)
        self.assertAlmostEqual(stph_line(REL, 3.0, 5.0, 1.25), 0.0, places=12)
        support = stph_support(REL, 3.0, 5.0)
        self.assertAlmostEqual(support.lower, 0.5)
        self.assertAlmostEqual(support.upper, 2.0)
        self.assertAlmostEqual(support.saddle_crossing * support.other_crossing, 1.0, places=12)
        with self.assertRaises(DomainError):
            stph_line(REL, 3.0, 5.0, 2.5)

    def test_phase_on_stph(self):
        self.assertAlmostEqual(phase_on_stph(NONREL, 2.0, 1.0, 2.0), -2.0)
        self.assertAlmostEqual(phase_on_stph(NONREL, 2.0, 1.0, -2.0), -2.0 - 4.0j)
        self.assertAlmostEqual(phase_on_stph(REL, 3.0, 5.0, 0.8).imag, -1.8, places=10)

    def test_real_phase_is_constant_along_stph(self):
        omega_r = np.linspace(-5.0, 5.0, 41)
        values = phase_on_stph(NONREL, 1.5, 0.8, omega_r)
        np.testing.assert_allclose(values.real, saddle(NONREL, 1.5, 0.8)[0].phi_s, rtol=1e-10)
        omega_r = np.array([0.55, 0.8, 1.0, 1.2, 1.5, 1.9])
        values = phase_on_stph(REL, 3.0, 5.0, omega_r)
        np.testing.assert_allclose(values.real, 4.0, rtol=1e-10)
        values = phase_on_stph(REL, 3.0, 5.0, -omega_r, Branch.MINUS)
        np.testing.assert_allclose(values.real, -4.0, rtol=1e-10)

    def test_imaginary_phase_falls_away_from_saddle(self):
        (info,) = saddle(NONREL, 1.0, 1.0)
        for side in (1.0, -1.0):
            omega_r = info.omega_s + side * np.linspace(0.0, 4.0, 30)
            im = phase_on_stph(NONREL, 1.0, 1.0, omega_r).imag
            self.assertTrue(np.all(np.diff(im) < 0))

    def test_paths_agree_with_phase(self):
        for model, x, t in ((NONREL, 1.3, 0.9), (REL, 3.0, 5.0), (REL, 0.4, 2.0)):
            for info in saddle(model, x, t):
                path = StphPath(model, x, t, info)
                s = np.linspace(-2.5, 2.5, 21)
                direct = path.omega(s) * t - path.wavenumber(s) * x
                np.testing.assert_allclose(direct, path.phase(s), rtol=1e-11, atol=1e-11)
                omega = path.omega(np.array(path.crossings))
                np.testing.assert_allclose(omega.imag, 0.0, atol=1e-12)

    def test_path_derivative(self):
        path = StphPath.through(REL, 3.0, 5.0, Branch.MINUS)
        s = np.linspace(-1.0, 1.0, 9)
        h = 1e-6
        numeric = (path.omega(s + h) - path.omega(s - h)) / (2 * h)
        np.testing.assert_allclose(path.d_omega(s), numeric, rtol=1e-7)

    def test_pole_crossing_time(self):
        self.assertAlmostEqual(pole_crossing_time(NONREL, -2.0, 1.0), 0.5)
        self.assertAlmostEqual(pole_crossing_time(REL, 0.6, 0.8), 1.0)
        self.assertEqual(pole_crossing_time(NONREL, 3.0, 0.0), 0.0)

    def test_detected_crossing_time_matches(self):
        cases = ((NONREL, -2.0, 1.0), (NONREL, 3.0, 2.0), (REL, 0.6, 0.8), (REL, -1.25, 2.0), (REL, 3.0, 1.0))
        for model, omega0, x in cases:
            expected = pole_crossing_time(model, omega0, x)
            self.assertAlmostEqual(detect_crossing_time(model, omega0, x) / expected, 1.0, places=8)


class DecompositionTests(SimpleTestCase):
    def test_pole_contribution(self):
        self.assertEqual(pole_contribution(NONREL, sharp(-2.0), 1.0, 0.4), 0)
        value = pole_contribution(NONREL, sharp(-2.0), 1.0, 1.0)
        self.assertAlmostEqual(abs(value), math.exp(-2.0))
        self.assertAlmostEqual(cmath.phase(value), 2.0)
        self.assertAlmostEqual(abs(pole_contribution(NONREL, sharp(2.0), 1.0, 1.0)), 1.0)

    def test_front_itself_is_inactive(self):
        self.assertEqual(pole_contribution(NONREL, sharp(2.0), 1.0, 0.5), 0)

    def test_saddle_gauss(self):
        plus, minus = saddle_gauss(NONREL, sharp(-2.0), 2.0, 1.0)
        self.assertAlmostEqual(abs(plus), math.sqrt(2 * math.pi) / (4 * math.pi))
        self.assertEqual(minus, 0)
        self.assertEqual(saddle_gauss(REL, sharp(0.6), 3.0, 2.0), (0j, 0j))
        with self.assertRaises(DomainError):
            saddle_gauss(NONREL, SourceSpec(1.0, -2.0, band=0.2), 1.0, 1.0)

    def test_gauss_validity(self):
        self.assertAlmostEqual(gauss_validity(NONREL, -2.0, 2.0, 1.0), 4.0)
        self.assertAlmostEqual(gauss_validity(NONREL, 2.0, 2.0, 1.0), 0.0)
        omega0, t = 2.0, 1.3
        v = front_velocity(NONREL, omega0)
        for x in (0.4, 1.0, 4.0):
            velocity_form = (v ** 2 * t ** 2 - x ** 2) ** 2 / (4.0 * t * x ** 2)
            self.assertAlmostEqual(gauss_validity(NONREL, omega0, x, t), velocity_form)

    def test_propagating_front_jump_has_unit_magnitude(self):
        source = sharp(2.0)
        tau = traversal_time(NONREL, 2.0, 1.0)
        jump = near_front_limit(NONREL, source, 1.0, tau * (1 + 1e-9)) - near_front_limit(
            NONREL, source, 1.0, tau * (1 - 1e-9)
        )
        self.assertAlmostEqual(abs(jump), 1.0, places=6)

    def test_evanescent_front_jump_is_suppressed(self):
        value = near_front_limit(NONREL, sharp(-2.0), 1.0, 0.5 * (1 + 1e-10))
        self.assertAlmostEqual(abs(value), 0.5 * math.exp(-2.0), places=8)

    def test_near_front_limit_outside_window(self):
        with self.assertRaises(WindowError):
            near_front_limit(NONREL, sharp(2.0), 1.0, 5.0)
        self.assertGreater(front_proximity(NONREL, 2.0, 1.0, 5.0), 1.0)

    def test_jumps_compensate(self):
        cases = [
            (NONREL, 2.0, 1.0), (NONREL, 0.7, 2.5), (NONREL, -2.0, 1.0), (NONREL, -3.1, 0.6),
            (REL, 1.25, 3.0), (REL, -1.6, 1.0), (REL, 0.6, 0.8), (REL, -0.3, 2.0),
        ]
        for model, omega0, x in cases:
            with self.subTest(kind=model.kind, omega0=omega0, x=x):
                jumps = front_jumps(model, sharp(omega0), x)
                self.assertGreater(abs(jumps.pole_jump), 0)
                self.assertLess(jumps.residual, 1e-10 * max(abs(jumps.pole_jump), 1e-300) + 1e-10)

    def test_phase_matching(self):
        self.assertAlmostEqual(phase_matching_residual(NONREL, -2.0, 2.0, 1.0), 0.0)
        self.assertAlmostEqual(phase_matching_residual(REL, 0.6, 0.8, 1.0), 0.0, places=12)
        self.assertNotAlmostEqual(phase_matching_residual(NONREL, -2.0, 1.0, 1.0), 0.0)

    def test_phase_matching_recovers_front_velocity(self):
        for model, omega0 in ((NONREL, -2.0), (NONREL, 3.0), (REL, 0.6), (REL, -0.25), (REL, 1.25), (REL, -4.0)):
            with self.subTest(kind=model.kind, omega0=omega0):
                ratio = phase_matching_velocity(model, omega0) / front_velocity(model, omega0)
                self.assertAlmostEqual(ratio, 1.0, places=7)

    def test_decompose_sums_parts(self):
        result = decompose(NONREL, sharp(-2.0), 2.0, 1.0)
        self.assertEqual(result.psi_total, result.psi_p + result.psi_s_plus + result.psi_s_minus)
        self.assertFalse(result.front_active)
        self.assertTrue(result.near_front)
        self.assertAlmostEqual(result.gauss_validity, 4.0)
        outside = decompose(REL, sharp(0.6), 3.0, 2.0)
        self.assertFalse(outside.causal)
        self.assertEqual(outside.psi_total, 0)

    def test_antiparticle_branch_is_small_near_threshold(self):
        result = decompose(REL, sharp(1.05), 2.0, 12.0)
        self.assertLess(abs(result.psi_s_minus), 0.5 * abs(result.psi_s_plus))


class BandLimitedTests(SimpleTestCase):
    source = SourceSpec(amplitude=1.0, carrier=-2.0, band=0.2)

    def test_parameters_at_traversal_time(self):
        segments = band_segments(NONREL, self.source, 1.0, 0.5)
        self.assertAlmostEqual(segments.w0, 0.0)
        self.assertAlmostEqual(segments.u_plus, 0.1)
        self.assertAlmostEqual(segments.u_minus, -0.1)
        self.assertIs(segments.middle_formula, MiddleFormula.ARCTAN)
        self.assertIsNone(segments.middle_alternative)

    def test_edge_factors(self):
        segments = band_segments(NONREL, self.source, 1.0, 0.5)
        self.assertAlmostEqual(segments.edge_factor_plus, math.exp(0.1))
        self.assertAlmostEqual(segments.edge_factor_minus, math.exp(-0.1))
        self.assertAlmostEqual(segments.quoted_edge_factor_plus, math.exp(0.2))
        for computed, quoted in (
            (segments.edge_factor_plus, segments.quoted_edge_factor_plus),
            (segments.edge_factor_minus, segments.quoted_edge_factor_minus),
        ):
            self.assertLess(abs(math.log(computed / quoted)), math.log(2.0))

    def test_segments_share_the_gaussian_suppression(self):
        for x in (0.8, 1.0, 1.2):
            t = traversal_time(NONREL, -2.0, x)
            segments = band_segments(NONREL, self.source, x, t)
            scale = math.exp(-x ** 2 / t)
            for value in (segments.psi_minus_seg, segments.psi_plus_seg, segments.psi_stph_seg):
                self.assertLess(abs(value), scale)

    def test_middle_formula_selection(self):
        far = band_segments(NONREL, self.source, 1.0, 0.4)
        self.assertIs(far.middle_formula, MiddleFormula.SINH)
        self.assertIsNone(far.middle_alternative)
        near = band_segments(NONREL, self.source, 1.0, 0.48)
        self.assertIs(near.middle_formula, MiddleFormula.ARCTAN)
        self.assertIsNotNone(near.middle_alternative)

    def test_regime_checks(self):
        with self.assertRaises(RegimeError):
            band_segments(NONREL, SourceSpec(1.0, -2.0, band=1.5), 1.0, 0.5)
        with self.assertRaises(RegimeError):
            band_segments(NONREL, SourceSpec(1.0, 2.0, band=0.2), 1.0, 0.5)
        with self.assertRaises(RegimeError):
            band_segments(NONREL, SourceSpec(1.0, -2.0, band=0.01), 1.0, 0.5)
        with self.assertRaises(DomainError):
            band_segments(REL, SourceSpec(1.0, 0.6, band=0.1), 0.8, 1.0)
        with self.assertRaises(DomainError):
            band_segments(NONREL, SourceSpec(1.0, -2.0, band=2.5), 1.0, 0.5)

    def test_tail_estimates(self):
        short = band_tail_estimates(NONREL, self.source, 1.0, 0.05)
        self.assertEqual(short.regime, "short")
        self.assertAlmostEqual(short.exponent / short.asymptotic_exponent, 1.0, places=3)
        late = band_tail_estimates(NONREL, self.source, 1.0, 5.0)
        later = band_tail_estimates(NONREL, self.source, 1.0, 10.0)
        self.assertEqual(late.regime, "long")
        self.assertAlmostEqual(late.exponent / late.asymptotic_exponent, 1.0, places=3)
        self.assertAlmostEqual(later.exponent / late.exponent, 8.0, places=2)
        with self.assertRaises(RegimeError):
            band_tail_estimates(NONREL, self.source, 1.0, 0.5)

    def test_decompose_reports_segments(self):
        result = decompose(NONREL, self.source, 1.0, 0.5)
        self.assertIsNotNone(result.band)
        self.assertEqual(result.psi_s_plus, result.band.total)


class OracleTests(SimpleTestCase):
    quadrature = QuadratureSettings(rel_tol=1e-10, abs_tol=1e-15)

    def test_closed_form_boundary_and_past(self):
        for omega0 in (2.0, -2.0):
            for t in (0.3, 1.7):
                result = exact_nonrel_sharp(NONREL, sharp(omega0), 0.0, t)
                self.assertAlmostEqual(result.psi, cmath.exp(-1j * omega0 * t), places=10)
        self.assertEqual(exact_nonrel_sharp(NONREL, sharp(-2.0), 1.0, -0.5).psi, 0)
        with self.assertRaises(DomainError):
            exact_nonrel_sharp(NONREL, sharp(-2.0), 1.0, 0.0)

    def test_closed_form_solves_schrodinger(self):
        for omega0, x, t in ((2.0, 1.0, 0.8), (-2.0, 0.7, 1.5), (0.5, 2.0, 3.0)):
            self.assertLess(schrodinger_residual(NONREL, sharp(omega0), x, t), 1e-4)
        shifted = DispersionModel(Kind.NONRELATIVISTIC, mass=1.0, potential=3.0)
        self.assertLess(schrodinger_residual(shifted, sharp(1.0), 1.2, 0.9), 1e-4)

    def test_band_quadrature_at_boundary(self):
        source = SourceSpec(amplitude=1.0, carrier=-2.0, band=0.5)
        for t in (-3.0, 0.0, 0.7, 5.0):
            result = band_quadrature(NONREL, source, 0.0, t, self.quadrature)
            expected = cmath.exp(2j * t) * (0.5 + special.sici(0.5 * t)[0] / math.pi)
            self.assertAlmostEqual(result.psi, expected, places=8)
            self.assertIs(result.method, Method.BAND_QUADRATURE)
        at_zero = band_quadrature(NONREL, source, 0.0, 0.0, self.quadrature)
        self.assertAlmostEqual(abs(at_zero.psi), 0.5)

    def test_contour_matches_closed_form(self):
        for omega0 in (-2.0, 1.5):
            for x in (0.5, 1.0, 2.0):
                for t in (0.3, 0.5, 1.0, 2.5):
                    with self.subTest(omega0=omega0, x=x, t=t):
                        contour = contour_quadrature(NONREL, sharp(omega0), x, t, self.quadrature)
                        exact = exact_nonrel_sharp(NONREL, sharp(omega0), x, t)
                        scale = max(abs(exact.psi), math.exp(-x ** 2 / t))
                        self.assertLess(abs(contour.psi - exact.psi), 1e-8 * scale)

    def test_pole_circle_carries_the_pole_part(self):
        for model, omega0, x, t in ((NONREL, -2.0, 1.0, 1.0), (NONREL, 2.0, 1.0, 3.0), (REL, 1.25, 3.0, 8.0)):
            with self.subTest(kind=model.kind, omega0=omega0):
                full = contour_quadrature(model, sharp(omega0), x, t, self.quadrature)
                bare = contour_quadrature(model, sharp(omega0), x, t, self.quadrature, include_pole=False)
                psi_p = pole_contribution(model, sharp(omega0), x, t)
                self.assertAlmostEqual(abs(full.psi - bare.psi - psi_p), 0.0, places=9)

    def test_relativistic_causality(self):
        result = contour_quadrature(REL, sharp(0.6), 3.0, 2.5)
        self.assertEqual(result.psi, 0)
        self.assertEqual(result.path_metadata["reason"], "outside light cone")

    def test_best_oracle_hierarchy(self):
        self.assertIs(best_oracle(NONREL, sharp(2.0), 1.0, 1.0).method, Method.CLOSED_FORM_NONREL)
        band = SourceSpec(amplitude=1.0, carrier=-2.0, band=0.2)
        self.assertIs(best_oracle(NONREL, band, 1.0, 1.0, self.quadrature).method, Method.BAND_QUADRATURE)
        self.assertIs(best_oracle(REL, sharp(0.6), 0.5, 1.0, self.quadrature).method, Method.CONTOUR_QUADRATURE)

    def test_contour_exactly_at_the_front(self):
        exact = exact_nonrel_sharp(NONREL, sharp(0.5), 2.0, 2.0).psi
        contour = contour_quadrature(NONREL, sharp(0.5), 2.0, 2.0, self.quadrature)
        scale = max(abs(exact), math.exp(-2.0))
        self.assertLess(abs(contour.psi - exact), 1e-8 * scale)

        tau = traversal_time(REL, 1.25, 3.0)
        self.assertAlmostEqual(tau, 5.0)
        at_front = contour_quadrature(REL, sharp(1.25), 3.0, 5.0, self.quadrature).psi
        for t in (5.0 * (1 - 1e-12), 5.0 * (1 + 1e-12)):
            nearby = contour_quadrature(REL, sharp(1.25), 3.0, t, self.quadrature).psi
            self.assertLess(abs(at_front - nearby), 1e-8 * abs(nearby))

    def test_contour_reports_each_path(self):
        result = contour_quadrature(REL, sharp(0.6), 0.5, 1.0, self.quadrature)
        values = [path["value"] for path in result.path_metadata["paths"]]
        self.assertEqual(len(values), 2)
        self.assertTrue(result.path_metadata["pole_swept"])
        psi_p = pole_contribution(REL, sharp(0.6), 0.5, 1.0)
        self.assertAlmostEqual(abs(result.psi - sum(values) - psi_p), 0.0, places=8)

    def test_gauss_error_falls_with_validity_nonrelativistic(self):
        # Ahead of the front ψ_p = 0, so the closed form is the forerunner.
        for omega0, r in ((-2.0, 0.55), (-1.0, 0.6), (-4.0, 0.6)):
            errors = []
            for validity in (3.0, 10.0, 30.0, 100.0):
                alpha = 2.0 * r ** 2 * validity
                omega_s = r * abs(omega0) / (1.0 - r)
                t = alpha / omega_s
                x = math.sqrt(2.0 * alpha * t)
                self.assertAlmostEqual(gauss_validity(NONREL, omega0, x, t), validity, places=8)
                exact = exact_nonrel_sharp(NONREL, sharp(omega0), x, t).psi
                plus, _ = saddle_gauss(NONREL, sharp(omega0), x, t)
                errors.append(abs(plus - exact) / abs(exact))
            with self.subTest(omega0=omega0, r=r):
                self.assertEqual(errors, sorted(errors, reverse=True))
                self.assertLess(max(errors[1:]), 0.25)

    def test_gauss_error_falls_with_validity_relativistic(self):
        # Ω₀ = mc²e^{−θ} puts the pole exactly √V saddle widths away.
        for rapidity in (0.7, 1.0, 1.2):
            errors = []
            for validity in (3.0, 10.0, 30.0, 100.0):
                model = DispersionModel(Kind.RELATIVISTIC, mass=validity * math.cosh(rapidity), light_speed=1.0)
                x = math.tanh(rapidity)
                omega0 = model.mass * math.exp(-rapidity)
                self.assertAlmostEqual(gauss_validity(model, omega0, x, 1.0) / validity, 1.0, places=8)
                result = contour_quadrature(model, sharp(omega0), x, 1.0, self.quadrature)
                (path,) = [p for p in result.path_metadata["paths"] if p["branch"] == Branch.PLUS.value]
                plus, _ = saddle_gauss(model, sharp(omega0), x, 1.0)
                errors.append(abs(plus - path["value"]) / abs(path["value"]))
            with self.subTest(rapidity=rapidity):
                self.assertEqual(errors, sorted(errors, reverse=True))
                self.assertLess(max(errors[1:]), 0.25)

    def test_settings_validation(self):
        with self.assertRaises(DomainError):
            QuadratureSettings(max_subdivisions=10)
        with self.assertRaises(DomainError):
            QuadratureSettings(rel_tol=0.0)
        defaults = QuadratureSettings.from_settings(rel_tol=1e-6)
        self.assertEqual(defaults.rel_tol, 1e-6)
