# mypy: ignore-errors

import math
from unittest import main, TestCase

import numpy as np
from scipy import stats

from norm_approx.core.datastructures.params import NormFamily, NormParams
from norm_approx.core.datastructures.reports import SamplerConfig
from norm_approx.core.errors import DimensionMismatchError, NormDomainError
from norm_approx.core.optimal_params import (
    exact_params,
    params_for,
    sup_relative_error,
    weight_profile_of,
)
from norm_approx.core.sampling import (
    converged_errors,
    default_schedule,
    empirical_errors,
    fixed_sample_mre,
    full_schedule,
    mre_settled,
    mre_theoretical,
    sample_sphere,
    standard_error,
)
from norm_approx.tests.test_utils import (
    ARE_AB,
    ARE_BARNI,
    ARE_LAMBDA,
    ARE_MU_LAMBDA,
    DIMENSIONS,
    MRE_AB_CONVERGED,
    MRE_AB_FIXED,
    MRE_E_BARNI,
    MRE_E_LAMBDA,
    MRE_E_MU_LAMBDA,
    ErrorTableComparator,
)


class TestSphereSampling(TestCase):
    def test_unit_norm(self):
        X = sample_sphere(SamplerConfig(5, batch_size=300), 1000)
        self.assertEqual(X.shape, (1000, 5))
        self.assertTrue(np.all(np.abs(np.linalg.norm(X, axis=1) - 1) < 1e-12))

    def test_deterministic(self):
        cfg = SamplerConfig(3, seed=42)
        np.testing.assert_array_equal(
            sample_sphere(cfg, 500), sample_sphere(cfg, 500)
        )
        other = sample_sphere(SamplerConfig(3, seed=43), 500)
        self.assertFalse(np.array_equal(sample_sphere(cfg, 500), other))

    def test_deterministic_with_workers(self):
        cfg = SamplerConfig(4, seed=42, workers=3)
        first = sample_sphere(cfg, 1001)
        self.assertEqual(first.shape, (1001, 4))
        np.testing.assert_array_equal(first, sample_sphere(cfg, 1001))

    def test_batch_size_does_not_change_stream(self):
        a = sample_sphere(SamplerConfig(3, seed=1, batch_size=7), 100)
        b = sample_sphere(SamplerConfig(3, seed=1, batch_size=100), 100)
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-15)

    def test_coordinate_means(self):
        count = 250_000
        X = sample_sphere(SamplerConfig(3, seed=2), count)
        bound = 4.0 / math.sqrt(3.0) / math.sqrt(count)
        self.assertTrue(np.all(np.abs(X.mean(axis=0)) < bound))

    def test_uniform_angle_on_circle(self):
        X = sample_sphere(SamplerConfig(2, seed=4), 200_000)
        angles = np.arctan2(X[:, 1], X[:, 0])
        observed, _ = np.histogram(angles, bins=36, range=(-np.pi, np.pi))
        expected = np.full(36, len(angles) / 36)
        statistic = float(np.sum((observed - expected) ** 2 / expected))
        self.assertLess(statistic, stats.chi2.ppf(0.999, df=35))

    def test_invalid_count(self):
        with self.assertRaises(NormDomainError):
            sample_sphere(SamplerConfig(3), 0)

    def test_standard_error(self):
        self.assertEqual(standard_error([1.0]), 0.0)
        self.assertAlmostEqual(
            standard_error([1.0, 2.0, 3.0, 4.0]),
            np.std([1.0, 2.0, 3.0, 4.0], ddof=1) / 2.0,
        )


class TestEmpiricalErrors(TestCase):
    def test_euclidean_has_no_error(self):
        params = exact_params(NormFamily.EUCLIDEAN, 6)
        are, mre = empirical_errors(params, SamplerConfig(6), 10_000)
        self.assertLess(are, 1e-14)
        self.assertLess(mre, 1e-14)

    def test_barni(self):
        params = params_for(NormFamily.BARNI, 4)
        are, mre = empirical_errors(params, SamplerConfig(4), 1 << 20)
        self.assertAlmostEqual(are, 0.0345, delta=1e-3)
        self.assertGreater(mre, 0.070)
        self.assertLessEqual(mre, mre_theoretical(params) + 1e-6)

    def test_chessboard_limit(self):
        # the maximum error of D_inf sits on the diagonal
        params = exact_params(NormFamily.CHESSBOARD, 2)
        _, mre = empirical_errors(params, SamplerConfig(2), 1 << 16)
        self.assertAlmostEqual(mre, 1 - 1 / math.sqrt(2), delta=1e-4)

    def test_dimension_mismatch(self):
        params = params_for(NormFamily.BARNI, 4)
        with self.assertRaises(DimensionMismatchError):
            empirical_errors(params, SamplerConfig(5), 100)

    def test_workers_are_deterministic(self):
        params = params_for(NormFamily.MU_LAMBDA, 5)
        cfg = SamplerConfig(5, workers=4, batch_size=1000)
        first = empirical_errors(params, cfg, 20_001)
        self.assertEqual(first, empirical_errors(params, cfg, 20_001))

    def test_raw_gaussian_protocol(self):
        # homogeneity: normalising before or after evaluating agrees
        params = params_for(NormFamily.LAMBDA_OPTIMAL, 5)
        cfg = SamplerConfig(5, seed=9)
        normalised = fixed_sample_mre(params, cfg, 50_000)
        raw = fixed_sample_mre(params, cfg, 50_000, raw_gaussian=True)
        self.assertAlmostEqual(normalised[0], raw[0], places=12)
        self.assertAlmostEqual(normalised[1], raw[1], places=12)


class TestTheoreticalErrors(TestCase):
    def test_closed_forms(self):
        self.assertAlmostEqual(
            mre_theoretical(params_for(NormFamily.BARNI, 7)), 0.0984, 4
        )
        self.assertAlmostEqual(
            mre_theoretical(params_for(NormFamily.MU_LAMBDA, 8)), 0.1609, 4
        )
        self.assertAlmostEqual(
            mre_theoretical(exact_params(NormFamily.MANHATTAN, 4)), 1.0
        )

    def test_least_squares_has_none(self):
        params = NormParams(
            NormFamily.SEOL_CHEUN_AB, 3, {"a": 0.6, "b": 0.3}, fit_samples=1000
        )
        self.assertIsNone(mre_theoretical(params))


class TestConvergedErrors(TestCase):
    def test_nested_history(self):
        params = params_for(NormFamily.LAMBDA_OPTIMAL, 9)
        report = converged_errors(
            params, SamplerConfig(9), default_schedule(12, 18), tol=1e-12
        )
        self.assertFalse(report.converged)
        self.assertEqual(report.samples_used, 1 << 18)
        self.assertEqual(len(report.history), 7)
        worst = [mre for _, _, mre in report.history]
        self.assertEqual(worst, sorted(worst))
        self.assertLessEqual(report.mre_e, report.mre_t + 1e-6)

    def test_barni_converges_on_circle(self):
        params = params_for(NormFamily.BARNI, 2)
        report = converged_errors(
            params, SamplerConfig(2), default_schedule(12, 22)
        )
        self.assertTrue(report.converged)
        # stable long before, but not allowed to stop below check_from
        self.assertEqual(report.samples_used, 1 << 20)
        self.assertAlmostEqual(report.mre_e, report.mre_t, delta=5e-4)
        self.assertLessEqual(report.mre_e, report.mre_t + 1e-6)

    def test_early_stop_without_check_from(self):
        params = params_for(NormFamily.BARNI, 2)
        report = converged_errors(
            params, SamplerConfig(2), default_schedule(12, 22), check_from=0
        )
        self.assertTrue(report.converged)
        self.assertLess(report.samples_used, 1 << 20)
        self.assertGreaterEqual(len(report.history), 3)

    def test_patience(self):
        params = params_for(NormFamily.BARNI, 3)
        schedule = default_schedule(10, 16)
        for patience in (1, 2, 3):
            report = converged_errors(
                params,
                SamplerConfig(3),
                schedule,
                tol=1.0,
                check_from=0,
                patience=patience,
            )
            with self.subTest(patience=patience):
                # with tol=1.0 every step is stable
                self.assertTrue(report.converged)
                self.assertEqual(len(report.history), patience + 1)

    def test_small_schedule_below_check_from(self):
        params = params_for(NormFamily.MU_LAMBDA, 4)
        report = converged_errors(
            params, SamplerConfig(4), (1024, 2048, 4096), tol=1.0
        )
        self.assertFalse(report.converged)
        self.assertEqual(report.samples_used, 4096)

    def test_unchanged_maximum_is_not_settled(self):
        self.assertFalse(mre_settled(0.1, 0.1, 1e-4, None))
        self.assertFalse(mre_settled(0.1, 0.1, 1e-4, 0.12))
        self.assertTrue(mre_settled(0.1, 0.1, 1e-4, 0.10005))
        self.assertTrue(mre_settled(0.1, 0.10005, 1e-4, None))
        self.assertFalse(mre_settled(0.1, 0.1002, 1e-4, None))

    def test_invalid_convergence_settings(self):
        params = params_for(NormFamily.BARNI, 3)
        cfg = SamplerConfig(3)
        with self.assertRaises(NormDomainError):
            converged_errors(params, cfg, [10, 20], check_from=-1)
        with self.assertRaises(NormDomainError):
            converged_errors(params, cfg, [10, 20], patience=0)

    def test_single_step_never_converges(self):
        params = params_for(NormFamily.BARNI, 3)
        report = converged_errors(params, SamplerConfig(3), [4096], tol=1.0)
        self.assertFalse(report.converged)
        self.assertEqual(report.samples_used, 4096)
        self.assertEqual(len(report.history), 1)

    def test_seeds_agree_within_standard_error(self):
        params = params_for(NormFamily.MU_LAMBDA, 4)
        first = converged_errors(params, SamplerConfig(4, seed=1), [100_000])
        second = converged_errors(params, SamplerConfig(4, seed=2), [100_000])
        spread = math.hypot(first.are_stderr, second.are_stderr)
        self.assertGreater(spread, 0.0)
        self.assertLess(abs(first.are - second.are), 4 * spread)

    def test_invalid_schedules(self):
        params = params_for(NormFamily.BARNI, 3)
        cfg = SamplerConfig(3)
        for schedule, tol in (
            ([], 1e-4),
            ([0, 10], 1e-4),
            ([10, 10], 1e-4),
            ([20, 10], 1e-4),
            ([10, 20], 0.0),
        ):
            with self.subTest(schedule=schedule, tol=tol):
                with self.assertRaises(NormDomainError):
                    converged_errors(params, cfg, schedule, tol)

    def test_schedules(self):
        schedule = default_schedule()
        self.assertEqual(len(schedule), 9)
        self.assertEqual(schedule[0], 1 << 16)
        self.assertEqual(schedule[-1], 1 << 24)
        full = full_schedule()
        self.assertEqual(full[0], 1 << 20)
        self.assertEqual(full[-1], (1 << 32) - 1)
        self.assertTrue(all(a < b for a, b in zip(full, full[1:])))
        with self.assertRaises(NormDomainError):
            default_schedule(5, 4)


class TestReferenceErrors(ErrorTableComparator):
    """Average errors against the published tables at moderate sample
    sizes."""

    def test_minimax_families(self):
        families = (
            (NormFamily.LAMBDA_OPTIMAL, ARE_LAMBDA),
            (NormFamily.MU_LAMBDA, ARE_MU_LAMBDA),
            (NormFamily.BARNI, ARE_BARNI),
        )
        for family, expected in families:
            values = [
                empirical_errors(
                    params_for(family, n), SamplerConfig(n), 1 << 17
                )[0]
                for n in DIMENSIONS
            ]
            self.assertColumnWithin(values, expected, 2e-3, family.value)

    def test_least_squares_family(self):
        for n, are, mre in zip(DIMENSIONS[:3], ARE_AB, MRE_AB_FIXED):
            params = params_for(
                NormFamily.SEOL_CHEUN_AB, n, fit_samples=200_000, seed=3
            )
            got_are, got_mre = fixed_sample_mre(params, SamplerConfig(n))
            with self.subTest(n=n):
                self.assertWithin(got_are, are, 2e-3)
                self.assertWithin(got_mre, mre, 1e-2)

    def test_minimax_sampled_maxima(self):
        # the sampled maximum closes on the analytic one as
        # N^(-2/(n-1)), so 2^20 points suffice up to n=7
        families = (
            (NormFamily.LAMBDA_OPTIMAL, MRE_E_LAMBDA),
            (NormFamily.MU_LAMBDA, MRE_E_MU_LAMBDA),
            (NormFamily.BARNI, MRE_E_BARNI),
        )
        for family, expected in families:
            for n, want in zip(DIMENSIONS[:6], expected):
                params = params_for(family, n)
                _, mre = empirical_errors(params, SamplerConfig(n), 1 << 20)
                with self.subTest(family=family.value, n=n):
                    self.assertWithin(mre, want, 3e-3)
                    self.assertLessEqual(mre, mre_theoretical(params) + 1e-6)

    def test_family_orderings(self):
        for n in DIMENSIONS:
            cfg = SamplerConfig(n)
            errors = {
                family: empirical_errors(
                    params_for(family, n, fit_samples=200_000, seed=3),
                    cfg,
                    1 << 17,
                )
                for family in (
                    NormFamily.LAMBDA_OPTIMAL,
                    NormFamily.MU_LAMBDA,
                    NormFamily.BARNI,
                    NormFamily.SEOL_CHEUN_AB,
                )
            }
            by_are = min(errors, key=lambda f: errors[f][0])
            by_mre = min(errors, key=lambda f: errors[f][1])
            with self.subTest(n=n):
                self.assertIs(by_are, NormFamily.SEOL_CHEUN_AB)
                self.assertIs(by_mre, NormFamily.BARNI)

    def test_lambda_overtakes_mu_lambda_after_five(self):
        for n in range(4, 8):
            # same seed, same sample for both
            cfg = SamplerConfig(n)
            lam, _ = empirical_errors(
                params_for(NormFamily.LAMBDA_OPTIMAL, n), cfg, 1 << 20
            )
            mu, _ = empirical_errors(
                params_for(NormFamily.MU_LAMBDA, n), cfg, 1 << 20
            )
            with self.subTest(n=n):
                if n <= 5:
                    self.assertLess(mu, lam)
                else:
                    self.assertLess(lam, mu)

    def test_least_squares_converged_low_dimensions(self):
        for n, want in zip(DIMENSIONS[:2], MRE_AB_CONVERGED):
            params = params_for(
                NormFamily.SEOL_CHEUN_AB, n, fit_samples=200_000, seed=3
            )
            _, mre = empirical_errors(params, SamplerConfig(n), 1 << 20)
            bound = sup_relative_error(weight_profile_of(params))
            with self.subTest(n=n):
                self.assertWithin(mre, want, 1e-2)
                self.assertLessEqual(mre, bound + 1e-9)

    def test_least_squares_supremum_high_dimensions(self):
        # sampling alone creeps towards these values too slowly, the
        # exact supremum of the fitted profile sits at or above them
        for n in (8, 9, 10):
            params = params_for(
                NormFamily.SEOL_CHEUN_AB, n, fit_samples=200_000, seed=3
            )
            bound = sup_relative_error(weight_profile_of(params))
            with self.subTest(n=n):
                self.assertGreaterEqual(bound, MRE_AB_CONVERGED[n - 2] - 5e-3)
                self.assertGreater(bound, MRE_AB_FIXED[n - 2] + 0.02)


if __name__ == "__main__":
    main()
