# mypy: ignore-errors

import io
import math
from unittest import main

from norm_approx.core.datastructures.params import NormFamily
from norm_approx.core.optimal_params import params_for
from norm_approx.core.sampling import fixed_sample_mre
from norm_approx.core.datastructures.reports import ANALYTIC, EMPIRICAL
from norm_approx.reporting.tables import (
    RunSettings,
    coverage_report,
    evaluate_vector,
    fit_report,
    json_number,
    mre_curve,
    opcount_checks,
    read_csv,
    table3,
    table4,
    table4_row,
    write_csv,
    write_opcounts,
)
from norm_approx.tests.test_utils import (
    ARE_AB,
    MRE_BARNI,
    MRE_LAMBDA,
    MRE_MU_LAMBDA,
    ErrorTableComparator,
)

# Small enough for a unit test run.
QUICK = RunSettings(
    schedule=(1024, 2048, 4096),
    tol=1.0,
    fit_samples=5000,
    fixed_budget=4096,
    check_from=0,
)


class TestMRECurve(ErrorTableComparator):
    def test_rows(self):
        rows = mre_curve(10)
        self.assertEqual([row.n for row in rows], list(range(2, 11)))
        self.assertTrue(all(row.provenance == ANALYTIC for row in rows))
        self.assertRowsWithin(rows, "mre_lambda", MRE_LAMBDA, 6e-5)
        self.assertRowsWithin(rows, "mre_mulambda", MRE_MU_LAMBDA, 6e-5)
        self.assertRowsWithin(rows, "mre_barni", MRE_BARNI, 6e-5)

    def test_csv(self):
        rows = mre_curve(4)
        out = io.StringIO()
        write_csv(rows, out)
        lines = out.getvalue().splitlines()
        self.assertEqual(lines[0], "n,mre_lambda,mre_mulambda,mre_barni")
        self.assertEqual(len(lines), 4)
        record = read_csv(io.StringIO(out.getvalue()))[0]
        self.assertEqual(record["n"], "2")
        self.assertLessEqual(len(record["mre_barni"]), len("0.0396000"))

    def test_full_precision_csv(self):
        rows = mre_curve(3)
        out = io.StringIO()
        write_csv(rows, out, full_precision=True)
        records = read_csv(io.StringIO(out.getvalue()))
        for row, record in zip(rows, records):
            for name, value in row.columns:
                self.assertEqual(float(record[name]), value)

    def test_empty(self):
        out = io.StringIO()
        write_csv([], out)
        self.assertEqual(out.getvalue(), "")


class TestErrorTables(ErrorTableComparator):
    def test_table3(self):
        rows = table3(QUICK, [2, 3])
        self.assertEqual(len(rows), 2)
        for row in rows:
            self.assertEqual(row.provenance, EMPIRICAL)
            self.assertTrue(row.converged)
            self.assertEqual(row.samples_used, 4096)
            self.assertEqual(len(row.columns), 9)
            for prefix in ("lambda", "mulambda", "barni"):
                self.assertLessEqual(
                    row.value(f"{prefix}_mre_e"),
                    row.value(f"{prefix}_mre_t") + 1e-6,
                )
        out = io.StringIO()
        write_csv(rows, out)
        header = out.getvalue().splitlines()[0].split(",")
        self.assertEqual(header[0], "n")
        self.assertEqual(
            header[1:4], ["lambda_are", "lambda_mre_e", "lambda_mre_t"]
        )
        self.assertEqual(header[-3:], ["converged", "samples_used", "seed"])
        record = read_csv(io.StringIO(out.getvalue()))[0]
        self.assertEqual(record["converged"], "true")

    def test_table4(self):
        settings = QUICK.replace(tol=1e-12)
        (row,) = table4(settings, [2])
        self.assertFalse(row.converged)
        self.assertEqual(
            [name for name, _ in row.columns],
            [
                "a",
                "b",
                "fixed_are",
                "fixed_mre_e",
                "converged_are",
                "converged_mre_e",
                "sup_mre",
            ],
        )
        self.assertGreater(row.value("a"), 0.0)
        self.assertGreater(row.value("b"), 0.0)
        self.assertLessEqual(row.value("fixed_are"), row.value("fixed_mre_e"))
        self.assertLessEqual(
            row.value("converged_mre_e"), row.value("sup_mre") + 1e-9
        )

    def test_table3_waits_for_check_from(self):
        rows = table3(QUICK.replace(check_from=1 << 20), [2])
        self.assertFalse(rows[0].converged)
        self.assertEqual(rows[0].samples_used, 4096)

    def test_fixed_budget_has_its_own_sample(self):
        (row,) = table4(QUICK, [3])
        params = params_for(
            NormFamily.SEOL_CHEUN_AB,
            3,
            fit_samples=QUICK.fit_samples,
            seed=QUICK.fit_seed,
        )
        own = fixed_sample_mre(
            params, QUICK.sampler(3, seed=QUICK.fixed_seed), 4096
        )
        prefix = fixed_sample_mre(params, QUICK.sampler(3), 4096)
        self.assertEqual(row.value("fixed_are"), own[0])
        self.assertEqual(row.value("fixed_mre_e"), own[1])
        self.assertNotEqual(row.value("fixed_are"), prefix[0])
        self.assertNotEqual(QUICK.fixed_seed, QUICK.seed)
        self.assertNotEqual(QUICK.fixed_seed, QUICK.fit_seed)

    def test_fixed_budget_understates_maximum_at_ten(self):
        settings = RunSettings(
            schedule=(1 << 20, 1 << 21, 1 << 22),
            fit_samples=200_000,
            fixed_budget=100_000,
        )
        row = table4_row(10, settings)
        fixed = row.value("fixed_mre_e")
        converged = row.value("converged_mre_e")
        self.assertGreaterEqual(converged - fixed, 0.01)
        self.assertGreaterEqual(fixed, 0.13)
        self.assertLessEqual(fixed, 0.19)
        self.assertLessEqual(converged, row.value("sup_mre") + 1e-9)
        self.assertWithin(row.value("converged_are"), ARE_AB[-1], 5e-4)

    def test_raw_gaussian_table4(self):
        (plain,) = table4(QUICK, [3])
        (raw,) = table4(QUICK, [3], raw_gaussian=True)
        self.assertAlmostEqual(
            plain.value("fixed_are"), raw.value("fixed_are"), places=12
        )


class TestSingleEvaluations(ErrorTableComparator):
    def test_euclidean(self):
        result = evaluate_vector([3.0, 4.0], NormFamily.EUCLIDEAN, QUICK)
        self.assertEqual(result["value"], 5.0)
        self.assertEqual(result["relative_error"], 0.0)
        self.assertEqual(result["mre_bound"], 0.0)

    def test_manhattan(self):
        result = evaluate_vector([1.0] * 4, NormFamily.MANHATTAN, QUICK)
        self.assertEqual(result["value"], 4.0)
        self.assertEqual(result["exact"], 2.0)
        self.assertEqual(result["relative_error"], 1.0)

    def test_approximations_within_bound(self):
        for family in (
            NormFamily.CHAUDHURI_ORIGINAL,
            NormFamily.LAMBDA_OPTIMAL,
            NormFamily.MU_LAMBDA,
            NormFamily.BARNI,
        ):
            result = evaluate_vector([3.0, -1.0, 2.0], family, QUICK)
            with self.subTest(family=family.value):
                self.assertLessEqual(
                    result["relative_error"], result["mre_bound"] + 1e-12
                )

    def test_zero_vector(self):
        result = evaluate_vector([0.0, 0.0], NormFamily.BARNI, QUICK)
        self.assertEqual(result["value"], 0.0)
        self.assertIsNone(result["relative_error"])

    def test_fit_report(self):
        report = fit_report(3, QUICK)
        self.assertEqual(report["seed"], QUICK.seed + 1)
        self.assertEqual(report["fit_samples"], 5000)
        self.assertGreater(report["a"], 0.0)


class TestCoverageReport(ErrorTableComparator):
    def test_ten_dimensions(self):
        report = coverage_report(10, 0.1, 100_000)
        self.assertLess(report["deficiency_ratio"], 1e-6)
        self.assertFalse(report["log_domain"])
        tail = report["tail_bound"]["3"]
        self.assertAlmostEqual(tail["union"], math.exp(-3), places=12)
        self.assertLess(tail["limit"], tail["union"])

    def test_log_domain(self):
        report = coverage_report(500, 0.01, 1000)
        self.assertTrue(report["log_domain"])
        self.assertIn("log10", report["expected_samples"])
        self.assertIn("log10", report["patch_count"])
        self.assertEqual(report["deficiency_ratio"], 0.0)
        self.assertLess(report["log10_deficiency_ratio"], -300)

    def test_json_number(self):
        self.assertEqual(json_number(2.5, 0.4), 2.5)
        self.assertEqual(json_number(math.inf, 400.0), {"log10": 400.0})


class TestOpCounts(ErrorTableComparator):
    def test_all_rows_match(self):
        for n in list(range(2, 18)) + [33, 64, 100]:
            checks = opcount_checks(n)
            with self.subTest(n=n):
                self.assertEqual(
                    [c.norm for c in checks],
                    [
                        "D1",
                        "D2",
                        "Dinf",
                        "D_lambda",
                        "D_mu_lambda",
                        "D_B",
                        "D_ab",
                    ],
                )
                for check in checks:
                    self.assertTrue(check.matches, check)

    def test_sorted_row_at_eight(self):
        checks = {c.norm: c for c in opcount_checks(8)}
        self.assertEqual(checks["D_B"].counted.as_tuple(), (8, 19, 7, 8, 0))
        self.assertEqual(checks["D_B"].comparison_band, (7, 24))

    def test_csv(self):
        out = io.StringIO()
        write_opcounts(opcount_checks(4), out)
        records = read_csv(io.StringIO(out.getvalue()))
        self.assertEqual(len(records), 7)
        self.assertTrue(all(r["match"] == "true" for r in records))
        by_norm = {r["norm"]: r for r in records}
        self.assertEqual(by_norm["D2"]["expected"], "0 0 3 4 1")
        self.assertEqual(by_norm["D_B"]["expected"], "4 3..8 3 4 0")


if __name__ == "__main__":
    main()
