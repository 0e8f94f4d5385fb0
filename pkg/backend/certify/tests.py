import csv
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from circle.services.geometry import Arc, circle_distance
from circle.services.homeo import LocalHomeo
from circle.services.pl_map import PLMap, c0_distance
from circle.services.potential import Potential
from cli.services.loading import load_map, load_potential
from perturb.services.cases import case_split, perturb_case_a, perturb_case_b, perturb_case_one
from perturb.services.pipeline import construct
from perturb.services.plan import AlphaSchedule, CaseReport, CaseTag, PerturbationPlan, compose
from perturb.services.schedule import build_T2, lambda_schedule

from .exceptions import CertificateFormatError
from .services.certificate import Certificate, Trajectory, certify, maximality_holds
from .services.checks import (
    CheckInput,
    LemmaCheck,
    check_expansion,
    check_periodicity,
    check_return_distance_bracket,
    check_support_containment,
)
from .services.report import emit_report, load_certificate, render_certificate

FIXTURES = Path(__file__).resolve().parent.parent / "cli" / "fixtures"


def cosine(n=1024):
    return Potential.from_function(lambda x: np.cos(2 * np.pi * x), n)


def small_run(f, f_hat, plan, **kwargs):
    options = dict(bins=64, resolution=256, p_max=2, random_orbits=20, orbit_length=20)
    options.update(kwargs)
    return certify(f, f_hat, cosine(), plan, 0.1, **options)


def radial_plan(T2, schedule):
    return PerturbationPlan(CaseTag.CASE_IIB, 0.0, 1, (LocalHomeo.identity(), T2), schedule)


SCHEDULE = AlphaSchedule(0.0, 1, 0.05, 0.1, (0.05,), ())


class CertifyTests(SimpleTestCase):
    def test_doubling_fixed_point_is_certified(self):
        f = PLMap.doubling()
        result = construct(f, cosine(), 0.1, 1024, 256, p_max=3, random_orbits=10, orbit_length=10)
        certificate = certify(
            f, result.f_hat, cosine(), result.plan, 0.1,
            bins=256, resolution=1024, p_max=3, random_orbits=50, orbit_length=100,
            base_upper_bound=result.beta,
        )
        self.assertEqual(certificate.distance, 0.0)
        self.assertEqual(certificate.orbit, (0.0,))
        self.assertEqual(certificate.orbit_average, 1.0)
        self.assertEqual(certificate.failures, [])
        self.assertTrue(certificate.verdict)
        self.assertGreater(certificate.lemma_checks["case_one_blocks"].checked, 0)
        self.assertGreaterEqual(certificate.lower_bound_oracle, 1.0)

    def test_contracting_T2_fails_expansion(self):
        f = PLMap.doubling()
        contracting = LocalHomeo.radial(0.0, 0.1, [(0.05, 0.02)])
        plan = radial_plan(contracting, SCHEDULE)
        certificate = small_run(f, compose(f, plan.steps), plan)
        self.assertFalse(certificate.lemma_checks["expansion"].passed)
        self.assertIn("expansion", certificate.failures)
        self.assertFalse(certificate.verdict)

    def test_expanding_T2_passes_expansion(self):
        f = PLMap.doubling()
        plan = radial_plan(build_T2(SCHEDULE), SCHEDULE)
        certificate = small_run(f, compose(f, plan.steps), plan)
        self.assertTrue(certificate.lemma_checks["expansion"].passed)
        self.assertEqual(certificate.lemma_checks["expansion"].violations, 0)


class CheckTests(SimpleTestCase):
    def check_input(self, f, f_hat, plan, epsilon=0.1):
        return CheckInput(f, f_hat, cosine(), plan, epsilon, 256, 1e-3)

    def test_bracket_on_built_schedule(self):
        d = np.arange(1, 256) / 1024
        schedule = lambda_schedule(0.5, 3, 0.25, 0.3, d, 1.0 + d, d / 2, 1.0, 1024, 1e-6)
        plan = PerturbationPlan(
            CaseTag.CASE_IIB, 0.5, 3, (LocalHomeo.identity(), build_T2(schedule)), schedule
        )
        f = PLMap.identity()
        inp = self.check_input(f, f, plan)
        bracket = check_return_distance_bracket(inp)
        self.assertTrue(bracket.passed)
        self.assertEqual(bracket.checked, 6 * (schedule.depth - 1))
        self.assertTrue(check_expansion(inp).passed)

    def test_corrupted_knot_breaks_periodicity(self):
        f = PLMap.rotation(0.05)
        report = CaseReport(CaseTag.CASE_I, 0.45, 0.2, 1, 1e-6, n1=1, residual=0.0, center=0.5)
        _, plan = perturb_case_one(f, Potential.constant(0.0), report)
        step = plan.steps[0]
        knots = np.array(step.knots)
        knots[1, 1] += 4e-3
        corrupted = LocalHomeo(step.support, knots)
        bad = PerturbationPlan(plan.tag, plan.periodic_point, plan.period, (corrupted,))
        inp = self.check_input(f, compose(f, bad.steps), bad)
        self.assertFalse(check_periodicity(inp).passed)
        self.assertTrue(check_periodicity(self.check_input(f, compose(f, plan.steps), plan)).passed)

    def test_support_far_from_proxy(self):
        f = PLMap.rotation(0.05)
        step = LocalHomeo.moving(Arc(0.0, 0.05), 0.01, 0.02)
        plan = PerturbationPlan(CaseTag.CASE_I, 0.0, 1, (step,), context={"proxy": 0.5})
        result = check_support_containment(self.check_input(f, compose(f, plan.steps), plan))
        self.assertEqual(result.violations, 1)
        self.assertFalse(result.passed)

    def test_support_agreement(self):
        f = PLMap.rotation(0.05)
        step = LocalHomeo.moving(Arc(0.5, 0.05), 0.5, 0.49)
        plan = PerturbationPlan(CaseTag.CASE_I, 0.45, 1, (step,), context={"proxy": 0.5})
        result = check_support_containment(self.check_input(f, compose(f, plan.steps), plan))
        self.assertTrue(result.passed)
        self.assertGreater(result.checked, 200)

    def test_skipped_checks_pass(self):
        self.assertEqual(LemmaCheck.skipped(), LemmaCheck(True, 0, 0))
        self.assertEqual(LemmaCheck.count([False, True, True]), LemmaCheck(False, 3, 2))


def rotation_fixture(name):
    return load_map(FIXTURES / name), load_potential(FIXTURES / "cosine.json")


def run_average(start, steps, stride, resolution):
    """Mean of cos along start, start + stride, ... in grid units."""
    z = (start + stride * np.arange(steps)) / resolution
    return float(np.mean(np.cos(2 * np.pi * z)))


class SubcaseCertificateTests(SimpleTestCase):
    """
    Rotations by 1/64 and 1/32 with cos: every orbit averages 0, so φ₀ is
    already normalized and the best return around the proxy is a run across
    the peak.
    """

    def certify_rotation(self, f, f_hat, phi, plan, proxy, resolution):
        plan.context.update(beta=0.0, drift=0.0, proxy=proxy, epsilon=0.2)
        return certify(
            f, f_hat, phi, plan, 0.2,
            bins=256, resolution=resolution, p_max=3, random_orbits=50, orbit_length=100,
            base_upper_bound=0.0,
        )

    def test_interior_witness_closes_at_peak(self):
        f, phi = rotation_fixture("rotation_64.json")
        report = case_split(f, phi, 64 / 1024, 0.05, 1024)
        self.assertEqual(report.tag, CaseTag.CASE_IIA)
        self.assertLessEqual(circle_distance(report.x0, 13 / 1024), 1e-12)
        self.assertEqual(report.n0, 6)
        self.assertAlmostEqual(report.a0, run_average(13, 6, 16, 1024), places=12)
        self.assertEqual(report.m0, 41)
        self.assertEqual(report.c_bar, 1.0)
        self.assertAlmostEqual(report.c_bar_error, phi.lipschitz / 1024, places=12)
        self.assertLessEqual(circle_distance(report.q, 0.0), 1e-12)
        self.assertLessEqual(circle_distance(report.q0, 16 / 1024), 1e-12)
        self.assertEqual(report.n_q, 1)

        f_tilde, plan = perturb_case_a(f, phi, report)
        self.assertEqual(plan.period, 1)
        self.assertLessEqual(circle_distance(f_tilde(0.0), 0.0), 1e-12)
        self.assertAlmostEqual(c0_distance(f, f_tilde), 1 / 64, places=12)

        certificate = self.certify_rotation(f, f_tilde, phi, plan, 64 / 1024, 1024)
        self.assertTrue(certificate.verdict)
        self.assertEqual(certificate.failures, [])
        self.assertEqual(certificate.orbit_average, 1.0)
        self.assertGreater(certificate.lemma_checks["case_a_blocks"].checked, 0)
        self.assertEqual(certificate.lemma_checks["closed_orbit_average"].checked, 1)

    def test_boundary_witness_closes_at_peak(self):
        f, phi = rotation_fixture("rotation_32.json")
        report = case_split(f, phi, 64 / 4096, 0.05, 4096)
        self.assertEqual(report.tag, CaseTag.CASE_IIB)
        self.assertLessEqual(circle_distance(report.x0, -128 / 4096), 1e-12)
        self.assertEqual(report.n0, 3)
        self.assertAlmostEqual(report.a0, run_average(-128, 3, 128, 4096), places=12)
        # j = 19 는 오차막대 때문에 창에서 빠진다
        self.assertEqual(report.m0, 20)
        self.assertAlmostEqual(report.c_bar, np.cos(2 * np.pi * 52 / 4096), places=12)
        self.assertLessEqual(circle_distance(report.q0, 76 / 4096), 1e-12)
        self.assertEqual(report.n_q, 1)

        f_hat, plan = perturb_case_b(f, phi, report, 4096)
        context = plan.context
        self.assertEqual(plan.tag, CaseTag.CASE_IIB)
        self.assertEqual(plan.period, 1)
        self.assertLessEqual(circle_distance(context["q"], -52 / 4096), 1e-12)
        self.assertAlmostEqual(context["delta"], 64 / 4096, places=15)
        self.assertAlmostEqual(context["delta3"], 6 / 4096, places=15)
        self.assertLessEqual(circle_distance(context["zMax"], 0.0), 1e-12)
        self.assertLessEqual(circle_distance(plan.periodic_point, 0.0), 1e-12)
        self.assertFalse(context["alphaFallback"])
        self.assertEqual(context["nRet"], 1)
        # α 가 W₀ 위 ψ 의 최대점이므로 T₂ 는 항등이다
        self.assertIsNone(plan.schedule)
        self.assertEqual(len(plan.steps), 1)
        self.assertLessEqual(circle_distance(f_hat(0.0), 0.0), 1e-9)
        self.assertAlmostEqual(c0_distance(f, f_hat), 1 / 32, places=9)

        certificate = self.certify_rotation(f, f_hat, phi, plan, 64 / 4096, 4096)
        self.assertTrue(certificate.verdict)
        self.assertEqual(certificate.failures, [])
        self.assertEqual(certificate.orbit_average, 1.0)
        checks = certificate.lemma_checks
        self.assertEqual(checks["closed_orbit_average"].checked, 1)
        self.assertEqual(checks["excursion_estimate"].checked, 1)
        self.assertEqual(checks["perturbed_return_structure"].violations, 0)
        self.assertGreater(checks["perturbed_return_structure"].checked, 190)
        self.assertTrue(checks["outside_component_bound"].passed)
        for name in ("expansion", "nested_return_contraction", "block_average_bound"):
            self.assertEqual(checks[name].checked, 0, name)


class MaximalityTests(SimpleTestCase):
    def test_against_lp_lower_edge(self):
        self.assertTrue(maximality_holds(1.0, 1.0, 0.01, 1.0, 1e-3))
        self.assertTrue(maximality_holds(0.995, 1.0, 0.01, 0.99, 1e-3))
        self.assertFalse(maximality_holds(0.9, 1.0, 0.01, 0.9, 1e-3))

    def test_against_oracle(self):
        self.assertFalse(maximality_holds(1.0, 1.0, 0.01, 1.1, 1e-3))

    def test_missing_lp(self):
        self.assertFalse(maximality_holds(1.0, None, None, 1.0, 1e-3))


def period_three_certificate(verdict=True):
    f = PLMap.rotation(1 / 3)
    checks = {
        "periodicity": LemmaCheck(True, 1, 0),
        "expansion": LemmaCheck(verdict, 800, 0 if verdict else 17),
    }
    orbit = Trajectory.of("orbit", f, cosine(), 0.0, 3)
    return Certificate(
        epsilon=0.1,
        distance=0.0,
        orbit=orbit.points,
        period=3,
        orbit_average=0.0,
        upper_bound=0.002,
        upper_bound_error=0.0015,
        lower_bound_oracle=None,
        lemma_checks=checks,
        verdict=verdict,
        tol=1e-3,
        bins=4096,
        grid=16384,
        seed=7,
        tag="CaseIIa",
        trajectories=(orbit, Trajectory.of("random0", f, cosine(), 0.2, 5)),
    )


class ReportTests(SimpleTestCase):
    def test_round_trip(self):
        certificate = period_three_certificate()
        with tempfile.TemporaryDirectory() as tmp:
            json_path, _ = emit_report(certificate, tmp)
            self.assertEqual(load_certificate(json_path), certificate)

    def test_trajectory_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            _, csv_path = emit_report(period_three_certificate(), tmp)
            with open(csv_path, newline="") as fp:
                rows = list(csv.reader(fp))
        self.assertEqual(rows[0], ["kind", "n", "x_n", "running_average"])
        self.assertEqual(sum(1 for row in rows[1:] if row[0] == "orbit"), 3)
        self.assertEqual(sum(1 for row in rows[1:] if row[0] == "random0"), 5)

    def test_failure_counts_in_json(self):
        text = render_certificate(period_three_certificate(verdict=False)).decode()
        self.assertIn('"violations": 17', text)
        self.assertIn('"verdict": false', text)

    def test_deterministic_rendering(self):
        self.assertEqual(
            render_certificate(period_three_certificate()),
            render_certificate(period_three_certificate()),
        )

    def test_bad_document(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "broken.json"
            path.write_text('{"epsilon": 0.1}')
            with self.assertRaises(CertificateFormatError):
                load_certificate(path)
