import numpy as np
from django.test import SimpleTestCase

from birkhoff.exceptions import NotFound
from birkhoff.services.returns import ReturnTable
from circle.services.geometry import Arc, circle_distance
from circle.services.homeo import LocalHomeo
from circle.services.pl_map import PLMap, c0_distance
from circle.services.potential import Potential

from .exceptions import (
    ConstructionFailed,
    DegenerateGeometry,
    DeltaCollapse,
    EmptyPreimageSet,
    FlatP,
    NoValidAlpha,
    PeriodicityLost,
    SupportOverflow,
)
from .services.cases import case_split, perturb_case_a, perturb_case_one
from .services.geometry import (
    ReturnComponent,
    build_E_q_q0,
    choose_alpha,
    contiguous_run,
    find_delta,
    iterated_preimages,
)
from .services.pipeline import construct
from .services.plan import AlphaSchedule, CaseReport, CaseTag, PerturbationPlan, assemble
from .services.schedule import build_T1, build_T2, lambda_schedule, pseudo_inverse


def cosine(n=1024, shift=0.0):
    return Potential.from_function(lambda x: np.cos(2 * np.pi * x) - shift, n)


ZERO = Potential.constant(0.0)


class CaseSplitTests(SimpleTestCase):
    def test_nonpositive_potential_is_case_one(self):
        report = case_split(PLMap.doubling(), cosine(shift=1.0), 0.0, 0.05, 256)
        self.assertEqual(report.tag, CaseTag.CASE_I)
        self.assertEqual(report.x0, 0.0)
        self.assertEqual(report.n1, 1)
        self.assertEqual(report.residual, 0.0)

    def test_half_rotation_is_case_one_with_period_two(self):
        report = case_split(PLMap.rotation(0.5), cosine(), 0.3, 0.05, 256, horizon=8)
        self.assertEqual(report.tag, CaseTag.CASE_I)
        self.assertEqual(report.n1, 2)
        self.assertLess(abs(report.residual), 1e-9)

    def test_drift_does_not_hide_a_positive_return(self):
        # 고정점 0 의 평균 10⁻³ 은 drift 보다 작지만 Case I 이 아니다
        with self.assertRaises(NotFound):
            case_split(PLMap.doubling(), cosine(shift=1.0 - 1e-3), 0.0, 0.05, 256, drift=0.01)


class CaseOneTests(SimpleTestCase):
    def test_already_periodic_gives_identity(self):
        report = CaseReport(CaseTag.CASE_I, 0.0, 0.05, 1, 1e-6, n1=1, residual=0.0, center=0.01)
        f_tilde, plan = perturb_case_one(PLMap.doubling(), ZERO, report)
        self.assertTrue(plan.is_identity)
        self.assertEqual(c0_distance(f_tilde, PLMap.doubling()), 0.0)

    def test_closes_rotation(self):
        f = PLMap.rotation(0.05)
        report = CaseReport(CaseTag.CASE_I, 0.45, 0.2, 1, 1e-6, n1=1, residual=0.0, center=0.5)
        f_tilde, plan = perturb_case_one(f, ZERO, report)
        self.assertAlmostEqual(f_tilde(0.45), 0.45, places=12)
        self.assertEqual(plan.period, 1)
        self.assertEqual(plan.support_arcs, [Arc(0.5, 0.2)])
        for z in (0.0, 0.1, 0.2, 0.75, 0.9):
            self.assertAlmostEqual(f_tilde(z), f(z), places=12)

    def test_boundary_point_is_degenerate(self):
        report = CaseReport(CaseTag.CASE_I, 0.3, 0.2, 1, 1e-6, n1=1, residual=0.0, center=0.5)
        with self.assertRaises(DegenerateGeometry):
            perturb_case_one(PLMap.rotation(0.05), ZERO, report)


class CaseATests(SimpleTestCase):
    def test_closes_period_three_orbit(self):
        f = PLMap.rotation(1 / 3 + 0.01)
        report = CaseReport(CaseTag.CASE_IIA, 0.5, 0.1, 3, 1e-6, q=0.5, q0=0.53, n_q=3)
        f_tilde, plan = perturb_case_a(f, ZERO, report)
        self.assertEqual(plan.period, 3)
        self.assertLessEqual(circle_distance(f_tilde.image(0.5, 3), 0.5), 1e-9)
        self.assertAlmostEqual(f_tilde(0.0), f(0.0), places=12)


class AssembleTests(SimpleTestCase):
    def test_empty_plan_returns_f(self):
        plan = PerturbationPlan(CaseTag.CASE_I, 0.0, 1)
        f = PLMap.doubling()
        self.assertIs(assemble(f, plan), f)

    def test_wrong_period_is_lost(self):
        plan = PerturbationPlan(CaseTag.CASE_I, 0.25, 1)
        with self.assertRaises(PeriodicityLost):
            assemble(PLMap.doubling(), plan)


class PreimageGeometryTests(SimpleTestCase):
    def test_dyadic_preimages(self):
        found = iterated_preimages(PLMap.doubling(), 0.5, 2)
        self.assertEqual(found, [(0.125, 2), (0.25, 1), (0.375, 2), (0.625, 2), (0.75, 1), (0.875, 2)])

    def test_closest_preimage_defines_E(self):
        geo = build_E_q_q0(PLMap.doubling(), ZERO, Arc(0.25, 0.2), 0.5, 0.0, 2, 1e-6)
        self.assertEqual(geo.q, 0.375)
        self.assertEqual(geo.n_q, 2)
        self.assertAlmostEqual(geo.E.center, 0.4375, places=12)
        self.assertAlmostEqual(geo.E.radius, 0.0625, places=12)

    def test_fixed_target_closes(self):
        geo = build_E_q_q0(PLMap.doubling(), ZERO, Arc(0.0, 0.1), 0.0, 0.0, 2, 1e-6)
        self.assertTrue(geo.closed)

    def test_empty_preimage_set(self):
        with self.assertRaises(EmptyPreimageSet):
            build_E_q_q0(PLMap.doubling(), ZERO, Arc(0.25, 0.2), 0.5, 1.0, 2, 1e-6)


class DeltaTests(SimpleTestCase):
    def test_vacuous_condition_gives_half_gap(self):
        delta = find_delta(PLMap.doubling(), ZERO, 0.375, 0.5, 0.0, 2, 1e-6, 1024)
        self.assertEqual(delta, 0.0625)

    def test_collapse(self):
        with self.assertRaises(DeltaCollapse):
            find_delta(PLMap.identity(), ZERO, 0.375, 0.5, 0.0, 2, 1e-6, 1024)

    def test_contiguous_run(self):
        mask = np.array([False, True, True, False, True])
        self.assertEqual(contiguous_run(mask, 2), (1, 2))
        self.assertEqual(contiguous_run(mask, 3), (3, 2))


def component(psi, q_index=0):
    points = np.array([0.1, 0.2, 0.3])
    table = ReturnTable(points, np.full(3, 2), points + 0.5, np.array(psi, dtype=float))
    return ReturnComponent(table, q_index, 0, 2)


class ChooseAlphaTests(SimpleTestCase):
    def test_argmax_when_eligible(self):
        z_max, alpha = choose_alpha(component([0.5, 0.9, 0.7]), 1, np.ones(3, dtype=bool))
        self.assertEqual((z_max, alpha), (0.2, 0.2))

    def test_constant_psi(self):
        z_max, alpha = choose_alpha(component([0.4, 0.4, 0.4]), 3, np.ones(3, dtype=bool))
        self.assertEqual(alpha, z_max)

    def test_q_is_argmax(self):
        z_max, alpha = choose_alpha(component([0.9, 0.5, 0.7], q_index=0), 2, np.ones(3, dtype=bool))
        self.assertEqual(alpha, 0.1)

    def test_no_valid_alpha(self):
        with self.assertRaises(NoValidAlpha) as ctx:
            choose_alpha(component([0.5, 0.9, 0.7]), 1, np.array([True, False, True]))
        self.assertEqual(ctx.exception.args[0], 0.3)

    def test_nothing_eligible(self):
        with self.assertRaises(DegenerateGeometry):
            choose_alpha(component([0.5, 0.9, 0.7]), 1, np.zeros(3, dtype=bool))


class T1Tests(SimpleTestCase):
    I = Arc(0.5, 0.1)

    def test_identity_when_already_closed(self):
        self.assertTrue(build_T1(0.48, 0.48, self.I, 0.01, 1024).is_identity)

    def test_moves_image_to_alpha(self):
        T1 = build_T1(0.5, 0.48, self.I, 0.01, 1024)
        self.assertAlmostEqual(T1(0.5), 0.48, places=12)
        self.assertEqual(T1(0.3), 0.3)
        self.assertLessEqual(T1.max_displacement, 0.02 + 2 * 0.01)

    def test_overflow(self):
        with self.assertRaises(SupportOverflow):
            build_T1(0.5, 0.48, self.I, 0.09, 1024)
        with self.assertRaises(SupportOverflow):
            build_T1(0.5, 0.48, self.I, 1e-4, 1024)


class ScheduleTests(SimpleTestCase):
    def linear_samples(self):
        d = np.arange(1, 256) / 1024
        return d, 1.0 + d, d / 2

    def test_pseudo_inverse(self):
        d = np.array([0.1, 0.2, 0.3])
        envelope = np.array([0.0, 0.5, 0.5])
        self.assertEqual(pseudo_inverse(d, envelope, 0.4, 1.0), 0.2)
        self.assertEqual(pseudo_inverse(d, envelope, 0.6, 0.25), 0.25)

    def test_linear_envelope(self):
        d, psi, image = self.linear_samples()
        schedule = lambda_schedule(0.5, 3, 0.25, 0.3, d, psi, image, 1.0, 1024, 1e-6)
        self.assertEqual(schedule.s[0], 0.25)
        self.assertLessEqual(abs(schedule.s[1] - 0.125), 2 / 1024)
        self.assertGreaterEqual(schedule.depth, 5)
        self.assertTrue(all(a > b for a, b in zip(schedule.s, schedule.s[1:])))
        for s_i, r_i in zip(schedule.s[1:], schedule.r):
            self.assertEqual(r_i, s_i / 2)
        self.assertGreaterEqual(schedule.s[-1], 1 / 1024)

    def test_flat_psi(self):
        d, _, image = self.linear_samples()
        with self.assertRaises(FlatP):
            lambda_schedule(0.5, 3, 0.25, 0.3, d, np.ones_like(d), image, 1.0, 1024, 1e-6)

    def test_T2_expands_and_brackets(self):
        d, psi, image = self.linear_samples()
        schedule = lambda_schedule(0.5, 3, 0.25, 0.3, d, psi, image, 1.0, 1024, 1e-6)
        T2 = build_T2(schedule)
        self.assertAlmostEqual(T2(0.5), 0.5, places=12)
        self.assertEqual(T2(0.9), 0.9)
        z = 0.5 + np.linspace(-0.299, 0.299, 601)
        z = z[np.abs(z - 0.5) > 1e-6]
        moved = circle_distance(T2(z), 0.5)
        self.assertTrue(np.all(moved > circle_distance(z, 0.5)))
        for k in range(1, schedule.depth):
            mid = (schedule.r[k] + schedule.r[k - 1]) / 2
            rho = circle_distance(T2(0.5 + mid), 0.5)
            self.assertGreaterEqual(rho, schedule.s[k] - 1e-12)
            self.assertLessEqual(rho, schedule.s[k - 1] + 1e-12)

    def test_radius_map_knots(self):
        schedule = AlphaSchedule(0.5, 1, 0.1, 0.2, (0.1, 0.05, 0.025), (0.05, 0.02))
        rho = schedule.radius([0.02, 0.05, 0.1, 0.15, 0.2, 0.3])
        # r_i ↦ s_{i−1}, R₁ ↦ (R₁ + R₂)/2, R₂ 부터 항등
        np.testing.assert_allclose(rho, [0.05, 0.1, 0.15, 0.175, 0.2, 0.3])
        T2 = build_T2(schedule)
        self.assertAlmostEqual(float(T2(0.6)), 0.65, places=12)
        self.assertAlmostEqual(float(T2(0.4)), 0.35, places=12)

    def test_schedule_without_levels(self):
        schedule = AlphaSchedule(0.5, 1, 0.1, 0.2, (0.1,), ())
        T2 = build_T2(schedule)
        self.assertAlmostEqual(T2(0.5), 0.5, places=12)
        self.assertEqual(T2(0.75), 0.75)
        self.assertIsInstance(T2, LocalHomeo)


class PipelineTests(SimpleTestCase):
    def test_doubling_cosine_closes_at_fixed_point(self):
        f = PLMap.doubling()
        result = construct(
            f, cosine(), 0.1, 1024, 256, p_max=3, random_orbits=10, orbit_length=10
        )
        self.assertEqual(result.report.tag, CaseTag.CASE_I)
        self.assertEqual(result.plan.periodic_point, 0.0)
        self.assertEqual(result.plan.period, 1)
        self.assertTrue(result.plan.is_identity)
        self.assertEqual(c0_distance(f, result.f_hat), 0.0)

    def test_rejected_construction_moves_on(self):
        seen = []

        def verify(result):
            seen.append(result.attempts)
            return len(seen) > 1

        result = construct(
            PLMap.doubling(), cosine(), 0.1, 1024, 256,
            p_max=3, random_orbits=10, orbit_length=10, verify=verify,
        )
        self.assertEqual(len(seen), 2)
        self.assertLess(seen[0], seen[1])
        self.assertEqual(result.attempts, seen[1])

    def test_nothing_verified_returns_first_rejected(self):
        seen = []

        def verify(result):
            seen.append(result.attempts)
            return False

        result = construct(
            PLMap.doubling(), cosine(), 0.1, 1024, 256,
            p_max=3, random_orbits=10, orbit_length=10, retries=1, verify=verify,
        )
        self.assertGreater(len(seen), 1)
        self.assertEqual(result.attempts, seen[0])
        self.assertEqual(result.plan.periodic_point, 0.0)

    def test_flat_piece_is_rejected(self):
        f = PLMap.from_slopes([0.0, 0.5, 1.0], [0.0, 4.0])
        with self.assertRaises(ConstructionFailed):
            construct(f, cosine(), 0.1, 256, 64)
