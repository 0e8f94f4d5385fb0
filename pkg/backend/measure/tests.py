import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from circle.services.geometry import circle_distance
from circle.services.pl_map import PLMap
from circle.services.potential import Potential

from .exceptions import BranchExplosion
from .services.bounds import maximizing_bound, normalize, support_candidates
from .services.orbits import best_periodic_average, periodic_orbits
from .services.ulam import build_ulam_model, certified_value, dump_csv, ulam_upper_bound


def cosine(n=1024, sign=1.0):
    return Potential.from_function(lambda x: sign * np.cos(2 * np.pi * x), n)


class UlamModelTests(SimpleTestCase):
    def test_rows_are_stochastic(self):
        model = build_ulam_model(PLMap.from_slopes([0.0, 0.3, 1.0], [5.0, 0.5 / 0.7]), cosine(), 64)
        rows = np.asarray(model.transition.sum(axis=1)).ravel()
        self.assertTrue(np.allclose(rows, 1.0, atol=1e-12))

    def test_transitions_lie_on_enclosure_edges(self):
        model = build_ulam_model(PLMap.doubling(), cosine(), 128)
        edges = set(zip(model.sources.tolist(), model.targets.tolist()))
        coo = model.transition.tocoo()
        for i, j in zip(coo.row.tolist(), coo.col.tolist()):
            self.assertIn((i, j), edges)

    def test_rejects_too_few_bins(self):
        with self.assertRaises(ValueError):
            build_ulam_model(PLMap.doubling(), cosine(), 8)


class UlamBoundTests(SimpleTestCase):
    def test_constant_potential(self):
        bound = ulam_upper_bound(PLMap.doubling(), Potential.constant(2.0), 64)
        self.assertAlmostEqual(bound.value, 2.0, places=6)

    def test_doubling_cosine(self):
        bound = ulam_upper_bound(PLMap.doubling(), cosine(), 1024)
        self.assertGreaterEqual(bound.value, 1.0 - 1e-7)
        self.assertLessEqual(bound.value, 1.0 + bound.error)

    def test_fixed_point_value_at_4096_bins(self):
        bound = ulam_upper_bound(PLMap.doubling(), cosine(), 4096)
        self.assertGreaterEqual(bound.value, 1.0)
        self.assertLess(bound.value, 1.0 + 1e-6)
        self.assertGreaterEqual(bound.value, bound.solver_value - 1e-9)

    def test_period_two_value_at_4096_bins(self):
        # −cos 의 최대화 궤도는 {1/3, 2/3}, 평균 1/2
        bound = ulam_upper_bound(PLMap.doubling(), cosine(n=4096, sign=-1.0), 4096)
        self.assertGreaterEqual(bound.value, 0.5 - 1e-5)
        self.assertLess(bound.value, 0.51)

    def test_any_dual_bounds_the_optimum(self):
        bound = ulam_upper_bound(PLMap.doubling(), cosine(), 64)
        self.assertEqual(certified_value(bound.model, np.zeros(64)), bound.model.bin_potential.max())
        rng = np.random.default_rng(3)
        for _ in range(5):
            self.assertGreaterEqual(certified_value(bound.model, rng.normal(size=64)), 1.0)

    def test_refinement_does_not_increase_bound(self):
        coarse = ulam_upper_bound(PLMap.doubling(), cosine(sign=-1.0), 64)
        fine = ulam_upper_bound(PLMap.doubling(), cosine(sign=-1.0), 128)
        self.assertLessEqual(fine.value, coarse.value + 1e-7)

    def test_bounds_every_periodic_orbit(self):
        f, phi = PLMap.from_slopes([0.0, 0.5, 1.0], [2.0, 4.0]), cosine(sign=-1.0)
        bound = ulam_upper_bound(f, phi, 256)
        for orbit in periodic_orbits(f, 3):
            self.assertLessEqual(orbit.average(phi), bound.upper + 1e-9)

    def test_dump_csv(self):
        bound = ulam_upper_bound(PLMap.doubling(), cosine(), 32)
        with tempfile.TemporaryDirectory() as tmp:
            paths = dump_csv(bound, tmp)
            self.assertEqual([p.name for p in paths], ["ulam_transition.csv", "ulam_optimum.csv"])
            lines = Path(paths[1]).read_text().splitlines()
            self.assertEqual(lines[0], "source,target,flow,bin_potential")
            self.assertEqual(len(lines), bound.model.edges + 1)


class PeriodicOrbitTests(SimpleTestCase):
    def test_doubling_fixed_point(self):
        orbits = periodic_orbits(PLMap.doubling(), 1)
        self.assertEqual([o.points for o in orbits], [(0.0,)])

    def test_doubling_period_two(self):
        orbits = periodic_orbits(PLMap.doubling(), 2)
        self.assertEqual([o.period for o in orbits], [1, 2])
        self.assertTrue(np.allclose(sorted(orbits[1].points), [1 / 3, 2 / 3]))

    def test_expanding_degree_three_count(self):
        # 3^p − 1 periodic points of period dividing p
        orbits = periodic_orbits(PLMap.from_slopes([0.0, 0.5, 1.0], [2.0, 4.0]), 3)
        periods = [o.period for o in orbits]
        self.assertEqual(periods.count(1), 2)
        self.assertEqual(periods.count(2), 3)
        self.assertEqual(periods.count(3), 8)

    def test_monotone_in_period(self):
        f = PLMap.from_slopes([0.0, 0.5, 1.0], [2.0, 4.0])
        small = {o.key() for o in periodic_orbits(f, 2)}
        large = {o.key() for o in periodic_orbits(f, 3)}
        self.assertTrue(small <= large)

    def test_branch_explosion(self):
        with self.assertRaises(BranchExplosion):
            periodic_orbits(PLMap.from_slopes([0.0, 0.5, 1.0], [2.0, 4.0]), 6, cap=20)


class PeriodicAverageTests(SimpleTestCase):
    def test_cosine_prefers_fixed_point(self):
        lower = best_periodic_average(PLMap.doubling(), cosine(), 2, random_orbits=50, orbit_length=40)
        self.assertEqual(lower.orbit.points, (0.0,))
        self.assertEqual(lower.average, 1.0)

    def test_negative_cosine_prefers_period_two(self):
        lower = best_periodic_average(
            PLMap.doubling(), cosine(sign=-1.0), 2, random_orbits=50, orbit_length=40
        )
        self.assertEqual(lower.orbit.period, 2)
        self.assertAlmostEqual(lower.average, 0.5, places=5)

    def test_zero_potential(self):
        lower = best_periodic_average(
            PLMap.doubling(), Potential.constant(0.0), 2, random_orbits=10, orbit_length=10
        )
        self.assertEqual(lower.average, 0.0)
        self.assertEqual(lower.random_average, 0.0)


class NormalizeTests(SimpleTestCase):
    def test_constant(self):
        phi = normalize(Potential.constant(5.0), 5.0)
        self.assertTrue(np.all(phi.samples == 0.0))

    def test_cosine_becomes_nonpositive(self):
        phi = normalize(cosine(), 1.0)
        self.assertEqual(phi.samples.max(), 0.0)
        self.assertEqual(phi.lipschitz, cosine().lipschitz)

    def test_normalized_bound_is_near_zero(self):
        f, phi0 = PLMap.doubling(), cosine()
        beta = ulam_upper_bound(f, phi0, 256).upper
        again = ulam_upper_bound(f, normalize(phi0, beta), 256)
        self.assertLessEqual(abs(again.value), 2 * again.error)


class MaximizingBoundTests(SimpleTestCase):
    def test_doubling_cosine(self):
        bound = maximizing_bound(
            PLMap.doubling(), cosine(), 512, p_max=3, random_orbits=20, orbit_length=20
        )
        self.assertLessEqual(bound.lower, bound.upper + 1e-9)
        self.assertEqual(bound.witness_orbit, (0.0,))
        self.assertEqual(bound.to_dict()["bins"], 512)

    def test_support_candidates_near_fixed_point(self):
        bound = ulam_upper_bound(PLMap.doubling(), cosine(), 512)
        candidates = support_candidates(bound)
        self.assertGreaterEqual(len(candidates), 1)
        self.assertLessEqual(circle_distance(candidates[0], 0.0), 1 / 512)
