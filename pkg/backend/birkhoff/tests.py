import numpy as np
from django.test import SimpleTestCase

from circle.services.geometry import Arc
from circle.services.pl_map import PLMap
from circle.services.potential import Potential

from .exceptions import EmptyReturnSet, NotFound
from .services.recurrence import c_bar, find_nonneg_return
from .services.returns import return_structure
from .services.sums import (
    birkhoff_sum,
    finite_average_table,
    max_finite_average,
    m_zero,
)


def cosine(n=1024, shift=0.0):
    return Potential.from_function(lambda x: np.cos(2 * np.pi * x) - shift, n)


class BirkhoffSumTests(SimpleTestCase):
    def test_fixed_point_of_doubling(self):
        record = birkhoff_sum(PLMap.doubling(), cosine(), 0.0, 5)
        self.assertAlmostEqual(record.sum, 5.0, places=12)
        self.assertAlmostEqual(record.average, 1.0, places=12)

    def test_zero_potential(self):
        record = birkhoff_sum(PLMap.doubling(), Potential.constant(0.0), 0.37, 9)
        self.assertEqual(record.sum, 0.0)

    def test_period_two_orbit(self):
        record = birkhoff_sum(PLMap.doubling(), cosine(), 1 / 3, 2)
        self.assertAlmostEqual(record.sum, -1.0, places=5)

    def test_cocycle(self):
        f = PLMap.from_slopes([0.0, 0.3, 1.0], [4.0, 0.8 / 0.7], start=0.1)
        phi = cosine(2048)
        rng = np.random.default_rng(3)
        for x in rng.random(20):
            m, n = rng.integers(1, 12, size=2)
            whole = birkhoff_sum(f, phi, x, m + n).sum
            head = birkhoff_sum(f, phi, x, m).sum
            tail = birkhoff_sum(f, phi, f.image(x, m), n).sum
            self.assertAlmostEqual(whole, head + tail, delta=1e-9)

    def test_rejects_zero_steps(self):
        with self.assertRaises(ValueError):
            birkhoff_sum(PLMap.doubling(), cosine(), 0.0, 0)


class FiniteAverageTests(SimpleTestCase):
    def test_constant_potential(self):
        result = max_finite_average(PLMap.doubling(), Potential.constant(2.5), 4, 256)
        self.assertEqual(result.value, 2.5)
        self.assertEqual(result.error, 0.0)

    def test_nonpositive_potential_peaks_at_fixed_point(self):
        result = max_finite_average(PLMap.doubling(), cosine(shift=1.0), 3, 1024)
        self.assertEqual(result.value, 0.0)
        self.assertEqual(result.argmax, 0.0)
        self.assertGreater(result.error, 0.0)

    def test_subadditivity(self):
        values, errors = finite_average_table(PLMap.doubling(), cosine(), 10, 1024)
        for m in range(1, 6):
            for n in range(1, 6):
                lhs = (m + n) * values[m + n]
                rhs = m * (values[m] + errors[m]) + n * (values[n] + errors[n])
                self.assertLessEqual(lhs, rhs + 1e-12)


class MZeroTests(SimpleTestCase):
    def test_nonpositive_potential(self):
        self.assertEqual(m_zero(PLMap.doubling(), cosine(shift=1.0), 0.5, 1024), 1)

    def test_negative_constant(self):
        self.assertEqual(m_zero(PLMap.doubling(), Potential.constant(-1.0), 0.3, 256), 1)

    def test_respects_n0(self):
        self.assertEqual(m_zero(PLMap.doubling(), Potential.constant(-1.0), 0.3, 256, n0=4), 5)

    def test_not_found(self):
        with self.assertRaises(NotFound):
            m_zero(PLMap.doubling(), Potential.constant(1.0), 0.5, 256, horizon=4)

    def test_rejects_nonpositive_a(self):
        with self.assertRaises(ValueError):
            m_zero(PLMap.doubling(), Potential.constant(-1.0), 0.0, 256)


class NonnegReturnTests(SimpleTestCase):
    def test_fixed_point_witness(self):
        found = find_nonneg_return(
            PLMap.doubling(), cosine(shift=1.0), Arc(0.0, 0.05), 8, 256
        )
        self.assertIsNotNone(found)
        self.assertEqual(found.start, 0.0)
        self.assertEqual(found.steps, 1)
        self.assertEqual(found.total, 0.0)

    def test_antisymmetric_potential_under_half_rotation(self):
        found = find_nonneg_return(
            PLMap.rotation(0.5), cosine(), Arc(0.3, 0.05), 6, 256
        )
        self.assertIsNotNone(found)
        self.assertEqual(found.steps % 2, 0)
        self.assertLess(abs(found.total), 1e-9)

    def test_none_when_nothing_returns(self):
        found = find_nonneg_return(
            PLMap.rotation(0.5), cosine(), Arc(0.3, 0.05), 1, 256
        )
        self.assertIsNone(found)

    def test_negative_potential_has_no_witness(self):
        found = find_nonneg_return(
            PLMap.identity(), Potential.constant(-1.0), Arc(0.5, 0.1), 4, 64, eta=1e-6
        )
        self.assertIsNone(found)


class CBarTests(SimpleTestCase):
    def test_fixed_point(self):
        result = c_bar(PLMap.doubling(), cosine(shift=1.0), 0.0, 0.1, 3, 256)
        self.assertEqual(result.value, 0.0)
        self.assertEqual(result.witness.start, 0.0)
        self.assertEqual(result.witness.steps, 1)
        self.assertEqual(result.end, 0.0)

    def test_zero_potential(self):
        result = c_bar(PLMap.doubling(), Potential.constant(0.0), 0.2, 0.1, 3, 256)
        self.assertEqual(result.value, 0.0)
        self.assertTrue(all(w.record.average == 0.0 for w in result.near_optimal))

    def test_empty_return_set(self):
        with self.assertRaises(EmptyReturnSet):
            c_bar(PLMap.rotation(0.5), cosine(), 0.2, 0.1, 1, 256)

    def test_dominates_every_grid_return(self):
        f, phi = PLMap.doubling(), cosine(shift=1.0)
        ball = Arc(1 / 3, 0.05)
        result = c_bar(f, phi, ball.center, ball.radius, 4, 512)
        for z in ball.grid_points(512):
            for n in range(1, 5):
                if ball.contains(f.image(z, n)):
                    average = birkhoff_sum(f, phi, z, n).average
                    self.assertLessEqual(average, result.value + result.error + 1e-12)


class ReturnStructureTests(SimpleTestCase):
    def test_fixed_point(self):
        phi = cosine()
        table = return_structure(PLMap.doubling(), phi, Arc(0.0, 0.05), 8).evaluate([0.0])
        self.assertEqual(table.n_ret[0], 1)
        self.assertEqual(table.image[0], 0.0)
        self.assertEqual(table.psi[0], phi(0.0))

    def test_quarter_rotation(self):
        structure = return_structure(PLMap.rotation(0.25), cosine(), Arc(0.0, 0.05), 16)
        table = structure.grid_table(256)
        self.assertTrue(np.all(table.n_ret == 4))
        self.assertTrue(np.allclose(table.psi, 0.0, atol=1e-9))

    def test_matches_direct_iteration(self):
        f, phi = PLMap.doubling(), cosine()
        domain = Arc.from_endpoints(0.3, 0.4)
        structure = return_structure(f, phi, domain, 40)
        table = structure.grid_table(512)
        for x, n_ret, psi in zip(table.points, table.n_ret, table.psi):
            y, total = x, 0.0
            for j in range(1, 41):
                total += phi(y)
                y = f(y)
                if domain.contains(y):
                    break
            else:
                j = 0
            self.assertEqual(n_ret, j)
            if j:
                self.assertAlmostEqual(psi, total / j, places=9)

    def test_rejects_empty_domain(self):
        with self.assertRaises(ValueError):
            return_structure(PLMap.doubling(), cosine(), [], 4)
