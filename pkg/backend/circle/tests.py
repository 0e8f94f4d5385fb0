import numpy as np
from django.test import SimpleTestCase

from .exceptions import (
    InvalidArc,
    InvalidMap,
    InvalidPotential,
    NotMonotone,
    ResolutionTooCoarse,
    ZeroSlopePiece,
)
from .serializers import FourierPotentialSerializer, PLMapSerializer
from .services.approximation import SampledMap, pl_approximate
from .services.geometry import Arc, circle_distance, wrap
from .services.homeo import LocalHomeo, compose_local
from .services.pl_map import PLMap, c0_distance
from .services.potential import Potential

PLATEAU = PLMap([0.0, 0.25, 0.5, 1.0], [0.0, 0.5, 0.5, 2.0], 2)


def random_plateau_map(rng, pieces=16):
    """Degree-two PL map on the 1/pieces grid with some flat pieces."""
    rises = rng.random(pieces)
    rises[rng.random(pieces) < 0.25] = 0.0
    rises *= 2.0 / rises.sum()
    lift = np.concatenate([[0.0], np.cumsum(rises)])
    return PLMap(np.arange(pieces + 1) / pieces, lift, 2)


class GeometryTests(SimpleTestCase):
    def test_wrap(self):
        self.assertEqual(wrap(1.0), 0.0)
        self.assertEqual(wrap(-0.25), 0.75)
        self.assertAlmostEqual(circle_distance(0.9, 0.1), 0.2)

    def test_arc_across_zero(self):
        arc = Arc(0.95, 0.1)
        self.assertTrue(arc.contains(0.02))
        self.assertFalse(arc.contains(0.1))

    def test_open_and_closed_endpoints(self):
        self.assertTrue(Arc(0.5, 0.25).contains(0.75))
        self.assertFalse(Arc(0.5, 0.25, closed=False).contains(0.75))

    def test_grid_points(self):
        np.testing.assert_array_equal(Arc(0.5, 0.125).grid_points(8), [0.375, 0.5, 0.625])

    def test_rejects_half_circle(self):
        with self.assertRaises(InvalidArc):
            Arc(0.0, 0.5)


class PLMapTests(SimpleTestCase):
    def test_rejects_wrong_degree(self):
        with self.assertRaises(InvalidMap):
            PLMap([0.0, 0.5, 1.0], [0.0, 1.0, 1.5], 2)

    def test_doubling_preimages(self):
        np.testing.assert_allclose(PLMap.doubling().preimages(0.5), [0.25, 0.75])

    def test_plateau_has_infinite_preimages(self):
        self.assertFalse(PLATEAU.has_finite_preimages)
        with self.assertRaises(ZeroSlopePiece):
            PLATEAU.preimages(0.5)

    def test_composition(self):
        self.assertEqual(c0_distance(PLMap.doubling().power(3), PLMap.linear(8)), 0.0)
        self.assertAlmostEqual(c0_distance(PLMap.rotation(0.25).power(4), PLMap.identity()), 0.0)

    def test_composition_matches_pointwise(self):
        f = PLMap([0.0, 0.3, 1.0], [0.0, 1.2, 2.0], 2)
        g = PLMap.rotation(0.1)
        x = np.linspace(0.0, 1.0, 101)
        composed = f.followed_by(g)
        self.assertLess(np.max(circle_distance(composed(x), g(f(x)))), 1e-12)

    def test_c0_distance(self):
        self.assertAlmostEqual(c0_distance(PLMap.rotation(0.1), PLMap.identity()), 0.1)
        self.assertEqual(c0_distance(PLMap.rotation(0.5), PLMap.identity()), 0.5)
        self.assertEqual(c0_distance(PLMap.doubling(), PLMap.identity()), 0.5)

    def test_iterate(self):
        np.testing.assert_allclose(PLMap.doubling().iterate(1 / 3, 2), [1 / 3, 2 / 3, 1 / 3])


class PotentialTests(SimpleTestCase):
    def test_interpolates_samples(self):
        phi = Potential.from_function(lambda x: np.cos(2 * np.pi * x), 64)
        self.assertEqual(phi(0.0), 1.0)
        self.assertAlmostEqual(phi(0.25), 0.0)
        self.assertLessEqual(phi.lipschitz, 2 * np.pi)

    def test_rejects_lipschitz_violation(self):
        with self.assertRaises(InvalidPotential):
            Potential([0.0, 1.0, 0.0, 1.0], 1.0)

    def test_bin_maxima(self):
        phi = Potential.from_function(lambda x: np.cos(2 * np.pi * x), 64)
        maxima = phi.bin_maxima(4)
        self.assertEqual(maxima[0], 1.0)
        self.assertAlmostEqual(maxima[2], 0.0)
        np.testing.assert_array_equal(Potential.constant(0.5).bin_maxima(8), np.full(8, 0.5))

    def test_shifted(self):
        phi = Potential.constant(1.0).shifted(0.25)
        self.assertAlmostEqual(phi(0.3), 0.75)
        self.assertEqual(phi.lipschitz, 0.0)


class ApproximationTests(SimpleTestCase):
    def test_doubling_unchanged(self):
        sampled = SampledMap.from_map(PLMap.doubling(), 256, 2.0)
        approx = pl_approximate(sampled, 0.1)
        self.assertLess(c0_distance(approx, PLMap.doubling()), 1e-12)

    def test_plateau(self):
        approx = pl_approximate(SampledMap.from_map(PLATEAU, 1024, 3.0), 0.1)
        self.assertTrue(approx.has_finite_preimages)
        self.assertEqual(approx.degree, 2)
        self.assertLess(c0_distance(approx, PLATEAU), 0.1)

    def test_plateau_tent_slopes(self):
        approx = pl_approximate(SampledMap.from_map(PLATEAU, 1024, 3.0), 0.1)
        # 폭 1/4 의 평평한 구간, 꼭짓점 높이 ε·폭/4
        self.assertAlmostEqual(float(approx(0.375)), 0.50625, places=12)
        self.assertAlmostEqual(float(approx(0.35) - approx(0.3)) / 0.05, 0.05, places=9)
        self.assertAlmostEqual(float(approx(0.45) - approx(0.4)) / 0.05, -0.05, places=9)
        self.assertAlmostEqual(float(approx(0.25)), 0.5, places=12)

    def test_random_plateau_maps(self):
        rng = np.random.default_rng(7)
        for i in range(20):
            f = random_plateau_map(rng)
            approx = pl_approximate(SampledMap.from_map(f, 4096, f.max_abs_slope), 0.1)
            with self.subTest(i=i):
                self.assertTrue(approx.has_finite_preimages)
                self.assertEqual(approx.degree, 2)
                self.assertLess(c0_distance(approx, f), 0.1)
                for y in rng.random(5):
                    found = approx.preimages(y)
                    self.assertGreaterEqual(len(found), 1)
                    self.assertLess(np.max(circle_distance(approx(found), y)), 1e-9)

    def test_coarse_samples(self):
        with self.assertRaises(ResolutionTooCoarse):
            pl_approximate(SampledMap.from_map(PLMap.doubling(), 16, 2.0), 0.1)


class LocalHomeoTests(SimpleTestCase):
    def test_moving(self):
        h = LocalHomeo.moving(Arc(0.5, 0.1), 0.5, 0.55)
        self.assertAlmostEqual(h(0.5), 0.55)
        self.assertEqual(h(0.8), 0.8)
        self.assertAlmostEqual(h.max_displacement, 0.05)

    def test_radial(self):
        h = LocalHomeo.radial(0.0, 0.1, [(0.05, 0.08)])
        self.assertAlmostEqual(h(0.05), 0.08)
        self.assertAlmostEqual(h(0.95), 0.92)
        self.assertEqual(h(0.0), 0.0)

    def test_as_plmap_across_zero(self):
        h = LocalHomeo.moving(Arc(0.0, 0.1), 0.0, 0.03)
        x = np.linspace(0.0, 1.0, 401)
        self.assertLess(np.max(circle_distance(h.as_plmap()(x), h(x))), 1e-12)

    def test_compose_local(self):
        h = LocalHomeo.moving(Arc(0.5, 0.1), 0.5, 0.45)
        f = PLMap.doubling()
        x = np.linspace(0.0, 1.0, 257)
        self.assertLess(np.max(circle_distance(compose_local(f, h)(x), h(f(x)))), 1e-12)
        self.assertIs(compose_local(f, LocalHomeo.identity()), f)

    def test_rejects_non_monotone_knots(self):
        with self.assertRaises(NotMonotone):
            LocalHomeo(Arc(0.5, 0.1), [[0.0, 0.0], [0.1, 0.15], [0.12, 0.12], [0.2, 0.2]])


class SerializerTests(SimpleTestCase):
    def test_map_with_wrong_degree(self):
        serializer = PLMapSerializer(data={"breakpoints": [0, 1], "liftValues": [0, 1.5], "degree": 2})
        self.assertFalse(serializer.is_valid())

    def test_fourier_potential(self):
        serializer = FourierPotentialSerializer(
            data={"fourier": [[1, 1.0, 0.0]], "resolution": 64, "shift": 1.0}
        )
        self.assertTrue(serializer.is_valid(), serializer.errors)
        phi = serializer.save()
        self.assertEqual(phi(0.0), 0.0)
        self.assertAlmostEqual(phi(0.5), -2.0)
