import io
import json
import tempfile
from pathlib import Path

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from circle.services.pl_map import PLMap, c0_distance

from .exceptions import InputError
from .management.commands._base import EXIT_CONFIG, EXIT_VERDICT_FALSE
from .services.loading import build_config, load_map, load_potential

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def fixture(name):
    return str(FIXTURES / name)


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.out = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def run_command(self, name, map_name="doubling.json", potential="cosine.json", **flags):
        options = {"config": fixture("desk.json"), "map": fixture(map_name), "out": str(self.out)}
        if potential:
            options["potential"] = fixture(potential)
        options.update(flags)
        call_command(name, stdout=io.StringIO(), **options)

    def read(self, name):
        return json.loads((self.out / name).read_text())

    def assertExit(self, code, name, **kwargs):
        with self.assertRaises(CommandError) as ctx:
            self.run_command(name, **kwargs)
        self.assertEqual(ctx.exception.returncode, code)


class ConfigTests(SimpleTestCase):
    def test_flags_override_file(self):
        config = build_config({"map": "m.json", "epsilon": 0.3, "grid": 512}, {"epsilon": 0.1})
        self.assertEqual(config.epsilon, 0.1)
        self.assertEqual(config.grid, 512)
        self.assertEqual(config.bins, settings.CIRCLEMAX["BINS"])

    def test_rejections(self):
        for document in (
            {"map": "m.json", "epsilon": 0.6},
            {"map": "m.json", "epsilon": 0.0},
            {"map": "m.json", "bins": 100},
            {"map": "m.json", "grid": 8},
            {"epsilon": 0.1},
        ):
            with self.subTest(document=document), self.assertRaises(InputError):
                build_config(document, {})

    def test_fourier_potential(self):
        phi = load_potential(fixture("cosine.json"))
        self.assertEqual(len(phi.samples), 4096)
        self.assertAlmostEqual(float(phi(0.0)), 1.0)
        self.assertAlmostEqual(float(phi(0.5)), -1.0)

    def test_map_documents(self):
        self.assertEqual(c0_distance(load_map(fixture("doubling.json")), PLMap.doubling()), 0.0)
        with self.assertRaises(InputError):
            load_map(fixture("cosine.json"))


class ApproximateCommandTests(CommandTestCase):
    def test_doubling_unchanged(self):
        self.run_command("approximate", potential=None)
        approx = load_map(self.out / "map_approx.json")
        self.assertEqual(c0_distance(approx, PLMap.doubling()), 0.0)

    def test_plateau_gets_finite_preimages(self):
        self.run_command("approximate", map_name="plateau.json", potential=None)
        approx = load_map(self.out / "map_approx.json")
        self.assertTrue(approx.has_finite_preimages)
        self.assertEqual(approx.degree, 2)
        self.assertLess(c0_distance(approx, load_map(fixture("plateau.json"))), 0.1)

    def test_missing_file(self):
        self.assertExit(EXIT_CONFIG, "approximate", map_name="absent.json", potential=None)

    def test_epsilon_out_of_range(self):
        self.assertExit(EXIT_CONFIG, "approximate", potential=None, eps=0.6)


class MaximizeCommandTests(CommandTestCase):
    def test_doubling_cosine(self):
        self.run_command("maximize", dump=True)
        bounds = self.read("bounds.json")
        self.assertEqual(bounds["lower"], 1.0)
        self.assertEqual(bounds["witnessOrbit"], [0.0])
        self.assertAlmostEqual(bounds["upper"], 1.0, delta=0.1)
        self.assertGreaterEqual(bounds["upper"], bounds["lower"])
        self.assertTrue((self.out / "ulam_transition.csv").exists())
        self.assertTrue((self.out / "ulam_optimum.csv").exists())

    def test_zero_potential(self):
        self.run_command("maximize", potential="zero.json")
        bounds = self.read("bounds.json")
        self.assertAlmostEqual(bounds["upper"], 0.0, places=6)
        self.assertEqual(bounds["lower"], 0.0)

    def test_potential_required(self):
        self.assertExit(EXIT_CONFIG, "maximize", potential=None)

    def test_byte_identical_reruns(self):
        self.run_command("maximize")
        first = (self.out / "bounds.json").read_bytes()
        self.run_command("maximize")
        self.assertEqual((self.out / "bounds.json").read_bytes(), first)


class PerturbCommandTests(CommandTestCase):
    def test_doubling_writes_plan(self):
        self.run_command("perturb")
        plan = self.read("plan.json")
        self.assertEqual(plan["period"], 1)
        self.assertEqual(plan["context"]["epsilon"], 0.1)
        self.assertTrue((self.out / "f_hat.json").exists())

    def test_epsilon_rejected_before_work(self):
        self.assertExit(EXIT_CONFIG, "perturb", eps=0.6)
        self.assertFalse((self.out / "plan.json").exists())


class CertifyCommandTests(CommandTestCase):
    def test_pipeline_on_doubling(self):
        self.run_command("pipeline")
        certificate = self.read("certificate.json")
        self.assertTrue(certificate["verdict"])
        self.assertEqual(certificate["distance"], 0.0)
        self.assertEqual(certificate["seed"], settings.CIRCLEMAX["SEED"])
        for name in ("bounds.json", "plan.json", "f_hat.json", "certificate_trajectory.csv"):
            self.assertTrue((self.out / name).exists(), name)

    def test_corrupted_plan_is_false(self):
        self.run_command("perturb")
        plan = self.read("plan.json")
        plan["periodicPoint"] = 0.01
        corrupted = self.out / "corrupted.json"
        corrupted.write_text(json.dumps(plan))
        self.assertExit(EXIT_VERDICT_FALSE, "certify", plan=str(corrupted))
        certificate = self.read("certificate.json")
        self.assertFalse(certificate["verdict"])
        self.assertFalse(certificate["lemmaChecks"]["periodicity"]["passed"])

    def test_pipeline_on_half_rotation(self):
        self.run_command("pipeline", map_name="rotation_half.json")
        certificate = self.read("certificate.json")
        self.assertTrue(certificate["verdict"])
        self.assertEqual(certificate["tag"], "CaseI")
        self.assertEqual(certificate["period"], 2)
        self.assertAlmostEqual(certificate["orbitAverage"], 0.0, places=9)

    def test_sweep_certifies_every_epsilon(self):
        self.run_command("sweep")
        for epsilon in (0.2, 0.1, 0.05):
            path = self.out / f"eps_{epsilon}" / f"certificate_eps{epsilon}.json"
            certificate = json.loads(path.read_text())
            self.assertEqual(certificate["epsilon"], epsilon)
            self.assertLess(certificate["distance"], epsilon)
            self.assertTrue(certificate["verdict"])
