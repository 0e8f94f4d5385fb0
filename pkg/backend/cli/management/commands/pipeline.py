from ...services.runs import run_pipeline
from ._base import CircleMaxCommand


class Command(CircleMaxCommand):
    help = "approximate → maximize → perturb → certify 를 한 번에 실행한다"

    def run(self, config, options):
        certificate = run_pipeline(config)
        self.verdict(certificate, config.out / "certificate.json")
