from ...services.runs import certify_plan
from ._base import CircleMaxCommand


class Command(CircleMaxCommand):
    help = "f̂ 의 닫힌 궤도가 ε-근접이고 최대화하는지 인증한다"

    def add_command_arguments(self, parser):
        parser.add_argument("--plan", help="perturb 가 남긴 plan.json; 없으면 새로 구성한다")

    def run(self, config, options):
        certificate = certify_plan(config)
        self.verdict(certificate, config.out / "certificate.json")
