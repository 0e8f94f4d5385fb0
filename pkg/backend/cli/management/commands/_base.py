"""
circlemax 관리 명령 공통 부분
Why: 옵션 병합, 설정 검증, 예외 → 종료 코드 변환을 모든 하위 명령이 같게 처리한다
"""

from django.core.management.base import BaseCommand, CommandError

from circle.exceptions import CircleMaxError
from perturb.exceptions import PerturbError

from ...exceptions import CliError
from ...services.loading import build_config, load_json

# 종료 코드
EXIT_VERDICT_FALSE = 1
EXIT_CONFIG = 2
EXIT_CONSTRUCTION = 3

# 명령행 옵션 이름 → --config 문서 키
FLAG_KEYS = {
    "map": "map",
    "potential": "potential",
    "plan": "plan",
    "out": "out",
    "grid": "grid",
    "bins": "bins",
    "eps": "epsilon",
    "seed": "seed",
}


class CircleMaxCommand(BaseCommand):
    needs_potential = True

    def add_arguments(self, parser):
        parser.add_argument("--config", help="camelCase 키를 쓰는 실행 설정 JSON")
        parser.add_argument("--map", help="사상 문서 (PL 또는 표본)")
        parser.add_argument("--potential", help="포텐셜 문서 (표본 또는 fourier)")
        parser.add_argument("--out", help="산출물 디렉터리")
        parser.add_argument("--grid", type=int)
        parser.add_argument("--bins", type=int)
        parser.add_argument("--eps", type=float)
        parser.add_argument("--seed", type=int)
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def load_config(self, options):
        document = load_json(options["config"]) if options.get("config") else {}
        overrides = {key: options.get(flag) for flag, key in FLAG_KEYS.items()}
        config = build_config(document, overrides)
        if self.needs_potential and not config.potential_path:
            raise CliError("--potential 이 필요합니다.")
        return config

    def handle(self, *args, **options):
        try:
            config = self.load_config(options)
        except CliError as e:
            raise CommandError(str(e), returncode=EXIT_CONFIG)
        try:
            self.run(config, options)
        except PerturbError as e:
            raise CommandError(f"구성 실패: {e}", returncode=EXIT_CONSTRUCTION)
        except CircleMaxError as e:
            raise CommandError(str(e), returncode=EXIT_CONFIG)

    def run(self, config, options):
        raise NotImplementedError

    def report(self, message):
        self.stdout.write(message)

    def success(self, message):
        self.stdout.write(self.style.SUCCESS(message))

    def verdict(self, certificate, path):
        """Print the verdict; a false verdict exits 1."""
        if certificate.verdict:
            self.success(f"verdict=true d={certificate.distance:.3e} → {path}")
            return
        failures = ", ".join(certificate.failures) or "distance/maximality"
        raise CommandError(
            f"verdict=false ({failures}) → {path}", returncode=EXIT_VERDICT_FALSE
        )
