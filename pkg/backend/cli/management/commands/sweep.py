from django.core.management.base import CommandError

from ...services.runs import run_pipeline
from ._base import EXIT_VERDICT_FALSE, CircleMaxCommand

SWEEP_EPSILONS = (0.2, 0.1, 0.05)


class Command(CircleMaxCommand):
    help = "ε ∈ {0.2, 0.1, 0.05} 마다 pipeline 을 돌려 인증서를 하나씩 남긴다"

    def run(self, config, options):
        failed = []
        for epsilon in SWEEP_EPSILONS:
            directory = config.out / f"eps_{epsilon}"
            run_config = config.with_epsilon(epsilon, str(directory))
            certificate = run_pipeline(run_config, stem=f"certificate_eps{epsilon}")
            self.report(
                f"ε={epsilon}: verdict={certificate.verdict} d={certificate.distance:.3e} "
                f"period={certificate.period}"
            )
            if not certificate.verdict:
                failed.append(epsilon)
        if failed:
            raise CommandError(f"verdict=false: ε={failed}", returncode=EXIT_VERDICT_FALSE)
        self.success(f"{len(SWEEP_EPSILONS)} 개 인증서 → {config.out}")
