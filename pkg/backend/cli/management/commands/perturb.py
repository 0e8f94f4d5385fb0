from ...services.runs import certified_perturbation, prepare, write_perturbation
from ._base import CircleMaxCommand


class Command(CircleMaxCommand):
    help = "최대화 측도를 주기 궤도 위로 옮기는 섭동 f̂ 을 구성한다"

    def run(self, config, options):
        prepared, phi0 = prepare(config)
        result, certificate = certified_perturbation(prepared, phi0, config)
        plan_path, map_path = write_perturbation(result, config.out)
        plan = result.plan
        self.report(
            f"{plan.tag.value}: period={plan.period} point={plan.periodic_point:.9f} "
            f"attempts={result.attempts} verdict={certificate.verdict}"
        )
        self.success(f"→ {plan_path}, {map_path}")
