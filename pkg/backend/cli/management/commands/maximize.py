from measure.services.ulam import dump_csv

from ...services.loading import write_json
from ...services.runs import bound_for, prepare
from ._base import CircleMaxCommand


class Command(CircleMaxCommand):
    help = "Ulam LP 상한과 주기 궤도 하한으로 최대 적분 β 를 잰다"

    def add_command_arguments(self, parser):
        parser.add_argument(
            "--dump", action="store_true", help="전이 행렬과 LP 최적해를 CSV 로 남긴다"
        )

    def run(self, config, options):
        prepared, phi0 = prepare(config)
        bound = bound_for(prepared.f, phi0, config)
        path = write_json(bound.to_dict(), config.out / "bounds.json")
        if options["dump"]:
            dump_csv(bound.ulam, config.out)
        self.report(f"upper = {bound.upper:.9f} (LP {bound.ulam.value:.9f} ± {bound.error:.2e})")
        self.report(f"lower = {bound.lower:.9f} orbit={bound.witness_orbit}")
        self.success(f"gap={bound.gap:.3e} → {path}")
