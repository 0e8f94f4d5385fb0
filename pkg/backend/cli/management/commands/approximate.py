from ...services.loading import load_map, write_json
from ...services.runs import approximate
from ._base import CircleMaxCommand


class Command(CircleMaxCommand):
    help = "기울기 0 조각을 없앤 ε-근접 PL 사상을 만든다"
    needs_potential = False

    def run(self, config, options):
        prepared = approximate(load_map(config.map_path), config)
        path = write_json(prepared.f.to_dict(), config.out / "map_approx.json")
        self.success(
            f"pieces={prepared.f.pieces} d={prepared.deviation:.3e} ε={config.epsilon} → {path}"
        )
