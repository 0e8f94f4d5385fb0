"""
저장소 루트에서 circlemax 명령을 실행한다.

    python main.py pipeline --map backend/cli/fixtures/doubling.json \
        --potential backend/cli/fixtures/cosine.json --out out
"""

import os
import sys
from pathlib import Path

BACKEND = Path(__file__).resolve().parent / "backend"


def main():
    sys.path.insert(0, str(BACKEND))
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings")
    from django.core.management import execute_from_command_line

    execute_from_command_line(["manage.py", *sys.argv[1:]])


if __name__ == "__main__":
    main()
