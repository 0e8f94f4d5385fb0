"""
인증서 산출물: JSON 과 궤적 CSV
"""

import csv
import logging
from pathlib import Path
from typing import Tuple

from rest_framework.exceptions import ParseError
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from ..exceptions import CertificateFormatError, ReportWriteError
from ..serializers import CertificateSerializer
from .certificate import Certificate

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ("kind", "n", "x_n", "running_average")


def render_certificate(certificate: Certificate) -> bytes:
    data = CertificateSerializer(certificate).data
    return JSONRenderer().render(data, renderer_context={"indent": 2}) + b"\n"


def emit_report(certificate: Certificate, directory, stem: str = "certificate") -> Tuple[Path, Path]:
    """
    Write <stem>.json and <stem>_trajectory.csv under directory.

    The CSV holds the closed orbit and the sampled f̂ trajectories, one row per
    step with the running average of φ₀.
    """
    directory = Path(directory)
    json_path = directory / f"{stem}.json"
    csv_path = directory / f"{stem}_trajectory.csv"
    try:
        directory.mkdir(parents=True, exist_ok=True)
        json_path.write_bytes(render_certificate(certificate))
        with csv_path.open("w", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(TRAJECTORY_COLUMNS)
            for trajectory in certificate.trajectories:
                for n, (x, avg) in enumerate(zip(trajectory.points, trajectory.running)):
                    writer.writerow([trajectory.kind, n, repr(x), repr(avg)])
    except OSError as e:
        raise ReportWriteError(f"{directory}: 인증서를 쓰지 못했습니다 ({e})") from e
    logger.info("인증서 저장: %s, %s", json_path, csv_path)
    return json_path, csv_path


def load_certificate(path) -> Certificate:
    path = Path(path)
    try:
        with path.open("rb") as fp:
            data = JSONParser().parse(fp)
    except (OSError, ParseError) as e:
        raise CertificateFormatError(f"{path}: {e}") from e
    serializer = CertificateSerializer(data=data)
    if not serializer.is_valid():
        raise CertificateFormatError(f"{path}: {serializer.errors}")
    return serializer.save()
