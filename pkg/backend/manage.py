#!/usr/bin/env python
"""
circlemax 명령행 진입점
Why: approximate/maximize/perturb/certify/pipeline/sweep 와 test 를 모두 Django 관리 명령으로 실행한다
"""
import os
import sys


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Django 를 불러올 수 없습니다. requirements.txt 를 설치한 가상환경을 활성화했는지 확인하세요."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
