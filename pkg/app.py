"""
GLS Tail Toolkit
Grand Lebesgue Space 꼬리 추정 / 노름 계산 명령줄 도구

사용 예:
    python app.py tail --spec specs/gauss.json --t-min 0.01 --t-max 2 --points 5
    python app.py gls-norm --spec specs/exp.json
"""

import sys

from modules.cli import main


if __name__ == "__main__":
    sys.exit(main())
