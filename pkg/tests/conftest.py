from pathlib import Path

import pytest

from icqam.gf2 import BitMatrix
from icqam.index_coding import IndexCode, IndexCodingProblem

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURE_DIR = REPO_ROOT / "fixtures"


def seven_user_problem() -> IndexCodingProblem:
    """7 messages, each receiver wants its own; shrinking side information."""
    return IndexCodingProblem.of(
        7,
        [
            ([0], [1, 2, 3, 4, 5, 6]),
            ([1], [0, 2, 3, 4, 6]),
            ([2], [0, 3, 5, 6]),
            ([3], [1, 4, 5]),
            ([4], [0, 1]),
            ([5], [2]),
            ([6], []),
        ],
    )


def seven_user_matrix() -> BitMatrix:
    # y1 = x1+x2+x5, y2 = x3+x6, y3 = x4, y4 = x7
    return BitMatrix.from_rows(
        [
            [1, 0, 0, 0],
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 0, 1],
        ]
    )


def five_user_problem() -> IndexCodingProblem:
    return IndexCodingProblem.of(
        5,
        [
            ([0], [1, 2, 3, 4]),
            ([1], [0, 2, 4]),
            ([2], [0, 3]),
            ([3], [1]),
            ([4], []),
        ],
    )


def five_user_matrix_l3() -> BitMatrix:
    # y1 = x1+x2+x3, y2 = x2+x4, y3 = x5
    return BitMatrix.from_rows(
        [
            [1, 0, 0],
            [1, 1, 0],
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
        ]
    )


def five_user_matrix_l4() -> BitMatrix:
    # y1 = x1+x2, y2 = x3, y3 = x4, y4 = x5
    return BitMatrix.from_rows(
        [
            [1, 0, 0, 0],
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
        ]
    )


@pytest.fixture(scope="session")
def seven_user_code() -> IndexCode:
    return IndexCode(seven_user_problem(), seven_user_matrix())


@pytest.fixture(scope="session")
def five_user_code_l3() -> IndexCode:
    return IndexCode(five_user_problem(), five_user_matrix_l3())


@pytest.fixture(scope="session")
def five_user_code_l4() -> IndexCode:
    return IndexCode(five_user_problem(), five_user_matrix_l4())


@pytest.fixture(scope="session")
def five_user_code_identity() -> IndexCode:
    return IndexCode(five_user_problem(), BitMatrix.identity(5))
