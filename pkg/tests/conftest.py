import numpy as np
import pytest

from grandlab.gf2 import BitMatrix

# three rows used throughout the worked examples
EX_ROWS = [
    [1, 1, 1, 1, 0, 1, 1, 0],
    [0, 1, 0, 1, 0, 0, 1, 0],
    [0, 1, 0, 1, 1, 0, 1, 1],
]
EX_R = [0.5, -1.2, 0.8, 1.8, -1, -0.2, 0.7, -0.9]


@pytest.fixture
def ex_h():
    return BitMatrix.from_rows(EX_ROWS)


@pytest.fixture
def ex_r():
    return np.array(EX_R)


def toy_code_12_6():
    """(12,6) code whose H holds 1^6 0^6 and 0^6 1^6 plus four random rows."""
    from grandlab.codes import LinearCode
    from grandlab.gf2 import rank

    rng = np.random.default_rng(12)
    top = [[1] * 6 + [0] * 6, [0] * 6 + [1] * 6]
    while True:
        extra = rng.integers(0, 2, size=(4, 12)).tolist()
        H = BitMatrix.from_rows(top + extra)
        if rank(H) == 6:
            return LinearCode.from_H(H, "toy12_6")
