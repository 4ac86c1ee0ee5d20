"""Shared builders for the test suite."""
import json

import numpy as np
import pytest

from lpdist import StandardLp


def transport_lp(row_marginals, col_marginals, cost):
    """Standard-form transport program with the last column row dropped.

    Row-major plan coordinates; dropping one marginal row keeps the
    constraint matrix at full row rank.
    """
    rows = np.asarray(row_marginals, dtype=float)
    cols = np.asarray(col_marginals, dtype=float)
    nr, nc = len(rows), len(cols)
    A = np.zeros((nr + nc - 1, nr * nc))
    for i in range(nr):
        for j in range(nc):
            A[i, i * nc + j] = 1.0
            if j < nc - 1:
                A[nr + j, i * nc + j] = 1.0
    b = np.concatenate([rows, cols[:-1]])
    return StandardLp(A, b, np.asarray(cost, dtype=float))


@pytest.fixture
def ot_lp():
    """2x2 transport instance with uniform marginals and anti-diagonal reward."""
    return transport_lp([0.5, 0.5], [0.5, 0.5], [0.0, 1.0, 1.0, 0.0])


@pytest.fixture
def ones_3x3_lp():
    """3x3 transport with constant cost: the whole feasible set is optimal."""
    third = np.full(3, 1.0 / 3.0)
    return transport_lp(third, third, np.ones(9))


@pytest.fixture
def write_json(tmp_path):
    def _write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return str(path)

    return _write
