"""Shared fixtures and independent oracles used across the test suite.

The oracles deliberately use different algorithms than the package:
the characteristic polynomial is recomputed by cofactor expansion of
det(sI - A), and consensus is decided by exhaustively simulating every
initial state until its orbit repeats.
"""

import itertools
import random

import numpy as np
import pytest

from ffconsensus import FpMatrix, FpPolynomial, PrimeField

ACCEPTANCE_RESULTS: list[tuple[int, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, verdict, desc in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"ACCEPTANCE {num:2d}: {verdict} - {desc}")


F2 = PrimeField(2)
F3 = PrimeField(3)
F5 = PrimeField(5)
F11 = PrimeField(11)


@pytest.fixture
def A1():
    return FpMatrix(F3, [[2, 1, 1], [2, 1, 1], [2, 1, 1]])


@pytest.fixture
def A2():
    return FpMatrix(F3, [[2, 1, 1], [1, 2, 1], [1, 2, 1]])


@pytest.fixture
def A3():
    return FpMatrix(F3, [[2, 1, 1], [1, 2, 1], [1, 1, 2]])


@pytest.fixture
def A6():
    # 3x3 average-consensus matrix over F_11 used in the composition tests
    return FpMatrix(F11, [[9, 3, 0], [1, 9, 2], [0, 7, 5]])


@pytest.fixture
def A7():
    # 4x4 average-consensus matrix over F_5, convergence time 3
    return FpMatrix(F5, [[0, 4, 2, 0], [1, 1, 0, 4], [0, 0, 2, 4], [0, 1, 2, 3]])


def char_poly_by_cofactors(A: FpMatrix) -> FpPolynomial:
    """det(sI - A) by recursive cofactor expansion in F_p[s]."""
    field = A.field
    n = A.rows
    s = FpPolynomial.x(field)

    def entry(i, j):
        c = FpPolynomial(field, [-int(A.a[i, j])])
        return s + c if i == j else c

    M = [[entry(i, j) for j in range(n)] for i in range(n)]

    def det(rows, cols):
        if len(rows) == 1:
            return M[rows[0]][cols[0]]
        total = FpPolynomial.zero(field)
        i = rows[0]
        for k, j in enumerate(cols):
            minor = det(rows[1:], cols[:k] + cols[k + 1 :])
            term = M[i][j] * minor
            if k % 2 == 1:
                term = FpPolynomial.zero(field) - term
            total = total + term
        return total

    return det(tuple(range(n)), tuple(range(n)))


def consensus_by_simulation(A: FpMatrix) -> bool:
    """Definition-level check: every initial state must settle on a fixed
    constant vector.  Only feasible for tiny p^n."""
    p = A.field.p
    n = A.rows
    for x0 in itertools.product(range(p), repeat=n):
        seen = {}
        x = tuple(x0)
        while x not in seen:
            seen[x] = len(seen)
            x = tuple(int(v) for v in A.mat_vec(np.array(x, dtype=np.int64)))
        # x starts the eventual cycle; consensus needs a constant fixed point
        if len(set(x)) != 1:
            return False
        if tuple(int(v) for v in A.mat_vec(np.array(x, dtype=np.int64))) != x:
            return False
    return True


def random_matrix(field: PrimeField, n: int, rng: random.Random) -> FpMatrix:
    return FpMatrix(field, [[rng.randrange(field.p) for _ in range(n)] for _ in range(n)])


def random_row_stochastic(field: PrimeField, n: int, rng: random.Random) -> FpMatrix:
    p = field.p
    rows = []
    for _ in range(n):
        prefix = [rng.randrange(p) for _ in range(n - 1)]
        rows.append(prefix + [(1 - sum(prefix)) % p])
    return FpMatrix(field, rows)
