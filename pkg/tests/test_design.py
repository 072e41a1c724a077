import random

import numpy as np
import pytest

from ffconsensus import (
    FpMatrix,
    GraphSpec,
    GuardExceededError,
    PreconditionError,
    PrimeField,
    certify_consensus,
    enumerate_consensus_matrices,
    fully_connected_design,
    kronecker_compose,
    spanning_tree_design,
)
from ffconsensus.design import thm7_lower_bound
from conftest import F3, F5, F11


def test_graphspec_neighbors_and_roots():
    # 1 <- 2 <- 3, self-loop at 1: vertex 3 reaches everyone
    G = GraphSpec.from_edges(3, [(1, 1), (1, 2), (2, 3)])
    assert G.in_neighbors(1) == [1, 2]
    assert G.out_neighbors(3) == [2]
    assert G.roots() == [3]
    assert GraphSpec.complete(3).roots() == [1, 2, 3]


def test_graphspec_rejects_bad_edges():
    with pytest.raises(PreconditionError):
        GraphSpec.from_edges(2, [(1, 3)])


def test_two_agent_complete_family_over_f3():
    """The complete 2-agent search returns exactly the one-parameter family
    of rank-one row-stochastic matrices."""
    result = enumerate_consensus_matrices(GraphSpec.complete(2), 3)
    assert result.search_exhaustive
    assert result.total_count == 3
    got = {tuple(map(tuple, A.tolist())) for A in result.matrices}
    assert got == {((0, 1), (0, 1)), ((1, 0), (1, 0)), ((2, 2), (2, 2))}
    for r in result.reports:
        assert r.convergence_time <= 1


def test_enumeration_results_are_sorted_and_compatible():
    G = GraphSpec.from_edges(3, [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2), (3, 3)])
    result = enumerate_consensus_matrices(G, 3, max_results=50)
    keys = [tuple(int(x) for x in A.a.ravel()) for A in result.matrices]
    assert keys == sorted(keys)
    for A in result.matrices:
        assert G.is_compatible(A)
        assert certify_consensus(A).achieves_consensus


def test_enumeration_count_oracle_small():
    """Cross-check the pruned search against an unpruned brute force."""
    import itertools

    G = GraphSpec.complete(2)
    p = 3
    brute = 0
    for entries in itertools.product(range(p), repeat=4):
        A = FpMatrix(PrimeField(p), [list(entries[:2]), list(entries[2:])])
        if certify_consensus(A).achieves_consensus:
            brute += 1
    result = enumerate_consensus_matrices(G, p)
    assert result.total_count == brute == 3


def test_three_agent_complete_count_properties():
    result = enumerate_consensus_matrices(GraphSpec.complete(3), 3, max_results=200)
    N = result.total_count
    # scaling a solution's deviation from consensus gives an orbit of size p
    assert N % 3 == 0
    assert N >= 27
    assert result.count_lower_bound == 27
    # the constant rank-one matrix built from any row with sum 1 must be found
    assert any(A.tolist() == [[2, 1, 1]] * 3 for A in result.matrices)


def test_guaranteed_count_bound_formula():
    assert thm7_lower_bound(3, 9, 3) == 3 ** ((18 - 12) // 2)
    assert thm7_lower_bound(3, 6, 3) is None  # 2m = n^2 + n: bound not applicable


def test_enumeration_average_constraint():
    result = enumerate_consensus_matrices(GraphSpec.complete(3), 5, average_constraint=True,
                                          max_results=10)
    assert result.total_count > 0
    for A in result.matrices:
        assert np.all(np.mod(A.a.sum(axis=0), 5) == 1)
        assert certify_consensus(A).achieves_average_consensus


def test_enumeration_average_impossible_when_p_divides_n():
    """n = p = 3: no matrix can pass the average filter."""
    result = enumerate_consensus_matrices(GraphSpec.complete(3), 3, average_constraint=True)
    assert result.search_exhaustive
    assert result.total_count == 0
    assert result.matrices == []


def test_enumeration_isolated_row_returns_empty():
    # vertex 2 has no in-edges, so row 2 can never sum to 1
    G = GraphSpec.from_edges(2, [(1, 1), (1, 2)])
    result = enumerate_consensus_matrices(G, 3)
    assert result.total_count == 0 and result.search_exhaustive


def test_enumeration_guard_and_sampling():
    G = GraphSpec.complete(4)
    with pytest.raises(GuardExceededError):
        enumerate_consensus_matrices(G, 5, exhaustive_limit=10)
    result = enumerate_consensus_matrices(G, 5, exhaustive_limit=10, sample=3000, seed=1)
    assert not result.search_exhaustive
    assert result.total_count is None
    for A in result.matrices:
        assert certify_consensus(A).achieves_consensus
    # deterministic under the same seed
    again = enumerate_consensus_matrices(G, 5, exhaustive_limit=10, sample=3000, seed=1)
    assert [A.tolist() for A in again.matrices] == [A.tolist() for A in result.matrices]


def test_fully_connected_design():
    A = fully_connected_design(F5, [2, 2, 2])
    assert A.tolist() == [[2, 2, 2]] * 3
    r = certify_consensus(A)
    assert r.achieves_consensus and r.convergence_time <= 1
    with pytest.raises(PreconditionError):
        fully_connected_design(F5, [1, 1])  # sums to 2


def test_spanning_tree_design_path():
    # influence path 1 <- 2 <- 3 ... wait: root must reach everyone
    G = GraphSpec.from_edges(4, [(2, 1), (3, 2), (4, 2), (1, 1)])
    A = spanning_tree_design(F3, G)
    r = certify_consensus(A)
    assert r.achieves_consensus
    assert list(r.pi) == [1, 0, 0, 0]  # everyone adopts the root's value
    assert r.convergence_time <= 3
    assert G.is_compatible(A)


def test_spanning_tree_requires_root():
    G = GraphSpec.from_edges(3, [(1, 2), (2, 1)])  # vertex 3 unreachable
    with pytest.raises(PreconditionError):
        spanning_tree_design(F3, G)


def test_kronecker_compose_properties(A7):
    composed, report = kronecker_compose([A7, A7])
    assert composed.rows == 16
    assert report.achieves_consensus
    assert report.convergence_time == 3
    # functional of the product is the Kronecker product of the functionals
    pi = np.array(certify_consensus(A7).pi, dtype=np.int64)
    assert list(report.pi) == [int(v) % 5 for v in np.kron(pi, pi)]


def test_kronecker_compose_rejects_non_consensus(A1, A3):
    with pytest.raises(PreconditionError):
        kronecker_compose([A1, A3])
    with pytest.raises(PreconditionError):
        kronecker_compose([])
