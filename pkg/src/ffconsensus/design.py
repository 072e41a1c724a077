"""Synthesis of consensus weight matrices for a given interaction graph.

Three routes: exhaustive (or seeded-sample) search over all weight
assignments compatible with the graph, closed-form constructions for
fully connected graphs and rooted spanning trees, and Kronecker
composition of certified components.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field

import numpy as np

from .analysis import ConsensusReport, certify_consensus
from .errors import GuardExceededError, PreconditionError
from .field import PrimeField, is_prime
from .linalg import FpMatrix

DEFAULT_CANDIDATE_GUARD = 10**8


@dataclass(frozen=True)
class GraphSpec:
    """Directed interaction graph; edge (i, j) means j influences i.

    Vertices are 1-based.  Self-loops are ordinary edges.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        for i, j in self.edges:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise PreconditionError(f"edge ({i},{j}) out of range for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, edges) -> "GraphSpec":
        return cls(n, frozenset((int(i), int(j)) for i, j in edges))

    @classmethod
    def complete(cls, n: int) -> "GraphSpec":
        return cls(n, frozenset((i, j) for i in range(1, n + 1) for j in range(1, n + 1)))

    def in_neighbors(self, i: int) -> list[int]:
        return sorted(j for (a, j) in self.edges if a == i)

    def out_neighbors(self, j: int) -> list[int]:
        return sorted(i for (i, b) in self.edges if b == j)

    def roots(self) -> list[int]:
        """Vertices with a directed influence path to every vertex."""
        out = []
        for v in range(1, self.n + 1):
            seen = {v}
            stack = [v]
            while stack:
                u = stack.pop()
                for w in self.out_neighbors(u):
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            if len(seen) == self.n:
                out.append(v)
        return out

    def is_compatible(self, A: FpMatrix) -> bool:
        """True iff every nonzero entry of A sits on an edge."""
        for i in range(A.rows):
            for j in range(A.cols):
                if A.a[i, j] != 0 and (i + 1, j + 1) not in self.edges:
                    return False
        return True


@dataclass
class DesignResult:
    """Outcome of a consensus-matrix search."""

    matrices: list[FpMatrix]
    total_count: int | None
    search_exhaustive: bool
    free_entries: int
    reports: list[ConsensusReport] = dc_field(default_factory=list)
    count_lower_bound: int | None = None


def thm7_lower_bound(n: int, m: int, p: int) -> int | None:
    """Guaranteed solution count p^((2m - n^2 - n)/2) when m > (n^2+n)/2."""
    if 2 * m > n * n + n:
        return p ** ((2 * m - n * n - n) // 2)
    return None


def _row_assignments(p: int, k: int):
    """All k-tuples over F_p summing to 1: k-1 free entries, last determined."""
    if k == 0:
        return
    for prefix in itertools.product(range(p), repeat=k - 1):
        last = (1 - sum(prefix)) % p
        yield prefix + (last,)


def enumerate_consensus_matrices(
    G: GraphSpec,
    p: int,
    average_constraint: bool = False,
    max_results: int = 16,
    exhaustive_limit: int = DEFAULT_CANDIDATE_GUARD,
    sample: int | None = None,
    seed: int = 0,
) -> DesignResult:
    """Search all weight matrices compatible with G that achieve consensus.

    Row sums are fixed to 1 by determining the last free entry of each
    row, cutting the candidate space from p^m to p^(m - n) before the
    characteristic-polynomial filter.  With ``average_constraint`` only
    matrices whose column sums are all 1 (and n not a multiple of p)
    are kept.  When the pruned space exceeds ``exhaustive_limit`` and
    ``sample`` is given, that many seeded uniform draws are tested
    instead and the exact count is omitted.
    """
    if not is_prime(p):
        raise PreconditionError(f"p = {p} is not prime")
    field = PrimeField(p)
    n = G.n
    row_edges = [G.in_neighbors(i) for i in range(1, n + 1)]
    if any(not r for r in row_edges):
        # a row with no in-edges can never sum to 1
        m = len(G.edges)
        return DesignResult([], 0, True, m, count_lower_bound=thm7_lower_bound(n, m, p))
    m = len(G.edges)
    pruned_space = 1
    for r in row_edges:
        pruned_space *= p ** (len(r) - 1)

    def build(assignments) -> FpMatrix:
        mat = np.zeros((n, n), dtype=np.int64)
        for i, (cols, values) in enumerate(zip(row_edges, assignments)):
            for j, v in zip(cols, values):
                mat[i, j - 1] = v
        return FpMatrix(field, mat)

    def accept(A: FpMatrix) -> bool:
        report = certify_consensus(A)
        if not report.achieves_consensus:
            return False
        if average_constraint and not report.achieves_average_consensus:
            return False
        return True

    matrices: list[FpMatrix] = []
    if pruned_space <= exhaustive_limit:
        count = 0
        for assignments in itertools.product(*(_row_assignments(p, len(r)) for r in row_edges)):
            A = build(assignments)
            if accept(A):
                count += 1
                if len(matrices) < max_results:
                    matrices.append(A)
        matrices.sort(key=lambda M: tuple(int(x) for x in M.a.ravel()))
        result = DesignResult(matrices, count, True, m)
    else:
        if sample is None:
            raise GuardExceededError(
                f"pruned candidate space {pruned_space} exceeds limit {exhaustive_limit}; "
                "enable sampling"
            )
        rng = random.Random(seed)
        seen: set[bytes] = set()
        for _ in range(sample):
            assignments = []
            for r in row_edges:
                prefix = tuple(rng.randrange(p) for _ in range(len(r) - 1))
                assignments.append(prefix + ((1 - sum(prefix)) % p,))
            A = build(assignments)
            key = A.a.tobytes()
            if key in seen:
                continue
            seen.add(key)
            if accept(A) and len(matrices) < max_results:
                matrices.append(A)
        matrices.sort(key=lambda M: tuple(int(x) for x in M.a.ravel()))
        result = DesignResult(matrices, None, False, m)

    result.count_lower_bound = thm7_lower_bound(n, m, p)
    result.reports = [certify_consensus(A) for A in result.matrices]
    return result


def fully_connected_design(field: PrimeField, v) -> FpMatrix:
    """Stack n copies of a row vector v with v 1 = 1; converges in <= 1 step."""
    row = np.mod(np.array(v, dtype=np.int64), field.p)
    if row.ndim != 1 or len(row) == 0:
        raise PreconditionError("v must be a nonempty vector")
    if int(row.sum()) % field.p != 1:
        raise PreconditionError("v must satisfy v 1 = 1")
    return FpMatrix(field, np.tile(row, (len(row), 1)))


def spanning_tree_design(field: PrimeField, G: GraphSpec) -> FpMatrix:
    """Unit weights on a rooted spanning tree, self-loop at the root only.

    The root is the lowest-index root vertex; the tree comes from
    breadth-first search with lowest-index parent tie-breaking, so the
    construction is deterministic.  The resulting matrix is triangular
    after relabeling by distance from the root, with diagonal
    {1, 0, ..., 0}, hence a certified consensus matrix with pi equal to
    the indicator of the root.
    """
    roots = G.roots()
    if not roots:
        raise PreconditionError("graph has no root vertex")
    root = roots[0]
    parent: dict[int, int] = {}
    seen = {root}
    frontier = [root]
    while frontier:
        nxt = []
        for u in sorted(frontier):
            for w in G.out_neighbors(u):
                if w not in seen:
                    seen.add(w)
                    parent[w] = u
                    nxt.append(w)
        frontier = nxt
    mat = np.zeros((G.n, G.n), dtype=np.int64)
    mat[root - 1, root - 1] = 1
    for child, par in parent.items():
        mat[child - 1, par - 1] = 1
    return FpMatrix(field, mat)


def kronecker_compose(matrices: list[FpMatrix]) -> tuple[FpMatrix, ConsensusReport]:
    """Iterated Kronecker product of certified consensus matrices.

    The composition is itself a consensus matrix, and it converges
    exactly as fast as the slowest component.
    """
    if not matrices:
        raise PreconditionError("at least one matrix is required")
    reports = [certify_consensus(A) for A in matrices]
    for A, r in zip(matrices, reports):
        if not r.achieves_consensus:
            raise PreconditionError("every component must achieve consensus")
    composed = matrices[0]
    for B in matrices[1:]:
        composed = composed.kron(B)
    report = certify_consensus(composed)
    expected_T = max(r.convergence_time for r in reports)
    if report.convergence_time != expected_T:
        raise AssertionError(
            "composition convergence time disagrees with the slowest component"
        )
    return composed, report
