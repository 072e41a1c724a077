"""Consensus certification and transition-graph dynamics over F_p.

A row-stochastic network matrix achieves consensus exactly when its
characteristic polynomial is s^(n-1)(s-1); equivalently, its transition
graph has exactly p cycles (all unit self-loops at the constant
states), and the inverse set recursion stabilizes at p^(n-1) initial
states per consensus value.  This module implements all three criteria
plus the consensus functional, convergence time, and a predictor of
the full transition-graph cycle inventory from the characteristic
polynomial factorization.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import GuardExceededError, PreconditionError
from .field import PrimeField
from .linalg import AffineSubset, FpMatrix, FpPolynomial

DEFAULT_STATE_GUARD = 10**7

# Below this size the characteristic polynomial is always computed
# outright; above it, certification first tries the cheap fixed-point
# power test and only falls back to the Hessenberg computation when the
# matrix is not a consensus matrix.
_CHARPOLY_DIRECT_LIMIT = 128


def is_row_stochastic(A: FpMatrix) -> bool:
    """True iff every row of A sums to 1 mod p."""
    if not A.is_square():
        raise PreconditionError("row-stochasticity is defined for square matrices")
    return bool(np.all(np.mod(A.a.sum(axis=1), A.field.p) == 1))


def is_column_stochastic(A: FpMatrix) -> bool:
    return bool(np.all(np.mod(A.a.sum(axis=0), A.field.p) == 1))


def is_nilpotent(A: FpMatrix) -> bool:
    """True iff A^n = 0 over F_p."""
    if not A.is_square():
        raise PreconditionError("nilpotency is defined for square matrices")
    n = A.rows
    return (A ** n) == FpMatrix.zeros(A.field, n, n)


@dataclass(frozen=True)
class ConsensusReport:
    """Verdicts and certificates for one network matrix."""

    p: int
    n: int
    is_row_stochastic: bool
    is_nilpotent: bool
    achieves_consensus: bool
    achieves_average_consensus: bool
    char_poly: FpPolynomial
    convergence_time: int | None = None
    pi: tuple[int, ...] | None = None
    average_obstruction: str | None = None


def _stabilized_power(A: FpMatrix):
    """Least T with A^T = A^(T+1), walked up to T = n; None if no fixed power."""
    n = A.rows
    P = FpMatrix.identity(A.field, n)
    for t in range(n + 1):
        Q = P @ A
        if Q == P:
            return t, P
        P = Q
    return None


def certify_consensus(A: FpMatrix) -> ConsensusReport:
    """Full consensus certification of a square matrix over a prime field.

    Consensus holds iff A is row-stochastic and char(A) = s^(n-1)(s-1);
    average consensus additionally needs all column sums equal to 1 and
    n not a multiple of p.  When consensus holds, the report carries the
    consensus functional pi (pi A = pi, pi 1 = 1) and the convergence
    time T, the least power with A^T = 1 pi (always T <= n-1).
    """
    if not A.is_square():
        raise PreconditionError("certification requires a square matrix")
    n = A.rows
    p = A.field.p
    row_stoch = is_row_stochastic(A)
    target = FpPolynomial.consensus_form(A.field, n)

    char: FpPolynomial | None = None
    if n <= _CHARPOLY_DIRECT_LIMIT:
        char = A.char_poly()
        consensus = row_stoch and char == target
        stab = _stabilized_power(A) if consensus else None
    else:
        # Large matrix: equivalent power test.  If A is row-stochastic,
        # A^T = A^(T+1) with rank(A^T) = 1 for some T < n holds iff
        # char(A) = s^(n-1)(s-1).
        stab = _stabilized_power(A) if row_stoch else None
        consensus = False
        if stab is not None:
            T, P = stab
            pi_row = P.a[0]
            consensus = bool(np.array_equal(P.a, np.tile(pi_row, (n, 1)))) and not np.all(
                pi_row == 0
            )
        if consensus:
            char = target
        else:
            stab = None
            char = A.char_poly()

    nilpotent = char == FpPolynomial.monomial(A.field, n)

    T = None
    pi = None
    if consensus:
        if stab is None:
            stab = _stabilized_power(A)
        T, P = stab
        pi = tuple(int(x) for x in P.a[0])

    avg = False
    obstruction = None
    if consensus:
        if n % p == 0:
            obstruction = f"n = {n} is a multiple of p = {p}"
        elif not is_column_stochastic(A):
            obstruction = "column sums are not all 1"
        else:
            avg = True
    else:
        obstruction = "matrix does not achieve consensus"

    return ConsensusReport(
        p=p,
        n=n,
        is_row_stochastic=row_stoch,
        is_nilpotent=nilpotent,
        achieves_consensus=consensus,
        achieves_average_consensus=avg,
        char_poly=char,
        convergence_time=T,
        pi=pi,
        average_obstruction=obstruction,
    )


def consensus_functional(A: FpMatrix) -> np.ndarray:
    """The unique row vector with pi A = pi and pi 1 = 1."""
    report = certify_consensus(A)
    if not report.achieves_consensus:
        raise PreconditionError("consensus functional exists only for consensus matrices")
    return np.array(report.pi, dtype=np.int64)


def convergence_time(A: FpMatrix) -> int:
    """Least T with A^T = 1 pi; always T <= n-1 for consensus matrices."""
    report = certify_consensus(A)
    if not report.achieves_consensus:
        raise PreconditionError("convergence time exists only for consensus matrices")
    return report.convergence_time


@dataclass
class TransitionGraph:
    """Functional graph on all p^n states, edge v -> A v.

    States are indexed by little-endian base-p packing: index(v) =
    sum_i v_i p^i, component 0 = agent 1.
    """

    field: PrimeField
    n: int
    successor: np.ndarray
    cycles: list[tuple[int, int]] = dc_field(default_factory=list)  # (length, min state on cycle)

    @property
    def num_states(self) -> int:
        return self.field.p ** self.n

    @property
    def cycle_inventory(self) -> Counter:
        """Multiset {cycle length: count}."""
        inv = Counter()
        for length, _ in self.cycles:
            inv[length] += 1
        return inv

    def decode(self, index: int) -> tuple[int, ...]:
        p = self.field.p
        out = []
        for _ in range(self.n):
            out.append(index % p)
            index //= p
        return tuple(out)

    def encode(self, state) -> int:
        p = self.field.p
        idx = 0
        for v in reversed(list(state)):
            idx = idx * p + (int(v) % p)
        return idx

    def consensus_state_indices(self) -> list[int]:
        return [self.encode([alpha] * self.n) for alpha in range(self.field.p)]

    def to_dot(self) -> str:
        """DOT export; vertices labeled by state vectors, consensus states marked."""
        consensus = set(self.consensus_state_indices())
        lines = ["digraph transition {"]
        for i in range(self.num_states):
            label = ",".join(str(x) for x in self.decode(i))
            attrs = f'label="({label})"'
            if i in consensus:
                attrs += ", shape=doublecircle"
            lines.append(f"  s{i} [{attrs}];")
        for i in range(self.num_states):
            lines.append(f"  s{i} -> s{int(self.successor[i])};")
        lines.append("}")
        return "\n".join(lines)


def _find_cycles(succ: np.ndarray) -> list[tuple[int, int]]:
    """Cycle inventory of a functional graph by iterative pointer chasing."""
    n = len(succ)
    color = np.zeros(n, dtype=np.int8)  # 0 unvisited, 1 on current walk, 2 done
    order = np.zeros(n, dtype=np.int64)
    cycles = []
    for start in range(n):
        if color[start]:
            continue
        path = []
        v = start
        while color[v] == 0:
            color[v] = 1
            order[v] = len(path)
            path.append(v)
            v = int(succ[v])
        if color[v] == 1:
            # hit the current walk: the tail from v onward is a new cycle
            cyc = path[order[v] :]
            cycles.append((len(cyc), min(cyc)))
        for u in path:
            color[u] = 2
    return cycles


def build_transition_graph(
    A: FpMatrix, guard: int = DEFAULT_STATE_GUARD
) -> TransitionGraph:
    """Enumerate the successor table over all p^n states.

    Raises :class:`GuardExceededError` when p^n exceeds the guard;
    the characteristic-polynomial criterion is the scalable route.
    """
    if not A.is_square():
        raise PreconditionError("transition graph requires a square matrix")
    p = A.field.p
    n = A.rows
    total = p**n
    if total > guard:
        raise GuardExceededError(f"transition graph has {total} states, guard is {guard}")
    powers = np.array([p**j for j in range(n)], dtype=np.int64)
    succ = np.empty(total, dtype=np.int64)
    chunk = max(1, min(total, 1 << 16))
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        digits = (idx[:, None] // powers[None, :]) % p
        nxt = np.mod(digits @ A.a.T, p)
        succ[lo : lo + len(idx)] = nxt @ powers
    tg = TransitionGraph(A.field, n, succ)
    tg.cycles = _find_cycles(succ)
    return tg


def consensus_by_cycles(tg: TransitionGraph) -> bool:
    """Transition-graph criterion: exactly p unit cycles, all at alpha*1."""
    p = tg.field.p
    if len(tg.cycles) != p:
        return False
    if any(length != 1 for length, _ in tg.cycles):
        return False
    reps = {rep for _, rep in tg.cycles}
    return reps == set(tg.consensus_state_indices())


def inverse_recursion(
    A: FpMatrix,
    alpha: int,
    max_steps: int | None = None,
    guard: int = DEFAULT_STATE_GUARD,
) -> tuple[bool, int, int, set[tuple[int, ...]]]:
    """Iterate the preimage recursion S(t+1) = A^-1(S(t)) from {alpha*1}.

    Returns (converged, limiting set size, steps, limiting set).  For a
    row-stochastic matrix, consensus holds iff the recursion converges
    with a limiting set of p^(n-1) members.
    """
    if not A.is_square():
        raise PreconditionError("inverse recursion requires a square matrix")
    n = A.rows
    if max_steps is None:
        max_steps = n
    if max_steps < n:
        raise PreconditionError("max_steps must be at least n")
    current = {tuple([alpha % A.field.p] * n)}
    for step in range(1, max_steps + 1):
        nxt: set[tuple[int, ...]] = set()
        for v in current:
            pre = A.preimage(np.array(v, dtype=np.int64))
            if pre.cardinality + len(nxt) > guard:
                raise GuardExceededError("inverse recursion set guard exceeded")
            nxt.update(pre)
        if nxt == current:
            return True, len(current), step - 1, current
        current = nxt
    return False, len(current), max_steps, current


def _combine_inventories(a: Counter, b: Counter) -> Counter:
    """Cycle inventory of a product of functional graphs.

    A cycle of length r crossed with a cycle of length q splits into
    gcd(r, q) cycles of length lcm(r, q).
    """
    out = Counter()
    for r, cr in a.items():
        for q, cq in b.items():
            g = math.gcd(r, q)
            out[(r * q) // g] += cr * cq * g
    return out


def _cyclic_block_inventory(g: FpPolynomial, exp: int, work_guard: int) -> Counter:
    """Cycle inventory of one cyclic block with minimal polynomial g^exp.

    The block contributes the fixed point at the origin plus, for each
    i = 1..exp, (p^(d i) - p^(d (i-1))) / ord(g^i) cycles of length
    ord(g^i), with d = deg(g).
    """
    p = g.field.p
    d = g.degree
    inv = Counter({1: 1})
    power = FpPolynomial.one(g.field)
    for i in range(1, exp + 1):
        power = power * g
        length = power.order(work_guard)
        count = (p ** (d * i) - p ** (d * (i - 1))) // length
        inv[length] += count
    return inv


def _evaluate_poly_at_matrix(g: FpPolynomial, A: FpMatrix) -> FpMatrix:
    acc = FpMatrix.zeros(A.field, A.rows, A.rows)
    for c in reversed(g.coeffs):
        acc = acc @ A
        if c:
            acc = acc + FpMatrix.identity(A.field, A.rows).scale(c)
    return acc


def _elementary_divisors(A: FpMatrix, g: FpPolynomial) -> list[int]:
    """Exponents of the elementary divisors g^e of A, one entry per block.

    Derived from the kernel-dimension sequence d_i = dim Ker(g(A)^i):
    the number of blocks with exponent >= i is (d_i - d_{i-1}) / deg(g).
    """
    d = g.degree
    gA = _evaluate_poly_at_matrix(g, A)
    dims = [0]
    power = FpMatrix.identity(A.field, A.rows)
    while True:
        power = power @ gA
        dim = A.rows - power.rank()
        if dim == dims[-1]:
            break
        dims.append(dim)
    at_least = [(dims[i] - dims[i - 1]) // d for i in range(1, len(dims))]
    exponents = []
    for e, count_ge in enumerate(at_least, start=1):
        count_next = at_least[e] if e < len(at_least) else 0
        exponents.extend([e] * (count_ge - count_next))
    return exponents


def predict_cycle_structure(A: FpMatrix, work_guard: int = 10**6) -> Counter:
    """Predict the transition-graph cycle inventory without enumerating states.

    The state space splits into cyclic blocks along the elementary
    divisors of A.  Nilpotent blocks (elementary divisors s^e) each
    contribute a single fixed point; a block with minimal polynomial
    g^e, g(0) != 0, contributes cycles whose lengths are the orders of
    g^i.  Block inventories combine by the gcd/lcm product rule: a
    cycle of length r crossed with one of length q gives gcd(r, q)
    cycles of length lcm(r, q).  Agrees with brute-force enumeration on
    every matrix small enough to enumerate.

    Note the characteristic polynomial alone does not determine the
    inventory; matrices sharing char poly (s-1)^3 but different minimal
    polynomials have different cycle counts, which is why the
    elementary divisor structure is computed here.
    """
    if not A.is_square():
        raise PreconditionError("cycle prediction requires a square matrix")
    char = A.char_poly()
    s_poly = FpPolynomial.x(A.field)
    inventory = Counter({1: 1})
    for g, _ in char.factor(work_guard):
        if g == s_poly:
            # all nilpotent blocks jointly collapse to the single fixed point 0
            continue
        for exp in _elementary_divisors(A, g):
            inventory = _combine_inventories(
                inventory, _cyclic_block_inventory(g, exp, work_guard)
            )
    return inventory
