"""Synchronous message-passing simulation over F_p.

Covers the raw consensus iteration x(t+1) = A x(t), distributed
averaging with exact recovery of the real-valued mean, and distributed
pose estimation from relative angle measurements (noiseless and
noisy).  Rounds are strictly synchronous: all agents read the previous
round's snapshot, then update simultaneously, which is exactly the
closed-form power iteration.

Angles are stored and transmitted only as k-encodings (the integer k
for the angle k*2pi/p); any 2pi/p scaling belongs to the presentation
boundary, never to the simulator.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .analysis import certify_consensus
from .errors import PreconditionError
from .field import PrimeField
from .linalg import FpMatrix


@dataclass
class SimConfig:
    A: FpMatrix
    max_rounds: int | None = None  # defaults to n
    seed: int = 0

    @property
    def rounds(self) -> int:
        r = self.A.rows if self.max_rounds is None else self.max_rounds
        if r < 1:
            raise PreconditionError("max_rounds must be at least 1")
        return r


@dataclass
class Trajectory:
    """states[t] is the network state after t rounds; states[0] = x0."""

    states: list[tuple[int, ...]]

    def fixed_from(self) -> int | None:
        """First round index from which the state never changes again.

        None when no repeat was observed inside the simulated horizon.
        """
        for t in range(len(self.states) - 1):
            if all(s == self.states[t] for s in self.states[t + 1 :]):
                return t
        return None


def run_consensus(cfg: SimConfig, x0) -> Trajectory:
    """Run max_rounds synchronous rounds of x(t+1) = A x(t)."""
    A = cfg.A
    x = np.mod(np.array(x0, dtype=np.int64), A.field.p)
    if x.shape != (A.cols,):
        raise PreconditionError(f"x0 must have length {A.cols}")
    states = [tuple(int(v) for v in x)]
    for _ in range(cfg.rounds):
        x = A.mat_vec(x)
        states.append(tuple(int(v) for v in x))
    return Trajectory(states)


def recover_real_average(field: PrimeField, x_field: int, n: int) -> Fraction:
    """Exact rational mean mod(n * x_F, p) / n, in lowest terms.

    Valid whenever n ||x0||_inf <= p and n is not a multiple of p.
    """
    if n < 1:
        raise PreconditionError("n must be positive")
    if n % field.p == 0:
        raise PreconditionError("n must not be a multiple of p")
    return Fraction((n * (x_field % field.p)) % field.p, n)


@dataclass
class AverageResult:
    trajectory: Trajectory
    x_field: int
    average: Fraction
    rounds_to_fixed: int | None


def run_average(cfg: SimConfig, x0) -> AverageResult:
    """Distributed averaging: consensus on n^(p-2) 1^T x0, then recovery.

    Preconditions checked before running: A certified average-consensus,
    and n max(x0) <= p so the real mean is recoverable.
    """
    A = cfg.A
    p = A.field.p
    n = A.rows
    report = certify_consensus(A)
    if not report.achieves_average_consensus:
        raise PreconditionError(
            f"matrix does not achieve average consensus: {report.average_obstruction}"
        )
    x = np.mod(np.array(x0, dtype=np.int64), p)
    if x.shape != (n,):
        raise PreconditionError(f"x0 must have length {n}")
    if n * int(x.max(initial=0)) > p:
        raise PreconditionError(
            f"n * max(x0) = {n * int(x.max())} exceeds p = {p}; the real average "
            "is not recoverable"
        )
    traj = run_consensus(cfg, x)
    x_field = traj.states[-1][0]
    expected = (pow(n, p - 2, p) * int(x.sum())) % p
    if set(traj.states[-1]) != {expected}:
        raise AssertionError("trajectory did not settle on the field average")
    return AverageResult(
        trajectory=traj,
        x_field=x_field,
        average=recover_real_average(A.field, x_field, n),
        rounds_to_fixed=traj.fixed_from(),
    )


@dataclass(frozen=True)
class MeasurementGraph:
    """Undirected camera graph with its oriented edge structure.

    Edges are stored once, oriented low index -> high index (edge
    (i, j) with i < j carries the measurement eta_ij = theta_i -
    theta_j); the reverse direction implicitly uses -eta_ij.  B is the
    m x n incidence matrix with +1 at column i and -1 at column j.
    """

    field: PrimeField
    n: int
    directed_edges: tuple[tuple[int, int], ...]

    @classmethod
    def from_undirected(cls, field: PrimeField, n: int, edges) -> "MeasurementGraph":
        oriented = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise PreconditionError("self-loops are not valid measurement edges")
            if not (1 <= i <= n and 1 <= j <= n):
                raise PreconditionError(f"edge ({i},{j}) out of range")
            oriented.add((min(i, j), max(i, j)))
        return cls(field, n, tuple(sorted(oriented)))

    @property
    def m(self) -> int:
        return len(self.directed_edges)

    def incidence(self) -> FpMatrix:
        B = np.zeros((self.m, self.n), dtype=np.int64)
        for k, (i, j) in enumerate(self.directed_edges):
            B[k, i - 1] = 1
            B[k, j - 1] = -1
        return FpMatrix(self.field, B)

    def measurements_from_poses(self, theta) -> np.ndarray:
        """Consistent eta = B theta for ground-truth orientations."""
        return self.incidence().mat_vec(theta)


def perturb_measurements(mg: MeasurementGraph, eta, seed: int) -> np.ndarray:
    """Add seeded per-edge offsets in F_p (static measurement noise)."""
    rng = random.Random(seed)
    p = mg.field.p
    eta = np.mod(np.array(eta, dtype=np.int64), p)
    noise = np.array([rng.randrange(p) for _ in range(mg.m)], dtype=np.int64)
    return np.mod(eta + noise, p)


def _check_compatible(A: FpMatrix, mg: MeasurementGraph):
    if A.rows != mg.n:
        raise PreconditionError("matrix size does not match the measurement graph")
    edge_set = set(mg.directed_edges)
    rs, cs = np.nonzero(A.a)
    for r, c in zip(rs, cs):
        if r != c:
            i, j = int(r) + 1, int(c) + 1
            if (min(i, j), max(i, j)) not in edge_set:
                raise PreconditionError(
                    f"weight a_{i}{j} is nonzero but ({i},{j}) is not a camera edge"
                )


def _L_entries(A: FpMatrix, mg: MeasurementGraph):
    """(row, col, value) triplets of the gain matrix L."""
    p = A.field.p
    for k, (i, j) in enumerate(mg.directed_edges):
        yield i - 1, k, int(A.a[i - 1, j - 1])
        yield j - 1, k, (-int(A.a[j - 1, i - 1])) % p


def build_L(A: FpMatrix, mg: MeasurementGraph) -> FpMatrix:
    """The n x m gain matrix pairing edge measurements with weights.

    Column k for edge (i, j) holds a_ij at row i and -a_ij at row j.
    For an average-consensus A on its own graph, L B = I - A.
    """
    _check_compatible(A, mg)
    L = np.zeros((mg.n, mg.m), dtype=np.int64)
    for r, c, v in _L_entries(A, mg):
        L[r, c] = v
    return FpMatrix(A.field, L)


@dataclass
class PoseResult:
    theta: tuple[int, ...]
    states: list[tuple[int, ...]]
    error_trace: list[tuple[int, ...]]
    rounds_to_fixed: int | None
    error_fixed_from: int | None
    residual_nonzero: int  # count of nonzero entries of eta - B theta at the end


def run_pose_estimation(cfg: SimConfig, mg: MeasurementGraph, eta, theta0=None) -> PoseResult:
    """Run the estimation iteration x(t+1) = A x(t) + L eta over F_p.

    With consistent measurements (eta in Im(B)) the state is fixed
    after the network's convergence time with zero residual; with
    arbitrary eta the error e(t) = eta - B x(t) is constant from that
    round onward.
    """
    A = cfg.A
    p = A.field.p
    report = certify_consensus(A)
    if not report.achieves_average_consensus:
        raise PreconditionError(
            f"pose estimation requires an average-consensus matrix: "
            f"{report.average_obstruction}"
        )
    eta = np.mod(np.array(eta, dtype=np.int64), p)
    if eta.shape != (mg.m,):
        raise PreconditionError(f"eta must have length {mg.m}")
    if theta0 is None:
        theta0 = np.zeros(mg.n, dtype=np.int64)
    x = np.mod(np.array(theta0, dtype=np.int64), p)
    if x.shape != (mg.n,):
        raise PreconditionError(f"theta0 must have length {mg.n}")

    # B x and L eta via edge index arrays; dense m x n matrices would be
    # prohibitive for large networks.
    _check_compatible(A, mg)
    heads = np.array([i - 1 for i, _ in mg.directed_edges], dtype=np.int64)
    tails = np.array([j - 1 for _, j in mg.directed_edges], dtype=np.int64)
    drive = np.zeros(mg.n, dtype=np.int64)
    for r, c, v in _L_entries(A, mg):
        drive[r] = (drive[r] + v * int(eta[c])) % p

    def residual(state):
        return np.mod(eta - (state[heads] - state[tails]), p)

    states = [tuple(int(v) for v in x)]
    errors = [tuple(int(v) for v in residual(x))]
    for _ in range(cfg.rounds):
        x = np.mod(A.mat_vec(x) + drive, p)
        states.append(tuple(int(v) for v in x))
        errors.append(tuple(int(v) for v in residual(x)))

    def settle(seq) -> int | None:
        for t in range(len(seq)):
            if all(s == seq[t] for s in seq[t:]):
                return t if t < len(seq) - 1 else None
        return None

    return PoseResult(
        theta=states[-1],
        states=states,
        error_trace=errors,
        rounds_to_fixed=settle(states),
        error_fixed_from=settle(errors),
        residual_nonzero=sum(1 for v in errors[-1] if v != 0),
    )


def decompose_measurement(mg: MeasurementGraph, eta):
    """Split eta = eta_par + eta_orth with eta_par in Im(B), eta_orth in Im(B)^perp.

    Over a finite field the standard bilinear form can be degenerate on
    Im(B); when Im(B) and its orthogonal complement fail to span F_p^m
    directly, there is no unique decomposition and None is returned.
    """
    p = mg.field.p
    eta = np.mod(np.array(eta, dtype=np.int64), p)
    B = mg.incidence()
    # Im(B) is the row space of B^T; the first `rank` rows of its rref are a basis.
    Rt, rank, _ = B.transpose().rref()
    im_basis = [Rt.a[r] for r in range(rank)]
    # Im(B)^perp = Ker(B^T) as a subspace of F_p^m.
    orth_basis = B.transpose().kernel_basis()
    combined = im_basis + orth_basis
    if len(combined) != mg.m:
        return None
    M = FpMatrix(mg.field, np.array(combined, dtype=np.int64).T)
    if M.rank() != mg.m:
        return None
    coords = M.solve(eta)
    if coords is None:
        return None
    k = len(im_basis)
    Bmat = np.array(combined, dtype=np.int64)
    eta_par = np.mod(coords[:k] @ Bmat[:k], p) if k else np.zeros(mg.m, dtype=np.int64)
    eta_orth = np.mod(eta - eta_par, p)
    return eta_par.astype(np.int64), eta_orth.astype(np.int64)
