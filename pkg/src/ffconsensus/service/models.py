"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field, field_validator

from ..field import is_prime


class MatrixPayload(BaseModel):
    p: int
    rows: list[list[int]]

    @field_validator("p")
    @classmethod
    def _prime(cls, v: int) -> int:
        if not is_prime(v):
            raise ValueError(f"p = {v} is not prime")
        return v

    @field_validator("rows")
    @classmethod
    def _square(cls, rows: list[list[int]]) -> list[list[int]]:
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("matrix must be square and nonempty")
        return rows


class AnalyzeRequest(BaseModel):
    matrix: MatrixPayload
    transition_graph: bool = False
    inverse_recursion_alpha: int | None = None
    predict_cycles: bool = False
    dot: bool = False
    state_guard: int = 10_000_000


class TransitionGraphSummary(BaseModel):
    num_states: int
    cycle_inventory: list[tuple[int, int]]  # (length, count), sorted by length
    consensus_criterion: bool


class InverseRecursionResult(BaseModel):
    alpha: int
    converged: bool
    limiting_set_size: int
    steps: int
    members: list[list[int]] | None = None


class AnalyzeResponse(BaseModel):
    p: int
    n: int
    is_row_stochastic: bool
    is_nilpotent: bool
    achieves_consensus: bool
    achieves_average_consensus: bool
    average_obstruction: str | None
    char_poly: str
    convergence_time: int | None
    pi: list[int] | None
    transition_graph: TransitionGraphSummary | None = None
    inverse_recursion: InverseRecursionResult | None = None
    predicted_cycles: list[tuple[int, int]] | None = None
    dot: str | None = None


class GraphPayload(BaseModel):
    n: int = Field(ge=1)
    p: int
    edges: list[tuple[int, int]]

    @field_validator("p")
    @classmethod
    def _prime(cls, v: int) -> int:
        if not is_prime(v):
            raise ValueError(f"p = {v} is not prime")
        return v


class EnumerateRequest(BaseModel):
    graph: GraphPayload
    average: bool = False
    max_results: int = 16
    exhaustive_limit: int = 100_000_000
    sample: int | None = None
    seed: int = 0


class MatrixCertificate(BaseModel):
    rows: list[list[int]]
    char_poly: str
    convergence_time: int | None
    pi: list[int] | None
    achieves_average_consensus: bool


class DesignResponse(BaseModel):
    p: int
    n: int
    matrices: list[MatrixCertificate]
    total_count: int | None
    search_exhaustive: bool
    free_entries: int
    count_lower_bound: int | None = None


class TreeRequest(BaseModel):
    graph: GraphPayload


class CompleteRequest(BaseModel):
    p: int
    v: list[int]

    @field_validator("p")
    @classmethod
    def _prime(cls, v: int) -> int:
        if not is_prime(v):
            raise ValueError(f"p = {v} is not prime")
        return v


class KroneckerRequest(BaseModel):
    matrices: list[MatrixPayload] = Field(min_length=1)


class SimulateRequest(BaseModel):
    matrix: MatrixPayload
    x0: list[int]
    rounds: int | None = None


class SimulateResponse(BaseModel):
    states: list[list[int]]
    fixed_from: int | None


class AverageRequest(BaseModel):
    matrix: MatrixPayload
    x0: list[int]
    rounds: int | None = None


class AverageResponse(BaseModel):
    states: list[list[int]]
    x_field: int
    average_numerator: int
    average_denominator: int
    rounds_to_fixed: int | None


class PoseRequest(BaseModel):
    matrix: MatrixPayload
    edges: list[tuple[int, int]]
    eta: list[int]
    theta0: list[int] | None = None
    rounds: int | None = None
    noise_seed: int | None = None


class PoseResponse(BaseModel):
    theta: list[int]
    states: list[list[int]]
    error_trace: list[list[int]]
    rounds_to_fixed: int | None
    error_fixed_from: int | None
    residual_nonzero: int
    eta_used: list[int]
