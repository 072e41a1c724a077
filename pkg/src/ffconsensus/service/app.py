"""FastAPI service exposing analysis, design, and simulation operations.

The service is stateless: every endpoint is a pure function of its
request body, so identical requests produce identical responses.
Precondition violations map to HTTP 400 and size-guard exhaustion to
HTTP 413, each with a machine-readable ``code`` in the detail object.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..analysis import (
    build_transition_graph,
    certify_consensus,
    consensus_by_cycles,
    inverse_recursion,
    predict_cycle_structure,
)
from ..design import (
    GraphSpec,
    enumerate_consensus_matrices,
    fully_connected_design,
    kronecker_compose,
    spanning_tree_design,
)
from ..errors import FFConsensusError, GuardExceededError, PreconditionError
from ..field import PrimeField
from ..linalg import FpMatrix
from ..sim import (
    MeasurementGraph,
    SimConfig,
    perturb_measurements,
    run_average,
    run_consensus,
    run_pose_estimation,
)
from . import models

app = FastAPI(title="ffconsensus", version="0.1.0")


def _http_error(exc: FFConsensusError) -> HTTPException:
    if isinstance(exc, GuardExceededError):
        return HTTPException(status_code=413, detail={"code": "guard_exceeded", "message": str(exc)})
    if isinstance(exc, PreconditionError):
        return HTTPException(
            status_code=400, detail={"code": "precondition_failed", "message": str(exc)}
        )
    return HTTPException(status_code=400, detail={"code": "invalid_input", "message": str(exc)})


def _matrix(payload: models.MatrixPayload) -> FpMatrix:
    return FpMatrix(PrimeField(payload.p), payload.rows)


def _graph(payload: models.GraphPayload) -> tuple[GraphSpec, int]:
    return GraphSpec.from_edges(payload.n, payload.edges), payload.p


def _certificate(A: FpMatrix) -> models.MatrixCertificate:
    r = certify_consensus(A)
    return models.MatrixCertificate(
        rows=A.tolist(),
        char_poly=str(r.char_poly),
        convergence_time=r.convergence_time,
        pi=list(r.pi) if r.pi is not None else None,
        achieves_average_consensus=r.achieves_average_consensus,
    )


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/analyze", response_model=models.AnalyzeResponse)
def analyze(req: models.AnalyzeRequest):
    try:
        A = _matrix(req.matrix)
        report = certify_consensus(A)
        resp = models.AnalyzeResponse(
            p=report.p,
            n=report.n,
            is_row_stochastic=report.is_row_stochastic,
            is_nilpotent=report.is_nilpotent,
            achieves_consensus=report.achieves_consensus,
            achieves_average_consensus=report.achieves_average_consensus,
            average_obstruction=report.average_obstruction,
            char_poly=str(report.char_poly),
            convergence_time=report.convergence_time,
            pi=list(report.pi) if report.pi is not None else None,
        )
        if req.transition_graph or req.dot:
            tg = build_transition_graph(A, guard=req.state_guard)
            inventory = sorted(tg.cycle_inventory.items())
            resp.transition_graph = models.TransitionGraphSummary(
                num_states=tg.num_states,
                cycle_inventory=inventory,
                consensus_criterion=consensus_by_cycles(tg),
            )
            if req.dot:
                resp.dot = tg.to_dot()
        if req.inverse_recursion_alpha is not None:
            converged, size, steps, members = inverse_recursion(
                A, req.inverse_recursion_alpha, guard=req.state_guard
            )
            resp.inverse_recursion = models.InverseRecursionResult(
                alpha=req.inverse_recursion_alpha % report.p,
                converged=converged,
                limiting_set_size=size,
                steps=steps,
                members=sorted(list(v) for v in members) if size <= 4096 else None,
            )
        if req.predict_cycles:
            resp.predicted_cycles = sorted(predict_cycle_structure(A).items())
        return resp
    except FFConsensusError as exc:
        raise _http_error(exc) from exc


@app.post("/design/enumerate", response_model=models.DesignResponse)
def design_enumerate(req: models.EnumerateRequest):
    try:
        G, p = _graph(req.graph)
        result = enumerate_consensus_matrices(
            G,
            p,
            average_constraint=req.average,
            max_results=req.max_results,
            exhaustive_limit=req.exhaustive_limit,
            sample=req.sample,
            seed=req.seed,
        )
        return models.DesignResponse(
            p=p,
            n=G.n,
            matrices=[_certificate(A) for A in result.matrices],
            total_count=result.total_count,
            search_exhaustive=result.search_exhaustive,
            free_entries=result.free_entries,
            count_lower_bound=result.count_lower_bound,
        )
    except FFConsensusError as exc:
        raise _http_error(exc) from exc


@app.post("/design/tree", response_model=models.DesignResponse)
def design_tree(req: models.TreeRequest):
    try:
        G, p = _graph(req.graph)
        A = spanning_tree_design(PrimeField(p), G)
        return models.DesignResponse(
            p=p,
            n=G.n,
            matrices=[_certificate(A)],
            total_count=None,
            search_exhaustive=False,
            free_entries=len(G.edges),
        )
    except FFConsensusError as exc:
        raise _http_error(exc) from exc


@app.post("/design/complete", response_model=models.DesignResponse)
def design_complete(req: models.CompleteRequest):
    try:
        field = PrimeField(req.p)
        A = fully_connected_design(field, req.v)
        return models.DesignResponse(
            p=req.p,
            n=A.rows,
            matrices=[_certificate(A)],
            total_count=None,
            search_exhaustive=False,
            free_entries=A.rows * A.rows,
        )
    except FFConsensusError as exc:
        raise _http_error(exc) from exc


@app.post("/design/kronecker", response_model=models.DesignResponse)
def design_kronecker(req: models.KroneckerRequest):
    try:
        mats = [_matrix(mp) for mp in req.matrices]
        composed, report = kronecker_compose(mats)
        cert = models.MatrixCertificate(
            rows=composed.tolist(),
            char_poly=str(report.char_poly),
            convergence_time=report.convergence_time,
            pi=list(report.pi) if report.pi is not None else None,
            achieves_average_consensus=report.achieves_average_consensus,
        )
        return models.DesignResponse(
            p=composed.field.p,
            n=composed.rows,
            matrices=[cert],
            total_count=None,
            search_exhaustive=False,
            free_entries=int((composed.a != 0).sum()),
        )
    except FFConsensusError as exc:
        raise _http_error(exc) from exc


@app.post("/simulate", response_model=models.SimulateResponse)
def simulate(req: models.SimulateRequest):
    try:
        A = _matrix(req.matrix)
        traj = run_consensus(SimConfig(A, max_rounds=req.rounds), req.x0)
        return models.SimulateResponse(
            states=[list(s) for s in traj.states], fixed_from=traj.fixed_from()
        )
    except FFConsensusError as exc:
        raise _http_error(exc) from exc


@app.post("/average", response_model=models.AverageResponse)
def average(req: models.AverageRequest):
    try:
        A = _matrix(req.matrix)
        result = run_average(SimConfig(A, max_rounds=req.rounds), req.x0)
        return models.AverageResponse(
            states=[list(s) for s in result.trajectory.states],
            x_field=result.x_field,
            average_numerator=result.average.numerator,
            average_denominator=result.average.denominator,
            rounds_to_fixed=result.rounds_to_fixed,
        )
    except FFConsensusError as exc:
        raise _http_error(exc) from exc


@app.post("/pose", response_model=models.PoseResponse)
def pose(req: models.PoseRequest):
    try:
        A = _matrix(req.matrix)
        mg = MeasurementGraph.from_undirected(A.field, A.rows, req.edges)
        eta = req.eta
        if req.noise_seed is not None:
            eta = perturb_measurements(mg, eta, req.noise_seed).tolist()
        result = run_pose_estimation(SimConfig(A, max_rounds=req.rounds), mg, eta, req.theta0)
        return models.PoseResponse(
            theta=list(result.theta),
            states=[list(s) for s in result.states],
            error_trace=[list(e) for e in result.error_trace],
            rounds_to_fixed=result.rounds_to_fixed,
            error_fixed_from=result.error_fixed_from,
            residual_nonzero=result.residual_nonzero,
            eta_used=[int(v) for v in eta],
        )
    except FFConsensusError as exc:
        raise _http_error(exc) from exc
