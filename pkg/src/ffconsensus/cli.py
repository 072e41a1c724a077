"""Command-line front end.

The CLI is a thin client: it parses the text file formats, sends the
structured payload to the HTTP service, and writes reports, CSV
traces, DOT graphs, and matrix files.  By default the service runs
in-process (no server needed); pass ``--url`` to talk to a remote
``ffc serve`` instance instead.

Exit codes: 0 success, 2 parse error, 3 precondition failure,
4 guard exhaustion.
"""

from __future__ import annotations

import pathlib
import sys

import click
import httpx

from . import io as formats
from .errors import ParseError
from .field import is_prime

EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_GUARD = 4


def _client(url: str | None) -> httpx.Client:
    if url:
        return httpx.Client(base_url=url, timeout=600.0)
    # in-process mode: drive the ASGI app synchronously
    from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _post(url: str | None, path: str, payload: dict) -> dict:
    with _client(url) as client:
        resp = client.post(path, json=payload)
    if resp.status_code == 200:
        return resp.json()
    detail = resp.json().get("detail", {})
    if isinstance(detail, dict):
        code = detail.get("code", "")
        message = detail.get("message", str(detail))
    else:
        code, message = "validation_error", str(detail)
    if resp.status_code == 413 or code == "guard_exceeded":
        _fail(EXIT_GUARD, message)
    _fail(EXIT_PRECONDITION, message)


def _read(path: str) -> str:
    try:
        return pathlib.Path(path).read_text()
    except OSError as exc:
        _fail(EXIT_PARSE, f"cannot read {path}: {exc}")


def _parse(parser, text: str):
    try:
        return parser(text)
    except ParseError as exc:
        _fail(EXIT_PARSE, str(exc))


def _emit(report: str, out: str | None):
    if out:
        pathlib.Path(out).write_text(report)
    else:
        click.echo(report, nl=False)


@click.group()
@click.option("--url", default=None, help="Base URL of a running service; default is in-process.")
@click.pass_context
def main(ctx, url):
    """Finite-field consensus toolkit."""
    ctx.obj = url


@main.command()
@click.argument("matrix_file")
@click.option("--transition-graph", is_flag=True, help="Enumerate the transition graph.")
@click.option("--inverse-recursion", "alpha", type=int, default=None, metavar="ALPHA")
@click.option("--predict-cycles", is_flag=True)
@click.option("--dot", "dot_out", default=None, metavar="PATH", help="Write the transition graph as DOT.")
@click.option("-o", "--output", default=None, help="Write the JSON report here instead of stdout.")
@click.pass_obj
def analyze(url, matrix_file, transition_graph, alpha, predict_cycles, dot_out, output):
    """Certify consensus of a matrix file and report pi, T, and extras."""
    A = _parse(formats.parse_matrix, _read(matrix_file))
    payload = {
        "matrix": {"p": A.field.p, "rows": A.tolist()},
        "transition_graph": transition_graph,
        "inverse_recursion_alpha": alpha,
        "predict_cycles": predict_cycles,
        "dot": dot_out is not None,
    }
    data = _post(url, "/analyze", payload)
    dot = data.pop("dot", None)
    if dot_out:
        pathlib.Path(dot_out).write_text(dot + "\n")
    _emit(formats.report_json("analyze", data), output)


@main.command()
@click.argument("graph_file", required=False)
@click.option("--p", "p_override", type=int, default=None, help="Override the field modulus.")
@click.option(
    "--construct",
    type=click.Choice(["enumerate", "tree", "complete"]),
    default="enumerate",
    show_default=True,
)
@click.option("--average", is_flag=True, help="Require column sums 1 (average consensus).")
@click.option("--limit", type=int, default=100_000_000, show_default=True, help="Exhaustive candidate guard.")
@click.option("--max-results", type=int, default=16, show_default=True)
@click.option("--sample", type=int, default=None, help="Sample size for non-exhaustive search.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--v", "v_row", default=None, help="Row vector for --construct complete, e.g. '2 1 1'.")
@click.option("--kronecker", "kron_files", multiple=True, help="Matrix files to compose (repeatable).")
@click.option("--out-dir", default=None, help="Write each designed matrix as a matrix file here.")
@click.option("-o", "--output", default=None)
@click.pass_obj
def design(url, graph_file, p_override, construct, average, limit, max_results, sample, seed,
           v_row, kron_files, out_dir, output):
    """Synthesize consensus matrices for a graph, or compose matrix files."""
    if kron_files:
        payloads = []
        for f in kron_files:
            A = _parse(formats.parse_matrix, _read(f))
            payloads.append({"p": A.field.p, "rows": A.tolist()})
        data = _post(url, "/design/kronecker", {"matrices": payloads})
    else:
        if graph_file is None:
            _fail(EXIT_PARSE, "a graph file is required unless --kronecker is used")
        G, p = _parse(formats.parse_graph, _read(graph_file))
        if p_override is not None:
            if not is_prime(p_override):
                _fail(EXIT_PARSE, f"--p {p_override} is not prime")
            p = p_override
        graph_payload = {"n": G.n, "p": p, "edges": sorted(G.edges)}
        if construct == "enumerate":
            data = _post(url, "/design/enumerate", {
                "graph": graph_payload,
                "average": average,
                "max_results": max_results,
                "exhaustive_limit": limit,
                "sample": sample,
                "seed": seed,
            })
        elif construct == "tree":
            data = _post(url, "/design/tree", {"graph": graph_payload})
        else:
            if v_row is not None:
                try:
                    v = [int(x) for x in v_row.split()]
                except ValueError:
                    _fail(EXIT_PARSE, f"--v must be integers, got {v_row!r}")
            else:
                # uniform averaging row: every entry 1/n over F_p
                if G.n % p == 0:
                    _fail(EXIT_PRECONDITION, f"default v needs n not divisible by p (n={G.n}, p={p})")
                v = [pow(G.n, p - 2, p)] * G.n
            data = _post(url, "/design/complete", {"p": p, "v": v})
    if out_dir:
        outdir = pathlib.Path(out_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        from .linalg import FpMatrix
        from .field import PrimeField

        for k, cert in enumerate(data["matrices"]):
            A = FpMatrix(PrimeField(data["p"]), cert["rows"])
            (outdir / f"matrix_{k:04d}.txt").write_text(formats.render_matrix(A))
    _emit(formats.report_json("design", data), output)


@main.command()
@click.argument("scenario_file")
@click.option("--rounds", type=int, default=None)
@click.option("--csv", "csv_out", default=None, help="Write the state trajectory as CSV.")
@click.option("-o", "--output", default=None)
@click.pass_obj
def simulate(url, scenario_file, rounds, csv_out, output):
    """Run the raw consensus iteration from a scenario file."""
    A, x0, _, _ = _parse(formats.parse_scenario, _read(scenario_file))
    data = _post(url, "/simulate", {
        "matrix": {"p": A.field.p, "rows": A.tolist()},
        "x0": x0,
        "rounds": rounds,
    })
    if csv_out:
        pathlib.Path(csv_out).write_text(formats.trajectory_csv(data["states"]))
    _emit(formats.report_json("simulate", data), output)


@main.command()
@click.argument("scenario_file")
@click.option("--rounds", type=int, default=None)
@click.option("--csv", "csv_out", default=None)
@click.option("-o", "--output", default=None)
@click.pass_obj
def average(url, scenario_file, rounds, csv_out, output):
    """Distributed averaging with exact real-mean recovery."""
    A, x0, _, _ = _parse(formats.parse_scenario, _read(scenario_file))
    data = _post(url, "/average", {
        "matrix": {"p": A.field.p, "rows": A.tolist()},
        "x0": x0,
        "rounds": rounds,
    })
    if csv_out:
        pathlib.Path(csv_out).write_text(formats.trajectory_csv(data["states"]))
    _emit(formats.report_json("average", data), output)


@main.command()
@click.argument("scenario_file")
@click.option("--rounds", type=int, default=None)
@click.option("--noise", is_flag=True, help="Apply seeded per-edge measurement noise.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--csv", "csv_out", default=None, help="Write the error trace as CSV.")
@click.option("-o", "--output", default=None)
@click.pass_obj
def pose(url, scenario_file, rounds, noise, seed, csv_out, output):
    """Distributed pose estimation from the scenario's measurement block."""
    A, theta0, mg, eta = _parse(formats.parse_scenario, _read(scenario_file))
    if mg is None:
        _fail(EXIT_PARSE, "scenario has no measurement block")
    data = _post(url, "/pose", {
        "matrix": {"p": A.field.p, "rows": A.tolist()},
        "edges": [list(e) for e in mg.directed_edges],
        "eta": [int(v) for v in eta],
        "theta0": theta0,
        "rounds": rounds,
        "noise_seed": seed if noise else None,
    })
    if csv_out:
        pathlib.Path(csv_out).write_text(formats.trajectory_csv(data["error_trace"], prefix="e"))
    _emit(formats.report_json("pose", data), output)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
