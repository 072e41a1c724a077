"""Stable text formats for matrices, graphs, scenarios, and traces.

Matrix file::

    n p
    a11 a12 ... a1n
    ...
    an1 an2 ... ann

Entries must already be canonical residues in [0, p-1].
``parse_matrix(render_matrix(A)) == A`` holds bit-exactly.

Graph file (directed interaction graph; edge "i j" means j -> i)::

    n p
    i j
    ...

Scenario file::

    n p
    <n matrix rows>
    x1 x2 ... xn          # initial state (k-encoded angles for pose runs)
    m                     # optional measurement block
    i j eta
    ...

CSV traces have a header row ``round,x1,...,xn`` (or ``round,e1,...``
for error traces) followed by one row per round.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .design import GraphSpec
from .errors import ParseError
from .field import PrimeField, is_prime
from .linalg import FpMatrix
from .sim import MeasurementGraph

SCHEMA_VERSION = 1


def _lines(text: str) -> list[tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped and not stripped.startswith("#"):
            out.append((lineno, stripped))
    return out


def _parse_header(lineno: int, line: str) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise ParseError("header must be 'n p'", lineno)
    try:
        n, p = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError("header values must be integers", lineno) from None
    if n < 1:
        raise ParseError("n must be positive", lineno)
    if not is_prime(p):
        raise ParseError(f"p = {p} is not prime", lineno)
    return n, p


def _parse_row(lineno: int, line: str, n: int, p: int) -> list[int]:
    parts = line.split()
    if len(parts) != n:
        raise ParseError(f"expected {n} entries, found {len(parts)}", lineno)
    row = []
    for s in parts:
        try:
            v = int(s)
        except ValueError:
            raise ParseError(f"non-integer entry {s!r}", lineno) from None
        if not (0 <= v < p):
            raise ParseError(f"entry {v} outside [0, {p - 1}]", lineno)
        row.append(v)
    return row


def parse_matrix(text: str) -> FpMatrix:
    lines = _lines(text)
    if not lines:
        raise ParseError("empty matrix file")
    n, p = _parse_header(*lines[0])
    if len(lines) != n + 1:
        raise ParseError(f"expected {n} matrix rows, found {len(lines) - 1}")
    rows = [_parse_row(lineno, line, n, p) for lineno, line in lines[1:]]
    return FpMatrix(PrimeField(p), rows)


def render_matrix(A: FpMatrix) -> str:
    out = [f"{A.rows} {A.field.p}"]
    for row in A.a:
        out.append(" ".join(str(int(v)) for v in row))
    return "\n".join(out) + "\n"


def parse_graph(text: str) -> tuple[GraphSpec, int]:
    """Edge-list graph file; returns (graph, p)."""
    lines = _lines(text)
    if not lines:
        raise ParseError("empty graph file")
    n, p = _parse_header(*lines[0])
    edges = []
    for lineno, line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("edge lines must be 'i j'", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError("edge endpoints must be integers", lineno) from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"edge ({i},{j}) out of range", lineno)
        edges.append((i, j))
    return GraphSpec.from_edges(n, edges), p


def render_graph(G: GraphSpec, p: int) -> str:
    out = [f"{G.n} {p}"]
    for i, j in sorted(G.edges):
        out.append(f"{i} {j}")
    return "\n".join(out) + "\n"


def parse_scenario(text: str):
    """Returns (matrix, x0, measurement graph or None, eta or None)."""
    lines = _lines(text)
    if not lines:
        raise ParseError("empty scenario file")
    n, p = _parse_header(*lines[0])
    if len(lines) < n + 2:
        raise ParseError("scenario must contain a matrix block and an initial state")
    field = PrimeField(p)
    rows = [_parse_row(lineno, line, n, p) for lineno, line in lines[1 : n + 1]]
    A = FpMatrix(field, rows)
    x0 = _parse_row(*lines[n + 1], n, p)
    mg = None
    eta = None
    rest = lines[n + 2 :]
    if rest:
        lineno, line = rest[0]
        try:
            m = int(line)
        except ValueError:
            raise ParseError("measurement block must start with the edge count", lineno) from None
        if len(rest) != m + 1:
            raise ParseError(f"expected {m} measurement lines, found {len(rest) - 1}")
        edges = []
        values = []
        for lineno, line in rest[1:]:
            parts = line.split()
            if len(parts) != 3:
                raise ParseError("measurement lines must be 'i j eta'", lineno)
            try:
                i, j, e = int(parts[0]), int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError("measurement values must be integers", lineno) from None
            if not (0 <= e < p):
                raise ParseError(f"eta {e} outside [0, {p - 1}]", lineno)
            edges.append((i, j))
            values.append(e)
        mg = MeasurementGraph.from_undirected(field, n, edges)
        order = {edge: k for k, edge in enumerate(mg.directed_edges)}
        eta_arr = np.zeros(mg.m, dtype=np.int64)
        for (i, j), e in zip(edges, values):
            key = (min(i, j), max(i, j))
            eta_arr[order[key]] = e if i < j else (-e) % p
        eta = eta_arr
    return A, x0, mg, eta


def trajectory_csv(states, prefix: str = "x") -> str:
    if not states:
        return ""
    n = len(states[0])
    header = "round," + ",".join(f"{prefix}{i + 1}" for i in range(n))
    rows = [header]
    for t, s in enumerate(states):
        rows.append(f"{t}," + ",".join(str(v) for v in s))
    return "\n".join(rows) + "\n"


def fraction_fields(x: Fraction) -> dict:
    return {"numerator": x.numerator, "denominator": x.denominator}


def report_json(kind: str, payload: dict) -> str:
    """Deterministic report serialization: fixed key order, no timestamps."""
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind, **payload}
    return json.dumps(doc, sort_keys=True, indent=2, default=_jsonable) + "\n"


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return fraction_fields(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)!r}")
