"""Search pipeline: clauses, strip automaton, minimum mean cycle, witness code.

``min_density`` answers one request exactly; ``sweep`` runs a list of them and
collects a report in which failures are rows rather than exceptions.
"""

from __future__ import annotations

import json
import os
from importlib import resources
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .automaton import Automaton, Caps, build
from .constraints import CodeKind, CodeSpec, generate_clauses
from .errors import GridCodeError, WitnessError
from .grid import Cell, GridModel, get_grid, mirror_cell, normalize_period
from .mmc import Variant, karp
from .periodic import PeriodicCode
from .verifier import verify_code

THREADS_ENV = "GRIDCODES_THREADS"


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class SearchRequest:
    grid: str | GridModel
    spec: CodeSpec
    period: Cell
    variant: Variant = Variant.SQRT
    caps: Caps = field(default_factory=Caps)
    threads: int = 1
    verify: bool = True

    def grid_model(self) -> GridModel:
        return self.grid if isinstance(self.grid, GridModel) else get_grid(self.grid)

    def describe(self) -> str:
        name = self.grid.name if isinstance(self.grid, GridModel) else self.grid
        return f"{name} {self.spec} v={self.period[0]},{self.period[1]}"


@dataclass
class SearchResult:
    alpha: Fraction
    code: PeriodicCode
    cycle_length: int
    nodes: int
    edges: int
    seconds: float
    mirrored: bool = False
    mean: Fraction | None = None  # raw Karp mean, before dividing by the strip size


def strip_value(auto: Automaton, pats: list[int], cell: Cell) -> int:
    """Value of ``cell`` in the configuration read by the cyclic pattern list.

    Strip ``k`` is the border shifted by ``(k*W, 0)``; a cell is located by
    its row within the period and its column offset from the border.
    """
    b = auto.border
    W = b.width
    col = b.column(cell)
    k, i = divmod(col, W)
    j = cell[1] % b.v[1]
    return pats[k % len(pats)] >> (j * W + i) & 1


def assemble(auto: Automaton, cycle: list[int]) -> list[int]:
    "The strip patterns along a closed walk ``[c0, c1, ..., c0]``."
    return [auto.patterns[(u, t)] for u, t in zip(cycle, cycle[1:])]


def min_density(req: SearchRequest) -> SearchResult:
    """Minimum density over all codes periodic along ``req.period``.

    Returns the exact value together with a totally periodic witness with
    periods ``v`` and ``(L*W, 0)`` for the cycle length ``L``.
    """
    t0 = time.perf_counter()
    grid = req.grid_model()
    norm = normalize_period(grid, req.period)
    g, v = norm.grid, norm.vector
    family = generate_clauses(g, req.spec)
    auto = build(g, family, v, req.caps)
    res = karp(auto.graph, req.variant, req.threads, req.caps.max_rss_bytes)
    if res.cycle is None:
        # the linear-space pass gives only the value; rerun a variant that keeps a path
        again = karp(auto.graph, Variant.SQRT, req.threads, req.caps.max_rss_bytes)
        assert again.alpha == res.alpha
        res.cycle = again.cycle
    size = auto.border.size
    alpha = res.alpha / size
    pats = assemble(auto, res.cycle)
    L = len(pats)
    W = auto.border.width

    if norm.mirrored:
        value = lambda c: strip_value(auto, pats, mirror_cell(c))  # noqa: E731
        vv = mirror_cell(v)
    else:
        value = lambda c: strip_value(auto, pats, c)  # noqa: E731
        vv = v
    code = PeriodicCode.from_function(grid.name, req.spec, (vv, (L * W, 0)), value)
    if req.verify:
        bad = verify_code(code, grid)
        if bad:
            raise WitnessError(f"witness for {req.describe()} fails: {bad[0]}")
        if code.density() != alpha:
            raise WitnessError(f"witness density {code.density()} differs from {alpha}")
    return SearchResult(alpha, code, L, auto.graph.n, auto.graph.num_edges,
                        time.perf_counter() - t0, norm.mirrored, res.alpha)


def list_presets() -> list[str]:
    root = resources.files("gridcodes") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> dict:
    "A problem preset: grid, code kind, radius and a list of sweep periods."
    path = resources.files("gridcodes") / "presets" / f"{name}.json"
    if not path.is_file():
        raise KeyError(f"unknown preset {name!r}; choose from {list_presets()}")
    return json.loads(path.read_text())


def preset_requests(preset: dict, **kw) -> list[SearchRequest]:
    spec = CodeSpec(CodeKind.parse(preset["code"]), int(preset["radius"]))
    return [SearchRequest(preset["grid"], spec, tuple(v), **kw) for v in preset["sweep"]]


def fmt_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def fmt_decimal(q: Fraction) -> str:
    return f"{float(q):.7g}"


def sweep(requests: list[SearchRequest], on_row=None) -> list[dict]:
    """Run requests one after another; every request yields exactly one row.

    Library errors (resource caps, bad periods, ...) are recorded in the row's
    ``status`` field instead of stopping the sweep.
    """
    rows = []
    for req in requests:
        name = req.grid.name if isinstance(req.grid, GridModel) else req.grid
        row = {
            "grid": name,
            "code": req.spec.kind.value,
            "radius": req.spec.radius,
            "period": list(req.period),
        }
        t0 = time.perf_counter()
        try:
            r = min_density(req)
        except GridCodeError as e:
            row.update(status=type(e).__name__, message=str(e), seconds=round(time.perf_counter() - t0, 3))
        else:
            row.update(status="ok", alpha=fmt_fraction(r.alpha), decimal=fmt_decimal(r.alpha),
                       cycle_length=r.cycle_length, nodes=r.nodes, edges=r.edges, seconds=round(r.seconds, 3))
        rows.append(row)
        if on_row is not None:
            on_row(row)
    return rows


def report_jsonl(rows: list[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)


def report_table(rows: list[dict]) -> str:
    cols = ["grid", "code", "radius", "period", "status", "alpha", "decimal", "cycle_length", "nodes", "seconds"]
    cells = [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    line = lambda xs: "  ".join(x.ljust(w) for x, w in zip(xs, widths)).rstrip()  # noqa: E731
    return "\n".join([line(cols)] + [line(r) for r in cells]) + "\n"


def _cell(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, list):
        return ",".join(map(str, x))
    return str(x)

