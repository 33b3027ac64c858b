"""Command line interface.

Exit status: 0 success, 1 verification failed, 2 usage or file format error,
and for search failures the ``exit_code`` of the raised error (see
:mod:`gridcodes.errors`).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import time
from fractions import Fraction

from . import engine
from .automaton import Caps
from .constraints import CodeKind, CodeSpec
from .errors import FormatError, GridCodeError
from .grid import PRESETS, GridModel, get_grid, parse_grid
from .mmc import Variant, WeightedDigraph, karp
from .periodic import FORMATS, dumps, loads
from .verifier import verify_code

log = logging.getLogger("gridcodes")

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def parse_vector(text: str) -> tuple[int, int]:
    try:
        x, y = (int(a) for a in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y integers, got {text!r}") from None
    return x, y


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected p/q, got {text!r}") from None


def resolve_grid(name: str) -> GridModel:
    "A preset name, or a path to a grid description file."
    base = name.split("~")[0]
    if base in PRESETS:
        return get_grid(name)
    if os.path.isfile(name):
        with open(name) as f:
            return parse_grid(f.read())
    raise UsageError(f"unknown grid {name!r}: not one of {sorted(PRESETS)} and not a file")


def _caps(args) -> Caps:
    caps = Caps()
    if args.max_nodes is not None:
        caps.max_nodes = args.max_nodes
    if args.max_edges is not None:
        caps.max_edges = args.max_edges
    if args.max_memory_gb is not None:
        caps.max_rss_bytes = int(args.max_memory_gb * (1 << 30))
    return caps


def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as f:
        return f.read()


def cmd_search(args) -> int:
    grid = resolve_grid(args.grid)
    spec = CodeSpec(CodeKind.parse(args.code), args.radius)
    req = engine.SearchRequest(grid, spec, args.period, Variant(args.variant), _caps(args), args.threads)
    res = engine.min_density(req)
    print(f"alpha = {engine.fmt_fraction(res.alpha)} ({engine.fmt_decimal(res.alpha)})")
    p, q = res.code.periods
    print(f"periods = {p[0]},{p[1]} {q[0]},{q[1]}")
    print(f"cycle length = {res.cycle_length}, automaton nodes = {res.nodes}, edges = {res.edges}")
    if args.out is not None or args.emit is not None:
        _write(dumps(res.code, args.emit or "json"), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    kw = dict(variant=Variant(args.variant), caps=_caps(args), threads=args.threads)
    if args.preset:
        preset = engine.load_preset(args.preset)
        if args.periods:
            preset = dict(preset, sweep=args.periods)
        reqs = engine.preset_requests(preset, **kw)
    else:
        if not (args.grid and args.code and args.periods):
            raise UsageError("sweep needs --preset, or --grid, --code and --periods")
        spec = CodeSpec(CodeKind.parse(args.code), args.radius)
        grid = resolve_grid(args.grid)
        reqs = [engine.SearchRequest(grid, spec, v, **kw) for v in args.periods]
    on_row = (lambda r: log.info("%s", json.dumps(r, sort_keys=True)))
    rows = engine.sweep(reqs, on_row)
    text = engine.report_jsonl(rows) if args.format == "jsonl" else engine.report_table(rows)
    _write(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    code = loads(_read(args.input))
    if args.code is not None or args.radius is not None:
        kind = CodeKind.parse(args.code) if args.code is not None else code.spec.kind
        code = code.with_spec(CodeSpec(kind, args.radius if args.radius is not None else code.spec.radius))
    grid = resolve_grid(code.grid)
    bad = verify_code(code, grid)
    d = code.density()
    status = EXIT_OK
    for v in bad[: args.max_report]:
        print(f"violation: {v}")
    if len(bad) > args.max_report:
        print(f"... {len(bad) - args.max_report} more")
    if bad:
        print(f"REJECTED as {code.spec} ({len(bad)} violations)")
        status = EXIT_REJECTED
    else:
        print(f"ACCEPTED as {code.spec}")
    print(f"density = {engine.fmt_fraction(d)} ({engine.fmt_decimal(d)})")
    if args.expect_density is not None and d != args.expect_density:
        print(f"density mismatch: expected {engine.fmt_fraction(args.expect_density)}")
        status = EXIT_REJECTED
    return status


def cmd_emit(args) -> int:
    code = loads(_read(args.input))
    _write(dumps(code, args.format), args.out)
    return EXIT_OK


def random_graph(n: int, avg_degree: int, max_weight: int, seed: int) -> WeightedDigraph:
    "A Hamiltonian cycle plus random chords, so every node is on a cycle."
    rng = random.Random(seed)
    edges = [(i, (i + 1) % n, rng.randint(0, max_weight)) for i in range(n)]
    for _ in range(n * (avg_degree - 1)):
        edges.append((rng.randrange(n), rng.randrange(n), rng.randint(0, max_weight)))
    return WeightedDigraph(n, edges, 0)


def cmd_bench(args) -> int:
    if args.graph:
        g = WeightedDigraph.loads(_read(args.graph))
    else:
        g = random_graph(args.n, args.degree, 9, args.seed)
    variants = [Variant(v) for v in args.variant] if args.variant else list(Variant)
    for var in variants:
        t0 = time.perf_counter()
        res = karp(g, var, args.threads)
        dt = time.perf_counter() - t0
        ws = res.workspace
        print(json.dumps({
            "variant": var.value, "n": g.n, "edges": g.num_edges, "threads": args.threads,
            "alpha": engine.fmt_fraction(res.alpha), "seconds": round(dt, 3),
            "peak_entries": ws.peak, "peak_state_entries": ws.peak_state,
            "cycle_length": None if res.cycle is None else len(res.cycle) - 1,
        }, sort_keys=True))
    return EXIT_OK


def cmd_presets(args) -> int:
    for name in engine.list_presets():
        p = engine.load_preset(name)
        print(f"{name:16s} {p['grid']:11s} {p['code']:12s} r={p['radius']}  {p['description']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gridcodes", description="Exact minimum densities of periodic codes on grids.")
    ap.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def search_opts(p):
        p.add_argument("--variant", choices=[v.value for v in Variant], default="sqrt",
                       help="Karp variant: quad(ratic), linear or sqrt space (default sqrt)")
        p.add_argument("--max-nodes", type=int, default=None, help="automaton node cap (default 200000)")
        p.add_argument("--max-edges", type=int, default=None, help="automaton edge cap (default 5000000)")
        p.add_argument("--max-memory-gb", type=float, default=None,
                       help="resident memory cap for the build and Karp tables (default 4)")
        p.add_argument("--threads", type=int, default=engine.default_threads(),
                       help=f"worker threads (default ${engine.THREADS_ENV} or 1)")

    p = sub.add_parser("search", help="minimum density for one period vector")
    p.add_argument("--grid", default="hex", help="hex, square, king, triangular or a grid file")
    p.add_argument("--code", default="identifying", help="identifying, ld or rld")
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--period", type=parse_vector, required=True,
                   help="X,Y; write --period=-1,2 when X is negative")
    p.add_argument("--emit", choices=sorted(FORMATS), default=None, help="witness format (default json)")
    p.add_argument("--out", default=None, help="write the witness code here")
    search_opts(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("sweep", help="run a list of periods and print a report")
    p.add_argument("--preset", default=None, help="one of the bundled presets (see 'presets')")
    p.add_argument("--grid", default=None)
    p.add_argument("--code", default=None)
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--periods", type=parse_vector, nargs="+", default=None, metavar="X,Y")
    p.add_argument("--format", choices=["table", "jsonl"], default="table")
    p.add_argument("--out", default=None)
    search_opts(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="check a code file against the definitions")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--expect-density", type=parse_fraction, default=None, metavar="P/Q")
    p.add_argument("--code", default=None, help="check as this code kind instead of the file's")
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--max-report", type=int, default=20)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("emit", help="convert a code file to another format")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=sorted(FORMATS), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("bench", help="time the Karp variants")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--graph", default=None, help="edge-list file instead of a random graph")
    p.add_argument("--variant", action="append", choices=[v.value for v in Variant])
    p.add_argument("--threads", type=int, default=engine.default_threads())
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("presets", help="list bundled problem presets")
    p.set_defaults(func=cmd_presets)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        ap.error(str(e))
    except (FormatError, KeyError, ValueError, OSError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"gridcodes: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except GridCodeError as e:
        print(f"gridcodes: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
