"""Minimum mean weight cycles with Karp's algorithm.

Three space variants share one relaxation kernel:

* ``QUADRATIC`` keeps the whole table of walk weights and predecessors.
* ``LINEAR`` keeps a handful of length-n arrays and recomputes the table once;
  it returns the optimal mean and a witness node but no cycle.
* ``SQRT`` keeps about sqrt(n) checkpoint rows, recomputes the table twice and
  rebuilds the optimal length-n walk segment by segment.

Weights are nonnegative integers; every comparison of means is done by exact
integer cross-multiplication.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import FormatError, NoCycle, ResourceLimit

INF = np.iinfo(np.int64).max // 4
_LIMIT = np.iinfo(np.int64).max // 2


class Variant(enum.Enum):
    QUADRATIC = "quad"
    LINEAR = "linear"
    SQRT = "sqrt"


class WeightedDigraph:
    """Directed multigraph with nonnegative integer edge weights and a start node.

    Edges are kept sorted by (target, source, weight), which is the order the
    relaxation kernel wants.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int, int]], start: int = 0):
        arr = np.array(list(edges), dtype=np.int64).reshape(-1, 3)
        if n <= 0:
            raise ValueError("graph needs at least one node")
        if not 0 <= start < n:
            raise ValueError(f"start node {start} out of range")
        if len(arr) and (arr[:, :2].min() < 0 or arr[:, :2].max() >= n):
            raise ValueError("edge endpoint out of range")
        if len(arr) and arr[:, 2].min() < 0:
            raise ValueError("edge weights must be nonnegative")
        order = np.lexsort((arr[:, 2], arr[:, 0], arr[:, 1]))
        arr = arr[order]
        self.n = n
        self.start = start
        self.src = np.ascontiguousarray(arr[:, 0])
        self.dst = np.ascontiguousarray(arr[:, 1])
        self.w = np.ascontiguousarray(arr[:, 2])

    @classmethod
    def from_adjacency(cls, adj: list[list[tuple[int, int]]], start: int = 0) -> WeightedDigraph:
        return cls(len(adj), ((u, v, w) for u, out in enumerate(adj) for v, w in out), start)

    @property
    def num_edges(self) -> int:
        return len(self.src)

    @property
    def max_weight(self) -> int:
        return int(self.w.max()) if len(self.w) else 0

    def edges(self) -> list[tuple[int, int, int]]:
        return list(zip(self.src.tolist(), self.dst.tolist(), self.w.tolist()))

    def adjacency(self) -> list[dict[int, int]]:
        "Per node: successor -> minimum weight over parallel edges."
        adj: list[dict[int, int]] = [{} for _ in range(self.n)]
        for u, v, w in self.edges():
            if v not in adj[u] or w < adj[u][v]:
                adj[u][v] = w
        return adj

    def edge_weight(self, u: int, v: int) -> int:
        lo, hi = np.searchsorted(self.dst, [v, v + 1])
        ws = self.w[lo:hi][self.src[lo:hi] == u]
        if not len(ws):
            raise KeyError(f"no edge {u} -> {v}")
        return int(ws.min())

    def walk_weight(self, walk: list[int]) -> int:
        return sum(self.edge_weight(a, b) for a, b in zip(walk, walk[1:]))

    def reachable(self, reverse: bool = False) -> np.ndarray:
        "Boolean mask of nodes reachable from (or, with ``reverse``, reaching) the start."
        a, b = (self.dst, self.src) if reverse else (self.src, self.dst)
        order = np.argsort(a, kind="stable")
        a, b = a[order], b[order]
        bounds = np.searchsorted(a, np.arange(self.n + 1))
        seen = np.zeros(self.n, dtype=bool)
        seen[self.start] = True
        stack = [self.start]
        while stack:
            u = stack.pop()
            for v in b[bounds[u]:bounds[u + 1]].tolist():
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        return seen

    def is_strongly_connected(self) -> bool:
        return bool(self.reachable().all() and self.reachable(reverse=True).all())

    def dumps(self) -> str:
        "Edge-list text: header ``n s``, then one ``from to weight`` line per edge."
        lines = [f"{self.n} {self.start}"]
        lines += [f"{u} {v} {w}" for u, v, w in self.edges()]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> WeightedDigraph:
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        try:
            n, s = map(int, rows[0])
            edges = [tuple(map(int, r)) for r in rows[1:]]
            if any(len(e) != 3 for e in edges):
                raise ValueError("edge lines need three fields")
            return cls(n, edges, s)
        except (ValueError, IndexError) as e:
            raise FormatError(f"bad edge list: {e}") from None


@dataclass
class Workspace:
    """Counts numeric entries held by the kernel's arrays.

    Every array the algorithm keeps between relaxation steps, and the per-step
    scratch buffers, are allocated through here so that peak usage can be
    asserted in tests.
    """

    live: int = 0
    peak: int = 0
    live_state: int = 0
    peak_state: int = 0
    max_bytes: int | None = None
    _sizes: dict = field(default_factory=dict)
    _bytes: int = 0

    def alloc(self, shape, dtype=np.int64, fill=None, scratch=False) -> np.ndarray:
        nbytes = int(np.prod(shape)) * np.dtype(dtype).itemsize
        if self.max_bytes is not None and self._bytes + nbytes > self.max_bytes:
            raise ResourceLimit("kernel memory", self.max_bytes)
        try:
            arr = np.empty(shape, dtype=dtype) if fill is None else np.full(shape, fill, dtype=dtype)
        except MemoryError:
            raise ResourceLimit("kernel memory", self.max_bytes) from None
        self._bytes += nbytes
        self._sizes[id(arr)] = (arr.size, scratch)
        self.live += arr.size
        self.peak = max(self.peak, self.live)
        if not scratch:
            self.live_state += arr.size
            self.peak_state = max(self.peak_state, self.live_state)
        return arr

    def free(self, *arrays):
        for arr in arrays:
            size, scratch = self._sizes.pop(id(arr))
            self.live -= size
            self._bytes -= arr.nbytes
            if not scratch:
                self.live_state -= size


@dataclass
class MeanCycleResult:
    alpha: Fraction
    witness: int
    cycle: list[int] | None = None
    path: list[int] | None = field(default=None, repr=False)
    workspace: Workspace | None = field(default=None, repr=False)


class _Kernel:
    """One Bellman-Ford style step ``F_k(v) = min_w F_{k-1}(w) + weight(w, v)``.

    Edges are processed in chunks of at most ~n entries so scratch memory stays
    linear in the node count.
    """

    def __init__(self, g: WeightedDigraph, ws: Workspace, threads: int = 1):
        self.g = g
        self.ws = ws
        n = g.n
        targets, starts, counts = np.unique(g.dst, return_index=True, return_counts=True)
        self.targets = targets
        self.starts = starts
        cap = max(n, int(counts.max()) if len(counts) else 1)
        # chunk boundaries in group units, each chunk spanning <= cap edges
        chunks = []
        lo = 0
        ends = starts + counts
        while lo < len(targets):
            hi = int(np.searchsorted(ends, starts[lo] + cap, side="right"))
            hi = max(hi, lo + 1)
            chunks.append((lo, hi))
            lo = hi
        self.chunks = chunks
        self.cap = cap
        self.threads = max(1, threads)
        self._pool = ThreadPoolExecutor(self.threads) if self.threads > 1 and len(chunks) > 1 else None
        self._scratch = [(ws.alloc(cap, scratch=True), ws.alloc(cap, scratch=True))
                         for _ in range(min(self.threads, max(1, len(chunks))))]
        if n * max(g.max_weight, 1) * (n + 1) >= _LIMIT:
            raise OverflowError("walk weights could overflow 64-bit cross-multiplication")

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
        for a, b in self._scratch:
            self.ws.free(a, b)
        self._scratch = []

    def _run_chunk(self, lo, hi, slot, prev, out, pred):
        g = self.g
        e_lo = int(self.starts[lo])
        e_hi = int(self.starts[hi]) if hi < len(self.starts) else len(g.src)
        m = e_hi - e_lo
        cand_buf, min_buf = self._scratch[slot]
        cand = cand_buf[:m]
        np.take(prev, g.src[e_lo:e_hi], out=cand)
        np.add(cand, g.w[e_lo:e_hi], out=cand)
        np.minimum(cand, INF, out=cand)
        local_starts = self.starts[lo:hi] - e_lo
        mins = min_buf[:hi - lo]
        np.minimum.reduceat(cand, local_starts, out=mins)
        tg = self.targets[lo:hi]
        out[tg] = mins
        if pred is not None:
            # lowest-index predecessor attaining the minimum (edges sorted by source)
            hit = np.flatnonzero(cand == np.repeat(mins, np.diff(np.append(local_starts, m))))
            grp = np.searchsorted(local_starts, hit, side="right") - 1
            first = np.flatnonzero(np.diff(np.append(-1, grp)))
            pred[tg[grp[first]]] = g.src[e_lo + hit[first]]
            pred[tg[mins >= INF]] = -1

    def step(self, prev: np.ndarray, out: np.ndarray, pred: np.ndarray | None = None):
        out.fill(INF)
        if pred is not None:
            pred.fill(-1)
        if self._pool is None:
            for lo, hi in self.chunks:
                self._run_chunk(lo, hi, 0, prev, out, pred)
        else:
            nslots = len(self._scratch)
            batches = [self.chunks[i::nslots] for i in range(nslots)]

            def work(slot):
                for lo, hi in batches[slot]:
                    self._run_chunk(lo, hi, slot, prev, out, pred)

            list(self._pool.map(work, range(nslots)))


def _init_row(row: np.ndarray, start: int):
    row.fill(INF)
    row[start] = 0


class _RunningMax:
    "Per node running maximum of (F_n(v) - F_k(v)) / (n - k), as num/den arrays."

    def __init__(self, n: int, ws: Workspace):
        self.num = ws.alloc(n, fill=0)
        self.den = ws.alloc(n, fill=0)  # 0 marks "no finite term yet"

    def update(self, fn: np.ndarray, fk: np.ndarray, steps: int):
        ok = (fk < INF) & (fn < INF)
        num = fn - fk
        better = ok & ((self.den == 0) | (num * self.den > self.num * steps))
        self.num[better] = num[better]
        self.den[better] = steps

    def argmin(self, fn: np.ndarray) -> tuple[Fraction, int]:
        return _argmin_ratio(self.num, self.den, fn)


def _argmin_ratio(num, den, fn) -> tuple[Fraction, int]:
    best = None
    best_v = -1
    for v in np.flatnonzero((fn < INF) & (den > 0)).tolist():
        a, b = int(num[v]), int(den[v])
        if best is None or a * best[1] < best[0] * b:
            best = (a, b)
            best_v = v
    if best is None:
        raise NoCycle("no cycle is reachable from the start node")
    return Fraction(*best), best_v


def _cycle_in_path(path: list[int]) -> list[int]:
    "First closed subwalk of ``path`` (a simple cycle), as ``[v0, ..., v0]``."
    seen: dict[int, int] = {}
    for j, v in enumerate(path):
        if v in seen:
            return path[seen[v]: j + 1]
        seen[v] = j
    raise NoCycle("path has no repeated node")


def _karp_quadratic(g, ws, kernel):
    n = g.n
    F = ws.alloc((n + 1, n))
    pred = ws.alloc((n + 1, n), dtype=np.int32)
    _init_row(F[0], g.start)
    pred[0].fill(-1)
    for k in range(1, n + 1):
        kernel.step(F[k - 1], F[k], pred[k])
    rm = _RunningMax(n, ws)
    for k in range(n):
        rm.update(F[n], F[k], n - k)
    alpha, v = rm.argmin(F[n])
    path = [v]
    for k in range(n, 0, -1):
        path.append(int(pred[k][path[-1]]))
    path.reverse()
    ws.free(F, pred, rm.num, rm.den)
    return alpha, v, path


def _karp_linear(g, ws, kernel):
    n = g.n
    a = ws.alloc(n)
    b = ws.alloc(n)
    _init_row(a, g.start)
    for _ in range(n):
        kernel.step(a, b)
        a, b = b, a
    fn = ws.alloc(n)
    fn[:] = a
    rm = _RunningMax(n, ws)
    _init_row(a, g.start)
    for k in range(n):
        rm.update(fn, a, n - k)
        kernel.step(a, b)
        a, b = b, a
    alpha, v = rm.argmin(fn)
    ws.free(a, b, fn, rm.num, rm.den)
    return alpha, v, None


def checkpoints(n: int) -> list[int]:
    "Indices 0 = n(1) < ... = n with consecutive gaps at most ceil(sqrt(n))."
    m = math.isqrt(n - 1) + 1 if n > 1 else 1
    ks = list(range(0, n, m))
    ks.append(n)
    return ks


def _karp_sqrt(g, ws, kernel):
    n = g.n
    ks = checkpoints(n)
    m = max(b - a for a, b in zip(ks, ks[1:]))
    row_of = {k: i for i, k in enumerate(ks)}
    A = ws.alloc((len(ks), n))
    cur = ws.alloc(n)
    nxt = ws.alloc(n)
    # first pass: checkpoint rows
    _init_row(cur, g.start)
    A[0] = cur
    for k in range(1, n + 1):
        kernel.step(cur, nxt)
        cur, nxt = nxt, cur
        if k in row_of:
            A[row_of[k]] = cur
    fn = A[-1]
    # second pass: the optimal mean and its witness
    rm = _RunningMax(n, ws)
    _init_row(cur, g.start)
    for k in range(n):
        rm.update(fn, cur, n - k)
        kernel.step(cur, nxt)
        cur, nxt = nxt, cur
    alpha, v = rm.argmin(fn)
    ws.free(rm.num, rm.den)
    # backward reconstruction, one checkpoint segment at a time
    B = ws.alloc((m, n), dtype=np.int32)
    rev = [v]
    for i in range(len(ks) - 1, 0, -1):
        lo, hi = ks[i - 1], ks[i]
        cur[:] = A[i - 1]
        for k in range(lo + 1, hi + 1):
            kernel.step(cur, nxt, B[k - lo - 1])
            cur, nxt = nxt, cur
        for k in range(hi, lo, -1):
            rev.append(int(B[k - lo - 1][rev[-1]]))
    rev.reverse()
    ws.free(A, B, cur, nxt)
    return alpha, v, rev


def karp(g: WeightedDigraph, variant: Variant = Variant.QUADRATIC, threads: int = 1,
         max_bytes: int | None = None) -> MeanCycleResult:
    """Minimum mean edge weight over cycles reachable from ``g.start``.

    ``QUADRATIC`` and ``SQRT`` also return a minimum mean cycle cut from the
    optimal length-n walk to the witness node; ``LINEAR`` does not.
    """
    variant = Variant(variant)
    ws = Workspace(max_bytes=max_bytes)
    kernel = _Kernel(g, ws, threads)
    try:
        run = {Variant.QUADRATIC: _karp_quadratic, Variant.LINEAR: _karp_linear,
               Variant.SQRT: _karp_sqrt}[variant]
        alpha, v, path = run(g, ws, kernel)
    finally:
        kernel.close()
    cycle = _cycle_in_path(path) if path is not None else None
    return MeanCycleResult(alpha, v, cycle, path, ws)


def karp_sqrt_reconstruct(g: WeightedDigraph, threads: int = 1, max_bytes: int | None = None) -> MeanCycleResult:
    return karp(g, Variant.SQRT, threads, max_bytes)


def cycle_mean(g: WeightedDigraph, cycle: list[int]) -> Fraction:
    return Fraction(g.walk_weight(cycle), len(cycle) - 1)


def oracle_min_mean(g: WeightedDigraph) -> Fraction:
    """Exhaustive minimum over simple cycles among nodes reachable from the start.

    Exponential; meant for graphs with at most a dozen nodes.
    """
    if g.n > 12:
        raise ValueError("oracle_min_mean is limited to 12 nodes")
    adj = g.adjacency()
    reach = g.reachable()
    best: Fraction | None = None

    def extend(root, v, weight, length, on_path):
        nonlocal best
        for u, w in adj[v].items():
            if u == root:
                mean = Fraction(weight + w, length + 1)
                if best is None or mean < best:
                    best = mean
            elif u > root and u not in on_path:
                on_path.add(u)
                extend(root, u, weight + w, length + 1, on_path)
                on_path.remove(u)

    for root in range(g.n):
        if reach[root]:
            extend(root, root, 0, 0, {root})
    if best is None:
        raise NoCycle("no cycle is reachable from the start node")
    return best
