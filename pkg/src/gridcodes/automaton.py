"""Strip automaton for v-periodic configurations.

A v-periodic configuration is read one slanted strip at a time. The border of
one period consists of the cells ``(s_j + i, j)`` for ``0 <= j < y`` and
``0 <= i < W`` where ``s_j = ceil(j*x/y)`` and ``W`` is the grid's step width.
A node is the v-periodic set of clause translates that have been started but
not yet satisfied, each with its remaining codeword count. Reading a strip
pattern ``P`` discounts the ones of ``P`` from every pending clause, drops
satisfied clauses, shifts the rest by ``(-W, 0)`` and rejects the edge if some
clause can no longer collect enough codewords to its right.
"""

from __future__ import annotations

import logging
import resource
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .constraints import ClauseFamily
from .errors import ResourceLimit
from .grid import Cell, GridModel, ceil_div
from .mmc import WeightedDigraph

log = logging.getLogger(__name__)

# (class id, anchor x, anchor y with 0 <= y < v.y, remaining)
Pending = tuple[int, int, int, int]
Node = tuple[Pending, ...]

C0: Node = ()


@dataclass(frozen=True)
class Border:
    v: Cell
    width: int

    def s(self, j: int) -> int:
        x, y = self.v
        return ceil_div(j * x, y)

    @property
    def size(self) -> int:
        return self.width * self.v[1]

    def cells(self) -> list[Cell]:
        "Border cells of one period, in bit order (row-major)."
        return [(self.s(j) + i, j) for j in range(self.v[1]) for i in range(self.width)]

    def column(self, cell: Cell) -> int:
        "Horizontal offset of ``cell`` from the border in its row."
        x, y = self.v
        cx, cy = cell
        j = cy % y
        q = (cy - j) // y
        return cx - q * x - self.s(j)

    def bit(self, cell: Cell) -> int:
        "Bit index of a cell lying on the border (any period copy)."
        x, y = self.v
        j = cell[1] % y
        return j * self.width + self.column(cell)


def border_frontier(grid: GridModel, v: Cell) -> Border:
    return Border(v, grid.step_width)


@dataclass
class Caps:
    max_nodes: int = 200_000
    max_edges: int = 5_000_000
    max_rss_bytes: int = 4 << 30
    max_border_bits: int = 24


class StripContext:
    "Everything about (grid, family, v) that the step function needs, precomputed."

    def __init__(self, grid: GridModel, family: ClauseFamily, v: Cell):
        self.grid = grid
        self.family = family
        self.v = v
        self.border = border_frontier(grid, v)
        self.W = self.border.width
        self.offsets = []
        self.thresholds = []
        self.anchor_reps = []
        for cls in family.classes:
            ax, ay = cls.anchor
            self.offsets.append(tuple((cx - ax, cy - ay) for cx, cy in cls.cells))
            self.thresholds.append(cls.threshold)
            self.anchor_reps.append(grid.coset_of(cls.anchor)[0])
        self._geom: dict[tuple[int, int, int], tuple[int, int]] = {}
        self.incoming = self._incoming()

    def cells(self, cid: int, ax: int, ay: int) -> list[Cell]:
        return [(ax + dx, ay + dy) for dx, dy in self.offsets[cid]]

    def geometry(self, cid: int, ax: int, ay: int) -> tuple[tuple[int, ...], int]:
        """``(layers, right)`` for a translate.

        ``layers[l]`` is the set of border bits covered by more than ``l`` of
        its cells (a tall clause can meet several v-copies of one border cell),
        so the number of codeword cells seen under pattern P is the sum of
        ``popcount(P & layer)``. ``right`` counts cells strictly right of the
        border strip.
        """
        key = (cid, ax, ay)
        g = self._geom.get(key)
        if g is None:
            mult: dict[int, int] = {}
            right = 0
            for c in self.cells(cid, ax, ay):
                col = self.border.column(c)
                if col >= self.W:
                    right += 1
                elif col >= 0:
                    b = self.border.bit(c)
                    mult[b] = mult.get(b, 0) + 1
            layers = []
            for level in range(max(mult.values(), default=0)):
                layers.append(sum(1 << b for b, k in mult.items() if k > level))
            g = self._geom[key] = (tuple(layers), right)
        return g

    def _incoming(self) -> list[Pending]:
        """Translates meeting the border and lying in ``{(i, j): i >= s_j}``,
        one per v-orbit (anchor row in ``[0, y)``)."""
        out = []
        x, y = self.v
        for cid, offs in enumerate(self.offsets):
            for ay in range(y):
                lo = -min(self.border.column((dx, ay + dy)) for dx, dy in offs)
                for ax in range(lo, lo + self.W):
                    if self.grid.coset_of((ax, ay))[0] == self.anchor_reps[cid]:
                        out.append((cid, ax, ay, self.thresholds[cid]))
        out.sort()
        return out


def incoming_clause_translates(ctx: StripContext) -> list[Pending]:
    return list(ctx.incoming)


def step(node: Node, pattern: int, ctx: StripContext) -> Node | None:
    """Successor of ``node`` after reading ``pattern`` on the border, or None
    when some pending clause would drift past the border unsatisfied.

    Written directly from cell coordinates; the builder uses a vectorized
    equivalent and this function serves as its reference.
    """
    border = ctx.border
    W = ctx.W
    out = []
    for cid, ax, ay, rem in list(node) + ctx.incoming:
        cells = ctx.cells(cid, ax, ay)
        ones = sum(1 for c in cells if 0 <= border.column(c) < W and pattern >> border.bit(c) & 1)
        rem -= ones
        if rem <= 0:
            continue
        shifted = [(cx - W, cy) for cx, cy in cells]
        ahead = sum(1 for c in shifted if border.column(c) >= 0)
        behind = any(border.column(c) <= W - 1 for c in shifted)
        if ahead < rem or not behind:
            return None
        out.append((cid, ax - W, ay, rem))
    return tuple(sorted(out))


@dataclass
class Automaton:
    ctx: StripContext
    nodes: list[Node]
    graph: WeightedDigraph
    patterns: dict[tuple[int, int], int] = field(repr=False)

    @property
    def border(self) -> Border:
        return self.ctx.border

    @property
    def start(self) -> int:
        return self.graph.start

    def dumps_nodes(self) -> str:
        "Sidecar node table: one line per node index, pending clauses as cid:ax,ay:rem."
        lines = []
        for i, node in enumerate(self.nodes):
            lines.append(f"{i} " + " ".join(f"{c}:{ax},{ay}:{r}" for c, ax, ay, r in node))
        return "\n".join(lines) + "\n"


def _count(pats: np.ndarray, layers: np.ndarray) -> np.ndarray:
    "Codeword cells per (clause, pattern): layers has shape (clauses, depth)."
    out = np.zeros((layers.shape[0], len(pats)), dtype=np.int64)
    for level in range(layers.shape[1]):
        out += np.bitwise_count(pats[None, :] & layers[:, level, None])
    return out


def _valid_patterns(layers: np.ndarray, need: np.ndarray, nbits: int, cap: int) -> np.ndarray:
    """All patterns giving clause ``k`` at least ``need[k]`` codeword cells on
    the border. Bits are fixed in order; a partial pattern is dropped as soon
    as some clause can no longer reach its quota from the bits left."""
    pats = np.zeros(1, dtype=np.uint64)
    hot = need > 0
    layers = layers[hot]
    need = need[hot]
    for b in range(nbits):
        pats = np.concatenate([pats, pats | np.uint64(1 << b)])
        if len(layers):
            rest = np.uint64(((1 << nbits) - 1) ^ ((1 << (b + 1)) - 1))
            could = np.bitwise_count(layers & rest).astype(np.int64).sum(axis=1)
            ok = (_count(pats, layers) + could[:, None] >= need[:, None]).all(axis=0)
            pats = pats[ok]
        if len(pats) > cap:
            raise ResourceLimit("patterns", cap)
    return pats


def _successors(node: Node, ctx: StripContext, cap: int):
    """Yield ``(successor, weight, pattern)``, keeping for each successor the
    lightest pattern (ties: smallest pattern as an integer)."""
    pending = list(node) + ctx.incoming
    nbits = ctx.border.size
    geo = [ctx.geometry(c, ax, ay) for c, ax, ay, _ in pending]
    depth = max((len(g[0]) for g in geo), default=0)
    layers = np.zeros((len(pending), max(depth, 1)), dtype=np.uint64)
    for k, (ls, _) in enumerate(geo):
        layers[k, :len(ls)] = ls
    right = np.array([g[1] for g in geo], dtype=np.int64)
    rem = np.array([p[3] for p in pending], dtype=np.int64)
    pats = _valid_patterns(layers, rem - right, nbits, cap)
    if not len(pats):
        return
    hits = np.minimum(_count(pats, layers), rem[:, None])
    weights = np.bitwise_count(pats).astype(np.int64)
    keys, inverse = np.unique(hits, axis=1, return_inverse=True)
    inverse = inverse.reshape(-1)
    # lightest pattern per distinct successor
    order = np.lexsort((pats, weights, inverse))
    first = order[np.flatnonzero(np.diff(np.append(-1, inverse[order])))]
    W = ctx.W
    for col, idx in enumerate(first.tolist()):
        left = rem - keys[:, col]
        succ = tuple(sorted((p[0], p[1] - W, p[2], int(r)) for p, r in zip(pending, left.tolist()) if r > 0))
        yield succ, int(weights[idx]), int(pats[idx])


def _rss() -> int:
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024


def build(grid: GridModel, family: ClauseFamily, v: Cell, caps: Caps | None = None) -> Automaton:
    """Breadth-first closure of the automaton from the empty node.

    Node indices follow first discovery; successors are visited in a fixed
    order, so the result is reproducible. Parallel edges are collapsed to
    their minimum weight.
    """
    caps = caps or Caps()
    ctx = StripContext(grid, family, v)
    if ctx.border.size > caps.max_border_bits:
        raise ResourceLimit("border bits", caps.max_border_bits)
    index: dict[Node, int] = {C0: 0}
    nodes: list[Node] = [C0]
    edges: list[tuple[int, int, int]] = []
    patterns: dict[tuple[int, int], int] = {}
    queue = deque([0])
    pattern_cap = max(1 << 16, 1 << min(ctx.border.size, 22))
    while queue:
        u = queue.popleft()
        for succ, w, pat in _successors(nodes[u], ctx, pattern_cap):
            t = index.get(succ)
            if t is None:
                t = index[succ] = len(nodes)
                nodes.append(succ)
                if len(nodes) > caps.max_nodes:
                    raise ResourceLimit("nodes", caps.max_nodes)
                queue.append(t)
            edges.append((u, t, w))
            patterns[(u, t)] = pat
            if len(edges) > caps.max_edges:
                raise ResourceLimit("edges", caps.max_edges)
        if u % 2048 == 2047:
            log.info("automaton: %d nodes, %d edges, %d queued", len(nodes), len(edges), len(queue))
            if _rss() > caps.max_rss_bytes:
                raise ResourceLimit("memory", caps.max_rss_bytes)
    return _recurrent_part(ctx, nodes, edges, patterns)


def all_ones_fixpoint(ctx: StripContext) -> Node:
    """The node reached from C0 by repeated all-ones strips.

    It equals C0 when every threshold is 1; with larger thresholds the
    incoming clauses that meet the border in too few cells stay pending.
    """
    ones = (1 << ctx.border.size) - 1
    node = C0
    while True:
        nxt = step(node, ones, ctx)
        if nxt == node:
            return node
        node = nxt


def _recurrent_part(ctx, nodes, edges, patterns) -> Automaton:
    """Restrict to the nodes reachable from the all-ones fixpoint and start there.

    Every node reaches the fixpoint by all-ones edges, and every node lying on
    a cycle is reachable from it, so this keeps all cycles and makes the graph
    strongly connected. With threshold-1 families nothing is removed.
    """
    full = WeightedDigraph(len(nodes), edges, 0)
    index = {nd: i for i, nd in enumerate(nodes)}
    root = index[all_ones_fixpoint(ctx)]
    if root == 0:
        return Automaton(ctx, nodes, full, patterns)
    keep = WeightedDigraph(len(nodes), edges, root).reachable()
    new_id = np.cumsum(keep) - 1
    kept_nodes = [nd for nd, k in zip(nodes, keep.tolist()) if k]
    kept_edges = [(int(new_id[u]), int(new_id[v]), w) for u, v, w in edges if keep[u] and keep[v]]
    kept_pats = {(int(new_id[u]), int(new_id[v])): p for (u, v), p in patterns.items() if keep[u] and keep[v]}
    graph = WeightedDigraph(len(kept_nodes), kept_edges, int(new_id[root]))
    return Automaton(ctx, kept_nodes, graph, kept_pats)


def build_naive(grid: GridModel, family: ClauseFamily, v: Cell, max_nodes: int = 100_000) -> Automaton:
    """Reference builder: every node tries all ``2^(W*y)`` patterns through
    :func:`step`. Exponential in the border size; used to cross-check
    :func:`build`."""
    ctx = StripContext(grid, family, v)
    index: dict[Node, int] = {C0: 0}
    nodes: list[Node] = [C0]
    best: dict[tuple[int, int], tuple[int, int]] = {}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for pat in range(1 << ctx.border.size):
            succ = step(nodes[u], pat, ctx)
            if succ is None:
                continue
            t = index.get(succ)
            if t is None:
                t = index[succ] = len(nodes)
                nodes.append(succ)
                if len(nodes) > max_nodes:
                    raise ResourceLimit("nodes", max_nodes)
                queue.append(t)
            cand = (bin(pat).count("1"), pat)
            if (u, t) not in best or cand < best[(u, t)]:
                best[(u, t)] = cand
    edges = [(u, t, w) for (u, t), (w, _) in best.items()]
    patterns = {k: p for k, (_, p) in best.items()}
    return _recurrent_part(ctx, nodes, edges, patterns)
