"""Test-only oracles written straight from the code definitions.

Unlike the verifier these compare traces over a wide window instead of only
for pairs at distance at most 2r, so they also test that shortcut.
"""

import random
from collections import defaultdict

from gridcodes.constraints import CodeKind
from gridcodes.grid import Lattice2
from gridcodes.periodic import PeriodicCode


def window(cells, pad):
    xs = [x for x, _ in cells]
    ys = [y for _, y in cells]
    return [(x, y) for x in range(min(xs) - pad, max(xs) + pad + 1)
            for y in range(min(ys) - pad, max(ys) + pad + 1)]


def _ld_ok(grid, r, member, centers, win, identifying):
    trace = {u: frozenset(c for c in grid.ball(u, r) if member(c)) for u in win}
    if any(not trace[u] for u in centers):
        return False
    groups = defaultdict(list)
    for u in win:
        if identifying or not member(u):
            groups[trace[u]].append(u)
    centers = set(centers)
    return all(len(g) == 1 or not centers.intersection(g) for g in groups.values())


def definition_ok(grid, spec, code) -> bool:
    "Whether the periodic configuration ``code`` has the code property."
    r = spec.radius
    dom = code.fundamental_domain()
    member = lambda c: bool(code(c))  # noqa: E731
    win = window(dom, 3 * r + 2)
    if spec.kind is CodeKind.IDENTIFYING:
        return _ld_ok(grid, r, member, dom, win, True)
    if not _ld_ok(grid, r, member, dom, win, False):
        return False
    if spec.kind is CodeKind.LOCATING_DOMINATING:
        return True
    for c in dom:
        if not member(c):
            continue
        minus = lambda z, c=c: z != c and member(z)  # noqa: E731
        near = sorted(grid.ball(c, r))
        if not _ld_ok(grid, r, minus, near, window([c], 4 * r + 2), False):
            return False
    return True


def random_code(rng: random.Random, grid_name, spec, lattice: Lattice2, p=None) -> PeriodicCode:
    "A random lattice-periodic bitmap, biased towards dense (often valid) codes."
    p = rng.uniform(0.35, 1.0) if p is None else p
    ones = [c for c in lattice.domain() if rng.random() < p]
    return PeriodicCode.from_cells(grid_name, spec, (lattice.u, lattice.w), ones)


def random_lattice(rng: random.Random, grid, max_index=16) -> Lattice2:
    "A random sublattice of the grid's translation lattice."
    while True:
        a = rng.randint(1, 6)
        c = rng.randint(1, 6)
        b = rng.randint(0, a - 1)
        lat = Lattice2((a, 0), (b, c))
        if lat.index <= max_index and grid.in_lattice((a, 0)) and grid.in_lattice((b, c)):
            return lat
