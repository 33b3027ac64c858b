"""Checking explicit periodic codes straight from the definitions.

Nothing here uses the clause families of :mod:`gridcodes.constraints`: the
conditions are rebuilt from balls and identifying sets, so the verifier can
serve as an oracle for the search engine.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from .constraints import CodeKind, CodeSpec
from .errors import IndexTooLarge
from .grid import Cell, GridModel, Lattice2, get_grid
from .periodic import PeriodicCode

MAX_TORUS_INDEX = 28


class Violation(NamedTuple):
    kind: str  # "undominated" | "indistinguishable"
    cells: tuple[Cell, ...]
    removed: Cell | None = None  # codeword taken out, for redundancy failures

    def __str__(self):
        what = {"undominated": "no codeword within radius of", "indistinguishable": "same identifying set for"}[self.kind]
        s = f"{what} {' and '.join(map(str, self.cells))}"
        if self.removed is not None:
            s += f" after removing codeword {self.removed}"
        return s


def _ld_violations(grid: GridModel, r: int, identifying: bool, inside: Callable[[Cell], bool],
                   centers, removed: Cell | None = None) -> list[Violation]:
    "Definitional checks for the given centers, pairing each with everything within 2r."
    out = []

    def trace(u):
        return frozenset(c for c in grid.ball(u, r) if inside(c))

    for u in centers:
        tu = trace(u)
        if not tu:
            out.append(Violation("undominated", (u,), removed))
        for v in sorted(grid.ball(u, 2 * r)):
            if v == u:
                continue
            if not identifying and (inside(u) or inside(v)):
                continue
            if tu == trace(v):
                out.append(Violation("indistinguishable", tuple(sorted((u, v))), removed))
    return out


def check_configuration(grid: GridModel, spec: CodeSpec, code: Callable[[Cell], int], centers) -> list[Violation]:
    """Violations of the code property at the given centers.

    Pairs at distance more than 2r have disjoint balls, so domination already
    separates them; only nearer pairs are compared.
    """
    r = spec.radius
    inside = lambda c: bool(code(c))  # noqa: E731
    centers = list(centers)
    if spec.kind is CodeKind.IDENTIFYING:
        return list(dict.fromkeys(_ld_violations(grid, r, True, inside, centers)))
    out = _ld_violations(grid, r, False, inside, centers)
    if spec.kind is CodeKind.REDUNDANT_LOCATING_DOMINATING:
        for c in centers:
            if not inside(c):
                continue
            minus = lambda z, c=c: z != c and inside(z)  # noqa: E731
            # only identifying sets near c change when c is removed
            near = sorted(grid.ball(c, r))
            out.extend(_ld_violations(grid, r, False, minus, near, removed=c))
    # a pair with both ends among the centers is found from either end
    return list(dict.fromkeys(out))


def verify_code(code: PeriodicCode, grid: GridModel | None = None) -> list[Violation]:
    """All violations with a center in one fundamental domain; empty means accepted.

    Periodicity makes one fundamental domain of centers sufficient.
    """
    grid = grid or get_grid(code.grid)
    return check_configuration(grid, code.spec, code, code.fundamental_domain())


def density(code: PeriodicCode) -> Fraction:
    return code.density()


class _TorusConditions:
    """Conditions on a lattice-periodic bitmap, one bit per coset.

    Each condition ``(guard, need)`` holds for bitmap C when ``~C & guard`` or
    ``C & need`` is nonzero.
    """

    def __init__(self, grid: GridModel, spec: CodeSpec, lattice: Lattice2):
        self.domain = lattice.domain()
        self.bit = {c: i for i, c in enumerate(self.domain)}
        self.lattice = lattice
        r = spec.radius
        conds: set[tuple[int, int]] = set()

        def mask(cells):
            m = 0
            for c in cells:
                m |= 1 << self.bit[lattice.reduce(c)]
            return m

        ident = spec.kind is CodeKind.IDENTIFYING
        for u in self.domain:
            bu = grid.ball(u, r)
            conds.add((0, mask(bu)))
            for v in grid.ball(u, 2 * r):
                if v == u:
                    continue
                diff = bu ^ grid.ball(v, r)
                conds.add((0, mask(diff if ident else diff | {u, v})))
        if spec.kind is CodeKind.REDUNDANT_LOCATING_DOMINATING:
            # removing the single cell c (not its whole orbit) from the configuration
            for c in self.domain:
                guard = 1 << self.bit[c]
                for u in grid.ball(c, r):
                    bu = grid.ball(u, r)
                    conds.add((guard, mask(bu - {c})))
                    for v in grid.ball(u, 2 * r):
                        if v == u:
                            continue
                        diff = (bu ^ grid.ball(v, r)) | {u, v}
                        conds.add((guard, mask(diff - {c})))
        # a condition is implied by another with smaller guard and need
        plain = sorted(n for g, n in conds if g == 0)
        keep_plain = []
        for n in plain:
            if not any(k & n == k for k in keep_plain):
                keep_plain.append(n)
        guarded = sorted((g, n) for g, n in conds if g and not any(k & n == k for k in keep_plain))
        self.conditions = [(0, n) for n in sorted(keep_plain, key=lambda m: bin(m).count("1"))] + guarded

    def filter(self, bitmaps: np.ndarray) -> np.ndarray:
        for guard, need in self.conditions:
            if not len(bitmaps):
                break
            ok = (bitmaps & np.uint64(need)) != 0
            if guard:
                ok |= (~bitmaps & np.uint64(guard)) != 0
            bitmaps = bitmaps[ok]
        return bitmaps


def torus_bruteforce(grid: GridModel, spec: CodeSpec, lattice: Lattice2,
                     chunk_bits: int = 22) -> tuple[Fraction, PeriodicCode] | None:
    """Minimum density over all lattice-periodic configurations with the code
    property, by enumerating every bitmap on one fundamental domain.

    Returns ``(density, code)`` for a lightest valid bitmap, or None if no
    lattice-periodic code exists.
    """
    n = lattice.index
    if n > MAX_TORUS_INDEX:
        raise IndexTooLarge(f"lattice index {n} exceeds {MAX_TORUS_INDEX}")
    conds = _TorusConditions(grid, spec, lattice)
    step = 1 << min(chunk_bits, n)
    best = None
    for lo in range(0, 1 << n, step):
        valid = conds.filter(np.arange(lo, lo + step, dtype=np.uint64))
        if not len(valid):
            continue
        weights = np.bitwise_count(valid)
        i = int(np.argmin(weights))
        cand = (int(weights[i]), int(valid[i]))
        if best is None or cand < best:
            best = cand
    if best is None:
        return None
    w, bits = best
    ones = [c for i, c in enumerate(conds.domain) if bits >> i & 1]
    periods = (lattice.u, lattice.w)
    code = PeriodicCode.from_cells(grid.name, spec, periods, ones)
    return Fraction(w, n), code
