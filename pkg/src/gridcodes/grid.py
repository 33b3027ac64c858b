"""Gridlike graphs on Z^2: translation lattices, cosets, adjacency and balls.

A grid is given by a translation lattice T acting by automorphisms, a set D
of coset representatives and, for each representative, the list of neighbor
offsets. Neighbors of any other cell are obtained by translating along T.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import DegeneratePeriod, FormatError, NotInLattice

Cell = tuple[int, int]


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    "Return (g, p, q) with p*a + q*b == g == gcd(a, b) >= 0."
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_s, s = s, old_s - k * s
        old_t, t = t, old_t - k * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass(frozen=True)
class Lattice2:
    """Rank-2 sublattice of Z^2 spanned by ``u`` and ``w``."""

    u: Cell
    w: Cell

    def __post_init__(self):
        if self.det == 0:
            raise ValueError(f"vectors {self.u} and {self.w} do not span a rank-2 lattice")

    @property
    def det(self) -> int:
        return self.u[0] * self.w[1] - self.u[1] * self.w[0]

    @property
    def index(self) -> int:
        return abs(self.det)

    def hnf(self) -> tuple[Cell, Cell]:
        """Basis ``((a, 0), (b, c))`` with ``a, c > 0`` and ``0 <= b < a``.

        The rectangle ``[0, a) x [0, c)`` is then a fundamental domain.
        """
        (ux, uy), (wx, wy) = self.u, self.w
        g, p, q = _ext_gcd(uy, wy)
        a = self.index // g
        b = (p * ux + q * wx) % a
        return (a, 0), (b, g)

    def reduce(self, cell: Cell) -> Cell:
        "Representative of ``cell`` modulo the lattice inside the HNF rectangle."
        (a, _), (b, c) = self._hnf
        x, y = cell
        k = y // c
        return ((x - k * b) % a, y - k * c)

    def contains(self, cell: Cell) -> bool:
        return self.reduce(cell) == (0, 0)

    def domain(self) -> list[Cell]:
        "Cells of the HNF fundamental domain in row-major order."
        (a, _), (_, c) = self._hnf
        return [(x, y) for y in range(c) for x in range(a)]

    @property
    def _hnf(self):
        # cached lazily; frozen dataclass so go through object.__setattr__
        try:
            return self.__dict__["_hnf_cache"]
        except KeyError:
            h = self.hnf()
            object.__setattr__(self, "_hnf_cache", h)
            return h

    def mirrored(self) -> Lattice2:
        return Lattice2((-self.u[0], self.u[1]), (-self.w[0], self.w[1]))

    def __eq__(self, other):
        if not isinstance(other, Lattice2):
            return NotImplemented
        return self.hnf() == other.hnf()

    def __hash__(self):
        return hash(self.hnf())


@dataclass(frozen=True, eq=False)
class GridModel:
    """A Z^2-gridlike graph.

    ``offsets`` maps each coset representative to the neighbor offsets of that
    representative. Adjacency of every other cell follows by T-translation.
    """

    name: str
    lattice: Lattice2
    cosets: tuple[Cell, ...]
    offsets: dict[Cell, tuple[Cell, ...]]
    _stencils: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.cosets) != self.lattice.index:
            raise ValueError(f"{self.name}: {len(self.cosets)} coset representatives for a lattice of index {self.lattice.index}")
        residues = {self.lattice.reduce(d): d for d in self.cosets}
        if len(residues) != len(self.cosets):
            raise ValueError(f"{self.name}: coset representatives are not distinct modulo T")
        object.__setattr__(self, "_residue_to_rep", residues)
        for d in self.cosets:
            for o in self.offsets[d]:
                n = (d[0] + o[0], d[1] + o[1])
                if d not in self.neighbors(n):
                    raise ValueError(f"{self.name}: adjacency is not symmetric at {d} -> {n}")

    @property
    def step_width(self) -> int:
        "Smallest k > 0 with (k, 0) in T."
        (a, _), _ = self.lattice.hnf()
        return a

    def coset_of(self, cell: Cell) -> tuple[Cell, Cell]:
        "Return ``(d, t)`` with ``cell == d + t``, d a representative and t in T."
        d = self._residue_to_rep[self.lattice.reduce(cell)]
        return d, (cell[0] - d[0], cell[1] - d[1])

    def neighbors(self, cell: Cell) -> list[Cell]:
        d, _ = self.coset_of(cell)
        x, y = cell
        return [(x + ox, y + oy) for (ox, oy) in self.offsets[d]]

    def in_lattice(self, v: Cell) -> bool:
        return self.lattice.contains(v)

    def stencil(self, rep: Cell, r: int) -> frozenset[Cell]:
        "Offsets of the radius-r ball around coset representative ``rep``."
        key = (rep, r)
        st = self._stencils.get(key)
        if st is None:
            seen = {rep: 0}
            queue = deque([rep])
            while queue:
                c = queue.popleft()
                if seen[c] == r:
                    continue
                for n in self.neighbors(c):
                    if n not in seen:
                        seen[n] = seen[c] + 1
                        queue.append(n)
            st = frozenset((c[0] - rep[0], c[1] - rep[1]) for c in seen)
            self._stencils[key] = st
        return st

    def ball(self, c: Cell, r: int) -> frozenset[Cell]:
        if r < 0:
            raise ValueError("radius must be nonnegative")
        d, _ = self.coset_of(c)
        x, y = c
        return frozenset((x + ox, y + oy) for (ox, oy) in self.stencil(d, r))

    def mirrored(self) -> GridModel:
        "The same graph with the x coordinate negated."
        name = self.name[:-7] if self.name.endswith("~mirror") else self.name + "~mirror"
        return GridModel(
            name=name,
            lattice=self.lattice.mirrored(),
            cosets=tuple((-dx, dy) for dx, dy in self.cosets),
            offsets={(-dx, dy): tuple((-ox, oy) for ox, oy in offs)
                     for (dx, dy), offs in self.offsets.items()},
        )

    def __repr__(self):
        return f"GridModel({self.name!r})"


def _uniform(name, offsets):
    offs = tuple(offsets)
    return GridModel(name, Lattice2((1, 0), (0, 1)), ((0, 0),), {(0, 0): offs})


def hex_grid() -> GridModel:
    # brick wall: vertical edge (x,y)-(x,y+1) iff x+y is even
    return GridModel(
        "hex",
        Lattice2((0, 2), (1, 1)),
        ((0, 0), (1, 0)),
        {(0, 0): ((1, 0), (-1, 0), (0, 1)), (1, 0): ((1, 0), (-1, 0), (0, -1))},
    )


def square_grid() -> GridModel:
    return _uniform("square", [(1, 0), (-1, 0), (0, 1), (0, -1)])


def king_grid() -> GridModel:
    return _uniform("king", [(dx, dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dx, dy) != (0, 0)])


def triangular_grid() -> GridModel:
    return _uniform("triangular", [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)])


PRESETS = {
    "hex": hex_grid,
    "square": square_grid,
    "king": king_grid,
    "triangular": triangular_grid,
}

_preset_cache: dict[str, GridModel] = {}


def get_grid(name: str) -> GridModel:
    if name.endswith("~mirror"):
        return get_grid(name[:-7]).mirrored()
    if name not in _preset_cache:
        try:
            _preset_cache[name] = PRESETS[name]()
        except KeyError:
            raise KeyError(f"unknown grid {name!r}; choose from {sorted(PRESETS)}") from None
    return _preset_cache[name]


def _parse_vectors(text: str) -> list[Cell]:
    out = []
    for tok in text.split():
        try:
            x, y = tok.split(",")
            out.append((int(x), int(y)))
        except ValueError:
            raise FormatError(f"bad vector {tok!r}") from None
    return out


def parse_grid(text: str) -> GridModel:
    """Read a grid from the declarative text format::

        name: hexlike
        lattice: 0,2 1,1
        cosets: 0,0 1,0
        neighbors 0,0: 1,0 -1,0 0,1
        neighbors 1,0: 1,0 -1,0 0,-1

    Blank lines and ``#`` comments are ignored.
    """
    name, basis, cosets, offsets = "custom", None, None, {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise FormatError(f"expected 'key: value', got {raw!r}")
        key = key.strip()
        if key == "name":
            name = rest.strip()
        elif key == "lattice":
            basis = _parse_vectors(rest)
        elif key == "cosets":
            cosets = _parse_vectors(rest)
        elif key.startswith("neighbors"):
            (rep,) = _parse_vectors(key[len("neighbors"):])
            offsets[rep] = tuple(_parse_vectors(rest))
        else:
            raise FormatError(f"unknown key {key!r}")
    if basis is None or len(basis) != 2:
        raise FormatError("lattice needs exactly two basis vectors")
    if cosets is None:
        raise FormatError("missing cosets")
    if set(offsets) != set(cosets):
        raise FormatError("need one neighbors line per coset representative")
    try:
        return GridModel(name, Lattice2(*basis), tuple(cosets), offsets)
    except ValueError as e:
        raise FormatError(str(e)) from None


class NormalizedPeriod(NamedTuple):
    grid: GridModel
    vector: Cell
    mirrored: bool


def normalize_period(grid: GridModel, v: Cell) -> NormalizedPeriod:
    """Bring ``v`` to the form ``y > 0, x >= 0``.

    A negative x is removed by reflecting both the grid and the vector in the
    y axis; ``mirrored`` records this so results can be mapped back.
    """
    x, y = v
    if (x, y) == (0, 0):
        raise DegeneratePeriod("zero period vector")
    if not grid.in_lattice((x, y)):
        raise NotInLattice(f"{(x, y)} is not a translation of grid {grid.name}")
    if y < 0 or (y == 0 and x < 0):
        x, y = -x, -y
    if y == 0:
        raise DegeneratePeriod(f"horizontal period {v} not supported; transpose the grid instead")
    if x < 0:
        return NormalizedPeriod(grid.mirrored(), (-x, y), True)
    return NormalizedPeriod(grid, (x, y), False)


def reduce_mod_period(v: Cell, c: Cell) -> Cell:
    "The translate ``c + k*v`` whose row lies in ``[0, v.y)``."
    vx, vy = v
    k = c[1] // vy
    return (c[0] - k * vx, c[1] - k * vy)


def ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def mirror_cell(c: Cell) -> Cell:
    return (-c[0], c[1])
