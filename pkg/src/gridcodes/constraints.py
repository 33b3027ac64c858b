"""Threshold clauses characterizing identifying and locating-dominating codes.

A clause ``(S, t)`` demands at least ``t`` codewords among the cells of ``S``.
Every code property handled here is the conjunction of all T-translates of a
finite family of clauses; the family is kept minimal and canonical so that
the automaton sees each constraint exactly once.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

from .errors import FormatError, TwinVertices
from .grid import Cell, GridModel


class CodeKind(enum.Enum):
    IDENTIFYING = "identifying"
    LOCATING_DOMINATING = "ld"
    REDUNDANT_LOCATING_DOMINATING = "rld"

    @classmethod
    def parse(cls, s: str) -> CodeKind:
        aliases = {
            "identifying": cls.IDENTIFYING, "id": cls.IDENTIFYING,
            "ld": cls.LOCATING_DOMINATING, "locating-dominating": cls.LOCATING_DOMINATING,
            "rld": cls.REDUNDANT_LOCATING_DOMINATING,
            "redundant-locating-dominating": cls.REDUNDANT_LOCATING_DOMINATING,
        }
        try:
            return aliases[s.lower()]
        except KeyError:
            raise ValueError(f"unknown code kind {s!r}") from None


@dataclass(frozen=True)
class CodeSpec:
    kind: CodeKind
    radius: int = 1

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("radius must be at least 1")

    def __str__(self):
        return f"{self.kind.value} r={self.radius}"


@dataclass(frozen=True, order=True)
class ClauseSet:
    """At least ``threshold`` codewords among ``cells``.

    ``cells`` is sorted; ``cells[0]`` is the anchor (leftmost, then bottommost).
    """

    cells: tuple[Cell, ...]
    threshold: int = 1

    def __post_init__(self):
        if not self.cells:
            raise ValueError("empty clause")
        if not 1 <= self.threshold <= len(self.cells):
            raise ValueError(f"threshold {self.threshold} out of range for {len(self.cells)} cells")

    @classmethod
    def of(cls, cells: Iterable[Cell], threshold: int = 1) -> ClauseSet:
        return cls(tuple(sorted(set(cells))), threshold)

    @property
    def anchor(self) -> Cell:
        return self.cells[0]

    def translate(self, t: Cell) -> ClauseSet:
        tx, ty = t
        return ClauseSet(tuple((x + tx, y + ty) for x, y in self.cells), self.threshold)

    def shape(self) -> frozenset[Cell]:
        "Cells translated (by any vector of Z^2) so that the anchor is the origin."
        ax, ay = self.anchor
        return frozenset((x - ax, y - ay) for x, y in self.cells)

    def canonical(self, grid: GridModel) -> ClauseSet:
        "The T-translate whose anchor is a coset representative."
        _, t = grid.coset_of(self.anchor)
        return self.translate((-t[0], -t[1]))


@dataclass(frozen=True)
class ClauseFamily:
    classes: tuple[ClauseSet, ...]
    grid: GridModel
    spec: CodeSpec | None = None

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    @property
    def max_width(self) -> int:
        "Largest horizontal extent (in columns) of any clause."
        return max((c.cells[-1][0] - c.cells[0][0] + 1 for c in self.classes), default=0)


def _dominates(small: ClauseSet, big: ClauseSet, grid: GridModel) -> bool:
    "Whether some T-translate of ``small`` is contained in ``big`` with at least its threshold."
    if small.threshold < big.threshold or len(small.cells) > len(big.cells):
        return False
    bigset = set(big.cells)
    ax, ay = small.anchor
    for (bx, by) in big.cells:
        t = (bx - ax, by - ay)
        if grid.in_lattice(t) and all((x + t[0], y + t[1]) in bigset for x, y in small.cells):
            return True
    return False


def minimize(raw: Iterable[ClauseSet], grid: GridModel, spec: CodeSpec | None = None) -> ClauseFamily:
    """Canonicalize, deduplicate and drop clauses implied by another clause.

    ``(S, t)`` is implied by ``(S', t')`` when a T-translate of ``S'`` lies in
    ``S`` and ``t' >= t``.
    """
    best: dict[tuple[Cell, ...], int] = {}
    for c in raw:
        c = c.canonical(grid)
        best[c.cells] = max(best.get(c.cells, 0), c.threshold)
    cands = sorted((ClauseSet(cells, t) for cells, t in best.items()),
                   key=lambda c: (len(c.cells), c.cells, -c.threshold))
    kept: list[ClauseSet] = []
    for c in cands:
        # canonical cells are unique per T-class, so mutual domination cannot occur
        if not any(o is not c and _dominates(o, c, grid) for o in cands):
            kept.append(c)
    return ClauseFamily(tuple(kept), grid, spec)


def generate_clauses(grid: GridModel, spec: CodeSpec) -> ClauseFamily:
    r = spec.radius
    kind = spec.kind
    t = 2 if kind is CodeKind.REDUNDANT_LOCATING_DOMINATING else 1
    raw = []
    for u in grid.cosets:
        raw.append(ClauseSet.of(grid.ball(u, r), t))
    for u in grid.cosets:
        bu = grid.ball(u, r)
        for v in sorted(grid.ball(u, 2 * r) - {u}):
            sep = bu ^ grid.ball(v, r)
            if kind is CodeKind.IDENTIFYING:
                if not sep:
                    raise TwinVertices(u, v)
                raw.append(ClauseSet.of(sep, 1))
            else:
                raw.append(ClauseSet.of(sep | {u, v}, t))
    return minimize(raw, grid, spec)


class Violation(NamedTuple):
    class_index: int
    cells: tuple[Cell, ...]
    count: int
    threshold: int


def clause_check(family: ClauseFamily, code: Callable[[Cell], int], anchor_region: Iterable[Cell]) -> list[Violation]:
    """Report every clause translate anchored in ``anchor_region`` that has
    fewer codewords than its threshold."""
    grid = family.grid
    region = list(anchor_region)
    out = []
    for i, cls in enumerate(family.classes):
        rep, _ = grid.coset_of(cls.anchor)
        ax, ay = cls.anchor
        for p in region:
            if grid.coset_of(p)[0] != rep:
                continue
            dx, dy = p[0] - ax, p[1] - ay
            cells = tuple((x + dx, y + dy) for x, y in cls.cells)
            n = sum(1 for c in cells if code(c))
            if n < cls.threshold:
                out.append(Violation(i, cells, n, cls.threshold))
    return out


def dumps_family(family: ClauseFamily) -> str:
    "One clause per line: threshold, then the cells as x,y."
    lines = []
    for c in family.classes:
        lines.append(f"{c.threshold}: " + " ".join(f"{x},{y}" for x, y in c.cells))
    return "\n".join(lines) + "\n"


def loads_family(text: str, grid: GridModel, spec: CodeSpec | None = None) -> ClauseFamily:
    raw = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            t, _, rest = line.partition(":")
            cells = [tuple(int(a) for a in tok.split(",")) for tok in rest.split()]
            raw.append(ClauseSet.of(cells, int(t)))
        except ValueError as e:
            raise FormatError(f"line {lineno}: {e}") from None
    return minimize(raw, grid, spec)


def family_tikz(family: ClauseFamily, scale: float = 0.2) -> str:
    """Draw each clause as a small picture: grid edges around it and a circle
    on every clause cell, laid out side by side."""
    grid = family.grid
    pics = []
    for c in family.classes:
        cells = set(c.cells)
        xs = [x for x, _ in cells]
        ys = [y for _, y in cells]
        lines = [f"\\begin{{tikzpicture}}[scale={scale}]"]
        drawn = set()
        for x in range(min(xs) - 1, max(xs) + 2):
            for y in range(min(ys) - 1, max(ys) + 2):
                for n in grid.neighbors((x, y)):
                    e = frozenset(((x, y), n))
                    if e in drawn or not (min(xs) - 1 <= n[0] <= max(xs) + 1 and min(ys) - 1 <= n[1] <= max(ys) + 1):
                        continue
                    drawn.add(e)
                    lines.append(f"\\draw[gray] ({x},{y}) -- ({n[0]},{n[1]});")
        for x, y in sorted(cells):
            lines.append(f"\\filldraw[black,fill=white] ({x},{y}) circle (7pt);")
        if c.threshold > 1:
            lines.append(f"\\node[below] at ({min(xs)},{min(ys) - 1}) {{$\\geq {c.threshold}$}};")
        lines.append("\\end{tikzpicture}")
        pics.append("\n".join(lines))
    return "\n\\;\n".join(pics) + "\n"
