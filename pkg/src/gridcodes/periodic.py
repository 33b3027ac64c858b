"""Totally periodic codes and their file formats.

A :class:`PeriodicCode` is a period lattice plus a bitmap over a rectangle
``[0, w) x [0, h)`` that contains every coset of the lattice at least once.
Engine output uses the lattice's HNF rectangle, which holds each coset
exactly once; hand-made fixtures may use any larger consistent rectangle.

Formats:

* ``json``: ``{"version", "grid", "code", "radius", "periods", "rows", "density"}``
  with ``rows[j]`` the bitstring of row ``y = j``.
* ``text``: ``key: value`` header lines followed by the rows, ``#`` for a
  codeword and ``.`` otherwise, row ``y = 0`` first.
* ``tikz``: fill commands in the style of the usual grid pictures (write only).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .constraints import CodeKind, CodeSpec
from .errors import FormatError
from .grid import Cell, Lattice2

FORMAT_VERSION = 1


@dataclass(frozen=True)
class PeriodicCode:
    grid: str
    spec: CodeSpec
    periods: tuple[Cell, Cell]
    rows: tuple[str, ...]

    def __post_init__(self):
        if not self.rows or any(len(r) != len(self.rows[0]) for r in self.rows) or not self.rows[0]:
            raise FormatError("rows must be a nonempty rectangle")
        if any(ch not in "01" for r in self.rows for ch in r):
            raise FormatError("rows must be bitstrings")
        try:
            lat = Lattice2(*self.periods)
        except ValueError as e:
            raise FormatError(str(e)) from None
        table: dict[Cell, int] = {}
        for y, row in enumerate(self.rows):
            for x, ch in enumerate(row):
                key = lat.reduce((x, y))
                bit = int(ch)
                if table.setdefault(key, bit) != bit:
                    raise FormatError(f"bitmap is not periodic: cell {(x, y)} disagrees with its translate")
        if len(table) != lat.index:
            raise FormatError(f"bitmap covers {len(table)} of {lat.index} cosets of the period lattice")
        object.__setattr__(self, "_table", table)
        object.__setattr__(self, "_lattice", lat)

    @classmethod
    def from_function(cls, grid: str, spec: CodeSpec, periods, value: Callable[[Cell], int]) -> PeriodicCode:
        "Sample ``value`` over the HNF fundamental domain of ``periods``."
        lat = Lattice2(*periods)
        (a, _), (_, c) = lat.hnf()
        rows = tuple("".join("1" if value((x, y)) else "0" for x in range(a)) for y in range(c))
        return cls(grid, spec, (tuple(periods[0]), tuple(periods[1])), rows)

    @classmethod
    def from_cells(cls, grid: str, spec: CodeSpec, periods, cells) -> PeriodicCode:
        "Code generated by the lattice translates of ``cells``."
        lat = Lattice2(*periods)
        marked = {lat.reduce(c) for c in cells}
        return cls.from_function(grid, spec, periods, lambda c: lat.reduce(c) in marked)

    @property
    def lattice(self) -> Lattice2:
        return self._lattice

    @property
    def width(self) -> int:
        return len(self.rows[0])

    @property
    def height(self) -> int:
        return len(self.rows)

    def __call__(self, cell: Cell) -> int:
        return self._table[self._lattice.reduce(cell)]

    value = __call__

    def fundamental_domain(self) -> list[Cell]:
        return self._lattice.domain()

    def codewords(self) -> list[Cell]:
        "Codewords inside the HNF fundamental domain."
        return [c for c in self._lattice.domain() if self._table[c]]

    def canonical(self) -> PeriodicCode:
        return PeriodicCode.from_function(self.grid, self.spec, self.periods, self)

    def with_spec(self, spec: CodeSpec) -> PeriodicCode:
        return PeriodicCode(self.grid, spec, self.periods, self.rows)

    def density(self) -> Fraction:
        return Fraction(sum(self._table.values()), self._lattice.index)


def _spec_fields(spec: CodeSpec) -> dict:
    return {"code": spec.kind.value, "radius": spec.radius}


def to_json(code: PeriodicCode) -> str:
    d = code.density()
    obj = {
        "version": FORMAT_VERSION,
        "grid": code.grid,
        **_spec_fields(code.spec),
        "periods": [list(code.periods[0]), list(code.periods[1])],
        "rows": list(code.rows),
        "density": f"{d.numerator}/{d.denominator}",
    }
    return json.dumps(obj, indent=1) + "\n"


def from_json(text: str) -> PeriodicCode:
    try:
        obj = json.loads(text)
        if obj.get("version", FORMAT_VERSION) != FORMAT_VERSION:
            raise FormatError(f"unsupported format version {obj['version']}")
        spec = CodeSpec(CodeKind.parse(obj["code"]), int(obj["radius"]))
        periods = tuple(tuple(int(a) for a in p) for p in obj["periods"])
        if len(periods) != 2 or any(len(p) != 2 for p in periods):
            raise FormatError("need two 2D periods")
        return PeriodicCode(obj["grid"], spec, periods, tuple(obj["rows"]))
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(f"bad code json: {e}") from None


def to_text(code: PeriodicCode) -> str:
    (p, q) = code.periods
    d = code.density()
    lines = [
        f"grid: {code.grid}",
        f"code: {code.spec.kind.value}",
        f"radius: {code.spec.radius}",
        f"periods: {p[0]},{p[1]} {q[0]},{q[1]}",
        f"density: {d.numerator}/{d.denominator}",
    ]
    lines += [r.replace("1", "#").replace("0", ".") for r in code.rows]
    return "\n".join(lines) + "\n"


def from_text(text: str) -> PeriodicCode:
    header: dict[str, str] = {}
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if ":" in line:
            k, _, v = line.partition(":")
            header[k.strip()] = v.strip()
        elif set(line) <= {"#", "."}:
            rows.append(line.replace("#", "1").replace(".", "0"))
        else:
            raise FormatError(f"unexpected line {line!r}")
    try:
        spec = CodeSpec(CodeKind.parse(header["code"]), int(header["radius"]))
        periods = tuple(tuple(int(a) for a in tok.split(",")) for tok in header["periods"].split())
        if len(periods) != 2 or any(len(p) != 2 for p in periods):
            raise FormatError("need two 2D periods")
        return PeriodicCode(header["grid"], spec, periods, tuple(rows))
    except (KeyError, ValueError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(f"bad code text: {e}") from None


def to_tikz(code: PeriodicCode, scale: float = 0.25) -> str:
    parts = [f"\\begin{{tikzpicture}}[scale={scale}]"]
    fills = []
    for y, row in enumerate(code.rows):
        for x, ch in enumerate(row):
            if ch == "1":
                fills.append(f"\\fill ({x}, {y}) rectangle ({x + 1}, {y + 1});")
    parts.append("".join(fills))
    parts.append(f"\\draw[gray] (0,0) grid ({code.width},{code.height});")
    parts.append("\\end{tikzpicture}")
    return "\n".join(parts) + "\n"


FORMATS = {"json": (to_json, from_json), "text": (to_text, from_text), "tikz": (to_tikz, None)}


def dumps(code: PeriodicCode, fmt: str = "json") -> str:
    try:
        return FORMATS[fmt][0](code)
    except KeyError:
        raise FormatError(f"unknown format {fmt!r}") from None


def loads(text: str) -> PeriodicCode:
    "Parse json or text, guessing from the first character."
    if text.lstrip().startswith("{"):
        return from_json(text)
    return from_text(text)
