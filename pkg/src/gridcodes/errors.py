"""Exception types shared across the package.

Each search failure maps to a distinct CLI exit status, see ``gridcodes.cli``.
"""


class GridCodeError(Exception):
    exit_code = 1


class NotInLattice(GridCodeError):
    exit_code = 4


class DegeneratePeriod(GridCodeError):
    exit_code = 5


class TwinVertices(GridCodeError):
    exit_code = 6

    def __init__(self, u, v):
        super().__init__(f"vertices {u} and {v} have identical balls; no code exists")
        self.u = u
        self.v = v


class ResourceLimit(GridCodeError):
    exit_code = 7

    def __init__(self, resource, cap):
        super().__init__(f"resource cap exceeded: {resource} > {cap}")
        self.resource = resource
        self.cap = cap


class NoCycle(GridCodeError):
    exit_code = 8


class IndexTooLarge(GridCodeError):
    exit_code = 9


class FormatError(GridCodeError):
    exit_code = 2


class WitnessError(GridCodeError):
    "An assembled witness failed verification; this is a bug, not bad input."
    exit_code = 10
