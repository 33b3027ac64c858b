import itertools
import random
from fractions import Fraction

import pytest

from gridcodes.constraints import CodeKind, CodeSpec, clause_check, generate_clauses
from gridcodes.engine import list_presets, load_preset
from gridcodes.errors import IndexTooLarge
from gridcodes.grid import Lattice2, get_grid
from gridcodes.periodic import PeriodicCode, from_text
from gridcodes.verifier import density, torus_bruteforce, verify_code

from helpers import definition_ok, random_code, random_lattice

ID1 = CodeSpec(CodeKind.IDENTIFYING, 1)
LD2 = CodeSpec(CodeKind.LOCATING_DOMINATING, 2)
ID2 = CodeSpec(CodeKind.IDENTIFYING, 2)


@pytest.fixture
def fig2(fixture_path):
    with open(fixture_path("fig2_king_ld.txt")) as f:
        return from_text(f.read())


def block_code(spec):
    return PeriodicCode.from_cells("king", spec, ((4, 0), (0, 4)), [(0, 0), (2, 2)])


def test_all_ones_and_zeros_hex():
    ones = PeriodicCode("hex", ID1, ((0, 2), (2, 0)), ("11", "11"))
    assert verify_code(ones) == []
    assert density(ones) == 1
    zeros = PeriodicCode("hex", ID1, ((0, 2), (2, 0)), ("00", "00"))
    bad = verify_code(zeros)
    assert bad and any(v.kind == "undominated" for v in bad)


def test_figure_code_is_locating_dominating(fig2):
    assert fig2.spec == LD2
    assert fig2.periods == ((40, 0), (-6, 1))
    assert (fig2.width, fig2.height) == (40, 16)
    assert sum(r.count("1") for r in fig2.rows) == 80
    assert verify_code(fig2) == []
    assert density(fig2) == Fraction(1, 8)


def test_figure_code_is_not_identifying(fig2):
    bad = verify_code(fig2.with_spec(ID2))
    assert bad
    assert all(v.kind == "indistinguishable" for v in bad)
    u, v = bad[0].cells
    king = get_grid("king")
    # the two cells really do have the same trace
    tr = lambda c: {z for z in king.ball(c, 2) if fig2(z)}  # noqa: E731
    assert tr(u) == tr(v)


def test_old_block_code_is_both():
    for spec in (LD2, ID2):
        code = block_code(spec)
        assert verify_code(code) == []
        assert density(code) == Fraction(1, 8)


def test_torus_examples():
    hexg = get_grid("hex")
    d, code = torus_bruteforce(hexg, ID1, Lattice2((0, 2), (2, 0)))
    assert d == Fraction(1, 2)
    assert verify_code(code) == [] and density(code) == d
    d, code = torus_bruteforce(get_grid("king"), LD2, Lattice2((4, 0), (0, 4)))
    assert d == Fraction(1, 8)
    # an index-1 lattice only allows the all-ones and all-zeros codes
    for name in ["square", "king", "triangular"]:
        res = torus_bruteforce(get_grid(name), ID1, Lattice2((1, 0), (0, 1)))
        assert res is None or res[0] == 1
    with pytest.raises(IndexTooLarge):
        torus_bruteforce(hexg, ID1, Lattice2((0, 2), (16, 0)))


@pytest.mark.parametrize("name,spec,lat", [
    ("hex", ID1, Lattice2((0, 2), (4, 0))),
    ("hex", ID1, Lattice2((1, 1), (6, 0))),
    ("king", CodeSpec(CodeKind.REDUNDANT_LOCATING_DOMINATING, 1), Lattice2((3, 0), (1, 2))),
    ("square", CodeSpec(CodeKind.LOCATING_DOMINATING, 1), Lattice2((5, 0), (2, 2))),
    ("triangular", ID1, Lattice2((3, 0), (0, 3))),
])
def test_torus_matches_exhaustive_definitions(name, spec, lat):
    g = get_grid(name)
    dom = lat.domain()
    best = None
    for bits in itertools.product((0, 1), repeat=len(dom)):
        code = PeriodicCode.from_cells(name, spec, (lat.u, lat.w), [c for c, b in zip(dom, bits) if b])
        if definition_ok(g, spec, code):
            d = code.density()
            best = d if best is None else min(best, d)
    res = torus_bruteforce(g, spec, lat)
    assert (res and res[0]) == best or (res is None and best is None)


@pytest.mark.parametrize("preset", list_presets())
def test_verifier_agrees_with_clauses(preset):
    p = load_preset(preset)
    g = get_grid(p["grid"])
    spec = CodeSpec(CodeKind.parse(p["code"]), p["radius"])
    fam = generate_clauses(g, spec)
    rng = random.Random(preset)
    outcomes = set()
    for i in range(1000):
        lat = random_lattice(rng, g, max_index=12)
        code = random_code(rng, p["grid"], spec, lat)
        ok = verify_code(code) == []
        assert ok == (clause_check(fam, code, lat.domain()) == [])
        outcomes.add(ok)
    assert outcomes == {True, False}


def test_accepted_codes_stay_accepted_when_growing():
    rng = random.Random(11)
    hexg = get_grid("hex")
    checked = 0
    while checked < 30:
        lat = random_lattice(rng, hexg, max_index=16)
        code = random_code(rng, "hex", ID1, lat)
        if verify_code(code):
            continue
        checked += 1
        for z in lat.domain():
            if not code(z):
                bigger = PeriodicCode.from_cells("hex", ID1, (lat.u, lat.w), code.codewords() + [z])
                assert verify_code(bigger) == []
