import random

import pytest

from gridcodes.constraints import (ClauseFamily, ClauseSet, CodeKind, CodeSpec, clause_check, dumps_family,
                                   family_tikz, generate_clauses, loads_family, minimize)
from gridcodes.errors import TwinVertices
from gridcodes.grid import GridModel, Lattice2, get_grid
from gridcodes.periodic import PeriodicCode, from_text

from helpers import definition_ok, random_code

ID1 = CodeSpec(CodeKind.IDENTIFYING, 1)


def test_hex_identifying_family_has_eleven_classes():
    fam = generate_clauses(get_grid("hex"), ID1)
    assert len(fam) == 11
    assert all(c.threshold == 1 for c in fam)
    assert all(3 <= len(c.cells) <= 8 for c in fam)


def test_hex_family_contains_the_drawn_sets():
    fam = generate_clauses(get_grid("hex"), ID1)
    shapes = {c.shape() for c in fam}
    for s in [{(0, 0), (1, 0), (1, -1), (2, 0)},
              {(0, 0), (1, 1), (2, -1), (3, 0)},
              {(0, 0), (0, 1), (2, 0), (2, 1)}]:
        assert frozenset(s) in shapes


def test_hex_family_golden(fixture_path):
    fam = generate_clauses(get_grid("hex"), ID1)
    with open(fixture_path("hex_id1_family.txt")) as f:
        assert dumps_family(fam) == f.read()


def test_family_anchor_in_coset_reps():
    for name, spec in [("hex", ID1), ("king", CodeSpec(CodeKind.LOCATING_DOMINATING, 2))]:
        g = get_grid(name)
        for c in generate_clauses(g, spec):
            assert c.anchor in g.cosets
            assert c.anchor == min(c.cells)


def test_king_ld2_contains_full_ball():
    g = get_grid("king")
    fam = generate_clauses(g, CodeSpec(CodeKind.LOCATING_DOMINATING, 2))
    ball = ClauseSet.of(g.ball((0, 0), 2), 1)
    assert len(ball.cells) == 25
    assert ball.canonical(g) in fam.classes


def test_square_identifying_only_near_pairs():
    g = get_grid("square")
    fam = generate_clauses(g, ID1)
    # far pairs give two disjoint balls, already implied by a single ball
    far = []
    for v in [(3, 0), (2, 1), (4, 0), (3, 3), (0, 5)]:
        far.append(ClauseSet.of(g.ball((0, 0), 1) ^ g.ball(v, 1)))
    assert minimize(list(fam) + far, g).classes == fam.classes


def test_rld_is_ld_with_threshold_two():
    g = get_grid("king")
    ld = generate_clauses(g, CodeSpec(CodeKind.LOCATING_DOMINATING, 1))
    rld = generate_clauses(g, CodeSpec(CodeKind.REDUNDANT_LOCATING_DOMINATING, 1))
    assert all(c.threshold == 2 for c in rld)
    assert {c.cells for c in rld} <= {c.cells for c in minimize([ClauseSet(c.cells, 2) for c in ld], g)}


def test_minimize_examples():
    g = get_grid("square")
    a, b, c = (0, 0), (1, 0), (5, 5)
    fam = minimize([ClauseSet.of([a, b], 1), ClauseSet.of([a, b, c], 1)], g)
    assert fam.classes == (ClauseSet.of([a, b], 1),)
    # a stronger threshold on the smaller set still implies the weaker clause
    fam = minimize([ClauseSet.of([a, b], 2), ClauseSet.of([a, b, c], 1)], g)
    assert fam.classes == (ClauseSet.of([a, b], 2),)
    # but a weaker threshold does not
    fam = minimize([ClauseSet.of([a, b], 1), ClauseSet.of([a, b, c], 2)], g)
    assert len(fam) == 2
    # translates are the same class
    fam = minimize([ClauseSet.of([a, b]), ClauseSet.of([(3, 4), (4, 4)])], g)
    assert len(fam) == 1


def test_minimize_respects_translation_lattice():
    hexg = get_grid("hex")
    # (1,0) is not a translation of the hex grid, so these are different classes
    s1 = ClauseSet.of([(0, 0), (1, 0)])
    s2 = ClauseSet.of([(1, 0), (2, 0), (2, 1)])
    assert len(minimize([s1, s2], hexg)) == 2
    s3 = ClauseSet.of([(2, 0), (3, 0), (2, 5)])
    assert len(minimize([s1, s3], hexg)) == 1


def _twin_grid():
    return GridModel("twins", Lattice2((2, 0), (0, 1)), ((0, 0), (1, 0)), {
        (0, 0): ((1, 0), (0, 1), (0, -1), (1, 1), (1, -1)),
        (1, 0): ((-1, 0), (0, 1), (0, -1), (-1, 1), (-1, -1)),
    })


def test_twin_vertices_rejected():
    g = _twin_grid()
    with pytest.raises(TwinVertices):
        generate_clauses(g, ID1)
    # locating-dominating codes do not need to separate codewords
    assert len(generate_clauses(g, CodeSpec(CodeKind.LOCATING_DOMINATING, 1))) > 0


def test_clause_check_trivial_codes():
    hexg = get_grid("hex")
    fam = generate_clauses(hexg, ID1)
    lat = Lattice2((0, 2), (4, 0))
    assert clause_check(fam, lambda c: 1, lat.domain()) == []
    assert len(clause_check(fam, lambda c: 0, lat.domain())) >= 1


def test_clause_check_figure_code(fixture_path):
    with open(fixture_path("fig2_king_ld.txt")) as f:
        code = from_text(f.read())
    fam = generate_clauses(get_grid("king"), CodeSpec(CodeKind.LOCATING_DOMINATING, 2))
    region = code.fundamental_domain()
    assert len(region) == 40 and {y for _, y in region} == {0}
    assert clause_check(fam, code, region) == []


def test_family_text_round_trip():
    g = get_grid("hex")
    fam = generate_clauses(g, ID1)
    back = loads_family(dumps_family(fam), g)
    assert back.classes == fam.classes
    assert "tikzpicture" in family_tikz(fam)


TORUS_CASES = [(g, k) for g in ["hex", "square", "king", "triangular"]
               for k in CodeKind]


@pytest.mark.parametrize("name,kind", TORUS_CASES)
def test_clause_check_matches_definitions_on_torus(name, kind):
    g = get_grid(name)
    spec = CodeSpec(kind, 1)
    try:
        fam = generate_clauses(g, spec)
    except TwinVertices:
        pytest.skip("no code exists")
    lat = Lattice2((12, 0), (0, 12))
    rng = random.Random(f"{name}-{kind.value}")
    seen = set()
    for _ in range(12):
        code = random_code(rng, name, spec, lat, p=rng.uniform(0.55, 1.0))
        ok = clause_check(fam, code, lat.domain()) == []
        assert ok == definition_ok(g, spec, code)
        seen.add(ok)
    # small random tori with the optimal-ish densities hit both outcomes
    lat = Lattice2((4, 0), (0, 2)) if name == "hex" else Lattice2((3, 0), (1, 2))
    for _ in range(60):
        code = random_code(rng, name, spec, lat)
        ok = clause_check(fam, code, lat.domain()) == []
        assert ok == definition_ok(g, spec, code)
        seen.add(ok)
    assert seen == {True, False}


@pytest.mark.parametrize("name", ["hex", "king", "square"])
def test_clauses_are_monotone(name):
    g = get_grid(name)
    rng = random.Random(7)
    fam = generate_clauses(g, ID1)
    lat = Lattice2((6, 0), (0, 4))
    found = 0
    for _ in range(200):
        code = random_code(rng, name, ID1, lat)
        if clause_check(fam, code, lat.domain()):
            continue
        found += 1
        zeros = [c for c in lat.domain() if not code(c)]
        for z in zeros[:5]:
            bigger = PeriodicCode.from_cells(name, ID1, (lat.u, lat.w), code.codewords() + [z])
            assert clause_check(fam, bigger, lat.domain()) == []
    assert found > 0
