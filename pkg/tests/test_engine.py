from fractions import Fraction

import pytest

from gridcodes.automaton import Caps
from gridcodes.constraints import CodeKind, CodeSpec
from gridcodes.engine import (SearchRequest, list_presets, load_preset, min_density, preset_requests, report_jsonl,
                              report_table, sweep)
from gridcodes.errors import DegeneratePeriod, NotInLattice, ResourceLimit, TwinVertices
from gridcodes.grid import GridModel, Lattice2, get_grid
from gridcodes.mmc import Variant
from gridcodes.verifier import torus_bruteforce, verify_code

ID1 = CodeSpec(CodeKind.IDENTIFYING, 1)
ID2 = CodeSpec(CodeKind.IDENTIFYING, 2)
LD2 = CodeSpec(CodeKind.LOCATING_DOMINATING, 2)
RLD1 = CodeSpec(CodeKind.REDUNDANT_LOCATING_DOMINATING, 1)


def alpha(grid, spec, v, **kw):
    return min_density(SearchRequest(grid, spec, v, **kw)).alpha


def torus_min(grid, spec, v, ks):
    g = get_grid(grid)
    W = g.step_width
    vals = [torus_bruteforce(g, spec, Lattice2(v, (k * W, 0))) for k in ks]
    return min(r[0] for r in vals if r is not None)


def test_hex_small_values():
    assert alpha("hex", ID1, (0, 2)) == Fraction(3, 7)
    assert alpha("hex", ID1, (1, 1)) == Fraction(1, 2)


@pytest.mark.parametrize("grid,spec,v,ks", [
    ("hex", ID1, (1, 1), range(1, 13)),
    ("king", LD2, (1, 2), range(1, 13)),
    ("king", RLD1, (1, 2), range(1, 9)),
    ("square", ID2, (0, 1), range(1, 17)),
    ("triangular", ID2, (1, 1), range(1, 17)),
])
def test_matches_torus_oracle(grid, spec, v, ks):
    res = min_density(SearchRequest(grid, spec, v))
    assert res.cycle_length <= max(ks)
    assert res.alpha == torus_min(grid, spec, v, ks)


@pytest.mark.parametrize("grid,spec,v", [
    ("hex", ID1, (0, 2)), ("hex", ID1, (-2, 2)), ("hex", ID1, (1, -3)),
    ("king", LD2, (1, 1)), ("king", RLD1, (-1, 2)),
    ("square", ID2, (1, 2)), ("triangular", ID2, (-1, 2)),
])
def test_witness_round_trip(grid, spec, v):
    res = min_density(SearchRequest(grid, spec, v, verify=False))
    code = res.code
    assert code.grid == grid
    assert verify_code(code) == []
    assert code.density() == res.alpha
    assert code.lattice.contains(v)
    assert code.lattice.contains((res.cycle_length * get_grid(grid).step_width, 0))
    assert code.lattice.index == res.cycle_length * get_grid(grid).step_width * abs(v[1])


def test_hex_lower_bound():
    for v in [(0, 2), (1, 1), (2, 2), (3, 1), (1, 3), (4, 2), (3, 3)]:
        assert alpha("hex", ID1, v) >= Fraction(23, 55)


@pytest.mark.parametrize("grid,spec,v,mults", [
    ("hex", ID1, (1, 1), (2, 3)),
    ("hex", ID1, (0, 2), (2,)),
    ("king", LD2, (0, 1), (2, 3)),
    ("king", RLD1, (1, 1), (2, 3)),
    ("square", ID2, (0, 1), (2, 3)),
    ("triangular", ID2, (1, 1), (2,)),
])
def test_refinement_monotone(grid, spec, v, mults):
    base = alpha(grid, spec, v)
    for k in mults:
        assert alpha(grid, spec, (k * v[0], k * v[1])) <= base


@pytest.mark.parametrize("grid,spec,v,w", [
    ("hex", ID1, (1, 3), (-1, 3)),
    ("hex", ID1, (2, 2), (-2, 2)),
    ("king", LD2, (1, 2), (-1, 2)),
    ("square", ID2, (2, 1), (-2, 1)),
    # the triangular embedding reflects by (x, y) -> (y - x, y)
    ("triangular", ID2, (0, 2), (2, 2)),
    ("triangular", ID2, (2, 1), (-1, 1)),
])
def test_reflection_consistency(grid, spec, v, w):
    assert alpha(grid, spec, v) == alpha(grid, spec, w)


def test_variants_agree():
    for v in [(0, 2), (3, 1)]:
        vals = {alpha("hex", ID1, v, variant=var) for var in Variant}
        assert len(vals) == 1


def test_thread_count_gives_identical_output():
    a = min_density(SearchRequest("king", LD2, (1, 2), threads=1))
    b = min_density(SearchRequest("king", LD2, (1, 2), threads=3))
    assert (a.alpha, a.code, a.cycle_length) == (b.alpha, b.code, b.cycle_length)


def test_errors_propagate():
    with pytest.raises(DegeneratePeriod):
        min_density(SearchRequest("hex", ID1, (2, 0)))
    with pytest.raises(NotInLattice):
        min_density(SearchRequest("hex", ID1, (1, 2)))
    with pytest.raises(ResourceLimit):
        min_density(SearchRequest("hex", ID1, (0, 2), caps=Caps(max_nodes=1)))
    twins = GridModel("twins", Lattice2((2, 0), (0, 1)), ((0, 0), (1, 0)), {
        (0, 0): ((1, 0), (0, 1), (0, -1), (1, 1), (1, -1)),
        (1, 0): ((-1, 0), (0, 1), (0, -1), (-1, 1), (-1, -1)),
    })
    with pytest.raises(TwinVertices):
        min_density(SearchRequest(twins, ID1, (0, 1)))


def test_custom_grid_object():
    # a grid given as an object rather than a preset name
    res = min_density(SearchRequest(get_grid("hex"), ID1, (0, 2)))
    assert res.alpha == Fraction(3, 7)


def test_sweep_rows():
    assert sweep([]) == []
    rows = sweep([SearchRequest("hex", ID1, (0, 2)), SearchRequest("hex", ID1, (1, 1)),
                  SearchRequest("hex", ID1, (0, 2), caps=Caps(max_nodes=1)),
                  SearchRequest("hex", ID1, (1, 0))])
    assert [r["status"] for r in rows] == ["ok", "ok", "ResourceLimit", "NotInLattice"]
    assert rows[0]["alpha"] == "3/7" and rows[1]["alpha"] == "1/2"
    assert rows[0]["decimal"] == "0.4285714"
    assert report_jsonl(rows).count("\n") == 4
    table = report_table(rows)
    assert table.splitlines()[0].split()[:3] == ["grid", "code", "radius"]
    assert "ResourceLimit" in table


def test_presets_load():
    names = list_presets()
    assert len(names) == 5
    for name in names:
        p = load_preset(name)
        reqs = preset_requests(p)
        assert len(reqs) == len(p["sweep"]) > 0
        g = get_grid(p["grid"])
        assert all(g.in_lattice(r.period) for r in reqs)
    with pytest.raises(KeyError):
        load_preset("nope")
