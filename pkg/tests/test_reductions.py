import shutil

import numpy as np
import pytest

from conftest import rand_config
from fsandpile.core import Configuration, Query, decide_fspp, neighbor_count
from fsandpile.errors import ChainMismatch, UnknownSubject, WrongAlphabet
from fsandpile.gridio import parse_macrocell, serialize_macrocell
from fsandpile.reductions import (
    CENTER,
    REGISTRY,
    apply_reduction,
    check_1234_timing,
    clear_cache,
    compose,
    default_data_dir,
    load_macrocells,
    localize,
    macrocell_cases,
    reduce_0124_to_124,
    reduce_0134_to_134,
    reduce_0234_to_024,
    reduce_234_to_24,
    reduce_to_0124,
    reduce_to_0234,
    reduce_to_1234,
)


def q(rows, cell=(0, 0)):
    return Query(Configuration.from_rows(rows), cell)


def same_answer(query, reduced):
    return decide_fspp(query)[0] == decide_fspp(reduced.query)[0]


def block(reduced, sx, sy):
    w, h = reduced.provenance.stride
    return reduced.config.cells[sy * h : (sy + 1) * h, sx * w : (sx + 1) * w]


@pytest.mark.parametrize("rid", sorted(REGISTRY))
def test_every_macrocell_stays_in_target_alphabet(rid):
    spec = REGISTRY[rid]
    for table, case in macrocell_cases(rid):
        macro = load_macrocells(table)[case]
        values = [v for v in spec.source if case in (table.cases.get(v), table.questioned.get(v))]
        assert values, case
        for v in values:
            vals = set(np.unique(macro.substitute(v)).tolist())
            assert vals <= spec.target, (case, v)


@pytest.mark.parametrize("rid", sorted(REGISTRY))
def test_randomized_outputs_are_target_simple(rid, rng):
    spec = REGISTRY[rid]
    for _ in range(30):
        c = rand_config(rng, spec.source, 4)
        r = apply_reduction(rid, Query(c, (int(rng.integers(c.width)), int(rng.integers(c.height)))))
        assert r.config.values() <= spec.target


def test_macrocell_files_round_trip():
    for rid in REGISTRY:
        for table, case in macrocell_cases(rid):
            m = load_macrocells(table)[case]
            again = parse_macrocell(serialize_macrocell(m))
            assert (again.pattern == m.pattern).all() and again.question == m.question


# --- {2,3,4} -> {2,4}


def test_234_single_cells():
    four = reduce_234_to_24(q([[4]]))
    assert four.config.cells.shape == (5, 6) and (four.config.cells == 4).all()
    assert four.cell == (0, 0) and same_answer(q([[4]]), four)
    two = reduce_234_to_24(q([[2]]))
    assert (two.config.cells == 2).all()
    assert decide_fspp(two.query) == (False, None)


def test_234_rejects_other_values():
    with pytest.raises(WrongAlphabet):
        reduce_234_to_24(q([[1, 2]]))


def test_234_all_two_block_between_opposite_firings_stays_silent():
    # a 2 squeezed between two 4s fires; its all-2 block, fed only from
    # the top and bottom, does not
    query = q([[4], [2], [4]], (0, 1))
    assert decide_fspp(query)[0]
    reduced = reduce_234_to_24(query)
    assert not decide_fspp(reduced.query)[0]
    [d] = localize(reduced)
    assert d.macrocell == "R234_24/2" and d.source_cell == (0, 1)


# --- FSPP -> {1,2,3,4}


def test_1234_blocks():
    r = reduce_to_1234(q([[0, 3]], (1, 0)))
    assert (block(r, 0, 0) == 1).all()
    b = block(r, 1, 0)
    assert b[2, 2] == 3
    arms = np.zeros((5, 5), bool)
    arms[2, :] = arms[:, 2] = True
    arms[2, 2] = False
    assert (b[arms] == 3).all() and (b[~arms & ~np.eye(5, dtype=bool)[::-1] & (b != 3)] == 1).all()
    assert r.cell == (7, 2)


def test_1234_timing_on_a_short_chain():
    r = reduce_to_1234(q([[4, 3, 3]], (2, 0)))
    rep = check_1234_timing(r)
    assert rep.ok, rep
    assert same_answer(r.source, r)


def test_1234_timing_random(rng):
    for _ in range(20):
        c = rand_config(rng, range(5), 5)
        r = reduce_to_1234(Query(c, (int(rng.integers(c.width)), int(rng.integers(c.height)))))
        assert check_1234_timing(r).ok


# --- FSPP -> {0,2,3,4}


def test_0234_zigzag_block_for_one():
    r = reduce_to_0234(q([[1, 4]], (1, 0)))
    pattern = load_macrocells(REGISTRY["R_0234"].table)["1"].pattern
    assert (block(r, 0, 0) == pattern).all()


def test_0234_all_zero():
    r = reduce_to_0234(q([[0, 0], [0, 0]], (1, 1)))
    pattern = load_macrocells(REGISTRY["R_0234"].table)["a"].substitute(0)
    for sx in range(2):
        for sy in range(2):
            assert (block(r, sx, sy) == pattern).all()
    assert not decide_fspp(r.source)[0] and not decide_fspp(r.query)[0]


# --- FSPP -> {0,1,2,4}


def test_0124_each_wire_two_has_one_four_neighbor(rng):
    for _ in range(40):
        c = rand_config(rng, range(5), 4)
        query = Query(c, (int(rng.integers(c.width)), int(rng.integers(c.height))))
        r = reduce_to_0124(query)
        cells = r.config.cells
        center = r.provenance.role == CENTER
        # the property is about the fixed wiring: centers carry the source
        # value and are left out on both sides of the count
        fours = neighbor_count((cells == 4) & ~center)
        wires = (cells == 2) & ~center
        assert (fours[wires] == 1).all()


def test_0124_single_three():
    query = q([[3]])
    r = reduce_to_0124(query)
    assert r.cell == (3, 3)
    assert not decide_fspp(r.query)[0]


# --- {0,1,2,4} -> {1,2,4}


def test_0124_124_blocks():
    r = reduce_0124_to_124(q([[0, 1]], (1, 0)))
    assert (block(r, 0, 0) == 1).all()
    all_one = reduce_0124_to_124(q([[1, 1], [1, 1]], (0, 1)))
    assert not decide_fspp(all_one.source)[0] and not decide_fspp(all_one.query)[0]


def test_0124_124_rejects_three():
    with pytest.raises(WrongAlphabet):
        reduce_0124_to_124(q([[3]]))


# --- {0,2,3,4} -> {0,2,4}


def test_0234_024_examples():
    with pytest.raises(WrongAlphabet):
        reduce_0234_to_024(q([[1, 2]]))
    r = reduce_0234_to_024(q([[4]]))
    assert decide_fspp(r.query)[0]


# --- {0,1,3,4} -> {1,3,4}


def test_0134_three_by_three_blocks():
    r = reduce_0134_to_134(q([[4, 1, 0, 3]], (3, 0)))
    assert r.provenance.stride == (3, 3)
    assert block(r, 0, 0).tolist() == [[1, 3, 1], [3, 4, 3], [1, 3, 1]]
    assert block(r, 1, 0).tolist() == [[1, 3, 1], [3, 1, 3], [1, 3, 1]]
    assert (block(r, 2, 0) == 1).all()
    assert r.cell == (10, 1)


def test_0134_questioned_zero_inflates():
    query = q([[0, 0], [4, 4]], (0, 0))
    r = reduce_0134_to_134(query)
    assert r.provenance.stride == (7, 7)
    assert not decide_fspp(query)[0] and not decide_fspp(r.query)[0]


def test_0134_questioned_zero_surrounded_by_fours():
    query = q([[4, 4, 4], [4, 0, 4], [4, 4, 4]], (1, 1))
    r = reduce_0134_to_134(query)
    assert decide_fspp(query)[0] and decide_fspp(r.query)[0]


# --- chains


def test_compose_empty_is_identity():
    query = q([[1, 2], [3, 4]], (1, 1))
    r = compose([], query)
    assert r.config == query.config and r.cell == query.cell


def test_compose_chains_reach_their_alphabets(rng):
    for chain, target in (("R_0124+R0124_124", {1, 2, 4}), ("R_0234+R0234_024", {0, 2, 4})):
        for _ in range(5):
            c = rand_config(rng, range(5), 3)
            query = Query(c, (int(rng.integers(c.width)), int(rng.integers(c.height))))
            r = compose(chain, query)
            assert r.config.values() <= target
            assert same_answer(query, r)
            # back-map lands on the original grid
            sx, sy = r.provenance.source[r.cell[1], r.cell[0]]
            assert (int(sx), int(sy)) == query.cell


def test_compose_list_form_matches_string():
    query = q([[0, 3], [1, 4]], (0, 1))
    a = compose(["R_0234", "R0234_024"], query)
    b = compose("R_0234+R0234_024", query)
    assert a.config == b.config and a.cell == b.cell


def test_compose_mismatch_and_unknown():
    with pytest.raises(ChainMismatch):
        compose(["R_1234", "R234_24"], q([[1]]))
    with pytest.raises(UnknownSubject):
        apply_reduction("R_9999", q([[1]]))


# --- provenance


def test_provenance_maps_back(rng):
    c = rand_config(rng, range(5), 4, min_side=2)
    r = reduce_to_1234(Query(c, (0, 0)))
    for _ in range(20):
        x, y = int(rng.integers(r.config.width)), int(rng.integers(r.config.height))
        (sx, sy), role = r.provenance.origin((x, y))
        assert (sx, sy) == (x // 5, y // 5)
        assert role in ("background", "wire", "center")
    assert r.provenance.label((0, 0)) in ("R_1234/0q", "R_1234/a")


def test_localize_names_a_corrupted_macrocell(tmp_path):
    data = tmp_path / "data"
    shutil.copytree(default_data_dir(), data)
    path = data / "R_1234" / "a.grid"
    text = path.read_text().replace("3 3 a 3 3", "3 3 a 1 3", 1)
    path.write_text(text)
    clear_cache()
    query = q([[4, 3, 3]], (2, 0))
    r = reduce_to_1234(query, data_dir=data)
    assert not same_answer(query, r)
    assert any(d.macrocell == "R_1234/a" for d in localize(r))
    clear_cache()
