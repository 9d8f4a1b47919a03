import random

import pytest
from conftest import B, G, GR, RS, S, fixture_doc, generated
from hypothesis import given, settings
from hypothesis import strategies as st

from circloop import (
    BitsetTable,
    Configuration,
    Demand,
    MaterialBitset,
    Move,
    StaleVersionError,
    apply_move,
    bitset_from_scratch,
    bitset_update_on_move,
    legal_moves,
    parse_economy,
    reuse_match,
)


def wrapper(name, material, feature):
    return {"name": name, "level": 0, "features": [feature], "inputs": [{"quantity": 1, "supplier": material}]}


def chain_economy(length, extra_inputs=()):
    """Two interchangeable level-0 wrappers feeding a single chain of ``length`` products."""
    products = [wrapper("A", "a", "base"), wrapper("Bw", "b", "base"), wrapper("Bx", "b", "other"),
                wrapper("Ax", "a", "other2")]
    first = [{"quantity": 1, "supplier": "A"}, *({"quantity": 1, "supplier": s} for s in extra_inputs)]
    products.append({"name": "C1", "level": 1, "features": ["c1"], "inputs": first})
    for i in range(2, length + 1):
        products.append({"name": f"C{i}", "level": i, "features": [f"c{i}"],
                         "inputs": [{"quantity": 1, "supplier": f"C{i - 1}"}]})
    return parse_economy({
        "schema_version": "circloop/1",
        "raw_materials": [{"name": "a"}, {"name": "b"}],
        "products": products,
    })


def test_material_bitset_words_and_ops():
    bits = MaterialBitset((1 << 70) | 0b101, 72)
    assert bits.words == (0b101, 1 << 6)
    assert bits.popcount() == 3
    assert bits.indices() == [0, 2, 70]
    assert 70 in bits and 1 not in bits
    assert (bits | MaterialBitset(0b10, 72)).issuperset(bits)


def test_fixture_bitsets(fixture_economy):
    config = Configuration(fixture_economy)
    assert config.bitsets[B].value == 0b101
    assert bitset_from_scratch(fixture_economy, config, B).value == 0b101
    assert config.bitsets[GR].value == 0b010


def test_update_reports_changed_products(fixture_economy):
    config = Configuration(fixture_economy)
    table = BitsetTable(config)
    move = Move(B, 0, G, GR)
    apply_move(config, move)
    assert bitset_update_on_move(table, move) == {B}
    assert table[B].value == 0b110
    assert table.bits == config.bitsets.bits


def test_update_through_two_levels(fixture_economy):
    config = Configuration(fixture_economy)
    table = BitsetTable(config)
    move = Move(G, 0, S, RS)
    apply_move(config, move)
    assert bitset_update_on_move(table, move) == {G, B}
    assert table[B].value == 0b110


def test_stale_table_is_rejected(fixture_economy):
    config = Configuration(fixture_economy)
    table = BitsetTable(config)
    move = Move(B, 0, G, GR)
    apply_move(config, move)
    bitset_update_on_move(table, move)
    with pytest.raises(StaleVersionError):
        bitset_update_on_move(table, move)


def test_change_at_bottom_of_long_chain_reaches_the_top():
    e = chain_economy(100)
    config = Configuration(e)
    table = BitsetTable(config)
    move = Move(e.product_ids["C1"], 0, e.product_ids["A"], e.product_ids["Bw"])
    apply_move(config, move)
    changed = bitset_update_on_move(table, move)
    assert changed == {e.product_ids[f"C{i}"] for i in range(1, 101)}
    assert table[e.product_ids["C100"]].indices() == [1]


def test_unchanged_union_stops_propagation():
    e = chain_economy(100, extra_inputs=("Bx", "Ax"))
    config = Configuration(e)
    table = BitsetTable(config)
    move = Move(e.product_ids["C1"], 0, e.product_ids["A"], e.product_ids["Bw"])
    apply_move(config, move)
    assert bitset_update_on_move(table, move) == set()


def _fixture_with_byproduct():
    doc = fixture_doc()
    doc["products"][3]["byproducts"] = [{"material": "steel", "quantity": 0.5}]
    return parse_economy(doc)


def test_reuse_matches_byproduct_supply():
    e = _fixture_with_byproduct()
    config = Configuration(e)
    report = reuse_match(e, config, Demand({B: 1.0}))
    assert report.gross == (2.0, 0.0, 3.0)
    assert report.supply == (0.5, 0.0, 0.0)
    assert report.reused == (0.5, 0.0, 0.0)
    assert report.net == (1.5, 0.0, 3.0)
    assert report.circularity == 1.0


def test_reuse_capped_by_extraction():
    doc = fixture_doc()
    doc["products"][3]["byproducts"] = [{"material": "plastic", "quantity": 5}]
    e = parse_economy(doc)
    report = reuse_match(e, Configuration(e), Demand({B: 1.0}))
    assert report.reused == (0.0, 0.0, 3.0)
    assert report.circularity == pytest.approx(0.6)


def test_no_supply_means_zero_circularity():
    e = _fixture_with_byproduct()
    config = Configuration(e)
    apply_move(config, Move(B, 0, G, GR))
    report = reuse_match(e, config, Demand({B: 1.0}))
    assert report.supply == (0.0, 0.0, 0.0)
    assert report.circularity == 0.0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(1, 5000), steps=st.integers(0, 8))
def test_reuse_conserves_material(seed, steps):
    e, demand = generated(seed, byproduct_rate=0.8)
    config = Configuration(e)
    rng = random.Random(seed)
    for _ in range(steps):
        moves = legal_moves(e, config, demand)
        if moves:
            apply_move(config, rng.choice(moves))
    report = reuse_match(e, config, demand)
    for gross, reused, net, supply in zip(report.gross, report.reused, report.net, report.supply):
        assert abs(net + reused - gross) <= 1e-9
        assert 0 <= reused <= supply + 1e-12
    assert 0.0 <= report.circularity <= 1.0
