import pytest
from conftest import B, G, GR, RS, S, fixture_doc, generated

from circloop import (
    Configuration,
    Demand,
    MctsParams,
    Move,
    Objective,
    PlanetaryBounds,
    SearchSpaceError,
    Weights,
    apply_move,
    parse_economy,
    search_beam,
    search_exhaustive,
    search_greedy,
    search_mcts,
)
from circloop.moves import replay

CAP12 = PlanetaryBounds(max_climate=12.0)


def trap_economy():
    """Greedy stalls at X; the optimum goes through the worse-looking Y to reach B_lo."""
    def wrap(name, mat, feature):
        return {"name": name, "level": 0, "features": [feature], "inputs": [{"quantity": 1, "supplier": mat}]}

    return parse_economy({
        "schema_version": "circloop/1",
        "raw_materials": [
            {"name": "m0", "base_climate": 10.0},
            {"name": "m1", "base_climate": 1.0},
            {"name": "m2", "base_climate": 100.0},
        ],
        "products": [
            wrap("A0", "m0", "a"),
            wrap("B_hi", "m2", "b"),
            wrap("B_lo", "m1", "b"),
            {"name": "X", "level": 1, "features": ["x"], "inputs": [{"quantity": 1, "supplier": "A0"}]},
            {"name": "Y", "level": 1, "features": ["x"], "inputs": [{"quantity": 1, "supplier": "B_hi"}]},
            {"name": "T", "level": 2, "features": ["t"], "inputs": [{"quantity": 1, "supplier": "X"}]},
        ],
    })


CLIMATE_ONLY = Weights(0.0, 1.0, (0.0, 0.0, 0.0))


def test_exhaustive_fixture(fixture_economy, fixture_demand):
    result = search_exhaustive(fixture_economy, fixture_demand, Weights(), CAP12)
    assert result.evaluation.score == 21.0
    assert result.evaluation.feasible
    assert result.moves == (Move(G, 0, S, RS),)
    assert result.nodes == 4


def test_exhaustive_without_bounds_has_same_optimum(fixture_economy, fixture_demand):
    result = search_exhaustive(fixture_economy, fixture_demand, Weights(), PlanetaryBounds())
    assert result.evaluation.score == 21.0


def test_least_violation_wins_when_nothing_is_feasible(fixture_economy, fixture_demand):
    result = search_exhaustive(fixture_economy, fixture_demand, Weights(), PlanetaryBounds(max_climate=5.0))
    assert not result.evaluation.feasible
    assert result.evaluation.total_violation == 6.0
    assert result.evaluation.score == 21.0


def test_exhaustive_cap(fixture_economy, fixture_demand):
    with pytest.raises(SearchSpaceError):
        search_exhaustive(fixture_economy, fixture_demand, Weights(), CAP12, cap=3)


def test_greedy_fixture(fixture_economy, fixture_demand):
    result = search_greedy(fixture_economy, fixture_demand, Weights(), CAP12)
    assert result.moves == (Move(G, 0, S, RS),)
    assert result.evaluation.score == 21.0


def test_greedy_gets_trapped_where_exhaustive_does_not():
    e = trap_economy()
    demand = Demand({e.product_ids["T"]: 1.0})
    greedy = search_greedy(e, demand, CLIMATE_ONLY, PlanetaryBounds())
    best = search_exhaustive(e, demand, CLIMATE_ONLY, PlanetaryBounds())
    assert greedy.evaluation.score == 10.0
    assert greedy.moves == ()
    assert best.evaluation.score == 1.0
    assert len(best.moves) == 2


def test_beam_width_one_behaves_like_greedy_on_trap():
    e = trap_economy()
    demand = Demand({e.product_ids["T"]: 1.0})
    narrow = search_beam(e, demand, CLIMATE_ONLY, PlanetaryBounds(), width=1)
    wide = search_beam(e, demand, CLIMATE_ONLY, PlanetaryBounds(), width=None)
    assert narrow.evaluation.score == 10.0
    assert wide.evaluation.score == 1.0


def test_beam_fixture(fixture_economy, fixture_demand):
    result = search_beam(fixture_economy, fixture_demand, Weights(), CAP12, width=2)
    assert result.moves == (Move(G, 0, S, RS),)
    with pytest.raises(ValueError):
        search_beam(fixture_economy, fixture_demand, Weights(), CAP12, width=0)


def test_mcts_fixture(fixture_economy, fixture_demand):
    result = search_mcts(fixture_economy, fixture_demand, Weights(), CAP12, MctsParams(budget=200, seed=7))
    assert result.moves == (Move(G, 0, S, RS),)
    assert result.seed == 7


def test_mcts_finds_trap_optimum():
    e = trap_economy()
    demand = Demand({e.product_ids["T"]: 1.0})
    result = search_mcts(e, demand, CLIMATE_ONLY, PlanetaryBounds(), MctsParams(budget=200, seed=1))
    assert result.evaluation.score == 1.0


def test_mcts_parameters_are_checked():
    with pytest.raises(ValueError):
        MctsParams(budget=0)
    with pytest.raises(ValueError):
        MctsParams(exploration=-1)


@pytest.mark.parametrize("seed", [1, 2, 4])
def test_searches_agree_on_small_instances(seed):
    e, demand = generated(seed, materials=4, levels=2, per_level=3, max_inputs=2)
    best = search_exhaustive(e, demand, Weights(), PlanetaryBounds())
    beam = search_beam(e, demand, Weights(), PlanetaryBounds(), width=None)
    assert beam.evaluation.score == pytest.approx(best.evaluation.score, abs=1e-9)
    assert beam.moves == best.moves


def test_mcts_is_deterministic_for_a_seed():
    e, demand = generated(5, materials=4, levels=2, per_level=3, max_inputs=2)
    params = MctsParams(budget=300, seed=3)
    a = search_mcts(e, demand, Weights(), PlanetaryBounds(), params)
    b = search_mcts(e, demand, Weights(), PlanetaryBounds(), params)
    assert (a.moves, a.nodes, a.evaluation.score) == (b.moves, b.nodes, b.evaluation.score)


def test_mcts_root_parallel_workers(fixture_economy, fixture_demand):
    params = MctsParams(budget=100, seed=0)
    a = search_mcts(fixture_economy, fixture_demand, Weights(), CAP12, params, workers=2)
    b = search_mcts(fixture_economy, fixture_demand, Weights(), CAP12, params, workers=2)
    assert a.moves == b.moves == (Move(G, 0, S, RS),)
    assert a.nodes == b.nodes
    with pytest.raises(ValueError):
        search_mcts(fixture_economy, fixture_demand, Weights(), CAP12, params, workers=0)


def test_credit_reuse_subtracts_matched_byproducts(fixture_demand):
    doc = fixture_doc()
    doc["products"][3]["byproducts"] = [{"material": "steel", "quantity": 0.5}]
    e = parse_economy(doc)
    config = Configuration(e)
    plain = Objective(e, fixture_demand, Weights(), PlanetaryBounds()).evaluate(config)
    credited = Objective(e, fixture_demand, Weights(), PlanetaryBounds(), credit_reuse=True).evaluate(config)
    assert plain.impact.materials[0] == 2.0
    assert credited.impact.materials[0] == 1.5
    assert credited.score == plain.score - 0.5


def test_evaluation_ordering_on_fixture(fixture_economy, fixture_demand):
    objective = Objective(fixture_economy, fixture_demand, Weights(), CAP12)
    config = Configuration(fixture_economy)
    default = objective.evaluate(config)
    assert default.score == 31.0
    assert not default.feasible
    assert default.total_violation == 7.0
    apply_move(config, Move(B, 0, G, GR))
    moved = objective.evaluate(config)
    assert moved.score == 21.0 and moved.feasible
    assert moved.rank() < default.rank()


def test_greedy_steps(fixture_economy, fixture_demand):
    one = search_greedy(fixture_economy, fixture_demand, Weights(), CAP12, max_steps=1)
    assert one.evaluation.score == 21.0
    none = search_greedy(fixture_economy, fixture_demand, Weights(), CAP12, max_steps=0)
    assert none.moves == () and none.evaluation.score == 31.0


def test_greedy_stays_put_at_an_optimum():
    e = trap_economy()
    demand = Demand({e.product_ids["T"]: 1.0})
    result = search_greedy(e, demand, CLIMATE_ONLY, PlanetaryBounds(), max_steps=5)
    assert result.moves == ()


def test_exhaustive_without_substitutes_visits_one_node():
    e, demand = generated(2, class_size=1)
    result = search_exhaustive(e, demand, Weights(), PlanetaryBounds())
    assert result.nodes == 1
    assert result.moves == ()


def test_mcts_budget_100_seed_42_finds_optimum(fixture_economy, fixture_demand):
    result = search_mcts(fixture_economy, fixture_demand, Weights(), CAP12, MctsParams(budget=100, seed=42))
    assert result.evaluation.score == 21.0 and result.evaluation.feasible


def test_mcts_budget_one_never_worse_than_default(fixture_economy, fixture_demand):
    objective = Objective(fixture_economy, fixture_demand, Weights(), CAP12)
    default = objective.evaluate(Configuration(fixture_economy))
    result = search_mcts(fixture_economy, fixture_demand, Weights(), CAP12, MctsParams(budget=1, seed=0))
    assert result.evaluation.rank() <= default.rank()


def test_result_moves_replay_to_reported_evaluation(fixture_economy, fixture_demand):
    for result in (
        search_exhaustive(fixture_economy, fixture_demand, Weights(), CAP12),
        search_beam(fixture_economy, fixture_demand, Weights(), CAP12),
        search_mcts(fixture_economy, fixture_demand, Weights(), CAP12, MctsParams(budget=50, seed=1)),
    ):
        config = replay(fixture_economy, result.moves)
        again = Objective(fixture_economy, fixture_demand, Weights(), CAP12).evaluate(config)
        assert again.impact == result.evaluation.impact
