"""Time one incremental apply_move against a full LCA rebuild of the demand closure.

Each trial starts from a fully refreshed memo, applies one random legal move,
recomputes the closure from scratch for comparison, then undoes the move.
The last column also charges the incremental side for reading the demand
roots back, which forces the deferred recomputation of dirty rows.

    python benchmarks/bench_incremental.py [--trials 100] [--seed 1]
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from circloop import Configuration, Demand, apply_move, legal_moves, parse_economy, undo_move
from circloop.generate import generate_economy, top_level_demand
from circloop.lca import lca_table
from circloop.moves import demand_closure

# (materials, levels above 0, products per level, max inputs): all give 1,000 products.
SHAPES = [(10, 99, 10, 2), (2, 499, 2, 1), (20, 49, 20, 3), (8, 124, 8, 2), (4, 249, 4, 2)]


def measure(shape, seed: int, trials: int) -> dict:
    materials, levels, per_level, max_inputs = shape
    doc = generate_economy(seed, materials=materials, levels=levels, per_level=per_level, class_size=2,
                           max_inputs=max_inputs)
    economy = parse_economy(doc)
    demand = Demand({economy.product_ids[d["product"]]: d["units"] for d in top_level_demand(doc)})
    config = Configuration(economy)
    rng = random.Random(seed)
    inc, full, with_read, dirtied = [], [], [], []
    for _ in range(trials):
        config.refresh_all()
        move = rng.choice(legal_moves(economy, config, demand))
        closure = demand_closure(economy, config.chosen, demand)
        t0 = time.perf_counter()
        token = apply_move(config, move)
        t1 = time.perf_counter()
        lca_table(economy, config.chosen, closure)
        t2 = time.perf_counter()
        undo_move(config, token)
        t3 = time.perf_counter()
        token = apply_move(config, move)
        for p in demand.roots():
            config.lca(p)
        t4 = time.perf_counter()
        undo_move(config, token)
        inc.append(t1 - t0)
        full.append(t2 - t1)
        with_read.append(t4 - t3)
        dirtied.append(len(token.marked))
    return {
        "products": economy.n_products,
        "closure": len(demand_closure(economy, config.chosen, demand)),
        "dirtied": statistics.median(dirtied),
        "apply_us": statistics.median(inc) * 1e6,
        "full_us": statistics.median(full) * 1e6,
        "apply_read_us": statistics.median(with_read) * 1e6,
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()
    print(f"{'shape':>18} {'closure':>7} {'dirtied':>7} {'apply':>9} {'full':>9} {'ratio':>6} "
          f"{'apply+read':>10} {'ratio':>6}")
    for shape in SHAPES:
        r = measure(shape, args.seed, args.trials)
        print(f"{str(shape):>18} {r['closure']:>7} {r['dirtied']:>7.0f} {r['apply_us']:>7.0f}us "
              f"{r['full_us']:>7.0f}us {r['full_us'] / r['apply_us']:>5.1f}x {r['apply_read_us']:>8.0f}us "
              f"{r['full_us'] / r['apply_read_us']:>5.1f}x")


if __name__ == "__main__":
    main()
