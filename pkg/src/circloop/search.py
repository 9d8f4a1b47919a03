"""Search over supplier bindings: exhaustive oracle, greedy, beam and single-player UCT."""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .economy import Demand, Economy
from .evaluation import Evaluation, Objective
from .lca import PlanetaryBounds, Weights
from .moves import Move, apply_move, canonical_moves, demand_closure, legal_moves, replay, undo_move
from .state import Configuration

DEFAULT_CAP = 10**6


class SearchSpaceError(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchResult:
    moves: tuple[Move, ...]
    evaluation: Evaluation
    nodes: int
    wall_time: float
    algorithm: str
    seed: int | None = None


@dataclass(frozen=True)
class MctsParams:
    exploration: float = 1.4
    rollout_depth: int | None = None
    budget: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if not self.exploration >= 0:
            raise ValueError("exploration must be >= 0")
        if self.rollout_depth is not None and self.rollout_depth < 0:
            raise ValueError("rollout depth must be >= 0")


class _Incumbent:
    """Best configuration seen so far under (rank, move list) ordering."""

    def __init__(self, objective: Objective):
        self.objective = objective
        self.rank = None
        self.moves: tuple[Move, ...] = ()

    def offer(self, config: Configuration, ev: Evaluation) -> None:
        r = ev.rank()
        if self.rank is not None and r > self.rank:
            return
        moves = canonical_moves(self.objective.economy, config, self.objective.demand)
        if self.rank is None or r < self.rank or moves < self.moves:
            self.rank = r
            self.moves = moves


def mutable_stages(economy: Economy, demand: Demand) -> list[int]:
    """Global slots with a real choice whose owner is reachable under *some* binding.

    Sorted users-before-suppliers: (descending owner level, owner, slot). An
    owner's reachability depends only on decisions at higher levels, so it is
    settled by the time its slots come up.
    """
    off = economy.slot_offsets
    seen: set[int] = set()
    stack = demand.roots()
    while stack:
        p = stack.pop()
        if p in seen:
            continue
        seen.add(p)
        for g in range(off[p], off[p + 1]):
            stack.extend(y for y in economy.slot_options(g) if y not in seen)
    levels = economy.levels
    stages = [
        g
        for p in sorted(seen, key=lambda p: (-levels[p], p))
        for g in range(off[p], off[p + 1])
        if len(economy.slot_options(g)) > 1
    ]
    return stages


def state_space_bound(economy: Economy, demand: Demand) -> int:
    """Upper bound on the number of distinct reachable bindings."""
    return math.prod(len(economy.slot_options(g)) for g in mutable_stages(economy, demand))


def _finish(objective: Objective, moves, nodes: int, started: float, algorithm: str, seed) -> SearchResult:
    config = replay(objective.economy, moves)
    return SearchResult(
        tuple(moves), objective.evaluate(config), nodes, time.perf_counter() - started, algorithm, seed
    )


def search_exhaustive(
    economy: Economy,
    demand: Demand,
    weights: Weights,
    bounds: PlanetaryBounds,
    cap: int = DEFAULT_CAP,
    credit_reuse: bool = False,
    audit: bool = False,
) -> SearchResult:
    """Enumerate every reachable binding; each is evaluated exactly once.

    Raises ``SearchSpaceError`` as soon as more than ``cap`` bindings turn up.
    """
    started = time.perf_counter()
    objective = Objective(economy, demand, weights, bounds, credit_reuse)
    stages = mutable_stages(economy, demand)

    config = Configuration(economy, audit=audit)
    best = _Incumbent(objective)
    off = economy.slot_offsets
    owners = economy.slot_owner
    levels = economy.levels
    nodes = 0

    def dfs(i: int, closure: set[int]) -> None:
        nonlocal nodes
        if i == len(stages):
            nodes += 1
            if nodes > cap:
                raise SearchSpaceError(f"more than {cap} reachable assignments")
            best.offer(config, objective.evaluate(config))
            return
        g = stages[i]
        owner = owners[g]
        if i == 0 or levels[owners[stages[i - 1]]] != levels[owner]:
            closure = demand_closure(economy, config.chosen, demand)
        if owner not in closure:
            dfs(i + 1, closure)
            return
        cur = config.chosen[g]
        for y in economy.slot_options(g):
            if y == cur:
                dfs(i + 1, closure)
            else:
                token = apply_move(config, Move(owner, g - off[owner], cur, y))
                dfs(i + 1, closure)
                undo_move(config, token)

    dfs(0, set())
    return _finish(objective, best.moves, nodes, started, "exhaustive", None)


def search_greedy(
    economy: Economy,
    demand: Demand,
    weights: Weights,
    bounds: PlanetaryBounds,
    max_steps: int = 1000,
    credit_reuse: bool = False,
    audit: bool = False,
) -> SearchResult:
    """Hill-climb on single moves; stops at the first local optimum."""
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    started = time.perf_counter()
    objective = Objective(economy, demand, weights, bounds, credit_reuse)
    config = Configuration(economy, audit=audit)
    current = objective.evaluate(config).rank()
    nodes = 1
    for _ in range(max_steps):
        best_key = None
        best_move = None
        for m in legal_moves(economy, config, demand):
            token = apply_move(config, m)
            r = objective.evaluate(config).rank()
            nodes += 1
            if best_key is None or r <= best_key[0]:
                key = (r, canonical_moves(economy, config, demand))
                if best_key is None or key < best_key:
                    best_key, best_move = key, m
            undo_move(config, token)
        if best_key is None or not best_key[0] < current:
            break
        apply_move(config, best_move)
        config.commit()
        current = best_key[0]
    return _finish(objective, canonical_moves(economy, config, demand), nodes, started, "greedy", None)


def search_beam(
    economy: Economy,
    demand: Demand,
    weights: Weights,
    bounds: PlanetaryBounds,
    width: int | None = 8,
    credit_reuse: bool = False,
    audit: bool = False,
) -> SearchResult:
    """Slot-by-slot beam, users before suppliers; ``width=None`` keeps everything."""
    if width is not None and width < 1:
        raise ValueError("width must be >= 1")
    started = time.perf_counter()
    objective = Objective(economy, demand, weights, bounds, credit_reuse)
    config = Configuration(economy, audit=audit)
    off = economy.slot_offsets
    owners = economy.slot_owner

    root = objective.evaluate(config)
    nodes = 1
    # (rank, canonical moves, path moves, evaluation)
    beam = [(root.rank(), (), (), root)]
    for g in mutable_stages(economy, demand):
        owner = owners[g]
        candidates = []
        for rank, canon, path, ev in beam:
            tokens = [apply_move(config, m) for m in path]
            if owner not in demand_closure(economy, config.chosen, demand):
                candidates.append((rank, canon, path, ev))
            else:
                cur = config.chosen[g]
                for y in economy.slot_options(g):
                    if y == cur:
                        candidates.append((rank, canon, path, ev))
                        continue
                    m = Move(owner, g - off[owner], cur, y)
                    token = apply_move(config, m)
                    child = objective.evaluate(config)
                    nodes += 1
                    candidates.append((child.rank(), canonical_moves(economy, config, demand), path + (m,), child))
                    undo_move(config, token)
            for token in reversed(tokens):
                undo_move(config, token)
        candidates.sort(key=lambda c: (c[0], c[1]))
        beam = candidates if width is None else candidates[:width]
    return _finish(objective, beam[0][1], nodes, started, "beam", None)


class _Node:
    __slots__ = ("move", "parent", "children", "untried", "visits", "total")

    def __init__(self, move: Move | None, parent: _Node | None):
        self.move = move
        self.parent = parent
        self.children: list[_Node] = []
        self.untried: list[Move] | None = None
        self.visits = 0
        self.total = 0.0


def _uct_child(node: _Node, c: float) -> _Node:
    log_n = math.log(node.visits)
    best, best_score = None, -math.inf
    for child in node.children:
        score = child.total / child.visits + c * math.sqrt(log_n / child.visits)
        if score > best_score:
            best, best_score = child, score
    return best


def _mcts_worker(economy, demand, weights, bounds, params: MctsParams, credit_reuse, audit):
    objective = Objective(economy, demand, weights, bounds, credit_reuse)
    rng = random.Random(params.seed)
    config = Configuration(economy, audit=audit)
    depth = params.rollout_depth
    if depth is None:
        depth = len(mutable_stages(economy, demand))

    best = _Incumbent(objective)
    root_ev = objective.evaluate(config)
    norm = root_ev.score if root_ev.score > 0 else 1.0
    vnorm = root_ev.total_violation if root_ev.total_violation > 0 else 1.0

    def value(ev: Evaluation) -> float:
        # Bounded, decreasing in normalized score; feasible values lie in (1, 2],
        # infeasible ones in (-1, 0].
        if ev.feasible:
            return 1.0 + 1.0 / (1.0 + max(ev.score, 0.0) / norm)
        return 1.0 / (1.0 + ev.total_violation / vnorm) - 1.0

    # Transposition tables keyed by binding: rollouts revisit the same states often.
    values: dict[tuple, float] = {}
    moves_at: dict[tuple, list[Move]] = {}

    def visit() -> float:
        key = tuple(config.chosen)
        v = values.get(key)
        if v is None:
            ev = objective.evaluate(config)
            best.offer(config, ev)
            v = values[key] = value(ev)
        return v

    def moves_here() -> list[Move]:
        key = tuple(config.chosen)
        ms = moves_at.get(key)
        if ms is None:
            ms = moves_at[key] = legal_moves(economy, config, demand)
        return ms

    root_value = visit()
    nodes = 1
    root = _Node(None, None)
    for _ in range(params.budget):
        node = root
        tokens = []
        while node.untried is not None and not node.untried and node.children:
            node = _uct_child(node, params.exploration)
            tokens.append(apply_move(config, node.move))
        if node.untried is None:
            node.untried = list(moves_here())
        if node is root and not node.untried and not node.children:
            break
        if node.untried:
            m = node.untried.pop(rng.randrange(len(node.untried)))
            tokens.append(apply_move(config, m))
            child = _Node(m, node)
            node.children.append(child)
            node = child
            reward = visit()
            nodes += 1
        elif node is root:
            reward = root_value
        else:
            reward = visit()
            nodes += 1

        rollout = []
        for _ in range(depth):
            moves = moves_here()
            if not moves:
                break
            rollout.append(apply_move(config, moves[rng.randrange(len(moves))]))
            reward = max(reward, visit())
            nodes += 1
        for token in reversed(rollout):
            undo_move(config, token)
        for token in reversed(tokens):
            undo_move(config, token)

        while node is not None:
            node.visits += 1
            node.total += reward
            node = node.parent
    return best.rank, best.moves, nodes


def search_mcts(
    economy: Economy,
    demand: Demand,
    weights: Weights,
    bounds: PlanetaryBounds,
    params: MctsParams = MctsParams(),
    workers: int = 1,
    credit_reuse: bool = False,
    audit: bool = False,
) -> SearchResult:
    """Single-player UCT returning the best binding ever evaluated.

    With ``workers > 1`` independent trees run in separate processes with
    seeds ``seed + i``; the best result wins, ties to the lowest worker index.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    started = time.perf_counter()
    objective = Objective(economy, demand, weights, bounds, credit_reuse)
    jobs = [
        (economy, demand, weights, bounds, MctsParams(params.exploration, params.rollout_depth, params.budget,
                                                      params.seed + i), credit_reuse, audit)
        for i in range(workers)
    ]
    if workers == 1:
        results = [_mcts_worker(*jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_mcts_worker, *job) for job in jobs]
            results = [f.result() for f in futures]
    rank, moves, _ = min(results, key=lambda r: (r[0], r[1]))
    nodes = sum(r[2] for r in results)
    return _finish(objective, moves, nodes, started, "mcts", params.seed)
