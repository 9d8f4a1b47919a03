"""Plan execution and CSV reporting."""

from __future__ import annotations

import csv
import io

from .bitsets import reuse_match
from .documents import DocumentError, Plan, move_from_dict, parse_plan, result_to_dict, schema_hash
from .economy import Economy, EconomyError
from .evaluation import Objective
from .lca import check_bounds, indicator_names
from .moves import replay
from .search import MctsParams, search_beam, search_exhaustive, search_greedy, search_mcts


def run_plan(economy: Economy, plan: Plan, audit: bool = False, workers: int = 1) -> dict:
    """Run the plan's algorithm and build the result document."""
    params = plan.parameters
    common = dict(credit_reuse=plan.credit_reuse, audit=audit)
    args = (economy, plan.demand, plan.weights, plan.bounds)
    try:
        if plan.algorithm == "exhaustive":
            result = search_exhaustive(*args, cap=int(params.get("cap", 10**6)), **common)
        elif plan.algorithm == "greedy":
            result = search_greedy(*args, max_steps=int(params.get("max_steps", 1000)), **common)
        elif plan.algorithm == "beam":
            width = params.get("width", 8)
            result = search_beam(*args, width=None if width is None else int(width), **common)
        elif plan.algorithm == "mcts":
            mcts = MctsParams(
                exploration=float(params.get("exploration", 1.4)),
                rollout_depth=params.get("rollout_depth"),
                budget=int(params.get("budget", 1000)),
                seed=plan.seed,
            )
            result = search_mcts(*args, params=mcts, workers=workers, **common)
        else:
            raise DocumentError(f"algorithm: unknown algorithm {plan.algorithm!r}")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, EconomyError):
            raise
        raise DocumentError(f"parameters: {exc}") from exc
    config = replay(economy, result.moves)
    circularity = reuse_match(economy, config, plan.demand).circularity
    return result_to_dict(result, economy, plan, circularity)


def _fmt(x) -> str:
    return format(float(x), ".9g")


def render_report(economy: Economy, result: dict) -> str:
    """Three CSV tables (lca, reuse, bounds), each introduced by a ``# name`` line."""
    if result.get("schema_hash") != schema_hash(economy):
        raise DocumentError("result was produced for a different economy (schema hash mismatch)")
    plan = parse_plan(result["plan"], economy)
    config = replay(economy, [move_from_dict(m, economy) for m in result["moves"]])
    config.refresh_all()
    mats = [m.name for m in economy.raw_materials]

    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    out.write("# lca\n")
    w.writerow(["product", "time", "climate", *mats])
    for p in economy.products:
        w.writerow([p.name, *(_fmt(x) for x in config.lca_rows[p.id])])

    out.write("\n# reuse\n")
    w.writerow(["material", "gross", "supply", "reused", "net"])
    reuse = reuse_match(economy, config, plan.demand)
    for i, name in enumerate(mats):
        if reuse.supply[i] > 0:
            w.writerow([name, *(_fmt(v[i]) for v in (reuse.gross, reuse.supply, reuse.reused, reuse.net))])

    out.write("\n# bounds\n")
    w.writerow(["indicator", "value", "cap", "excess"])
    impact = Objective(economy, plan.demand, plan.weights, plan.bounds, plan.credit_reuse).impact(config)
    names = indicator_names(economy)
    caps = plan.bounds.caps(economy.n_materials)
    excess = {v.indicator: v.excess for v in check_bounds(impact, plan.bounds, names).violations}
    for name, value, cap in zip(names, impact.values, caps):
        w.writerow([name, _fmt(value), "" if cap is None else _fmt(cap), _fmt(excess.get(name, 0.0))])
    return out.getvalue()
