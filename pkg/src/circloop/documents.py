"""JSON documents: economy catalogs, plan requests and search results."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any

from .economy import (
    SCHEMA_VERSION,
    Demand,
    Economy,
    EconomyError,
    InputSlot,
    ProductSpec,
    RawMaterial,
    validate,
)
from .lca import PlanetaryBounds, Weights
from .moves import Move
from .search import SearchResult

ALGORITHMS = ("exhaustive", "greedy", "beam", "mcts")


class DocumentError(EconomyError):
    """Malformed document: bad syntax, wrong shape or unknown schema version."""


def _load(document) -> Any:
    if isinstance(document, (str, bytes)):
        try:
            return json.loads(document)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return document


def _number(value, where: str, errors: list[str]) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{where}: expected a number, got {value!r}")
        return math.nan
    return float(value)


def _obj(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise DocumentError(f"{where}: expected an object")
    return value


def _arr(value, where: str) -> list:
    if not isinstance(value, list):
        raise DocumentError(f"{where}: expected an array")
    return value


def _text(value, where: str) -> str:
    if not isinstance(value, str):
        raise DocumentError(f"{where}: expected a string")
    return value


def parse_economy(document) -> Economy:
    """Parse and validate an economy document (JSON text or already-loaded object).

    Raises ``DocumentError`` for malformed input and ``EconomyError`` carrying
    every diagnostic when the content violates a catalog invariant.
    """
    doc = _obj(_load(document), "document")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DocumentError(f"schema_version: unknown version {version!r}")

    shape: list[str] = []
    diags: list[str] = []
    materials = []
    for i, m in enumerate(_arr(doc.get("raw_materials"), "raw_materials")):
        where = f"raw_materials[{i}]"
        m = _obj(m, where)
        materials.append(
            RawMaterial(
                id=i,
                name=_text(m.get("name"), f"{where}.name"),
                unit=_text(m.get("unit", "kg"), f"{where}.unit"),
                base_time=_number(m.get("base_time", 0.0), f"{where}.base_time", shape),
                base_climate=_number(m.get("base_climate", 0.0), f"{where}.base_climate", shape),
            )
        )
    material_ids = {m.name: m.id for m in materials}

    raw_products = _arr(doc.get("products"), "products")
    product_ids: dict[str, int] = {}
    for i, p in enumerate(raw_products):
        name = _text(_obj(p, f"products[{i}]").get("name"), f"products[{i}].name")
        product_ids.setdefault(name, i)

    products = []
    for i, p in enumerate(raw_products):
        where = f"products[{i}]"
        name = p["name"]
        level = p.get("level")
        if isinstance(level, bool) or not isinstance(level, int):
            raise DocumentError(f"{where}.level: expected an integer")
        features = _arr(p.get("features", []), f"{where}.features")
        for j, f in enumerate(features):
            _text(f, f"{where}.features[{j}]")
        entries = _arr(p.get("inputs", []), f"{where}.inputs")
        inputs: list[InputSlot] = []
        material = None
        if level == 0:
            ok = len(entries) == 1 and isinstance(entries[0], dict)
            if ok:
                sup = entries[0].get("supplier")
                qty = entries[0].get("quantity")
                ok = sup in material_ids and qty == 1
            if ok:
                material = material_ids[sup]
            else:
                diags.append(f"product {name}: level-0 must wrap exactly one raw material")
        else:
            for j, a in enumerate(entries):
                a = _obj(a, f"{where}.inputs[{j}]")
                qty = _number(a.get("quantity"), f"{where}.inputs[{j}].quantity", shape)
                sup = _text(a.get("supplier"), f"{where}.inputs[{j}].supplier")
                if sup not in product_ids:
                    diags.append(f"product {name}: {where}.inputs[{j}] references unknown product {sup!r}")
                    continue
                inputs.append(InputSlot(len(inputs), qty, product_ids[sup]))
        byproducts = []
        for j, b in enumerate(_arr(p.get("byproducts", []), f"{where}.byproducts")):
            b = _obj(b, f"{where}.byproducts[{j}]")
            mat = _text(b.get("material"), f"{where}.byproducts[{j}].material")
            qty = _number(b.get("quantity"), f"{where}.byproducts[{j}].quantity", shape)
            if mat not in material_ids:
                diags.append(f"product {name}: byproduct references unknown raw material {mat!r}")
                continue
            byproducts.append((material_ids[mat], qty))
        overhead = _obj(p.get("overhead", {}), f"{where}.overhead")
        products.append(
            ProductSpec(
                id=i,
                name=name,
                level=level,
                features=frozenset(features),
                inputs=tuple(inputs),
                material=material,
                byproducts=tuple(byproducts),
                direct_overhead=(
                    _number(overhead.get("time", 0.0), f"{where}.overhead.time", shape),
                    _number(overhead.get("climate", 0.0), f"{where}.overhead.climate", shape),
                ),
            )
        )
    if shape:
        raise DocumentError(shape)
    economy = Economy(tuple(materials), tuple(products), version)
    diags.extend(d for d in validate(economy) if d not in diags)
    if diags:
        raise EconomyError(diags)
    return economy


def serialize_economy(economy: Economy) -> dict:
    names = [p.name for p in economy.products]
    mats = [m.name for m in economy.raw_materials]
    products = []
    for p in economy.products:
        if p.level == 0:
            inputs = [{"quantity": 1.0, "supplier": mats[p.material]}]
        else:
            inputs = [{"quantity": s.quantity, "supplier": names[s.default_supplier]} for s in p.inputs]
        products.append(
            {
                "name": p.name,
                "level": p.level,
                "features": sorted(p.features),
                "inputs": inputs,
                "byproducts": [{"material": mats[m], "quantity": q} for m, q in p.byproducts],
                "overhead": {"time": p.direct_overhead[0], "climate": p.direct_overhead[1]},
            }
        )
    return {
        "schema_version": economy.schema_version,
        "raw_materials": [
            {"name": m.name, "unit": m.unit, "base_time": m.base_time, "base_climate": m.base_climate}
            for m in economy.raw_materials
        ],
        "products": products,
    }


def dumps(document: dict) -> str:
    return json.dumps(document, indent=2, ensure_ascii=True) + "\n"


def schema_hash(economy: Economy) -> str:
    canonical = json.dumps(serialize_economy(economy), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(canonical.encode("ascii")).hexdigest()


@dataclass
class Plan:
    demand: Demand
    weights: Weights
    bounds: PlanetaryBounds
    algorithm: str = "exhaustive"
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    credit_reuse: bool = False


def _per_material(value, economy: Economy, default, where: str, errors: list[str]) -> tuple:
    if value is None:
        return tuple(default for _ in economy.raw_materials)
    value = _obj(value, where)
    for key in value:
        if key not in economy.material_ids:
            raise DocumentError(f"{where}: unknown raw material {key!r}")
    out = []
    for m in economy.raw_materials:
        v = value.get(m.name, default)
        out.append(v if v is None else _number(v, f"{where}.{m.name}", errors))
    return tuple(out)


def parse_plan(document, economy: Economy) -> Plan:
    doc = _obj(_load(document), "plan")
    errors: list[str] = []
    entries = {}
    for i, d in enumerate(_arr(doc.get("demand"), "demand")):
        d = _obj(d, f"demand[{i}]")
        name = _text(d.get("product"), f"demand[{i}].product")
        if name not in economy.product_ids:
            raise DocumentError(f"demand[{i}].product: unknown product {name!r}")
        pid = economy.product_ids[name]
        entries[pid] = entries.get(pid, 0.0) + _number(d.get("units"), f"demand[{i}].units", errors)
    if not entries:
        raise DocumentError("demand: at least one entry required")

    w = _obj(doc.get("weights", {}), "weights")
    weights = Weights(
        _number(w.get("time", 1.0), "weights.time", errors),
        _number(w.get("climate", 1.0), "weights.climate", errors),
        _per_material(w.get("materials"), economy, 1.0, "weights.materials", errors),
    )
    b = _obj(doc.get("bounds", {}), "bounds")

    def cap(key):
        v = b.get(key)
        return None if v is None else _number(v, f"bounds.{key}", errors)

    bounds = PlanetaryBounds(cap("time"), cap("climate"), _per_material(b.get("materials"), economy, None,
                                                                          "bounds.materials", errors))
    algorithm = doc.get("algorithm", "exhaustive")
    if algorithm not in ALGORITHMS:
        raise DocumentError(f"algorithm: unknown algorithm {algorithm!r}")
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise DocumentError("seed: expected an integer")
    credit = doc.get("credit_reuse", False)
    if not isinstance(credit, bool):
        raise DocumentError("credit_reuse: expected a boolean")
    if errors:
        raise DocumentError(errors)
    return Plan(Demand(entries), weights, bounds, algorithm, dict(_obj(doc.get("parameters", {}), "parameters")),
                seed, credit)


def plan_to_dict(plan: Plan, economy: Economy) -> dict:
    mats = [m.name for m in economy.raw_materials]
    names = [p.name for p in economy.products]
    w = plan.weights.vector(economy.n_materials)
    caps = plan.bounds.caps(economy.n_materials)
    return {
        "demand": [{"product": names[p], "units": u} for p, u in sorted(plan.demand.entries.items())],
        "weights": {"time": float(w[0]), "climate": float(w[1]),
                    "materials": {m: float(x) for m, x in zip(mats, w[2:])}},
        "bounds": {"time": caps[0], "climate": caps[1], "materials": dict(zip(mats, caps[2:]))},
        "algorithm": plan.algorithm,
        "parameters": plan.parameters,
        "seed": plan.seed,
        "credit_reuse": plan.credit_reuse,
    }


def move_to_dict(move: Move, economy: Economy) -> dict:
    names = [p.name for p in economy.products]
    return {"owner": names[move.owner], "slot": move.slot_index,
            "from": names[move.from_id], "to": names[move.to_id]}


def move_from_dict(d: dict, economy: Economy) -> Move:
    try:
        return Move(
            economy.product_ids[d["owner"]], int(d["slot"]),
            economy.product_ids[d["from"]], economy.product_ids[d["to"]],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"malformed move {d!r}") from exc


def result_to_dict(result: SearchResult, economy: Economy, plan: Plan, circularity: float) -> dict:
    """Result document; ``wall_time`` is the only field that varies between identical runs."""
    ev = result.evaluation
    mats = [m.name for m in economy.raw_materials]
    return {
        "moves": [move_to_dict(m, economy) for m in result.moves],
        "impact": {
            "time": ev.impact.time,
            "climate": ev.impact.climate,
            "materials": {m: float(x) for m, x in zip(mats, ev.impact.materials)},
        },
        "score": ev.score,
        "feasible": ev.feasible,
        "violations": [
            {"indicator": v.indicator, "value": v.value, "bound": v.bound, "excess": v.excess}
            for v in ev.feasibility.violations
        ],
        "total_violation": ev.total_violation,
        "circularity": circularity,
        "nodes": result.nodes,
        "wall_time": result.wall_time,
        "seed": plan.seed,
        "algorithm": result.algorithm,
        "plan": plan_to_dict(plan, economy),
        "schema_hash": schema_hash(economy),
    }
