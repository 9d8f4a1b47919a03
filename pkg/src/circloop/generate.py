"""Seeded random economies for tests and benchmarks."""

from __future__ import annotations

import random

from .economy import SCHEMA_VERSION


def generate_economy(
    seed: int,
    materials: int = 4,
    levels: int = 3,
    per_level: int = 4,
    class_size: int = 2,
    max_inputs: int = 3,
    byproduct_rate: float = 0.0,
) -> dict:
    """Strictly layered random economy document.

    Level 0 holds one wrapper per raw material; each higher level holds
    ``per_level`` products whose inputs come from the level directly below.
    Products on a level are grouped into feature classes of ``class_size``
    consecutive members (the last class may be smaller).
    """
    if levels >= 1 and materials < 1:
        raise ValueError("cannot build level-1 products without raw materials")
    if materials < 0 or levels < 0:
        raise ValueError("counts must be >= 0")
    if levels >= 1 and per_level < 1:
        raise ValueError("per_level must be >= 1")
    if class_size < 1 or max_inputs < 1:
        raise ValueError("class_size and max_inputs must be >= 1")
    if not 0.0 <= byproduct_rate <= 1.0:
        raise ValueError("byproduct_rate must lie in [0, 1]")

    rng = random.Random(seed)
    raw = [
        {
            "name": f"m{i}",
            "unit": "kg",
            "base_time": round(rng.uniform(0.1, 10.0), 6),
            "base_climate": round(rng.uniform(0.1, 10.0), 6),
        }
        for i in range(materials)
    ]
    products = []
    below = []
    for i in range(materials):
        name = f"p0_{i}"
        products.append(_product(name, 0, f"f0_{i // class_size}", [{"quantity": 1.0, "supplier": f"m{i}"}]))
        below.append(name)
    for level in range(1, levels + 1):
        current = []
        for j in range(per_level):
            n = rng.randint(1, min(max_inputs, len(below)))
            inputs = [
                {"quantity": round(rng.uniform(0.5, 4.0), 6), "supplier": s}
                for s in rng.sample(below, n)
            ]
            name = f"p{level}_{j}"
            spec = _product(name, level, f"f{level}_{j // class_size}", inputs)
            if byproduct_rate and rng.random() < byproduct_rate:
                spec["byproducts"].append(
                    {"material": f"m{rng.randrange(materials)}", "quantity": round(rng.uniform(0.05, 1.0), 6)}
                )
            products.append(spec)
            current.append(name)
        below = current
    return {"schema_version": SCHEMA_VERSION, "raw_materials": raw, "products": products}


def _product(name: str, level: int, feature: str, inputs: list) -> dict:
    return {
        "name": name,
        "level": level,
        "features": [feature],
        "inputs": inputs,
        "byproducts": [],
        "overhead": {"time": 0.0, "climate": 0.0},
    }


def top_level_demand(document: dict, units: float = 1.0) -> list[dict]:
    """Demand entries for every product on the highest level."""
    top = max(p["level"] for p in document["products"])
    return [{"product": p["name"], "units": units} for p in document["products"] if p["level"] == top]
