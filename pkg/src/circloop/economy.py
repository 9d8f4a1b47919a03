"""Static economy catalog: raw materials, products, recipes and feature classes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

SCHEMA_VERSION = "circloop/1"


class EconomyError(ValueError):
    """Raised when an economy (or a reference into one) is invalid."""

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True)
class RawMaterial:
    id: int
    name: str
    unit: str = "kg"
    base_time: float = 0.0
    base_climate: float = 0.0


@dataclass(frozen=True)
class InputSlot:
    slot_index: int
    quantity: float
    default_supplier: int


@dataclass(frozen=True)
class ProductSpec:
    """A product recipe.

    Level-0 products wrap exactly one raw material (``material``) and have no
    input slots; every other product draws on strictly lower-level products.
    """

    id: int
    name: str
    level: int
    features: frozenset[str]
    inputs: tuple[InputSlot, ...] = ()
    material: int | None = None
    byproducts: tuple[tuple[int, float], ...] = ()
    direct_overhead: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class Demand:
    entries: dict[int, float] = field(default_factory=dict)

    def roots(self) -> list[int]:
        """Products with strictly positive demand, ascending id."""
        return sorted(p for p, units in self.entries.items() if units > 0)


@dataclass(frozen=True)
class Economy:
    raw_materials: tuple[RawMaterial, ...]
    products: tuple[ProductSpec, ...]
    schema_version: str = SCHEMA_VERSION

    @property
    def n_materials(self) -> int:
        return len(self.raw_materials)

    @property
    def n_products(self) -> int:
        return len(self.products)

    @property
    def n_indicators(self) -> int:
        return 2 + len(self.raw_materials)

    def product(self, ref: int | str) -> ProductSpec:
        if isinstance(ref, str):
            try:
                return self.products[self.product_ids[ref]]
            except KeyError:
                raise EconomyError(f"unknown product {ref!r}") from None
        if not 0 <= ref < len(self.products):
            raise EconomyError(f"unknown product id {ref}")
        return self.products[ref]

    def material(self, ref: int | str) -> RawMaterial:
        if isinstance(ref, str):
            try:
                return self.raw_materials[self.material_ids[ref]]
            except KeyError:
                raise EconomyError(f"unknown raw material {ref!r}") from None
        if not 0 <= ref < len(self.raw_materials):
            raise EconomyError(f"unknown raw material id {ref}")
        return self.raw_materials[ref]

    @cached_property
    def product_ids(self) -> dict[str, int]:
        return {p.name: p.id for p in self.products}

    @cached_property
    def material_ids(self) -> dict[str, int]:
        return {m.name: m.id for m in self.raw_materials}

    # Flattened slot tables; a "global slot" indexes every input slot of every product.

    @cached_property
    def slot_offsets(self) -> tuple[int, ...]:
        offsets = [0]
        for p in self.products:
            offsets.append(offsets[-1] + len(p.inputs))
        return tuple(offsets)

    @property
    def n_slots(self) -> int:
        return self.slot_offsets[-1]

    @cached_property
    def slot_owner(self) -> tuple[int, ...]:
        return tuple(p.id for p in self.products for _ in p.inputs)

    @cached_property
    def slot_quantity(self) -> tuple[float, ...]:
        return tuple(s.quantity for p in self.products for s in p.inputs)

    @cached_property
    def slot_default(self) -> tuple[int, ...]:
        return tuple(s.default_supplier for p in self.products for s in p.inputs)

    def global_slot(self, product_id: int, slot_index: int) -> int:
        n = len(self.product(product_id).inputs)
        if not 0 <= slot_index < n:
            raise EconomyError(f"product {self.products[product_id].name}: no slot {slot_index}")
        return self.slot_offsets[product_id] + slot_index

    @cached_property
    def levels(self) -> tuple[int, ...]:
        return tuple(p.level for p in self.products)

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        """Product ids by ascending (level, id); suppliers always precede users."""
        return tuple(sorted(range(len(self.products)), key=lambda i: (self.products[i].level, i)))

    @cached_property
    def topological_rank(self) -> tuple[int, ...]:
        rank = [0] * len(self.products)
        for i, p in enumerate(self.topological_order):
            rank[p] = i
        return tuple(rank)

    @cached_property
    def feature_classes(self) -> dict[frozenset[str], tuple[int, ...]]:
        classes: dict[frozenset[str], list[int]] = {}
        for p in self.products:
            classes.setdefault(p.features, []).append(p.id)
        return {k: tuple(v) for k, v in classes.items()}

    def class_members(self, product_id: int) -> tuple[int, ...]:
        return self.feature_classes[self.product(product_id).features]

    def slot_options(self, global_slot: int) -> tuple[int, ...]:
        """Every supplier a slot may legally bind to, ascending id (default included)."""
        return self._slot_options[global_slot]

    @cached_property
    def _slot_options(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for g, owner in enumerate(self.slot_owner):
            lvl = self.products[owner].level
            members = self.class_members(self.slot_default[g])
            out.append(tuple(y for y in members if self.products[y].level < lvl))
        return tuple(out)


def substitutes(economy: Economy, product_id: int) -> list[int]:
    """Other products with exactly the same feature set, ascending id."""
    members = economy.class_members(product_id)
    return [p for p in members if p != product_id]


def _finite_nonneg(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) and x >= 0


def validate(economy: Economy) -> list[str]:
    """Check every catalog invariant; returns human-readable diagnostics (empty if valid)."""
    diags: list[str] = []
    if economy.schema_version != SCHEMA_VERSION:
        diags.append(f"economy: unknown schema version {economy.schema_version!r}")

    seen_names: set[str] = set()
    for i, m in enumerate(economy.raw_materials):
        if m.id != i:
            diags.append(f"material {m.name}: id {m.id} is not its position {i}")
        if m.name in seen_names:
            diags.append(f"material {m.name}: duplicate name")
        seen_names.add(m.name)
        if not _finite_nonneg(m.base_time):
            diags.append(f"material {m.name}: base_time must be finite and >= 0")
        if not _finite_nonneg(m.base_climate):
            diags.append(f"material {m.name}: base_climate must be finite and >= 0")

    k = len(economy.products)
    r = len(economy.raw_materials)
    seen_names = set()
    for i, p in enumerate(economy.products):
        tag = f"product {p.name}"
        if p.id != i:
            diags.append(f"{tag}: id {p.id} is not its position {i}")
        if p.name in seen_names:
            diags.append(f"{tag}: duplicate name")
        seen_names.add(p.name)
        if not isinstance(p.level, int) or p.level < 0:
            diags.append(f"{tag}: level must be a natural number")
            continue
        if not p.features:
            diags.append(f"{tag}: empty feature set")
        if p.level == 0:
            if p.inputs or p.material is None:
                diags.append(f"{tag}: level-0 must wrap exactly one raw material")
            elif not 0 <= p.material < r:
                diags.append(f"{tag}: unknown raw material id {p.material}")
        elif p.material is not None:
            diags.append(f"{tag}: only level-0 products may wrap a raw material")
        for j, s in enumerate(p.inputs):
            if s.slot_index != j:
                diags.append(f"{tag}: slot {j} has slot_index {s.slot_index}")
            if not _finite_nonneg(s.quantity):
                diags.append(f"{tag}: slot {j} quantity must be finite and >= 0")
            if not 0 <= s.default_supplier < k:
                diags.append(f"{tag}: slot {j} references unknown product id {s.default_supplier}")
                continue
            supplier = economy.products[s.default_supplier]
            if isinstance(supplier.level, int) and supplier.level >= p.level:
                diags.append(
                    f"level violation at product {p.name}: slot {j} supplier "
                    f"{supplier.name} has level {supplier.level} >= {p.level}"
                )
        for mat, qty in p.byproducts:
            if not 0 <= mat < r:
                diags.append(f"{tag}: byproduct references unknown raw material id {mat}")
            if not _finite_nonneg(qty):
                diags.append(f"{tag}: byproduct quantity must be finite and >= 0")
        if len(p.direct_overhead) != 2 or not all(_finite_nonneg(x) for x in p.direct_overhead):
            diags.append(f"{tag}: overhead must be two finite values >= 0")

    cycle = _find_cycle(economy)
    if cycle:
        names = " -> ".join(economy.products[i].name for i in cycle)
        diags.append(f"product {economy.products[cycle[0]].name}: default-supplier cycle {names}")
    return diags


def _find_cycle(economy: Economy) -> list[int] | None:
    # Independent of levels: plain DFS over default-supplier edges.
    k = len(economy.products)
    state = [0] * k
    stack_path: list[int] = []

    def edges(p):
        return [s.default_supplier for s in economy.products[p].inputs if 0 <= s.default_supplier < k]

    for start in range(k):
        if state[start]:
            continue
        it_stack = [(start, iter(edges(start)))]
        state[start] = 1
        stack_path.append(start)
        while it_stack:
            node, it = it_stack[-1]
            nxt = next(it, None)
            if nxt is None:
                it_stack.pop()
                stack_path.pop()
                state[node] = 2
            elif state[nxt] == 1:
                return stack_path[stack_path.index(nxt):] + [nxt]
            elif state[nxt] == 0:
                state[nxt] = 1
                stack_path.append(nxt)
                it_stack.append((nxt, iter(edges(nxt))))
    return None


def check_demand(economy: Economy, demand: Demand, require_entry: bool = True) -> None:
    diags = []
    if require_entry and not demand.entries:
        diags.append("demand: at least one entry required")
    for p, units in demand.entries.items():
        if not isinstance(p, int) or not 0 <= p < economy.n_products:
            diags.append(f"demand: unknown product id {p}")
        if not _finite_nonneg(units):
            diags.append(f"demand: units for product {p} must be finite and >= 0")
    if diags:
        raise EconomyError(diags)
