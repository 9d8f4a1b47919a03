"""Per-product raw-material presence bitsets and byproduct reuse matching."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .economy import Demand, Economy, check_demand

if TYPE_CHECKING:
    from .moves import Move
    from .state import Configuration

WORD_BITS = 64
WORD_MASK = (1 << WORD_BITS) - 1


class StaleVersionError(RuntimeError):
    pass


@dataclass(frozen=True)
class MaterialBitset:
    """Presence set over raw-material ids, backed by a Python int."""

    value: int
    width: int

    def __post_init__(self):
        if self.value >> self.width:
            raise ValueError("bits set beyond width")

    @property
    def words(self) -> tuple[int, ...]:
        n = max(1, -(-self.width // WORD_BITS))
        return tuple((self.value >> (WORD_BITS * i)) & WORD_MASK for i in range(n))

    def popcount(self) -> int:
        return self.value.bit_count()

    def indices(self) -> list[int]:
        out, v, i = [], self.value, 0
        while v:
            if v & 1:
                out.append(i)
            v >>= 1
            i += 1
        return out

    def __contains__(self, material_id: int) -> bool:
        return bool(self.value >> material_id & 1)

    def __or__(self, other: MaterialBitset) -> MaterialBitset:
        return MaterialBitset(self.value | other.value, max(self.width, other.width))

    def issuperset(self, other: MaterialBitset) -> bool:
        return other.value & ~self.value == 0


def _slot_union(economy: Economy, chosen, bits, p: int) -> int:
    spec = economy.products[p]
    if spec.level == 0:
        return 1 << spec.material
    acc = 0
    off = economy.slot_offsets
    for g in range(off[p], off[p + 1]):
        acc |= bits[chosen[g]]
    return acc


def bitset_values(economy: Economy, chosen) -> list[int]:
    """Bitset of every product, recomputed bottom-up."""
    bits = [0] * economy.n_products
    for p in economy.topological_order:
        bits[p] = _slot_union(economy, chosen, bits, p)
    return bits


def bitset_from_scratch(economy: Economy, config: Configuration, product_id: int) -> MaterialBitset:
    """Recursive OR-fold over chosen suppliers; no shared cache with the table."""
    economy.product(product_id)
    chosen = config.chosen

    def fold(p: int) -> int:
        spec = economy.products[p]
        if spec.level == 0:
            return 1 << spec.material
        base = economy.slot_offsets[p]
        acc = 0
        for s in spec.inputs:
            acc |= fold(chosen[base + s.slot_index])
        return acc

    return MaterialBitset(fold(product_id), economy.n_materials)


class BitsetTable:
    """Incrementally maintained bitsets for one configuration."""

    def __init__(self, config: Configuration):
        self.config = config
        self.bits = bitset_values(config.economy, config.chosen)
        self.version = config.version

    def __getitem__(self, product_id: int) -> MaterialBitset:
        return MaterialBitset(self.bits[product_id], self.config.economy.n_materials)

    def propagate(self, owner: int) -> dict[int, int]:
        """Recompute ``owner`` and walk up through users, cutting at unchanged entries.

        Returns the previous value of every entry that changed.
        """
        config = self.config
        economy = config.economy
        levels = economy.levels
        slot_owner = economy.slot_owner
        chosen = config.chosen
        users = config.users
        bits = self.bits
        old: dict[int, int] = {}
        heap = [(levels[owner], owner)]
        queued = {owner}
        while heap:
            _, p = heapq.heappop(heap)
            new = _slot_union(economy, chosen, bits, p)
            if new == bits[p]:
                continue
            old[p] = bits[p]
            bits[p] = new
            for g in users[p]:
                a = slot_owner[g]
                if a not in queued:
                    queued.add(a)
                    heapq.heappush(heap, (levels[a], a))
        return old


def bitset_update_on_move(table: BitsetTable, move: Move) -> set[int]:
    """Bring ``table`` up to date after ``move`` was bound into its configuration.

    The table must be exactly one version behind the configuration, and the
    configuration must already carry the move's new supplier.
    """
    config = table.config
    g = config.economy.global_slot(move.owner, move.slot_index)
    if table.version + 1 != config.version or config.chosen[g] != move.to_id:
        raise StaleVersionError(
            f"bitset table at version {table.version} cannot absorb move at config version {config.version}"
        )
    old = table.propagate(move.owner)
    table.version = config.version
    return set(old)


@dataclass(frozen=True)
class ReuseReport:
    units: tuple[float, ...]
    gross: tuple[float, ...]
    supply: tuple[float, ...]
    reused: tuple[float, ...]
    net: tuple[float, ...]
    circularity: float


def production_units(economy: Economy, chosen, demand: Demand) -> list[float]:
    """Units of every product produced to satisfy ``demand`` (users before suppliers)."""
    units = [0.0] * economy.n_products
    for p, u in demand.entries.items():
        units[p] += u
    off = economy.slot_offsets
    qty = economy.slot_quantity
    for p in reversed(economy.topological_order):
        u = units[p]
        if u == 0:
            continue
        for g in range(off[p], off[p + 1]):
            units[chosen[g]] += u * qty[g]
    return units


def reuse_match(economy: Economy, config: Configuration, demand: Demand) -> ReuseReport:
    """Greedy per-material matching of byproduct supply against raw extraction."""
    check_demand(economy, demand)
    units = production_units(economy, config.chosen, demand)
    r = economy.n_materials
    gross = [0.0] * r
    supply = [0.0] * r
    for p in economy.products:
        u = units[p.id]
        if u == 0:
            continue
        if p.level == 0:
            gross[p.material] += u
        for mat, q in p.byproducts:
            supply[mat] += u * q
    reused = [min(s, x) for s, x in zip(supply, gross)]
    net = [x - z for x, z in zip(gross, reused)]
    total_supply = sum(supply)
    circularity = sum(reused) / total_supply if total_supply > 0 else 0.0
    return ReuseReport(tuple(units), tuple(gross), tuple(supply), tuple(reused), tuple(net), circularity)
