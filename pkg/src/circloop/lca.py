"""Life-cycle impact vectors: recursion over recipes, replacement patch, bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .economy import Demand, Economy, EconomyError, check_demand

if TYPE_CHECKING:
    from .state import Configuration

TOL = 1e-9


class DimensionError(ValueError):
    pass


class LcaVector:
    """Impact tuple laid out as ``[time, climate, material_0, ...]``."""

    __slots__ = ("values",)

    def __init__(self, values):
        self.values = np.asarray(values, dtype=np.float64)

    @classmethod
    def zeros(cls, n_materials: int) -> LcaVector:
        return cls(np.zeros(2 + n_materials))

    @classmethod
    def of(cls, time: float, climate: float, materials) -> LcaVector:
        return cls(np.concatenate(([time, climate], np.asarray(materials, dtype=np.float64))))

    @property
    def time(self) -> float:
        return float(self.values[0])

    @property
    def climate(self) -> float:
        return float(self.values[1])

    @property
    def materials(self) -> np.ndarray:
        return self.values[2:]

    @property
    def n_materials(self) -> int:
        return len(self.values) - 2

    def _check(self, other: LcaVector) -> None:
        if self.values.shape != other.values.shape:
            raise DimensionError(f"LCA dimension mismatch: {len(self.values)} vs {len(other.values)}")

    def __add__(self, other: LcaVector) -> LcaVector:
        self._check(other)
        return LcaVector(self.values + other.values)

    def __sub__(self, other: LcaVector) -> LcaVector:
        self._check(other)
        return LcaVector(self.values - other.values)

    def __mul__(self, scalar: float) -> LcaVector:
        return LcaVector(self.values * scalar)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, LcaVector) and np.array_equal(self.values, other.values)

    __hash__ = None

    def allclose(self, other: LcaVector, atol: float = TOL) -> bool:
        self._check(other)
        return bool(np.all(np.abs(self.values - other.values) <= atol))

    def as_tuple(self) -> tuple:
        return (self.time, self.climate, tuple(float(x) for x in self.materials))

    def __repr__(self) -> str:
        t, c, r = self.as_tuple()
        return f"LcaVector(time={t:g}, climate={c:g}, materials={r})"


@dataclass(frozen=True)
class PlanetaryBounds:
    """Absolute caps per indicator; ``None`` means unbounded."""

    max_time: float | None = None
    max_climate: float | None = None
    max_materials: tuple[float | None, ...] | None = None

    def caps(self, n_materials: int) -> list[float | None]:
        mats = self.max_materials
        if mats is None:
            mats = (None,) * n_materials
        if len(mats) != n_materials:
            raise DimensionError(f"bounds cover {len(mats)} materials, economy has {n_materials}")
        out = [self.max_time, self.max_climate, *mats]
        for cap in out:
            if cap is not None and not (math.isfinite(cap) and cap >= 0):
                raise ValueError(f"invalid cap {cap!r}")
        return out


@dataclass(frozen=True)
class Weights:
    w_time: float = 1.0
    w_climate: float = 1.0
    w_materials: tuple[float, ...] | None = None

    def vector(self, n_materials: int) -> np.ndarray:
        mats = self.w_materials if self.w_materials is not None else (1.0,) * n_materials
        if len(mats) != n_materials:
            raise DimensionError(f"weights cover {len(mats)} materials, economy has {n_materials}")
        vec = np.array([self.w_time, self.w_climate, *mats], dtype=np.float64)
        if np.any(vec < 0) or not np.all(np.isfinite(vec)):
            raise ValueError("weights must be finite and >= 0")
        if not np.any(vec > 0):
            raise ValueError("at least one weight must be positive")
        return vec


@dataclass(frozen=True)
class Violation:
    indicator: str
    value: float
    bound: float
    excess: float


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def total_violation(self) -> float:
        return float(sum(v.excess for v in self.violations))


def indicator_names(economy: Economy) -> list[str]:
    return ["time", "climate", *(m.name for m in economy.raw_materials)]


def lca_raw(economy: Economy, material_id: int) -> LcaVector:
    m = economy.material(material_id)
    vec = LcaVector.zeros(economy.n_materials)
    vec.values[0] = m.base_time
    vec.values[1] = m.base_climate
    vec.values[2 + m.id] = 1.0
    return vec


def _raw_rows(economy: Economy) -> np.ndarray:
    rows = np.zeros((economy.n_materials, economy.n_indicators))
    for m in economy.raw_materials:
        rows[m.id, 0] = m.base_time
        rows[m.id, 1] = m.base_climate
        rows[m.id, 2 + m.id] = 1.0
    return rows


def lca_table(economy: Economy, chosen, only=None) -> np.ndarray:
    """From-scratch LCA of every product under a supplier binding (one row per product).

    ``chosen`` maps global slot -> supplier id. Rows accumulate inputs in slot
    order and add overhead last, the same order the recursive form uses.
    ``only`` restricts the work to a supplier-closed subset (e.g. a demand
    closure); other rows stay zero.
    """
    raw = _raw_rows(economy)
    table = np.zeros((economy.n_products, economy.n_indicators))
    offsets = economy.slot_offsets
    qty = economy.slot_quantity
    order = economy.topological_order
    if only is not None:
        rank = economy.topological_rank
        order = sorted(only, key=rank.__getitem__)
    for p in order:
        spec = economy.products[p]
        if spec.level == 0:
            acc = raw[spec.material].copy()
        else:
            acc = np.zeros(economy.n_indicators)
            for g in range(offsets[p], offsets[p + 1]):
                acc += qty[g] * table[chosen[g]]
        acc[0] += spec.direct_overhead[0]
        acc[1] += spec.direct_overhead[1]
        table[p] = acc
    return table


def lca_naive(economy: Economy, chosen, product_id: int) -> LcaVector:
    """Plain recursive expansion with no memo; exponential on shared sub-DAGs."""
    spec = economy.product(product_id)
    if spec.level == 0:
        acc = lca_raw(economy, spec.material).values.copy()
    else:
        acc = np.zeros(economy.n_indicators)
        base = economy.slot_offsets[product_id]
        for slot in spec.inputs:
            acc += slot.quantity * lca_naive(economy, chosen, chosen[base + slot.slot_index]).values
    acc[0] += spec.direct_overhead[0]
    acc[1] += spec.direct_overhead[1]
    return LcaVector(acc)


def lca_product(economy: Economy, config: Configuration, product_id: int, memo: bool = True) -> LcaVector:
    """LCA of a product under the configuration's chosen suppliers."""
    economy.product(product_id)
    if memo:
        return LcaVector(config.lca(product_id).copy())
    return lca_naive(economy, config.chosen, product_id)


def lca_apply_replacement(parent_lca: LcaVector, q: float, lca_x: LcaVector, lca_y: LcaVector) -> LcaVector:
    """Patch a parent's impact after swapping pre-product ``x`` for ``y`` at quantity ``q``."""
    parent_lca._check(lca_x)
    parent_lca._check(lca_y)
    if not q >= 0:
        raise ValueError(f"quantity must be >= 0, got {q}")
    return LcaVector(parent_lca.values - q * lca_x.values + q * lca_y.values)


def total_impact(economy: Economy, config: Configuration, demand: Demand) -> LcaVector:
    check_demand(economy, demand)
    acc = np.zeros(economy.n_indicators)
    for p in sorted(demand.entries):
        acc += demand.entries[p] * config.lca(p)
    return LcaVector(acc)


def check_bounds(impact: LcaVector, bounds: PlanetaryBounds, names: list[str] | None = None) -> FeasibilityReport:
    caps = bounds.caps(impact.n_materials)
    if names is None:
        names = ["time", "climate", *(f"material_{i}" for i in range(impact.n_materials))]
    violations = []
    for name, value, cap in zip(names, impact.values, caps):
        if cap is not None and value > cap:
            violations.append(Violation(name, float(value), float(cap), float(value - cap)))
    return FeasibilityReport(not violations, tuple(violations))


def scalarize(impact: LcaVector, weights: Weights) -> float:
    vec = weights.vector(impact.n_materials)
    return float(np.dot(vec, impact.values))


def check_dimensions(economy: Economy, weights: Weights, bounds: PlanetaryBounds) -> None:
    try:
        weights.vector(economy.n_materials)
        bounds.caps(economy.n_materials)
    except (DimensionError, ValueError) as exc:
        raise EconomyError(str(exc)) from exc
