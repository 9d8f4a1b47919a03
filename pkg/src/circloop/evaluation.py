"""Evaluation of a configuration against weights and planetary bounds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitsets import reuse_match
from .economy import Demand, Economy, check_demand
from .lca import (
    FeasibilityReport,
    LcaVector,
    PlanetaryBounds,
    Weights,
    check_bounds,
    check_dimensions,
    indicator_names,
)
from .state import Configuration


@dataclass(frozen=True)
class Evaluation:
    impact: LcaVector
    score: float
    feasibility: FeasibilityReport
    total_violation: float

    @property
    def feasible(self) -> bool:
        return self.feasibility.feasible

    def rank(self) -> tuple:
        """Sort key, lower is better: any feasible plan beats any infeasible one.

        Feasible plans compare by score; infeasible ones by total violation
        first and score second.
        """
        if self.feasible:
            return (0, self.score, 0.0)
        return (1, self.total_violation, self.score)


class Objective:
    """Demand, weights and bounds bundled for repeated evaluation."""

    def __init__(
        self,
        economy: Economy,
        demand: Demand,
        weights: Weights,
        bounds: PlanetaryBounds,
        credit_reuse: bool = False,
    ):
        check_demand(economy, demand)
        check_dimensions(economy, weights, bounds)
        self.economy = economy
        self.demand = demand
        self.weights = weights
        self.bounds = bounds
        self.credit_reuse = credit_reuse
        self._items = sorted(demand.entries.items())
        self._wvec = weights.vector(economy.n_materials)
        self._names = indicator_names(economy)

    def impact(self, config: Configuration) -> LcaVector:
        acc = np.zeros(self.economy.n_indicators)
        for p, units in self._items:
            acc += units * config.lca(p)
        if self.credit_reuse:
            reused = reuse_match(self.economy, config, self.demand).reused
            acc[2:] -= np.asarray(reused)
        return LcaVector(acc)

    def evaluate(self, config: Configuration) -> Evaluation:
        impact = self.impact(config)
        score = float(np.dot(self._wvec, impact.values))
        report = check_bounds(impact, self.bounds, self._names)
        return Evaluation(impact, score, report, report.total_violation)


def evaluate(
    economy: Economy,
    config: Configuration,
    demand: Demand,
    weights: Weights,
    bounds: PlanetaryBounds,
    credit_reuse: bool = False,
) -> Evaluation:
    return Objective(economy, demand, weights, bounds, credit_reuse).evaluate(config)
