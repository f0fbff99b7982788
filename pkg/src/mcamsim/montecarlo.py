"""Monte Carlo robustness trials under device threshold variation.

Each trial reprograms every device of a one-word scenario with fresh
Gaussian offsets, evaluates the search, and records whether the match
decision flipped plus the worst per-device margin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cam import CamArray, Topology
from .device import ThresholdLadder, VariationModel


@dataclass(frozen=True)
class SearchScenario:
    """One stored word, one query, and the decision expected without noise."""

    stored: tuple[int, ...]
    query: tuple[int, ...]
    expect_match: bool

    def __post_init__(self) -> None:
        if not self.stored:
            raise ValueError("empty scenario: stored word has no cells")
        if len(self.query) != len(self.stored):
            raise ValueError(
                f"query length {len(self.query)} != word length {len(self.stored)}"
            )

    @classmethod
    def worst_case(cls, cells: int) -> "SearchScenario":
        """Hardest mismatch to detect: a single cell off by one level."""
        if cells < 1:
            raise ValueError("scenario needs at least one cell")
        stored = (0,) * cells
        query = (1,) + (0,) * (cells - 1)
        return cls(stored=stored, query=query, expect_match=False)

    @classmethod
    def exact_match(cls, cells: int) -> "SearchScenario":
        if cells < 1:
            raise ValueError("scenario needs at least one cell")
        word = (0,) * cells
        return cls(stored=word, query=word, expect_match=True)


@dataclass
class MonteCarloSummary:
    """Aggregate of one trial batch."""

    trials: int
    errors: int
    error_rate: float
    min_margin: float
    margins: np.ndarray
    sigma_vth: float
    seed: int


def run_monte_carlo(
    ladder: ThresholdLadder,
    scenario: SearchScenario,
    var: VariationModel,
    trials: int,
    topology: Topology = Topology.NOR_1T,
) -> MonteCarloSummary:
    """Repeatedly reprogram the scenario word and tally decision errors.

    The per-trial margin is the minimum signed conduction margin over all
    devices (expected-on and expected-off alike); a negative value means at
    least one device decided against its design intent that trial. Both
    topologies report the same match flag for a single word, so the result
    does not depend on the topology choice.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    array = CamArray.from_contents(topology, ladder, [list(scenario.stored)])
    query = list(scenario.query)
    margins = np.empty(trials)
    errors = 0
    for t in range(trials):
        array.reprogram(var)
        mism = array.mismatch_matrix(query)
        reported_match = not bool(mism.any())
        margins[t] = float(array.margin_matrix(query).min())
        if reported_match != scenario.expect_match:
            errors += 1
    return MonteCarloSummary(
        trials=trials,
        errors=errors,
        error_rate=errors / trials,
        min_margin=float(margins.min()),
        margins=margins,
        sigma_vth=var.sigma_vth,
        seed=var.seed,
    )
