"""Executable semantics for claims about measurements that never happened.

A statement packages an actual experimental run (preparation, optionally an
actually-performed intermediate measurement, and a post-selected final
outcome) together with a hypothetical query measurement at the intermediate
time. Two inequivalent readings of "had the query been measured, the
conditional probabilities would have held" are implemented:

- single antecedent: the hypothetical world keeps only the preparation and
  inserts the query. The final outcome is not re-imposed, so the world's
  query statistics are plain Born weights of the evolved preparation.

- compound antecedent: the hypothetical world inserts the query and is
  additionally required to end in the same final outcome. Conditioning the
  joint world on that outcome reproduces the claimed conditional
  distribution identically, which is what makes this reading true by
  construction.

The cotenability report quantifies whether inserting the query disturbs
the distribution over final outcomes at all. A compound reading whose
insertion leaves that background untouched is true in a substantive sense;
one that silently changes the background is true only by construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .abl import (
    ImpossiblePostSelection,
    SelectionContext,
    abl_distribution,
    post_outcome_distribution,
)
from .core import (
    EPS_NORM,
    EPS_PROB,
    Distribution,
    FilterStage,
    MeasureStage,
    ProjectiveMeasurement,
    Stage,
    born_distribution,
    collapse,
    evolve,
    total_variation,
)
from .ensemble import Protocol

# Disturbance at or below this counts as no disturbance; all comparisons
# here are analytic at small dimension.
EPS_COTEN = 1e-10


class Flavor(str, Enum):
    SINGLE = "single"
    COMPOUND = "compound"


class Classification(str, Enum):
    FALSE = "FALSE"
    TRIVIALLY_TRUE = "TRIVIALLY_TRUE"
    NONTRIVIALLY_TRUE = "NONTRIVIALLY_TRUE"
    TRUE_BY_COINCIDENCE = "TRUE_BY_COINCIDENCE"


class CounterfactualStatement:
    """An actual run plus a hypothetical query and a reading of it.

    The actual run's intermediate stage must be nothing or a projective
    measurement of some other observable; the hypothetical world always
    substitutes the query for whatever was actually there.
    """

    def __init__(self, base_protocol: Protocol, query: ProjectiveMeasurement,
                 flavor: Flavor) -> None:
        if base_protocol.selection is None:
            raise ValueError("the actual run must fix a post-selected outcome")
        if base_protocol.intermediate is not None and not isinstance(
                base_protocol.intermediate, MeasureStage):
            raise ValueError(
                "the actual intermediate stage must be nothing or a measurement")
        if query.dim != base_protocol.dim:
            raise ValueError(
                f"query dim {query.dim} != protocol dim {base_protocol.dim}")
        self.base_protocol = base_protocol
        self.query = query
        self.flavor = Flavor(flavor)

    def context(self) -> SelectionContext:
        p = self.base_protocol
        return SelectionContext(p.preparation, p.post_pvm, p.selection,
                                pre_to_t=p.pre_to_t, t_to_post=p.t_to_post)

    def __repr__(self) -> str:
        return (f"CounterfactualStatement(flavor={self.flavor.value!r}, "
                f"query={self.query.labels})")

    def to_json_dict(self) -> dict:
        return {
            "base_protocol": self.base_protocol.to_json_dict(),
            "query": self.query.to_json_dict(),
            "flavor": self.flavor.value,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "CounterfactualStatement":
        return cls(Protocol.from_json_dict(data["base_protocol"]),
                   ProjectiveMeasurement.from_json_dict(data["query"]),
                   Flavor(data["flavor"]))


@dataclass(frozen=True)
class CotenabilityReport:
    """Does inserting the query change what happens at the final measurement?"""
    undisturbed: Distribution
    disturbed: Distribution
    tvd: float
    delta_selected: float
    cotenable: bool

    def to_json_dict(self) -> dict:
        return {
            "undisturbed": self.undisturbed.to_json_dict(),
            "disturbed": self.disturbed.to_json_dict(),
            "tvd": self.tvd,
            "delta_selected": self.delta_selected,
            "cotenable": self.cotenable,
        }


@dataclass(frozen=True)
class Verdict:
    flavor: Flavor
    claimed: Distribution
    counterfactual_world: Distribution
    max_deviation: float
    cotenable: bool
    classification: Classification

    def to_json_dict(self) -> dict:
        return {
            "flavor": self.flavor.value,
            "claimed": self.claimed.to_json_dict(),
            "counterfactual_world": self.counterfactual_world.to_json_dict(),
            "max_deviation": self.max_deviation,
            "cotenable": self.cotenable,
            "classification": self.classification.value,
        }


def _joint_world_table(stmt: CounterfactualStatement) -> np.ndarray:
    """Joint probabilities over (query outcome, final outcome) in the world
    where the query is actually measured."""
    p = stmt.base_protocol
    at_t = evolve(p.preparation, p.pre_to_t)
    q_weights = born_distribution(at_t, stmt.query).probabilities
    table = np.zeros((len(stmt.query.labels), len(p.post_pvm.labels)))
    for j, label in enumerate(stmt.query.labels):
        if q_weights[j] <= EPS_PROB:
            continue
        branch = evolve(collapse(at_t, stmt.query, label), p.t_to_post)
        table[j] = q_weights[j] * born_distribution(branch, p.post_pvm).probabilities
    return table


def counterfactual_distribution(stmt: CounterfactualStatement) -> Distribution:
    """Query-outcome distribution in the hypothetical world the flavor picks.

    Single antecedent: Born weights of the query from the evolved
    preparation, nothing filtered. Compound antecedent: the joint world is
    conditioned on reaching the actual post-selected outcome; raises
    ImpossiblePostSelection when that outcome is unreachable.
    """
    p = stmt.base_protocol
    if stmt.flavor is Flavor.SINGLE:
        at_t = evolve(p.preparation, p.pre_to_t)
        return born_distribution(at_t, stmt.query)
    table = _joint_world_table(stmt)
    column = table[:, p.post_pvm.index(p.selection)]
    total = column.sum()
    if total <= EPS_PROB:
        raise ImpossiblePostSelection(
            f"outcome {p.selection!r} is unreachable with the query inserted")
    return Distribution(
        [(label, w / total) for label, w in zip(stmt.query.labels, column)])


def cotenability_report(base_protocol: Protocol,
                        query: ProjectiveMeasurement | Stage) -> CotenabilityReport:
    """Compare final-outcome distributions with and without the query inserted.

    The undisturbed side keeps whatever the actual run did at the
    intermediate time; the disturbed side substitutes the query. The query
    may be a bare PVM (non-absorbing measurement) or a FilterStage for
    absorbing elements such as polarizers.
    """
    p = base_protocol
    if p.selection is None:
        raise ValueError("the protocol must fix a selected outcome")
    if isinstance(query, ProjectiveMeasurement):
        inserted: Stage = MeasureStage(query)
    elif isinstance(query, (MeasureStage, FilterStage)):
        inserted = query
    else:
        raise TypeError(f"cannot insert {query!r} as an intervening stage")
    undisturbed = post_outcome_distribution(
        p.preparation, p.post_pvm, intermediate=p.intermediate,
        pre_to_t=p.pre_to_t, t_to_post=p.t_to_post)
    disturbed = post_outcome_distribution(
        p.preparation, p.post_pvm, intermediate=inserted,
        pre_to_t=p.pre_to_t, t_to_post=p.t_to_post)
    tvd = total_variation(undisturbed, disturbed)
    delta = disturbed.probability(p.selection) - undisturbed.probability(p.selection)
    return CotenabilityReport(undisturbed, disturbed, tvd, delta,
                              cotenable=tvd <= EPS_COTEN)


def evaluate(stmt: CounterfactualStatement) -> Verdict:
    """Judge the statement: compare the claim with its hypothetical world.

    The claimed distribution is the conditional (ABL) distribution of query
    outcomes given both selections; the world distribution comes from
    counterfactual_distribution. Classification:

    - single antecedent: FALSE when the world deviates from the claim,
      TRUE_BY_COINCIDENCE when it happens to match (commuting cases).
    - compound antecedent: always true by construction, NONTRIVIALLY_TRUE
      when the insertion is cotenable with the selection, TRIVIALLY_TRUE
      otherwise.
    """
    claimed = abl_distribution(stmt.context(), stmt.query)
    world = counterfactual_distribution(stmt)
    deviation = total_variation(claimed, world)
    cotenable = cotenability_report(stmt.base_protocol, stmt.query).cotenable
    if stmt.flavor is Flavor.SINGLE:
        classification = (Classification.TRUE_BY_COINCIDENCE
                          if deviation <= EPS_NORM else Classification.FALSE)
    else:
        classification = (Classification.NONTRIVIALLY_TRUE if cotenable
                          else Classification.TRIVIALLY_TRUE)
    return Verdict(stmt.flavor, claimed, world, deviation, cotenable,
                   classification)
