"""Seeded Monte Carlo realization of prepare/measure protocols.

Each trial prepares the state, evolves it to the intermediate time, runs
the optional intermediate stage (measurement, unitary, or absorbing
filter), evolves to the final time, and measures the final PVM. Only joint
(intermediate outcome, final outcome) counts are retained.

Determinism contract: the two uniform variates consumed by trial i are a
fixed function of (seed, i), namely rows of a counter-based Philox stream
keyed by the seed. Worker threads only partition the precomputed variate
array into contiguous slices and sum integer count tables, so the result
is byte-identical for every worker count and scheduling order.
"""
from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    EPS_PROB,
    Distribution,
    FilterStage,
    MeasureStage,
    ProjectiveMeasurement,
    PureState,
    Stage,
    UnitaryOp,
    UnitaryStage,
    born_distribution,
    collapse,
    evolve,
    stage_from_json,
    stage_to_json,
)


class EmptySelection(ValueError):
    """No trial satisfied the requested final-outcome condition.

    Distinct from the analytic ImpossiblePostSelection: this one is about a
    finite sample and reports the observed counts.
    """


class Protocol:
    """The full timeline of one experiment: prepare, optional stage, measure.

    ``selection`` names the final outcome used when conditioning the
    ensemble afterwards; it does not affect sampling.
    """

    def __init__(self, preparation: PureState, post_pvm: ProjectiveMeasurement,
                 intermediate: Stage = None,
                 pre_to_t: UnitaryOp | None = None,
                 t_to_post: UnitaryOp | None = None,
                 selection: str | None = None) -> None:
        dim = preparation.dim
        if post_pvm.dim != dim:
            raise ValueError(f"final measurement dim {post_pvm.dim} != {dim}")
        if isinstance(intermediate, (MeasureStage, FilterStage)):
            if intermediate.pvm.dim != dim:
                raise ValueError(f"intermediate dim {intermediate.pvm.dim} != {dim}")
        elif isinstance(intermediate, UnitaryStage):
            if intermediate.unitary.dim != dim:
                raise ValueError(
                    f"intermediate unitary dim {intermediate.unitary.dim} != {dim}")
        elif intermediate is not None:
            raise TypeError(f"not an intermediate stage: {intermediate!r}")
        if isinstance(intermediate, FilterStage):
            post_pvm.index(intermediate.absorb_label)  # KeyError if absent
        for u in (pre_to_t, t_to_post):
            if u is not None and u.dim != dim:
                raise ValueError(f"unitary dim {u.dim} != {dim}")
        if selection is not None:
            post_pvm.index(selection)  # KeyError if absent
        self.preparation = preparation
        self.post_pvm = post_pvm
        self.intermediate = intermediate
        self.pre_to_t = pre_to_t if pre_to_t is not None else UnitaryOp.identity(dim)
        self.t_to_post = t_to_post if t_to_post is not None else UnitaryOp.identity(dim)
        self.selection = selection

    @property
    def dim(self) -> int:
        return self.preparation.dim

    @property
    def intermediate_labels(self) -> tuple[str, ...]:
        """Outcome labels the intermediate stage can record; empty when none."""
        if isinstance(self.intermediate, (MeasureStage, FilterStage)):
            return self.intermediate.pvm.labels
        return ()

    def __repr__(self) -> str:
        return (f"Protocol(dim={self.dim}, intermediate={self.intermediate!r}, "
                f"selection={self.selection!r})")

    def to_json_dict(self) -> dict:
        def unitary_or_null(u: UnitaryOp) -> dict | None:
            # Identity evolution is the default; keep the echo compact.
            if np.array_equal(u.matrix, np.eye(u.dim)):
                return None
            return u.to_json_dict()

        return {
            "preparation": self.preparation.to_json_dict(),
            "intermediate": stage_to_json(self.intermediate),
            "pre_to_t": unitary_or_null(self.pre_to_t),
            "t_to_post": unitary_or_null(self.t_to_post),
            "post_pvm": self.post_pvm.to_json_dict(),
            "selection": self.selection,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Protocol":
        def unitary_or_none(key: str) -> UnitaryOp | None:
            raw = data.get(key)
            return None if raw is None else UnitaryOp.from_json_dict(raw)

        return cls(
            PureState.from_json_dict(data["preparation"]),
            ProjectiveMeasurement.from_json_dict(data["post_pvm"]),
            intermediate=stage_from_json(data.get("intermediate")),
            pre_to_t=unitary_or_none("pre_to_t"),
            t_to_post=unitary_or_none("t_to_post"),
            selection=data.get("selection"),
        )


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    intermediate_outcome: str | None
    final_outcome: str


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Frequencies plus the sample size they were computed from."""
    distribution: Distribution
    sample_size: int

    def to_json_dict(self) -> dict:
        return {"distribution": self.distribution.to_json_dict(),
                "sample_size": self.sample_size}


@dataclass(frozen=True)
class AgreementEntry:
    label: str
    frequency: float
    probability: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class AgreementReport:
    """Per-outcome binomial z-gates between frequencies and probabilities."""
    entries: tuple[AgreementEntry, ...]
    z: float
    sample_size: int
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "z": self.z,
            "sample_size": self.sample_size,
            "passed": self.passed,
            "entries": [{
                "label": e.label,
                "frequency": e.frequency,
                "probability": e.probability,
                "tolerance": e.tolerance,
                "passed": e.passed,
            } for e in self.entries],
        }


class EnsembleStats:
    """Joint outcome counts of one seeded run, with full provenance."""

    def __init__(self, protocol: Protocol, trials: int, seed: int,
                 counts: dict[tuple[str | None, str], int]) -> None:
        if sum(counts.values()) != trials:
            raise ValueError("counts do not add up to the number of trials")
        self.protocol = protocol
        self.trials = trials
        self.seed = seed
        self.counts = dict(counts)

    def final_frequencies(self) -> EmpiricalDistribution:
        labels = self.protocol.post_pvm.labels
        totals = {label: 0 for label in labels}
        for (_, final), count in self.counts.items():
            totals[final] += count
        dist = Distribution([(l, totals[l] / self.trials) for l in labels])
        return EmpiricalDistribution(dist, self.trials)

    def intermediate_frequencies(self) -> EmpiricalDistribution:
        labels = self.protocol.intermediate_labels
        if not labels:
            return EmpiricalDistribution(Distribution([]), self.trials)
        totals = {label: 0 for label in labels}
        for (mid, _), count in self.counts.items():
            totals[mid] += count
        dist = Distribution([(l, totals[l] / self.trials) for l in labels])
        return EmpiricalDistribution(dist, self.trials)

    def ordered_keys(self) -> list[tuple[str | None, str]]:
        mids = self.protocol.intermediate_labels or (None,)
        return [(m, f) for m in mids for f in self.protocol.post_pvm.labels]

    def to_json_dict(self) -> dict:
        return {
            "protocol": self.protocol.to_json_dict(),
            "trials": self.trials,
            "seed": self.seed,
            "counts": [{"intermediate": m, "final": f,
                        "count": self.counts.get((m, f), 0)}
                       for m, f in self.ordered_keys()],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["intermediate_outcome", "final_outcome", "count"])
        for m, f in self.ordered_keys():
            writer.writerow(["" if m is None else m, f,
                             self.counts.get((m, f), 0)])
        return buf.getvalue()

    @classmethod
    def from_json_dict(cls, data: dict) -> "EnsembleStats":
        counts = {(row["intermediate"], row["final"]): int(row["count"])
                  for row in data["counts"]}
        return cls(Protocol.from_json_dict(data["protocol"]),
                   int(data["trials"]), int(data["seed"]), counts)


def _clean_cdf(probs: np.ndarray) -> np.ndarray:
    """CDF with numerically-zero branches given zero-width intervals.

    A right-bisect against this CDF can never land in a zero-width
    interval, so zero-probability outcomes are never sampled, not even
    once in 10^9 trials.
    """
    p = np.clip(np.asarray(probs, dtype=float), 0.0, 1.0)
    p[p <= EPS_PROB] = 0.0
    total = p.sum()
    if total <= 0.0:
        raise ValueError("all outcomes have zero probability")
    cdf = np.cumsum(p / total)
    cdf[-1] = 1.0
    return cdf


def _branch_table(protocol: Protocol) -> tuple[tuple[str | None, ...], np.ndarray, np.ndarray]:
    """Precompute per-branch sampling tables.

    Returns (intermediate labels, branch CDF, per-branch final CDFs). For a
    protocol without recordable intermediate outcomes there is a single
    anonymous branch of probability one.
    """
    at_t = evolve(protocol.preparation, protocol.pre_to_t)
    post = protocol.post_pvm
    n_final = len(post.labels)

    def final_cdf(state: PureState) -> np.ndarray:
        dist = born_distribution(evolve(state, protocol.t_to_post), post)
        return _clean_cdf(dist.probabilities)

    stage = protocol.intermediate
    if stage is None:
        return (None,), np.array([1.0]), final_cdf(at_t).reshape(1, -1)
    if isinstance(stage, UnitaryStage):
        return ((None,), np.array([1.0]),
                final_cdf(evolve(at_t, stage.unitary)).reshape(1, -1))

    q = stage.pvm
    branch_probs = born_distribution(at_t, q).probabilities
    finals = np.zeros((len(q.labels), n_final))
    for k, label in enumerate(q.labels):
        if isinstance(stage, FilterStage) and label != stage.pass_label:
            # Absorbed branch: the final outcome is the absorb label itself.
            one_hot = np.zeros(n_final)
            one_hot[post.index(stage.absorb_label)] = 1.0
            finals[k] = _clean_cdf(one_hot)
        elif branch_probs[k] <= EPS_PROB:
            # Unreachable branch; the row is never consulted.
            finals[k] = np.ones(n_final)
        else:
            finals[k] = final_cdf(collapse(at_t, q, label))
    return q.labels, _clean_cdf(branch_probs), finals


def _count_chunk(uniforms: np.ndarray, branch_cdf: np.ndarray,
                 final_cdfs: np.ndarray) -> np.ndarray:
    branch = np.searchsorted(branch_cdf, uniforms[:, 0], side="right")
    rows = final_cdfs[branch]
    final = np.sum(rows <= uniforms[:, 1][:, None], axis=1)
    n_final = final_cdfs.shape[1]
    flat = branch * n_final + final
    return np.bincount(flat, minlength=branch_cdf.size * n_final)


def _sample_indices(protocol: Protocol, trials: int, seed: int,
                    workers: int | None = None
                    ) -> tuple[tuple[str | None, ...], np.ndarray, np.ndarray]:
    """Vectorized per-trial branch and final outcome indices."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    mids, branch_cdf, final_cdfs = _branch_table(protocol)
    uniforms = np.random.Generator(np.random.Philox(key=seed)).random((trials, 2))
    branch = np.searchsorted(branch_cdf, uniforms[:, 0], side="right")
    final = np.sum(final_cdfs[branch] <= uniforms[:, 1][:, None], axis=1)
    return mids, branch, final


def trial_outcome_labels(protocol: Protocol, trials: int, seed: int
                         ) -> tuple[np.ndarray | None, np.ndarray]:
    """Per-trial outcome label arrays; the intermediate array is None when
    the protocol records no intermediate outcome."""
    mids, branch, final = _sample_indices(protocol, trials, seed)
    final_labels = np.array(protocol.post_pvm.labels, dtype=object)[final]
    if mids == (None,):
        return None, final_labels
    return np.array(mids, dtype=object)[branch], final_labels


def run_ensemble(protocol: Protocol, trials: int, seed: int,
                 workers: int | None = None) -> EnsembleStats:
    """Run the protocol for the given number of trials and tally outcomes.

    Identical (protocol, trials, seed) always produce identical counts;
    ``workers`` only changes how the fixed per-trial variates are chunked.
    With workers=None a worker count is chosen automatically.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    mids, branch_cdf, final_cdfs = _branch_table(protocol)
    uniforms = np.random.Generator(np.random.Philox(key=seed)).random((trials, 2))
    if workers is None:
        workers = 1 if trials < 50_000 else min(4, os.cpu_count() or 1)
    if workers < 1:
        raise ValueError("workers must be at least 1")
    workers = min(workers, trials)

    if workers == 1:
        table = _count_chunk(uniforms, branch_cdf, final_cdfs)
    else:
        bounds = np.linspace(0, trials, workers + 1, dtype=int)
        chunks = [uniforms[lo:hi] for lo, hi in zip(bounds, bounds[1:])]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            tables = list(pool.map(
                lambda c: _count_chunk(c, branch_cdf, final_cdfs), chunks))
        table = np.sum(tables, axis=0)

    n_final = len(protocol.post_pvm.labels)
    counts = {
        (mid, f_label): int(table[b * n_final + f])
        for b, mid in enumerate(mids)
        for f, f_label in enumerate(protocol.post_pvm.labels)
    }
    return EnsembleStats(protocol, trials, seed, counts)


def trial_records(protocol: Protocol, trials: int, seed: int) -> list[TrialRecord]:
    """Per-trial records, consistent with run_ensemble for the same seed."""
    mid_labels, final_labels = trial_outcome_labels(protocol, trials, seed)
    if mid_labels is None:
        return [TrialRecord(i, None, f) for i, f in enumerate(final_labels)]
    return [TrialRecord(i, m, f)
            for i, (m, f) in enumerate(zip(mid_labels, final_labels))]


def conditional_frequencies(stats: EnsembleStats, condition: str) -> EmpiricalDistribution:
    """Intermediate-outcome frequencies among trials with the given final outcome.

    For a protocol whose intermediate stage records nothing the result is
    the empty distribution, with the matched-trial count still reported.
    """
    stats.protocol.post_pvm.index(condition)  # KeyError if absent
    matched = sum(c for (_, f), c in stats.counts.items() if f == condition)
    if matched == 0:
        raise EmptySelection(
            f"final outcome {condition!r} occurred in 0 of {stats.trials} trials")
    mids = stats.protocol.intermediate_labels
    if not mids:
        return EmpiricalDistribution(Distribution([]), matched)
    dist = Distribution([
        (m, stats.counts.get((m, condition), 0) / matched) for m in mids])
    return EmpiricalDistribution(dist, matched)


def agreement_check(empirical: EmpiricalDistribution, analytic: Distribution,
                    z: float = 5.0) -> AgreementReport:
    """Gate each frequency against z standard binomial errors of its probability."""
    emp = empirical.distribution
    if set(emp.labels) != set(analytic.labels):
        raise ValueError(
            f"label mismatch: {emp.labels} vs {analytic.labels}")
    n = empirical.sample_size
    if n < 1:
        raise ValueError("empirical sample size must be at least 1")
    entries = []
    for label, p in analytic:
        freq = emp.probability(label)
        tolerance = z * float(np.sqrt(p * (1.0 - p) / n)) + 1e-10
        entries.append(AgreementEntry(
            label=label, frequency=freq, probability=p,
            tolerance=tolerance, passed=abs(freq - p) <= tolerance))
    return AgreementReport(tuple(entries), z, n, all(e.passed for e in entries))
