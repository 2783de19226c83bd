"""Randomized verification suites.

Five invariant suites exercise the analytic engine on randomized instances
in dimensions 2 to 4, each against a tolerance of 1e-10:

  abl_sum_to_one        conditional distributions are normalized
  time_symmetry         swapping the two selections leaves them unchanged
  born_marginalization  averaging over final outcomes recovers the Born rule
  oracle_equivalence    the engine matches brute-force path enumeration
  compound_triviality   compound-reading verdicts never deviate, and are
                        nontrivial exactly when the query is cotenable

On top of the suites, every catalogue scenario is run once and its
statistical agreement gates are recorded. Reports are deterministic for a
given seed, regardless of worker count.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .abl import ImpossiblePostSelection, SelectionContext, abl_distribution, post_outcome_distribution
from .core import (
    EPS_PROB,
    Distribution,
    ProjectiveMeasurement,
    PureState,
    UnitaryOp,
    born_distribution,
    evolve,
)
from .counterfactual import (
    EPS_COTEN,
    Classification,
    CounterfactualStatement,
    Flavor,
    cotenability_report,
    evaluate,
)
from .ensemble import Protocol
from .scenarios import available_scenarios, run_scenario

TOLERANCE = 1e-10
DIMS = (2, 3, 4)
MAX_RESAMPLES = 100


@dataclass(frozen=True)
class SuiteResult:
    name: str
    instances: int
    failures: int
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "instances": self.instances,
            "failures": self.failures,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class VerificationReport:
    seed: int
    instances: int
    compound_instances: int
    trials: int
    suites: tuple[SuiteResult, ...]
    scenario_gates: dict[str, bool]

    @property
    def all_passed(self) -> bool:
        return (all(s.passed for s in self.suites)
                and all(self.scenario_gates.values()))

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "instances": self.instances,
            "compound_instances": self.compound_instances,
            "trials": self.trials,
            "all_passed": self.all_passed,
            "suites": [s.to_json_dict() for s in self.suites],
            "scenario_gates": dict(self.scenario_gates),
        }

    def to_text(self) -> str:
        lines = [
            f"verification: seed {self.seed}, {self.instances} instances "
            f"per suite, {self.trials} trials per scenario",
            "",
            "INVARIANT SUITES",
        ]
        for s in self.suites:
            status = "pass" if s.passed else "FAIL"
            lines.append(
                f"  {s.name}: {status} ({s.instances} instances, "
                f"{s.failures} failures, max error {s.max_error:.3e})")
        lines.append("")
        lines.append("SCENARIO GATES")
        for name, ok in self.scenario_gates.items():
            lines.append(f"  {name}: {'pass' if ok else 'FAIL'}")
        lines.append("")
        lines.append(f"overall: {'pass' if self.all_passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


# Instance generators. These deliberately use raw arrays, not the package's
# sampling machinery, so the suites stay an independent route to the same
# numbers.

def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, stream)))


def _labels(dim: int) -> tuple[str, ...]:
    return tuple(str(k) for k in range(dim))


def _unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _pvm(rng: np.random.Generator, dim: int, prefix: str,
         allow_degenerate: bool = True) -> ProjectiveMeasurement:
    cols = _unitary(rng, dim)
    blocks: list[list[int]] = [[k] for k in range(dim)]
    if allow_degenerate and dim >= 3 and rng.random() < 0.5:
        blocks = [[0, 1]] + [[k] for k in range(2, dim)]
    outcomes = []
    for i, block in enumerate(blocks):
        sub = cols[:, block]
        outcomes.append((f"{prefix}{i}", sub @ sub.conj().T))
    return ProjectiveMeasurement(outcomes)


def _rank1_post(rng: np.random.Generator, dim: int) -> tuple[ProjectiveMeasurement, str, np.ndarray]:
    b = _unit(rng, dim)
    state = PureState(_labels(dim), b)
    return ProjectiveMeasurement.binary_from_state(state, "sel", "rest"), "sel", b


@dataclass
class _Tally:
    instances: int = 0
    failures: int = 0
    max_error: float = 0.0

    def record(self, error: float, ok: bool | None = None) -> None:
        self.instances += 1
        self.max_error = max(self.max_error, error)
        failed = (error > TOLERANCE) if ok is None else not ok
        if failed:
            self.failures += 1

    def result(self, name: str) -> SuiteResult:
        return SuiteResult(name, self.instances, self.failures,
                           self.max_error, TOLERANCE)


def _max_gap(dist: Distribution, expected: dict[str, float]) -> float:
    return max(abs(dist.probability(label) - p) for label, p in expected.items())


def _suite_sum_to_one(instances: int, seed: int) -> SuiteResult:
    rng = _rng(seed, 0)
    tally = _Tally()
    while tally.instances < instances:
        dim = DIMS[tally.instances % len(DIMS)]
        for _ in range(MAX_RESAMPLES):
            pre = PureState(_labels(dim), _unit(rng, dim))
            post = _pvm(rng, dim, "b")
            label = post.labels[int(rng.integers(len(post.labels)))]
            u = UnitaryOp(_unitary(rng, dim))
            v = UnitaryOp(_unitary(rng, dim))
            query = _pvm(rng, dim, "q")
            try:
                dist = abl_distribution(
                    SelectionContext(pre, post, label, u, v), query)
            except ImpossiblePostSelection:
                continue
            tally.record(abs(sum(p for _, p in dist) - 1.0))
            break
        else:
            raise RuntimeError("could not draw a usable instance")
    return tally.result("abl_sum_to_one")


def _suite_time_symmetry(instances: int, seed: int) -> SuiteResult:
    rng = _rng(seed, 1)
    tally = _Tally()
    while tally.instances < instances:
        dim = DIMS[tally.instances % len(DIMS)]
        for _ in range(MAX_RESAMPLES):
            a = _unit(rng, dim)
            b = _unit(rng, dim)
            query = _pvm(rng, dim, "q")
            post_b = ProjectiveMeasurement.binary_from_state(
                PureState(_labels(dim), b), "sel", "rest")
            post_a = ProjectiveMeasurement.binary_from_state(
                PureState(_labels(dim), a), "sel", "rest")
            try:
                forward = abl_distribution(
                    SelectionContext(PureState(_labels(dim), a), post_b, "sel"),
                    query)
                backward = abl_distribution(
                    SelectionContext(PureState(_labels(dim), b), post_a, "sel"),
                    query)
            except ImpossiblePostSelection:
                continue
            gap = max(abs(forward.probability(l) - backward.probability(l))
                      for l in query.labels)
            tally.record(gap)
            break
        else:
            raise RuntimeError("could not draw a usable instance")
    return tally.result("time_symmetry")


def _suite_born_marginalization(instances: int, seed: int) -> SuiteResult:
    rng = _rng(seed, 2)
    tally = _Tally()
    while tally.instances < instances:
        dim = DIMS[tally.instances % len(DIMS)]
        pre = PureState(_labels(dim), _unit(rng, dim))
        post = _pvm(rng, dim, "b")
        u = UnitaryOp(_unitary(rng, dim))
        v = UnitaryOp(_unitary(rng, dim))
        query = _pvm(rng, dim, "q")

        weights = post_outcome_distribution(pre, post, intermediate=query,
                                            pre_to_t=u, t_to_post=v)
        mixed = {label: 0.0 for label in query.labels}
        for b_label, b_prob in weights:
            if b_prob <= EPS_PROB:
                continue
            cond = abl_distribution(
                SelectionContext(pre, post, b_label, u, v), query)
            for q_label in query.labels:
                mixed[q_label] += b_prob * cond.probability(q_label)
        direct = born_distribution(evolve(pre, u), query)
        tally.record(_max_gap(direct, mixed))
    return tally.result("born_marginalization")


def _brute_force_abl(a: np.ndarray, u: np.ndarray, q_projectors: list[np.ndarray],
                     v: np.ndarray, b_projector: np.ndarray) -> np.ndarray:
    # Enumerate each intermediate outcome as an explicit matrix path.
    weights = np.array([
        float(np.linalg.norm(b_projector @ v @ p @ u @ a) ** 2)
        for p in q_projectors
    ])
    return weights / weights.sum()


def _suite_oracle_equivalence(instances: int, seed: int) -> SuiteResult:
    rng = _rng(seed, 3)
    tally = _Tally()
    while tally.instances < instances:
        dim = DIMS[tally.instances % len(DIMS)]
        for _ in range(MAX_RESAMPLES):
            a = _unit(rng, dim)
            u = _unitary(rng, dim)
            v = _unitary(rng, dim)
            query = _pvm(rng, dim, "q")
            post, label, b = _rank1_post(rng, dim)
            try:
                dist = abl_distribution(
                    SelectionContext(PureState(_labels(dim), a), post, label,
                                     UnitaryOp(u), UnitaryOp(v)),
                    query)
            except ImpossiblePostSelection:
                continue
            expected = _brute_force_abl(
                a, u, [query.projector(l) for l in query.labels], v,
                np.outer(b, b.conj()))
            gap = max(abs(dist.probability(l) - e)
                      for l, e in zip(query.labels, expected))
            tally.record(gap)
            break
        else:
            raise RuntimeError("could not draw a usable instance")
    return tally.result("oracle_equivalence")


def _suite_compound_triviality(instances: int, seed: int) -> SuiteResult:
    rng = _rng(seed, 4)
    tally = _Tally()
    dims = (2, 3)
    while tally.instances < instances:
        dim = dims[tally.instances % len(dims)]
        for _ in range(MAX_RESAMPLES):
            pre = PureState(_labels(dim), _unit(rng, dim))
            post = _pvm(rng, dim, "b", allow_degenerate=False)
            label = post.labels[int(rng.integers(len(post.labels)))]
            query = _pvm(rng, dim, "q")
            base = Protocol(pre, post, selection=label)
            try:
                verdict = evaluate(
                    CounterfactualStatement(base, query, Flavor.COMPOUND))
            except ImpossiblePostSelection:
                continue
            coten = cotenability_report(base, query)
            consistent = (
                (verdict.classification is Classification.NONTRIVIALLY_TRUE)
                == (coten.tvd <= EPS_COTEN))
            tally.record(verdict.max_deviation,
                         ok=verdict.max_deviation <= TOLERANCE and consistent)
            break
        else:
            raise RuntimeError("could not draw a usable instance")
    return tally.result("compound_triviality")


def run_verification(instances: int = 500, compound_instances: int = 200,
                     trials: int = 100_000, seed: int = 0,
                     workers: int | None = None) -> VerificationReport:
    """Run every invariant suite and every scenario's agreement gates."""
    if instances < 1:
        raise ValueError("instances must be at least 1")
    if compound_instances < 1:
        raise ValueError("compound_instances must be at least 1")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    suites = (
        _suite_sum_to_one(instances, seed),
        _suite_time_symmetry(instances, seed),
        _suite_born_marginalization(instances, seed),
        _suite_oracle_equivalence(instances, seed),
        _suite_compound_triviality(compound_instances, seed),
    )
    gates = {
        info.name: run_scenario(info.name, None, trials, seed,
                                workers=workers).all_gates_passed
        for info in available_scenarios()
    }
    return VerificationReport(seed, instances, compound_instances, trials,
                              suites, gates)
