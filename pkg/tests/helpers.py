"""Shared test utilities: raw-matrix oracles and randomized input generators.

The oracles here deliberately avoid the package's own types. Everything is
computed from bare numpy arrays with explicit linear algebra, so agreement
between the library and these functions is a genuine cross-check rather
than the same code called twice.
"""
from __future__ import annotations

import numpy as np

TOL = 1e-10


def random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    # QR of a complex Ginibre matrix; fixing the phases of diag(R) makes the
    # distribution Haar and the output independent of LAPACK sign choices.
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def rank1_projectors(u: np.ndarray) -> list[np.ndarray]:
    """One projector per column of a unitary matrix."""
    return [np.outer(u[:, k], u[:, k].conj()) for k in range(u.shape[1])]


def random_pvm_projectors(
    rng: np.random.Generator, dim: int, allow_degenerate: bool = True
) -> list[np.ndarray]:
    """Random complete PVM; sometimes groups eigenvectors into degenerate blocks."""
    parts = rank1_projectors(random_unitary(rng, dim))
    if not allow_degenerate or dim < 3 or rng.random() < 0.5:
        return parts
    cut = int(rng.integers(1, dim))
    return [sum(parts[:cut]), sum(parts[cut:])]


def born_oracle(vec: np.ndarray, projectors: list[np.ndarray]) -> np.ndarray:
    return np.array([np.real(vec.conj() @ p @ vec) for p in projectors])


def collapse_oracle(vec: np.ndarray, projector: np.ndarray) -> np.ndarray:
    out = projector @ vec
    return out / np.linalg.norm(out)


def abl_oracle(
    a: np.ndarray,
    u: np.ndarray,
    q_projectors: list[np.ndarray],
    v: np.ndarray,
    b_projector: np.ndarray,
) -> np.ndarray:
    """Conditional intermediate-outcome probabilities by direct path weights.

    The weight of path (q_j, b) is the squared norm of P_b V P_j U |a>,
    which equals Born(j) times Born(b | collapsed branch) without ever
    normalizing the intermediate branch.
    """
    weights = []
    for p in q_projectors:
        leg = v @ (p @ (u @ a))
        weights.append(np.real(leg.conj() @ b_projector @ leg))
    w = np.array(weights)
    total = w.sum()
    if total <= 1e-12:
        raise ZeroDivisionError("post-selection unreachable for every branch")
    return w / total


def tvd_oracle(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def dist_as_dict(dist) -> dict[str, float]:
    return {label: prob for label, prob in dist.entries}


def assert_dist(dist, expected: dict[str, float], tol: float = TOL) -> None:
    got = dist_as_dict(dist)
    assert set(got) == set(expected), f"labels {set(got)} != {set(expected)}"
    for label, want in expected.items():
        assert abs(got[label] - want) <= tol, (
            f"{label}: {got[label]!r} differs from {want!r} by more than {tol}"
        )
