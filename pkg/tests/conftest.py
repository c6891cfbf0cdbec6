"""Shared generators for randomized, seeded test instances."""

import numpy as np
import pytest

from delaymor import DelayDescriptorModel, from_state_space


def stable_matrices(rng, order, n_inputs=1, n_outputs=1, margin=0.6,
                    descriptor=False):
    """Random stable (E, A, B, C): spectrum of E^{-1}A shifted left of -margin."""
    A = rng.standard_normal((order, order))
    if descriptor:
        E = np.eye(order) + 0.2 * rng.standard_normal((order, order))
    else:
        E = np.eye(order)
    shift = np.max(np.linalg.eigvals(np.linalg.solve(E, A)).real) + margin
    A = A - shift * E
    B = rng.standard_normal((order, n_inputs))
    C = rng.standard_normal((n_outputs, order))
    return E, A, B, C


def stable_model(rng, order, tau=0.0, n_inputs=1, n_outputs=1, margin=0.6,
                 descriptor=False):
    E, A, B, C = stable_matrices(rng, order, n_inputs, n_outputs, margin,
                                 descriptor)
    return DelayDescriptorModel(E=E, A=A, B=B, C=C, tau=tau)


def stable_oracle(rng, order, tau=0.0, n_inputs=1, n_outputs=1, margin=0.6,
                  descriptor=False):
    E, A, B, C = stable_matrices(rng, order, n_inputs, n_outputs, margin,
                                 descriptor)
    return from_state_space(E, A, B, C, tau=tau)


def rhp_points(rng, count, re=(0.3, 2.5), im=(-2.5, 2.5)):
    """Random points in a right-half-plane box, pairwise well separated."""
    for _ in range(50):
        pts = rng.uniform(*re, count) + 1j * rng.uniform(*im, count)
        diffs = np.abs(pts[:, None] - pts[None, :])[np.triu_indices(count, 1)]
        if diffs.size == 0 or np.min(diffs) > 0.05:
            return pts
    raise RuntimeError("could not draw separated points")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
