"""Pole and tangential-direction extraction from reduced models.

Solves the generalized eigenvalue problem of the (A, E) pencil with left and
right eigenvectors (QZ, via LAPACK ggev), biorthonormalizes so that
y_i^H E x_j = delta_ij, and exposes the residue directions b_i = y_i^H B and
c_i = C x_i. With those normalizations the delay-free transfer equals
sum_i c_i b_i^T / (s - lambda_i) and the delay transfer equals
sum_i c_i b_i^T / (s - lambda_i e^{-s tau}).
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from .errors import PencilError, SemisimplicityWarning
from .lambertw import delay_pole_from_eigenvalue
from .loewner import conjugate_sort_key

__all__ = ["SpectralDecomposition", "decompose", "delay_poles"]

_DIAGONALIZABLE_TOL = 1e-12
_EIGENGAP_WARN = 1e-8


@dataclass(frozen=True)
class SpectralDecomposition:
    """Generalized eigentriplets of (A, E) with residue directions.

    eigenvalues[i] solves A x_i = lambda_i E x_i and y_i^H A = lambda_i y_i^H E;
    right_vectors holds x_i as columns, left_vectors holds y_i^H as rows, and
    y_i^H E x_j = delta_ij. b_dirs rows are y_i^H B, c_dirs rows are (C x_i)^T.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    b_dirs: np.ndarray
    c_dirs: np.ndarray

    @property
    def r(self):
        return self.eigenvalues.size


def decompose(model, strict=True):
    """Spectral decomposition of a model's (A, E) pencil.

    Raises :class:`~delaymor.errors.PencilError` when the pencil has
    infinite eigenvalues or is numerically defective; warns when eigenvalues
    nearly coincide (semi-simplicity assumption at risk). With
    ``strict=False`` a numerically near-defective pencil only warns (the
    biorthogonality guarantee degrades accordingly); this keeps iterative
    callers alive on ill-conditioned Loewner iterates, where eigenvalues are
    still usable while residue scales blow up.
    """
    A = np.asarray(model.A, dtype=complex)
    E = np.asarray(model.E, dtype=complex)
    w, vl, vr = spla.eig(A, E, left=True, right=True)
    if np.any(~np.isfinite(w)):
        raise PencilError(
            "pencil has infinite generalized eigenvalues (singular E); "
            "compress the model to its numerical order first"
        )

    idx = sorted(range(w.size), key=lambda i: conjugate_sort_key(complex(w[i])))
    w = w[idx]
    X = vr[:, idx].astype(complex)
    Y = vl[:, idx].astype(complex)

    scale = max(1.0, float(np.max(np.abs(w))))
    gaps = np.abs(w[:, None] - w[None, :])[np.triu_indices(w.size, 1)]
    if gaps.size and np.min(gaps) < _EIGENGAP_WARN * scale:
        warnings.warn(
            f"nearly repeated eigenvalues (min gap {np.min(gaps):.2e}); "
            "semi-simplicity is at risk",
            SemisimplicityWarning,
            stacklevel=2,
        )

    # deterministic phase: rotate y_i so its largest entry is real positive
    for i in range(w.size):
        j = int(np.argmax(np.abs(Y[:, i])))
        phase = Y[j, i] / abs(Y[j, i])
        Y[:, i] = Y[:, i] / phase

    d = np.einsum("ki,kj->ij", Y.conj(), E @ X).diagonal().copy()
    norm_e = np.linalg.norm(E)
    degenerate = np.abs(d) <= _DIAGONALIZABLE_TOL * max(norm_e, 1e-300)
    if np.any(degenerate):
        if strict or np.any(d[degenerate] == 0) or np.any(~np.isfinite(d)):
            raise PencilError("pencil not diagonalizable (left/right "
                              "eigenvectors nearly E-orthogonal)")
        warnings.warn(
            "near-defective pencil: residue directions are badly scaled",
            SemisimplicityWarning,
            stacklevel=2,
        )
    X = X / d[None, :]

    B = np.asarray(model.B, dtype=complex)
    C = np.asarray(model.C, dtype=complex)
    b_dirs = Y.conj().T @ B          # rows y_i^H B
    c_dirs = (C @ X).T               # rows (C x_i)^T
    return SpectralDecomposition(
        eigenvalues=w,
        right_vectors=X,
        left_vectors=Y.conj().T,
        b_dirs=b_dirs,
        c_dirs=c_dirs,
    )


def delay_poles(model, branches=(0,)):
    """Characteristic roots of s E - A e^{-s tau} on the requested branches.

    Every generalized eigenvalue alpha of (A, E) spawns one root per branch,
    lambda_{k} = W_k(tau * alpha) / tau, each of which makes the
    characteristic matrix singular.
    """
    if model.tau <= 0:
        raise ValueError("delay_poles requires tau > 0")
    eigs = decompose(model).eigenvalues
    poles = []
    for alpha in eigs:
        for k in branches:
            poles.append(delay_pole_from_eigenvalue(alpha, model.tau, k))
    return np.asarray(poles, dtype=complex)
