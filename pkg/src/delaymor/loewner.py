"""Tangential Loewner interpolation for delay-free descriptor models.

Two constructions: the two-sided one from distinct left/right point sets
(divided differences of the responses) and the Hermite one at coincident
points, which additionally matches the bitangential derivative. Both return
square, r-point realizations; rank-revealing compression is applied only on
request via an explicit target order.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from .errors import LoewnerDataError, RankDeficiencyWarning, RealificationError
from .model import DelayDescriptorModel

__all__ = [
    "TangentialData",
    "LoewnerPencil",
    "tangential_data_from_oracle",
    "build_loewner",
    "build_hermite_loewner",
    "hermite_model_from_data",
    "realify",
    "reduce_order",
    "conjugate_sort_key",
    "is_conjugate_closed",
]

_RANK_RATIO_TOL = 1e-12
_REAL_TRUNC_RTOL = 1e-8


def _as_dirs(dirs, count, width, name):
    if dirs is None:
        dirs = np.ones((count, width))
    arr = np.atleast_2d(np.asarray(dirs, dtype=complex))
    if arr.shape == (1, count) and width == 1:
        arr = arr.T
    if arr.shape != (count, width):
        raise ValueError(f"{name} must have shape ({count}, {width})")
    return arr


@dataclass(frozen=True)
class TangentialData:
    """Right data (lambda_i, r_i, w_i = H(lambda_i) r_i) and left data
    (mu_j, l_j, v_j = l_j H(mu_j)), stored row-wise.

    Shapes: lambdas (r,), right_dirs (r, n_u), right_resp (r, n_y);
    mus (r,), left_dirs (r, n_y), left_resp (r, n_u).
    """

    lambdas: np.ndarray
    right_dirs: np.ndarray
    right_resp: np.ndarray
    mus: np.ndarray
    left_dirs: np.ndarray
    left_resp: np.ndarray

    def __post_init__(self):
        lambdas = np.asarray(self.lambdas, dtype=complex).ravel()
        mus = np.asarray(self.mus, dtype=complex).ravel()
        if lambdas.size != mus.size:
            raise LoewnerDataError("need equally many right and left points")
        r = lambdas.size

        def _as_rows(arr, width, name):
            arr = np.atleast_2d(np.asarray(arr, dtype=complex))
            if arr.shape == (1, r) and width == 1:
                arr = arr.T
            if arr.shape != (r, width):
                raise ValueError(f"{name} must have shape ({r}, {width})")
            return arr

        rd = np.atleast_2d(np.asarray(self.right_dirs, dtype=complex))
        ld = np.atleast_2d(np.asarray(self.left_dirs, dtype=complex))
        n_u = 1 if rd.shape == (1, r) and r != 1 else rd.shape[1]
        n_y = 1 if ld.shape == (1, r) and r != 1 else ld.shape[1]
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "mus", mus)
        object.__setattr__(self, "right_dirs", _as_rows(rd, n_u, "right_dirs"))
        object.__setattr__(self, "right_resp",
                           _as_rows(self.right_resp, n_y, "right_resp"))
        object.__setattr__(self, "left_dirs", _as_rows(ld, n_y, "left_dirs"))
        object.__setattr__(self, "left_resp",
                           _as_rows(self.left_resp, n_u, "left_resp"))

    @property
    def r(self):
        return self.lambdas.size


def tangential_data_from_oracle(oracle, lambdas, mus, right_dirs=None, left_dirs=None):
    """Sample an oracle into tangential data: w_i = H(lambda_i) r_i, v_j = l_j H(mu_j)."""
    lambdas = np.asarray(lambdas, dtype=complex).ravel()
    mus = np.asarray(mus, dtype=complex).ravel()
    rd = _as_dirs(right_dirs, lambdas.size, oracle.n_inputs, "right_dirs")
    ld = _as_dirs(left_dirs, mus.size, oracle.n_outputs, "left_dirs")
    w = np.array([oracle.eval(lam) @ rd[i] for i, lam in enumerate(lambdas)])
    v = np.array([ld[j] @ oracle.eval(mu) for j, mu in enumerate(mus)])
    return TangentialData(lambdas, rd, w, mus, ld, v)


@dataclass(frozen=True)
class LoewnerPencil:
    """Loewner matrix L, shifted Loewner matrix Ls, and stacked data V, W.

    [L]_ij  = (v_i r_j - l_i w_j) / (mu_i - lambda_j)
    [Ls]_ij = (mu_i v_i r_j - l_i w_j lambda_j) / (mu_i - lambda_j)

    V stacks the left responses v_i as rows, W the right responses w_j as
    columns; the interpolating realization is (E, A, B, C) = (-L, -Ls, V, W).
    """

    L: np.ndarray
    Ls: np.ndarray
    V: np.ndarray
    W: np.ndarray

    def to_model(self):
        _warn_if_rank_deficient(self.L, self.Ls)
        return DelayDescriptorModel(E=-self.L, A=-self.Ls, B=self.V, C=self.W, tau=0.0)


def _warn_if_rank_deficient(E_like, A_like):
    sv = spla.svdvals(np.hstack([E_like, A_like]))
    if sv[0] > 0 and sv[-1] / sv[0] < _RANK_RATIO_TOL:
        warnings.warn(
            "Loewner pencil numerically rank deficient "
            f"(sigma_min/sigma_max = {sv[-1] / sv[0]:.2e}); the underlying data "
            "order is below r. Pass a target order to compress.",
            RankDeficiencyWarning,
            stacklevel=3,
        )


def build_loewner(data):
    """Loewner and shifted-Loewner matrices from two-sided tangential data.

    Requires mu_i != lambda_j for all pairs; coincident points need the
    Hermite construction instead.
    """
    lam, mus = data.lambdas, data.mus
    diff = mus[:, None] - lam[None, :]
    if np.min(np.abs(diff)) == 0.0:
        raise LoewnerDataError(
            "coincident left/right points; use the Hermite construction"
        )
    vr = data.left_resp @ data.right_dirs.T     # v_i r_j
    lw = data.left_dirs @ data.right_resp.T     # l_i w_j
    L = (vr - lw) / diff
    Ls = (mus[:, None] * vr - lw * lam[None, :]) / diff
    return LoewnerPencil(L=L, Ls=Ls, V=data.left_resp.copy(), W=data.right_resp.T.copy())


def hermite_model_from_data(points, values, derivatives, right_dirs=None,
                            left_dirs=None, order=None):
    """Hermite (bitangential) interpolation model from sampled values.

    `values` and `derivatives` stack one (n_y, n_u) matrix per point. The
    resulting order-r descriptor model matches value, left value and the
    scalar l_i H'(s_i) r_i at every point. Off-diagonal entries are divided
    differences; diagonal entries use H'(s_i) and (s H)'(s_i) = H + s H'.
    """
    points = np.asarray(points, dtype=complex).ravel()
    r = points.size
    values = np.asarray(values, dtype=complex)
    derivatives = np.asarray(derivatives, dtype=complex)
    if values.ndim == 1:
        values = values.reshape(r, 1, 1)
    if derivatives.ndim == 1:
        derivatives = derivatives.reshape(r, 1, 1)
    n_y, n_u = values.shape[1], values.shape[2]
    rd = _as_dirs(right_dirs, r, n_u, "right_dirs")
    ld = _as_dirs(left_dirs, r, n_y, "left_dirs")
    if len(set(points.tolist())) != r:
        raise LoewnerDataError("shift points must be distinct")

    Hr = np.einsum("kij,kj->ki", values, rd)        # H(s_j) r_j
    lH = np.einsum("ki,kij->kj", ld, values)        # l_i H(s_i)
    E = np.empty((r, r), dtype=complex)
    A = np.empty((r, r), dtype=complex)
    for i in range(r):
        for j in range(r):
            if i == j:
                lHp_r = ld[i] @ derivatives[i] @ rd[i]
                E[i, i] = -lHp_r
                # (s H(s))' = H + s H'
                A[i, i] = -(ld[i] @ values[i] @ rd[i] + points[i] * lHp_r)
            else:
                denom = points[i] - points[j]
                E[i, j] = -(ld[i] @ (values[i] - values[j]) @ rd[j]) / denom
                A[i, j] = -(points[i] * (ld[i] @ values[i] @ rd[j])
                            - points[j] * (ld[i] @ values[j] @ rd[j])) / denom
    B = lH
    C = Hr.T
    if order is None:
        _warn_if_rank_deficient(E, A)
        return DelayDescriptorModel(E=E, A=A, B=B, C=C, tau=0.0)
    return reduce_order(DelayDescriptorModel(E=E, A=A, B=B, C=C, tau=0.0), order)


def build_hermite_loewner(oracle, shifts, right_dirs=None, left_dirs=None, order=None):
    """Hermite interpolation of an oracle at coincident left/right shifts."""
    shifts = np.asarray(shifts, dtype=complex).ravel()
    values = np.array([oracle.eval(s) for s in shifts])
    derivs = np.array([oracle.eval_derivative(s) for s in shifts])
    return hermite_model_from_data(shifts, values, derivs, right_dirs, left_dirs, order)


def conjugate_sort_key(point):
    """Ordering that keeps conjugate pairs adjacent: (Re, |Im|, sign Im)."""
    return (point.real, abs(point.imag), point.imag)


def _conjugate_order(points):
    points = np.asarray(points, dtype=complex).ravel()
    return sorted(range(points.size), key=lambda i: conjugate_sort_key(points[i]))


def is_conjugate_closed(points, rtol=1e-9):
    points = np.asarray(points, dtype=complex).ravel()
    scale = max(1.0, float(np.max(np.abs(points), initial=0.0)))
    remaining = list(points)
    for p in points:
        if not any(abs(np.conj(p) - q) <= rtol * scale for q in remaining):
            return False
        # consume the closest conjugate partner
        j = int(np.argmin([abs(np.conj(p) - q) for q in remaining]))
        remaining.pop(j)
    return True


def _realifying_block(points, rtol=1e-9):
    """Unitary J with per-pair blocks [[1, 1j], [1, -1j]]/sqrt(2) and 1 on reals.

    Requires `points` ordered with conjugate pairs adjacent (the member with
    negative imaginary part first, as produced by conjugate_sort_key).
    """
    points = np.asarray(points, dtype=complex).ravel()
    n = points.size
    scale = max(1.0, float(np.max(np.abs(points), initial=0.0)))
    J = np.zeros((n, n), dtype=complex)
    i = 0
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    while i < n:
        p = points[i]
        if abs(p.imag) <= rtol * scale:
            J[i, i] = 1.0
            i += 1
            continue
        if i + 1 >= n or abs(np.conj(p) - points[i + 1]) > rtol * scale:
            raise RealificationError(
                f"shift set not closed under conjugation near {p}"
            )
        J[i, i] = inv_sqrt2
        J[i, i + 1] = 1j * inv_sqrt2
        J[i + 1, i] = inv_sqrt2
        J[i + 1, i + 1] = -1j * inv_sqrt2
        i += 2
    return J


def _truncate_real(M, what):
    norm = np.linalg.norm(M)
    imag_max = float(np.max(np.abs(M.imag), initial=0.0))
    if imag_max > _REAL_TRUNC_RTOL * max(norm, 1e-300):
        raise RealificationError(
            f"{what} kept imaginary parts of relative size "
            f"{imag_max / max(norm, 1e-300):.2e} after the similarity transform; "
            "is the sampled system real-symmetric?"
        )
    return np.ascontiguousarray(M.real)


def realify(model, shifts, left_shifts=None):
    """Real realization of a model built from conjugate-closed data.

    `shifts` are the right (column) points, `left_shifts` the left (row)
    points when they differ. Both sets must be closed under conjugation and
    ordered with conjugate pairs adjacent; the transfer function is preserved
    exactly (unitary equivalence transformation).
    """
    shifts = np.asarray(shifts, dtype=complex).ravel()
    rows = shifts if left_shifts is None else np.asarray(left_shifts, dtype=complex).ravel()
    Jr = _realifying_block(shifts)
    Jl = Jr if left_shifts is None else _realifying_block(rows)
    E = Jl.conj().T @ model.E @ Jr
    A = Jl.conj().T @ model.A @ Jr
    B = Jl.conj().T @ model.B
    C = model.C @ Jr
    return DelayDescriptorModel(
        E=_truncate_real(E, "E"),
        A=_truncate_real(A, "A"),
        B=_truncate_real(B, "B"),
        C=_truncate_real(C, "C"),
        tau=model.tau,
    )


def reduce_order(model, order):
    """Rank-revealing compression of a (possibly singular) Loewner pencil.

    Projects with the leading singular subspaces of [E, A] stacked
    horizontally and vertically, the standard recipe for redundant Loewner
    data. The delay field is preserved.
    """
    order = int(order)
    if not 1 <= order <= model.order:
        raise ValueError("target order must be in [1, current order]")
    EA_h = np.hstack([model.E, model.A])
    EA_v = np.vstack([model.E, model.A])
    Y, _, _ = spla.svd(EA_h, full_matrices=False)
    _, _, Xh = spla.svd(EA_v, full_matrices=False)
    Yk = Y[:, :order]
    Xk = Xh[:order, :].conj().T
    return DelayDescriptorModel(
        E=Yk.conj().T @ model.E @ Xk,
        A=Yk.conj().T @ model.A @ Xk,
        B=Yk.conj().T @ model.B,
        C=model.C @ Xk,
        tau=model.tau,
    )
