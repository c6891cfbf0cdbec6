"""Interpolation by single-delay descriptor models.

The substitution f(s) = s exp(s tau) turns delay interpolation into
delay-free interpolation: a delay model H_d(s) = C (s E - A e^{-s tau})^{-1} B
factors as H_d(s) = G(f(s)) e^{s tau} with G the delay-free sibling of the
same matrices. Both constructions below transform the data accordingly,
run the delay-free Loewner builders, and attach tau to the result.
"""

import dataclasses

import numpy as np

from .errors import InjectivityError
from .loewner import TangentialData, build_loewner, hermite_model_from_data

__all__ = [
    "substitution_map",
    "substitution_map_derivative",
    "check_injectivity",
    "ensure_injective",
    "build_delay_loewner",
    "build_hermite_delay_loewner",
]

# The construction divides by f(mu_i) - f(lambda_j); near-collisions blow up
# the Loewner entries, so fail fast.
TOL_INJECTIVITY = 1e-10
_DERIV_DENOM_MARGIN = 1e-8


def substitution_map(s, tau):
    """f(s) = s * exp(s * tau); the delay-to-delay-free change of variable."""
    s = np.asarray(s, dtype=complex)
    out = s * np.exp(s * tau)
    return complex(out) if out.ndim == 0 else out


def substitution_map_derivative(s, tau):
    """f'(s) = exp(s * tau) * (1 + tau * s); vanishes at s = -1/tau."""
    s = np.asarray(s, dtype=complex)
    out = np.exp(s * tau) * (1.0 + tau * s)
    return complex(out) if out.ndim == 0 else out


def check_injectivity(points, tau, tol=TOL_INJECTIVITY):
    """Pairwise test that f separates `points`.

    Returns None when all transformed points are pairwise distinct relative
    to `tol`, otherwise the first violating pair (h1, h2).
    """
    points = np.asarray(points, dtype=complex).ravel()
    f = substitution_map(points, tau)
    for i in range(points.size):
        for j in range(i + 1, points.size):
            scale = max(1.0, abs(f[i]), abs(f[j]))
            if abs(f[i] - f[j]) <= tol * scale:
                return (complex(points[i]), complex(points[j]))
    return None


def ensure_injective(points, tau, tol=TOL_INJECTIVITY):
    violation = check_injectivity(points, tau, tol)
    if violation is not None:
        raise InjectivityError(violation, tau)


def build_delay_loewner(data, tau):
    """Single-delay model from two-sided tangential data (delay analogue of
    the plain Loewner build).

    Transforms the data to (f(lambda_i), r_i, w_i e^{-lambda_i tau}) and
    (f(mu_j), l_j, v_j e^{-mu_j tau}), builds the delay-free interpolant and
    returns it with the delay attached, so that H_d(lambda_i) r_i = w_i and
    l_j H_d(mu_j) = v_j.
    """
    tau = float(tau)
    ensure_injective(np.concatenate([data.lambdas, data.mus]), tau)
    transformed = TangentialData(
        lambdas=substitution_map(data.lambdas, tau),
        right_dirs=data.right_dirs,
        right_resp=data.right_resp * np.exp(-data.lambdas * tau)[:, None],
        mus=substitution_map(data.mus, tau),
        left_dirs=data.left_dirs,
        left_resp=data.left_resp * np.exp(-data.mus * tau)[:, None],
    )
    model = build_loewner(transformed).to_model()
    return dataclasses.replace(model, tau=tau)


def build_hermite_delay_loewner(oracle, shifts, tau, right_dirs=None,
                                left_dirs=None, order=None):
    """Single-delay Hermite (bitangential) interpolant of an oracle.

    Runs the delay-free Hermite construction at sigma_i = f(s_i) with values
    G(sigma_i) = H(s_i) e^{-s_i tau} and derivatives

        G'(sigma_i) = (H'(s_i) - tau H(s_i)) * e^{-2 s_i tau} / (1 + tau s_i),

    which is the chain rule applied to G(f(s)) = H_d(s) e^{-s tau}. The
    denominator requires 1 + tau s_i != 0 (f' vanishes at s = -1/tau, where
    Hermite data in the transformed variable is undefined).
    """
    tau = float(tau)
    shifts = np.asarray(shifts, dtype=complex).ravel()
    ensure_injective(shifts, tau)
    bad = np.abs(1.0 + tau * shifts) <= _DERIV_DENOM_MARGIN
    if np.any(bad):
        raise ValueError(
            f"shift {shifts[bad][0]} too close to -1/tau: the transformed "
            "derivative is singular there"
        )
    values = np.array([oracle.eval(s) for s in shifts])
    derivs = np.array([oracle.eval_derivative(s) for s in shifts])
    sigma = substitution_map(shifts, tau)
    damp = np.exp(-shifts * tau)
    g_values = values * damp[:, None, None]
    g_derivs = (derivs - tau * values) * (damp**2 / (1.0 + tau * shifts))[:, None, None]
    model = hermite_model_from_data(sigma, g_values, g_derivs, right_dirs,
                                    left_dirs, order)
    return dataclasses.replace(model, tau=tau)
