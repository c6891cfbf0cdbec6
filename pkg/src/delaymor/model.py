"""Single-delay descriptor state-space models."""

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationAtPoleError

# Beyond this solve-conditioning proxy the pencil is treated as (numerically)
# rank deficient and evaluation falls back to a least-squares solve.
_COND_PROXY_LIMIT = 1e13
_CONSISTENCY_RTOL = 1e-8


def _solve_pencil(P, rhs, point):
    """Solve P x = rhs, tolerating consistent rank-deficient pencils.

    Rank-deficient Loewner pencils (data from a system of order below r)
    produce singular P with rhs still in its range; the minimal-norm
    least-squares solution then yields the well-defined transfer value.
    An inconsistent singular system means a genuine pole.
    """
    rhs_norm = np.linalg.norm(rhs)
    try:
        x = np.linalg.solve(P, rhs)
    except np.linalg.LinAlgError:
        x = None
    if x is not None:
        proxy = np.linalg.norm(x) * np.linalg.norm(P) / max(rhs_norm, 1e-300)
        if proxy <= _COND_PROXY_LIMIT and np.all(np.isfinite(x)):
            return x
    xl = np.linalg.lstsq(P, rhs, rcond=None)[0]
    residual = np.linalg.norm(P @ xl - rhs)
    if residual <= _CONSISTENCY_RTOL * max(rhs_norm, 1e-300):
        return xl
    if x is not None and np.all(np.isfinite(x)):
        # ill conditioned but not structurally singular: huge values are the
        # correct answer close to a pole
        return x
    raise EvaluationAtPoleError(point)


@dataclass(frozen=True)
class DelayDescriptorModel:
    """Realization (E, A, B, C, tau) of E x'(t) = A x(t - tau) + B u(t), y = C x.

    The transfer function is H(s) = C (s E - A exp(-tau s))^{-1} B; tau = 0
    gives the ordinary descriptor form C (s E - A)^{-1} B. Matrices may be
    complex while a model is under construction; :func:`delaymor.loewner.realify`
    produces real ones for conjugate-closed data.
    """

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    tau: float = 0.0

    def __post_init__(self):
        E = np.atleast_2d(np.asarray(self.E))
        A = np.atleast_2d(np.asarray(self.A))
        B = np.atleast_2d(np.asarray(self.B))
        C = np.atleast_2d(np.asarray(self.C))
        n = E.shape[0]
        if E.shape != (n, n) or A.shape != (n, n):
            raise ValueError("E and A must be square and of equal size")
        if B.shape[0] != n:
            raise ValueError("B must have as many rows as A")
        if C.shape[1] != n:
            raise ValueError("C must have as many columns as A")
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def order(self):
        return self.E.shape[0]

    @property
    def n_inputs(self):
        return self.B.shape[1]

    @property
    def n_outputs(self):
        return self.C.shape[0]

    def delay_free_part(self):
        """Same matrices with tau = 0 (the G of H(s) = G(s e^{s tau}) e^{s tau})."""
        return dataclasses.replace(self, tau=0.0)

    def with_delay(self, tau):
        return dataclasses.replace(self, tau=float(tau))

    def pencil(self, s):
        """Characteristic matrix s E - A exp(-tau s)."""
        s = complex(s)
        return s * self.E - self.A * np.exp(-self.tau * s)

    def pencil_derivative(self, s):
        """d/ds of the characteristic matrix: E + tau A exp(-tau s)."""
        s = complex(s)
        return self.E + self.tau * self.A * np.exp(-self.tau * s)

    def transfer(self, s):
        """Evaluate H(s) as an (n_outputs, n_inputs) complex matrix."""
        P = self.pencil(s)
        X = _solve_pencil(P, self.B.astype(complex), s)
        return np.atleast_2d(self.C @ X)

    def transfer_derivative(self, s):
        """Evaluate H'(s) = -C P^{-1} P'(s) P^{-1} B analytically."""
        P = self.pencil(s)
        X = _solve_pencil(P, self.B.astype(complex), s)
        Y = _solve_pencil(P, self.pencil_derivative(s) @ X, s)
        return -np.atleast_2d(self.C @ Y)

    def is_real(self, rtol=1e-8):
        scale = max(np.linalg.norm(M) for M in (self.E, self.A, self.B, self.C))
        return all(
            np.max(np.abs(np.imag(M)), initial=0.0) <= rtol * max(scale, 1e-300)
            for M in (self.E, self.A, self.B, self.C)
        )
