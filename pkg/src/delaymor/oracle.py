"""Uniform sampling interface over systems known only through evaluation.

A :class:`SystemOracle` yields the transfer function H(s) and its derivative
H'(s) at arbitrary complex points, whether the system comes from state-space
matrices, a parsed expression, or tabulated frequency data.
"""

import cmath

import numpy as np

from .errors import EvaluationAtPoleError, PointNotTabulatedError
from .expression import parse_expression
from .model import DelayDescriptorModel

__all__ = [
    "SystemOracle",
    "from_state_space",
    "from_model",
    "from_expression",
    "from_samples",
    "from_callable",
]

_LOOKUP_RTOL = 1e-12


class SystemOracle:
    """Evaluable transfer function H(s) with derivative H'(s).

    Evaluation is a pure function of s: oracles carry no mutable state after
    construction and may be called concurrently.

    Parameters
    ----------
    eval_fn
        Maps a complex scalar to an (n_outputs, n_inputs) complex matrix.
    deriv_fn
        Same shape, the derivative d H / d s.
    n_inputs, n_outputs
        Channel counts.
    derivative_mode
        'analytic' or 'finite-difference', describing how deriv_fn computes.
    """

    def __init__(self, eval_fn, deriv_fn, n_inputs, n_outputs,
                 derivative_mode="analytic"):
        if derivative_mode not in ("analytic", "finite-difference"):
            raise ValueError("derivative_mode must be 'analytic' or 'finite-difference'")
        self._eval_fn = eval_fn
        self._deriv_fn = deriv_fn
        self.n_inputs = int(n_inputs)
        self.n_outputs = int(n_outputs)
        self.derivative_mode = derivative_mode

    def _shape(self, value):
        out = np.atleast_2d(np.asarray(value, dtype=complex))
        if out.shape != (self.n_outputs, self.n_inputs):
            raise ValueError(
                f"oracle returned shape {out.shape}, "
                f"expected {(self.n_outputs, self.n_inputs)}"
            )
        return out

    def eval(self, s):
        """H(s) as an (n_outputs, n_inputs) complex matrix."""
        return self._shape(self._eval_fn(complex(s)))

    def eval_derivative(self, s):
        """H'(s), same shape as :meth:`eval`."""
        return self._shape(self._deriv_fn(complex(s)))


def from_state_space(E, A, B, C, tau=0.0):
    """Oracle for H(s) = C (s E - A exp(-tau s))^{-1} B.

    Each evaluation is one linear solve; the derivative is analytic via
    H'(s) = -C P^{-1} (E + tau A exp(-tau s)) P^{-1} B with P = s E - A exp(-tau s).
    """
    model = DelayDescriptorModel(E=E, A=A, B=B, C=C, tau=tau)
    return from_model(model)


def from_model(model):
    """Oracle wrapping an existing :class:`~delaymor.model.DelayDescriptorModel`."""
    return SystemOracle(
        model.transfer,
        model.transfer_derivative,
        n_inputs=model.n_inputs,
        n_outputs=model.n_outputs,
        derivative_mode="analytic",
    )


def from_expression(expr_text):
    """SISO oracle from an expression in s (see :mod:`delaymor.expression`).

    The derivative is obtained by exact differentiation of the expression
    tree, not by finite differences.
    """
    expr = parse_expression(expr_text)
    dexpr = expr.derivative()

    def _eval(s, _e=expr):
        try:
            return _e.eval(s)
        except ZeroDivisionError:
            raise EvaluationAtPoleError(s) from None

    return SystemOracle(
        lambda s: _eval(s),
        lambda s: _eval(s, dexpr),
        n_inputs=1,
        n_outputs=1,
        derivative_mode="analytic",
    )


def from_samples(points, values, derivative_values=None):
    """Oracle valid only at tabulated points.

    Queries are matched with relative tolerance 1e-12; anything else raises
    :class:`~delaymor.errors.PointNotTabulatedError`. Derivative data is
    optional; requesting a derivative without it is an error.
    """
    points = np.asarray(points, dtype=complex).ravel()
    if len(set(points.tolist())) != points.size:
        raise ValueError("sample points must be distinct")
    values = np.asarray(values, dtype=complex)
    if values.ndim == 1:
        values = values.reshape(-1, 1, 1)
    if values.ndim != 3 or values.shape[0] != points.size:
        raise ValueError("values must stack one (n_y, n_u) matrix per point")
    if derivative_values is not None:
        derivative_values = np.asarray(derivative_values, dtype=complex)
        if derivative_values.ndim == 1:
            derivative_values = derivative_values.reshape(-1, 1, 1)
        if derivative_values.shape != values.shape:
            raise ValueError("derivative_values must match values in shape")

    def _lookup(s, table):
        if table is None:
            raise PointNotTabulatedError(s)
        dist = np.abs(points - s)
        i = int(np.argmin(dist))
        if dist[i] <= _LOOKUP_RTOL * max(1.0, abs(s)):
            return table[i]
        raise PointNotTabulatedError(s)

    return SystemOracle(
        lambda s: _lookup(s, values),
        lambda s: _lookup(s, derivative_values),
        n_inputs=values.shape[2],
        n_outputs=values.shape[1],
        derivative_mode="analytic",
    )


def from_callable(fn, deriv_fn=None, n_inputs=1, n_outputs=1):
    """Oracle around an arbitrary callable s -> matrix.

    Without `deriv_fn` the derivative falls back to a central finite
    difference with step 1e-6 * max(1, |s|).
    """
    if deriv_fn is not None:
        return SystemOracle(fn, deriv_fn, n_inputs, n_outputs, "analytic")

    def _fd(s):
        h = 1e-6 * max(1.0, abs(s))
        return (np.asarray(fn(s + h)) - np.asarray(fn(s - h))) / (2.0 * h)

    return SystemOracle(fn, _fd, n_inputs, n_outputs, "finite-difference")
