"""Complex Lambert W function on arbitrary integer branches.

W_k(z) solves w * exp(w) = z with Im(w) in the branch-k strip; branch 0 is
principal. Seeds follow Corless, Gonnet, Hare, Jeffrey & Knuth, "On the
Lambert W function" (1996): series near 0 and near the branch point -1/e,
asymptotic log expansion elsewhere, then a few Newton steps on
w + log(w) = log(z) + 2*pi*i*k for global robustness and Halley's method on
w*exp(w) = z to polish.
"""

import cmath
import math

from .errors import LambertWConvergenceError

__all__ = ["lambert_w", "delay_pole_from_eigenvalue"]

_E = math.e
_EM1 = math.exp(-1.0)  # 1/e
_OMEGA = 0.5671432904097838  # W_0(1)
_TWO_PI = 2.0 * math.pi

# Taylor coefficients of W_0 around z = 1 (derivatives of the inverse of
# w e^w at w = omega); enough terms for a seed, Halley does the rest.
_TAYLOR_AT_1 = (
    _OMEGA,
    0.3618962566348892,
    -0.07236920536514527,
    0.02449762892644518,
    -0.009718947585471172,
)


def _seed(z, k):
    if k == 0:
        if abs(z + _EM1) < 0.3:
            # branch-point series, p = sqrt(2 (e z + 1))
            p = cmath.sqrt(2.0 * (_E * z + 1.0))
            return -1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0
        if abs(z) < 0.35:
            return z * (1.0 - z + 1.5 * z * z)
        if abs(z - 1.0) < 1.0:
            h = z - 1.0
            w = _TAYLOR_AT_1[-1]
            for c in reversed(_TAYLOR_AT_1[:-1]):
                w = w * h + c
            return w
    if k == -1 and z.imag == 0.0 and -_EM1 <= z.real < 0.0:
        # real branch W_-1 on [-1/e, 0)
        if abs(z + _EM1) < 0.3:
            p = -cmath.sqrt(2.0 * (_E * z + 1.0))
            return -1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0
        lz = math.log(-z.real)
        return complex(lz - math.log(-lz))
    # asymptotic: w ~ L1 - log(L1), L1 = Log z + 2 pi i k
    L1 = cmath.log(z) + 2.0j * math.pi * k
    if abs(L1) < 0.5:
        # only reachable for k = 0 near z = 1, covered above; keep a fallback
        return complex(_OMEGA)
    return L1 - cmath.log(L1)


def _log_newton(w, z, k, iterations=8):
    # Newton on g(w) = w + Log(w) - (Log(z) + 2 pi i k); nearly linear in
    # log-space, so it herds far-off seeds into the right basin. Invalid on
    # the real segment of W_-1 (unwinding mismatch), skipped by the caller.
    target = cmath.log(z) + 2.0j * math.pi * k
    for _ in range(iterations):
        if w == 0.0:
            break
        g = w + cmath.log(w) - target
        step = g * w / (w + 1.0)
        if not cmath.isfinite(step):
            break
        w_next = w - step
        if w_next == 0.0 or not cmath.isfinite(w_next):
            break
        w = w_next
        if abs(step) < 1e-12 * max(1.0, abs(w)):
            break
    return w


def lambert_w(z, k=0, tol=1e-15, max_iter=100):
    """Evaluate the Lambert W function on branch `k` at complex `z`.

    Returns w with ``w * exp(w) == z`` to relative residual about `tol`
    (never worse than 1e-13 on success). W_0(0) = 0; W_k(0) is undefined
    for k != 0 and raises ValueError. Raises
    :class:`~delaymor.errors.LambertWConvergenceError` if Halley's method
    fails, which only happens for pathological inputs near the branch
    point z = -1/e.
    """
    z = complex(z)
    k = int(k)
    if z == 0.0:
        if k == 0:
            return 0.0 + 0.0j
        raise ValueError(f"W_{k}(0) is undefined")

    w = _seed(z, k)
    skip_log_newton = (
        k == -1 and z.imag == 0.0 and -_EM1 <= z.real < 0.0
    ) or abs(z + _EM1) < 1e-3 or (k == 0 and abs(z) < 0.35)
    if not skip_log_newton:
        w = _log_newton(w, z, k)

    best = w
    best_res = math.inf
    for _ in range(max_iter):
        ew = cmath.exp(w)
        f = w * ew - z
        res = abs(f)
        if res < best_res:
            best, best_res = w, res
        if res <= tol * max(1.0, abs(z)):
            return w
        wp1 = w + 1.0
        if wp1 == 0.0:
            # stuck exactly on the branch point derivative zero
            w += 1e-8
            continue
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0 or not cmath.isfinite(denom):
            break
        w = w - f / denom
        if not cmath.isfinite(w):
            break
    # accept slightly looser residual before declaring failure; near the
    # branch point the double root halves the attainable accuracy
    if best_res <= 1e-13 * max(1.0, abs(z)):
        return best
    raise LambertWConvergenceError(z, k)


def delay_pole_from_eigenvalue(alpha, tau, k=0):
    """Characteristic root lambda = W_k(tau * alpha) / tau.

    For a single-delay model with generalized eigenvalue alpha, the returned
    lambda satisfies lambda * exp(lambda * tau) = alpha, i.e. it is a pole of
    C (s E - A exp(-tau s))^{-1} B on branch k.
    """
    tau = float(tau)
    if tau <= 0:
        raise ValueError("tau must be positive")
    return lambert_w(tau * complex(alpha), k) / tau
