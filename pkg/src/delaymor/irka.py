"""Fixed-point iterations for H2-suboptimal reduction.

`tf_irka` is the delay-free baseline: Hermite-interpolate at the current
shifts, mirror the reduced poles into the right half plane, repeat. `dtf_irka`
produces a single-delay reduced model: the interpolant comes from the delay
Hermite construction and the new shifts are the mirrored characteristic roots
-(1/tau) W(tau * lambda) on a configurable Lambert branch. Shift sets and
directions are projected to conjugate closure every iteration so each iterate
has a real realization.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .delay_loewner import build_hermite_delay_loewner, ensure_injective
from .errors import InjectivityError, PencilError
from .lambertw import delay_pole_from_eigenvalue
from .loewner import build_hermite_loewner, conjugate_sort_key, realify
from .spectral import decompose

__all__ = [
    "IrkaOptions",
    "IrkaState",
    "IrkaReport",
    "OptimalityRow",
    "OptimalityReport",
    "initial_state",
    "tf_irka",
    "dtf_irka",
    "check_optimality",
    "check_delay_optimality",
]


@dataclass(frozen=True)
class IrkaOptions:
    max_iter: int = 100
    conv_tol: float = 1e-6
    opt_tol: float = 1e-6
    branch: int = 0             # Lambert branch for the shift update
    seed: int = 0               # randomized MIMO direction initialization
    stagnation_window: int = 10


@dataclass
class IrkaState:
    """Shift points and tangential directions of one iterate.

    b_dirs rows live in input space (n_u,), c_dirs rows in output space
    (n_y,). Shifts are conjugate-closed and sorted with pairs adjacent.
    """

    shifts: np.ndarray
    b_dirs: np.ndarray
    c_dirs: np.ndarray
    iteration: int = 0
    shift_history: list = field(default_factory=list)
    convergence_metric: float = math.inf


@dataclass(frozen=True)
class IrkaReport:
    """Outcome of an IRKA run.

    `state.shifts` are the mirrored (Lambert-mapped) reduced poles of
    `final_model`; on convergence they also equal, to within `final_metric`,
    the shifts the model was built at. A nonconverged run carries the best
    iterate seen and an explanation in `diagnostics`.
    """

    final_model: object
    converged: bool
    iterations: int
    final_metric: float
    optimality_residuals: "OptimalityReport"
    state: IrkaState
    diagnostics: str = ""


@dataclass(frozen=True)
class OptimalityRow:
    index: int
    branch: object              # None for the delay-free conditions
    eigenvalue: complex
    point: complex
    right_residual: float
    left_residual: float
    derivative_residual: float


@dataclass(frozen=True)
class OptimalityReport:
    rows: list

    @property
    def max_residual(self):
        if not self.rows:
            return math.inf
        worst = 0.0
        for row in self.rows:
            worst = max(worst, row.right_residual, row.left_residual,
                        row.derivative_residual)
        return worst

    def passed(self, tol):
        return self.max_residual <= tol


def initial_state(r, n_inputs=1, n_outputs=1, band=(0.1, 1.0), seed=0):
    """Default initialization: r log-spaced real shifts in `band`, all-ones
    directions for SISO channels and seeded random ones otherwise."""
    shifts = np.geomspace(band[0], band[1], r).astype(complex)
    rng = np.random.default_rng(seed)
    b = np.ones((r, 1), dtype=complex) if n_inputs == 1 else \
        rng.standard_normal((r, n_inputs)).astype(complex)
    c = np.ones((r, 1), dtype=complex) if n_outputs == 1 else \
        rng.standard_normal((r, n_outputs)).astype(complex)
    return IrkaState(shifts=shifts, b_dirs=b, c_dirs=c)


def _balance(b, c):
    # unit norm on both sides: ||b_i|| = ||c_i|| = 1. The bitangential
    # conditions are scale invariant and direction scales cancel from the
    # next Loewner build (two-sided diagonal scaling), so this only protects
    # the pencil from drifting into badly mixed scales across iterations.
    nb, nc = np.linalg.norm(b), np.linalg.norm(c)
    if nb > 0 and nc > 0:
        return b / nb, c / nc
    return b, c


def _project_conjugate_closed(shifts, b_dirs, c_dirs):
    """Force (shift, b, c) triples to exact conjugate closure, preserving count.

    Matched near-conjugate pairs are replaced by (sigma, conj sigma) using the
    member with positive imaginary part; a lone complex shift is paired with
    its conjugate and a surplus real shift of smallest magnitude is dropped.
    When no real shift is left to drop, the lone pair of smallest |Im| is
    demoted to its real part instead.
    """
    r = len(shifts)
    scale = max(1.0, float(np.max(np.abs(shifts), initial=0.0)))

    # snap-to-real threshold sized for eigensolver dirt on real eigenvalues;
    # tighter values manufacture near-duplicate conjugate pairs that then
    # collide under the substitution map
    reals, pos, neg = [], [], []
    for s, b, c in zip(shifts, b_dirs, c_dirs):
        s = complex(s)
        if abs(s.imag) <= 1e-8 * max(1.0, abs(s)):
            reals.append((complex(s.real), b.real.astype(complex), c.real.astype(complex)))
        elif s.imag > 0:
            pos.append((s, b, c))
        else:
            neg.append((s, b, c))

    pairs, lones = [], []
    unmatched_neg = list(neg)
    for s, b, c in pos:
        if unmatched_neg:
            dists = [abs(np.conj(s) - t[0]) for t in unmatched_neg]
            j = int(np.argmin(dists))
            if dists[j] <= 1e-6 * scale:
                unmatched_neg.pop(j)
                pairs.append((s, b, c))
                continue
        lones.append((s, b, c))
    for s, b, c in unmatched_neg:
        lones.append((np.conj(s), np.conj(b), np.conj(c)))

    lones.sort(key=lambda t: abs(t[0].imag))
    surplus = len(lones)
    reals.sort(key=lambda t: abs(t[0]))
    while surplus > 0 and reals:
        reals.pop(0)
        surplus -= 1
    while surplus > 0 and lones:
        s, b, c = lones.pop(0)
        reals.append((complex(s.real), b.real.astype(complex), c.real.astype(complex)))
        surplus -= 1

    triples = list(reals)
    for s, b, c in pairs + lones:
        triples.append((np.conj(s), np.conj(b), np.conj(c)))
        triples.append((s, b, c))
    triples.sort(key=lambda t: conjugate_sort_key(complex(t[0])))
    assert len(triples) == r
    out_shifts = np.array([t[0] for t in triples], dtype=complex)
    out_b = np.array([t[1] for t in triples])
    out_c = np.array([t[2] for t in triples])
    return out_shifts, out_b, out_c


def _sorted_state(shifts, b, c):
    return _project_conjugate_closed(np.asarray(shifts, dtype=complex),
                                     np.asarray(b, dtype=complex),
                                     np.asarray(c, dtype=complex))


def _movement(old, new):
    denom = float(np.max(np.abs(old), initial=0.0))
    return float(np.max(np.abs(new - old), initial=0.0)) / max(denom, 1e-300)


def _build_iterate(oracle, state, tau):
    if tau > 0:
        model = build_hermite_delay_loewner(
            oracle, state.shifts, tau,
            right_dirs=state.b_dirs, left_dirs=state.c_dirs,
        )
    else:
        model = build_hermite_loewner(
            oracle, state.shifts,
            right_dirs=state.b_dirs, left_dirs=state.c_dirs,
        )
    return realify(model, state.shifts)


def _mirror_update(decomp, tau, branch):
    """New (shift, b, c) triples from the reduced spectrum.

    Delay-free: sigma = -lambda. Delay: sigma = -(1/tau) W_k(tau alpha); the
    branch flips sign with the sign of Im(alpha) so conjugate eigenvalue
    pairs yield conjugate shifts. Poles in the right half plane are reflected
    before mirroring (standard guard: the reduced model is assumed in H2).
    """
    shifts, bs, cs = [], [], []
    for p in range(decomp.r):
        alpha = complex(decomp.eigenvalues[p])
        if tau > 0:
            k = branch if alpha.imag >= 0 else -branch
            pole = delay_pole_from_eigenvalue(alpha, tau, k)
        else:
            pole = alpha
        if pole.real > 0:
            pole = complex(-abs(pole.real), pole.imag)
        shifts.append(-pole)
        b, c = _balance(decomp.b_dirs[p], decomp.c_dirs[p])
        bs.append(b)
        cs.append(c)
    return np.array(shifts), np.array(bs), np.array(cs)


def _relative(diff, ref):
    return float(np.linalg.norm(diff)) / max(float(np.linalg.norm(ref)), 1e-300)


def _condition_rows(oracle, model, mirror_points):
    decomp = decompose(model, strict=False)
    rows = []
    for (p, k, point) in mirror_points(decomp):
        b = decomp.b_dirs[p]
        c = decomp.c_dirs[p]
        H = oracle.eval(point)
        Hp = oracle.eval_derivative(point)
        Hm = model.transfer(point)
        Hmp = model.transfer_derivative(point)
        rows.append(OptimalityRow(
            index=p,
            branch=k,
            eigenvalue=complex(decomp.eigenvalues[p]),
            point=complex(point),
            right_residual=_relative(H @ b - Hm @ b, H @ b),
            left_residual=_relative(c @ H - c @ Hm, c @ H),
            derivative_residual=_relative(c @ Hp @ b - c @ Hmp @ b, c @ Hp @ b),
        ))
    return OptimalityReport(rows=rows)


def check_optimality(oracle, model):
    """Delay-free first-order conditions at the mirrored reduced poles.

    For every reduced pole lambda_k with residue directions (b_k, c_k), the
    value, left-value and bitangential-derivative agreement of oracle and
    model is reported at -lambda_k, as relative residuals.
    """
    def mirrors(decomp):
        return [(p, None, -decomp.eigenvalues[p]) for p in range(decomp.r)]

    return _condition_rows(oracle, model, mirrors)


def check_delay_optimality(oracle, model, branches=(0,)):
    """Delay first-order conditions at mirrored Lambert-mapped pole chains.

    For each reduced generalized eigenvalue alpha_p and each requested branch
    k, the conditions are evaluated at -lambda_{k,p} with
    lambda_{k,p} = (1/tau) W_k(tau alpha_p).
    """
    if model.tau <= 0:
        raise ValueError("check_delay_optimality requires a model with tau > 0")

    def mirrors(decomp):
        pts = []
        for p in range(decomp.r):
            for k in branches:
                pts.append((p, k, -delay_pole_from_eigenvalue(
                    decomp.eigenvalues[p], model.tau, k)))
        return pts

    return _condition_rows(oracle, model, mirrors)


def _run_irka(oracle, r, tau, init, opts):
    opts = opts or IrkaOptions()
    if r < 1:
        raise ValueError("reduction order r must be >= 1")
    if init is None:
        init = initial_state(r, oracle.n_inputs, oracle.n_outputs, seed=opts.seed)
    if np.asarray(init.shifts).size != r:
        raise ValueError(
            f"initial state has {np.asarray(init.shifts).size} shifts, expected {r}"
        )
    shifts, b, c = _sorted_state(init.shifts, init.b_dirs, init.c_dirs)
    if tau > 0:
        ensure_injective(shifts, tau)
    state = IrkaState(shifts=shifts, b_dirs=b, c_dirs=c)

    history = []
    metrics = []
    diagnostics = ""
    best = None                # (metric, model, state)
    model = None
    converged = False

    for it in range(1, opts.max_iter + 1):
        try:
            model = _build_iterate(oracle, state, tau)
        except InjectivityError as exc:
            # init was validated, so this is a mid-run degeneration
            diagnostics = (f"iteration {it}: updated shifts violate "
                           f"injectivity: {exc}; shifts = {state.shifts}")
            model = None
            break
        try:
            decomp = decompose(model, strict=False)
        except PencilError as exc:
            diagnostics = f"iteration {it}: spectral decomposition failed: {exc}"
            break

        new_shifts, new_b, new_c = _mirror_update(decomp, tau, opts.branch)
        new_shifts, new_b, new_c = _sorted_state(new_shifts, new_b, new_c)
        metric = _movement(state.shifts, new_shifts)
        history.append(new_shifts.copy())
        metrics.append(metric)
        state = IrkaState(shifts=new_shifts, b_dirs=new_b, c_dirs=new_c,
                          iteration=it, shift_history=history,
                          convergence_metric=metric)
        if best is None or metric < best[0]:
            best = (metric, model, state)

        if metric < opts.conv_tol:
            converged = True
            try:
                refreshed = _build_iterate(oracle, state, tau)
                decompose(refreshed, strict=False)  # the checks must be able to use it
                model = refreshed
            except (InjectivityError, PencilError):
                pass  # keep the previous successfully built iterate
            break

        w = opts.stagnation_window
        if len(metrics) > w and min(metrics[-w:]) >= min(metrics[:-w]):
            diagnostics = (f"stagnation: no metric improvement over the last "
                           f"{w} iterations")
            break

    if best is None and model is None:
        # nothing was ever built: surface the cause directly
        raise InjectivityError((complex(state.shifts[0]), complex(state.shifts[0])), tau)

    total_iterations = len(metrics)
    if not converged and best is not None:
        _, model, state = best

    try:
        if tau > 0:
            residuals = check_delay_optimality(oracle, model, branches=(opts.branch,))
        else:
            residuals = check_optimality(oracle, model)
    except PencilError as exc:
        residuals = OptimalityReport(rows=[])
        if not diagnostics:
            diagnostics = f"optimality check skipped: {exc}"

    if converged and not residuals.passed(opts.opt_tol):
        converged = False
        diagnostics = (f"shift movement converged but optimality residuals "
                       f"reach {residuals.max_residual:.2e} > opt_tol")

    return IrkaReport(
        final_model=model,
        converged=converged,
        iterations=total_iterations,
        final_metric=state.convergence_metric,
        optimality_residuals=residuals,
        state=state,
        diagnostics=diagnostics,
    )


def tf_irka(oracle, r, init=None, opts=None):
    """Delay-free H2-suboptimal reduction to order r.

    On convergence the shifts are fixed at the mirrored reduced poles and the
    bitangential first-order conditions hold there to `opts.opt_tol`.
    Nonconvergence returns the best iterate with ``converged=False``.
    """
    return _run_irka(oracle, r, 0.0, init, opts)


def dtf_irka(oracle, r, tau, init=None, opts=None):
    """Single-delay H2-suboptimal reduction to order r for a given tau > 0.

    Each iteration Hermite-interpolates the oracle with a delay model at the
    current shifts, decomposes its (A, E) pencil, and maps the eigenvalues
    through the Lambert function: sigma <- -(1/tau) W(tau * alpha) on the
    configured branch, with directions taken from the residue decomposition.
    Shifts are projected to conjugate closure every iteration.
    """
    if tau <= 0:
        raise ValueError("dtf_irka requires tau > 0 (use tf_irka for tau = 0)")
    return _run_irka(oracle, r, float(tau), init, opts)
