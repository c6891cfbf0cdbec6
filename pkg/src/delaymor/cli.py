"""Command-line interface: ingest systems, interpolate or reduce them by
single-delay models, verify optimality conditions, and emit plot-ready data.

Subcommands: interpolate, reduce, check, bode, h2err, inject-delay. Artifacts
go to the --out directory: report.json always, model/ for produced models,
response.csv for frequency sweeps. Exit codes: 0 success (a nonconverged
reduction still returns a usable model and exits 0 with converged=false in
the report), 1 validation error, 2 numerical failure (diagnostic JSON).
Logs are plain text; NO_COLOR is honored trivially.
"""

import argparse
import dataclasses
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import io as dio
from . import oracle as doracle
from .delay_loewner import build_delay_loewner, build_hermite_delay_loewner
from .errors import DelaymorError
from .h2metrics import QuadratureOptions, frequency_response, h2_distance
from .irka import (IrkaOptions, check_delay_optimality, check_optimality,
                   dtf_irka, initial_state, tf_irka)
from .loewner import build_hermite_loewner, build_loewner, tangential_data_from_oracle
from .model import DelayDescriptorModel

_MODES = ("interpolate", "interpolate-hermite", "reduce-tf-irka",
          "reduce-dtf-irka", "check-optimality", "bode", "h2-error",
          "inject-delay")


@dataclass
class JobSpec:
    mode: str
    model_source: str = ""
    r: int = 0
    tau: float = 0.0
    shifts: np.ndarray = None
    left_shifts: np.ndarray = None
    expr: str = ""
    matrices_dir: str = ""
    samples_path: str = ""
    model_dir: str = ""
    omega: np.ndarray = None
    branches: tuple = (0,)
    output_path: str = "delaymor_out"
    options: dict = field(default_factory=dict)
    source_value: str = ""
    sources: list = field(default_factory=list)

    def validate(self):
        if self.mode not in _MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode.startswith("reduce") and self.r < 1:
            raise ValueError("reduction needs --order >= 1")
        if self.tau < 0:
            raise ValueError("--tau must be nonnegative")
        if self.mode in ("reduce-dtf-irka",) and self.tau <= 0:
            raise ValueError("delay reduction needs --tau > 0")


def parse_point_list(text):
    """Parse '0.1,1,2+3j' or 'logspace:a:b:n' into a complex array."""
    text = text.strip()
    if text.startswith("logspace:"):
        try:
            _, a, b, n = text.split(":")
            return np.geomspace(float(a), float(b), int(n)).astype(complex)
        except ValueError as exc:
            raise ValueError(f"bad logspace spec {text!r}: {exc}") from None
    return np.array([complex(tok) for tok in text.split(",") if tok.strip()],
                    dtype=complex)


def _count_sources(args):
    out = []
    if getattr(args, "expr", None):
        out.append(("expression", args.expr))
    if getattr(args, "matrices", None):
        out.append(("matrix-files", args.matrices))
    if getattr(args, "samples", None):
        out.append(("samples-file", args.samples))
    if getattr(args, "model", None):
        out.append(("model-files", args.model))
    return out


def _oracle_from_source(kind, value):
    if kind == "expression":
        return doracle.from_expression(value), None
    if kind in ("matrix-files", "model-files"):
        model = dio.load_model(value)
        return doracle.from_model(model), model
    if kind == "samples-file":
        points, values, derivs = dio.load_samples(value)
        return doracle.from_samples(points, values, derivs), None
    raise ValueError(f"unknown source kind {kind}")


def _interpolation_residuals(oracle, model, shifts):
    rows = []
    for s in np.asarray(shifts, dtype=complex).ravel():
        H = oracle.eval(s)
        Hm = model.transfer(s)
        rows.append({
            "shift": complex(s),
            "relative_residual":
                float(np.linalg.norm(H - Hm) / max(np.linalg.norm(H), 1e-300)),
        })
    return rows


def _residual_rows(report):
    return [dataclasses.asdict(row) for row in report.rows]


def _run_interpolate(job, report):
    oracle, _ = _oracle_from_source(job.model_source, job.source_value)
    order = job.r or None
    if job.mode == "interpolate":
        data = tangential_data_from_oracle(oracle, job.shifts, job.left_shifts)
        if job.tau > 0:
            model = build_delay_loewner(data, job.tau)
        else:
            model = build_loewner(data).to_model()
        used = np.concatenate([job.shifts, job.left_shifts])
    else:
        if job.tau > 0:
            model = build_hermite_delay_loewner(oracle, job.shifts, job.tau,
                                                order=order)
        else:
            model = build_hermite_loewner(oracle, job.shifts, order=order)
        used = job.shifts
    model_dir = dio.save_model(
        model, Path(job.output_path) / "model",
        metadata={"mode": job.mode, "shifts": [str(s) for s in used]},
    )
    report["results"] = {
        "model_dir": str(model_dir),
        "order": model.order,
        "tau": model.tau,
        "interpolation_residuals": _interpolation_residuals(oracle, model, used),
    }
    print(f"wrote order-{model.order} model (tau={model.tau}) to {model_dir}")
    return 0


def _run_reduce(job, report):
    oracle, _ = _oracle_from_source(job.model_source, job.source_value)
    opts = IrkaOptions(**job.options)
    init = None
    if job.shifts is not None and job.shifts.size:
        base = initial_state(job.shifts.size, oracle.n_inputs, oracle.n_outputs,
                             seed=opts.seed)
        init = dataclasses.replace(base, shifts=job.shifts.astype(complex))
    if job.tau > 0:
        result = dtf_irka(oracle, job.r, job.tau, init=init, opts=opts)
    else:
        result = tf_irka(oracle, job.r, init=init, opts=opts)
    model_dir = dio.save_model(
        result.final_model, Path(job.output_path) / "model",
        metadata={
            "mode": job.mode,
            "converged": result.converged,
            "iterations": result.iterations,
            "shifts": [str(s) for s in result.state.shifts],
        },
    )
    report["results"] = {
        "model_dir": str(model_dir),
        "converged": result.converged,
        "iterations": result.iterations,
        "final_metric": result.final_metric,
        "diagnostics": result.diagnostics,
        "optimality_residuals": _residual_rows(result.optimality_residuals),
        "max_optimality_residual": result.optimality_residuals.max_residual,
        "shift_history": [[complex(s) for s in sh]
                          for sh in result.state.shift_history],
    }
    status = "converged" if result.converged else "NOT converged"
    print(f"{job.mode}: {status} after {result.iterations} iterations "
          f"(metric {result.final_metric:.3e}); model at {model_dir}")
    return 0


def _run_check(job, report):
    oracle, _ = _oracle_from_source(job.model_source, job.source_value)
    model = dio.load_model(job.model_dir)
    if model.tau > 0:
        rep = check_delay_optimality(oracle, model, branches=job.branches)
    else:
        rep = check_optimality(oracle, model)
    report["results"] = {
        "max_residual": rep.max_residual,
        "rows": _residual_rows(rep),
    }
    print(f"max optimality residual: {rep.max_residual:.3e} over {len(rep.rows)} conditions")
    return 0


def _run_bode(job, report):
    oracle, _ = _oracle_from_source(job.model_source, job.source_value)
    table = frequency_response(oracle, job.omega.real)
    out = Path(job.output_path) / "response.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(out)
    report["results"] = {
        "csv": str(out),
        "rows": int(table.omega.size),
        "failures": table.failures,
    }
    print(f"wrote {table.omega.size}-row response table to {out}")
    return 0


def _run_h2err(job, report, sources):
    (k1, v1), (k2, v2) = sources
    a, _ = _oracle_from_source(k1, v1)
    b, _ = _oracle_from_source(k2, v2)
    quad = QuadratureOptions(**{k: v for k, v in job.options.items()
                                if k in QuadratureOptions.__dataclass_fields__})
    res = h2_distance(a, b, quad)
    report["results"] = {
        "h2_error": res.value,
        "abs_error_estimate": res.abs_error,
        "tail": res.tail,
        "evaluations": res.n_evals,
    }
    print(f"H2 error: {res.value:.6e} (quadrature error estimate {res.abs_error:.1e})")
    return 0


def _run_inject(job, report):
    model = dio.load_model(job.matrices_dir)
    if model.tau > 0:
        raise ValueError(
            f"input model already has tau = {model.tau}; refusing to re-inject"
        )
    injected = model.with_delay(job.tau)
    model_dir = dio.save_model(injected, Path(job.output_path) / "model",
                               metadata={"mode": "inject-delay"})
    report["results"] = {"model_dir": str(model_dir), "tau": job.tau}
    print(f"wrote delay-injected model (tau={job.tau}) to {model_dir}")
    return 0


def run(job):
    """Execute a JobSpec; returns the process exit code."""
    t0 = time.perf_counter()
    job.validate()
    report = {
        "tool": "delaymor",
        "version": __version__,
        "mode": job.mode,
        "options": {
            "r": job.r,
            "tau": job.tau,
            "shifts": None if job.shifts is None else [complex(s) for s in job.shifts],
            "left_shifts": None if job.left_shifts is None
                           else [complex(s) for s in job.left_shifts],
            "source": [job.model_source, str(job.source_value)],
            "branches": list(job.branches),
            **job.options,
        },
    }
    out_dir = Path(job.output_path)
    try:
        if job.mode in ("interpolate", "interpolate-hermite"):
            code = _run_interpolate(job, report)
        elif job.mode in ("reduce-tf-irka", "reduce-dtf-irka"):
            code = _run_reduce(job, report)
        elif job.mode == "check-optimality":
            code = _run_check(job, report)
        elif job.mode == "bode":
            code = _run_bode(job, report)
        elif job.mode == "h2-error":
            code = _run_h2err(job, report, job.sources)
        else:
            code = _run_inject(job, report)
    except DelaymorError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        report["wall_time_s"] = time.perf_counter() - t0
        dio.write_report(out_dir / "diagnostic.json", report)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    report["wall_time_s"] = time.perf_counter() - t0
    dio.write_report(out_dir / "report.json", report)
    return code


def _add_source_flags(p, with_model=False):
    p.add_argument("--expr", help="transfer function expression in s")
    p.add_argument("--matrices", help="model directory (E/A/B/C.mtx + model.json)")
    p.add_argument("--samples", help="tabulated samples JSON file")
    if with_model:
        p.add_argument("--model", help="second model directory")


def _pick_source(args, job):
    sources = _count_sources(args)
    if len(sources) != 1:
        raise ValueError("give exactly one of --expr/--matrices/--samples")
    job.model_source, job.source_value = sources[0]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="delaymor",
        description="Interpolate and reduce linear systems by single-delay "
                    "descriptor models.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("interpolate", help="build an interpolating delay model")
    _add_source_flags(p)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--shifts", required=True,
                   help="'0.1,1,...' or 'logspace:a:b:n' (Hermite points, or "
                        "right points when --left-shifts is given)")
    p.add_argument("--left-shifts", help="left points: switch to the two-sided build")
    p.add_argument("--order", type=int, default=0,
                   help="optional rank-revealing compression target")
    p.add_argument("--out", default="delaymor_out")

    p = sub.add_parser("reduce", help="H2-suboptimal reduction (TF-IRKA / dTF-IRKA)")
    _add_source_flags(p)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--tau", type=float, default=0.0,
                   help="0 for delay-free TF-IRKA, > 0 for dTF-IRKA")
    p.add_argument("--shifts", help="initial shifts (default: logspace:0.1:1:r)")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6, help="shift-movement tolerance")
    p.add_argument("--opt-tol", type=float, default=1e-6)
    p.add_argument("--branch", type=int, default=0, help="Lambert branch index")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="delaymor_out")

    p = sub.add_parser("check", help="verify optimality conditions of a reduced model")
    _add_source_flags(p)
    p.add_argument("--model", required=True, help="reduced model directory")
    p.add_argument("--branch", default="0", help="comma list of Lambert branches")
    p.add_argument("--out", default="delaymor_out")

    p = sub.add_parser("bode", help="frequency response table (CSV)")
    _add_source_flags(p)
    p.add_argument("--omega", default="logspace:1e-2:1e2:200")
    p.add_argument("--out", default="delaymor_out")

    p = sub.add_parser("h2err", help="H2 norm of the difference of two systems")
    _add_source_flags(p, with_model=True)
    p.add_argument("--omega-max", type=float, default=1e4)
    p.add_argument("--out", default="delaymor_out")

    p = sub.add_parser("inject-delay", help="attach an internal delay to all states")
    p.add_argument("--matrices", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--out", default="delaymor_out")
    return parser


def job_from_args(args):
    job = JobSpec(mode="bode")
    job.output_path = getattr(args, "out", "delaymor_out")
    if args.command == "interpolate":
        job.shifts = parse_point_list(args.shifts)
        job.tau = args.tau
        job.r = args.order
        if args.left_shifts:
            job.mode = "interpolate"
            job.left_shifts = parse_point_list(args.left_shifts)
            if job.left_shifts.size != job.shifts.size:
                raise ValueError("--left-shifts must match --shifts in length")
        else:
            job.mode = "interpolate-hermite"
        _pick_source(args, job)
    elif args.command == "reduce":
        job.mode = "reduce-dtf-irka" if args.tau > 0 else "reduce-tf-irka"
        job.r = args.order
        job.tau = args.tau
        if args.shifts:
            job.shifts = parse_point_list(args.shifts)
        job.options = {
            "max_iter": args.max_iter,
            "conv_tol": args.tol,
            "opt_tol": args.opt_tol,
            "branch": args.branch,
            "seed": args.seed,
        }
        job.branches = (args.branch,)
        _pick_source(args, job)
    elif args.command == "check":
        job.mode = "check-optimality"
        job.model_dir = args.model
        job.branches = tuple(int(tok) for tok in args.branch.split(","))
        args.model = None  # not an oracle source for `check`
        _pick_source(args, job)
    elif args.command == "bode":
        job.mode = "bode"
        job.omega = parse_point_list(args.omega)
        _pick_source(args, job)
    elif args.command == "h2err":
        job.mode = "h2-error"
        sources = _count_sources(args)
        if len(sources) != 2:
            raise ValueError("h2err needs exactly two of "
                             "--expr/--matrices/--samples/--model")
        job.sources = sources
        job.model_source, job.source_value = sources[0]
        job.options = {"omega_max": args.omega_max}
    else:
        job.mode = "inject-delay"
        job.matrices_dir = args.matrices
        job.tau = args.tau
        job.model_source = "matrix-files"
        job.source_value = args.matrices
    return job


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        job = job_from_args(args)
        code = run(job)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
