"""Model and data (de)serialization.

A model directory holds E.mtx, A.mtx, B.mtx, C.mtx in Matrix Market format
plus a model.json sidecar with the delay and optional metadata. Tabulated
frequency data lives in a single JSON file with complex numbers encoded as
[re, im] pairs.
"""

import json
from pathlib import Path

import numpy as np
import scipy.io

from .model import DelayDescriptorModel

__all__ = [
    "save_model",
    "load_model",
    "load_model_metadata",
    "save_samples",
    "load_samples",
    "write_report",
]

_MATRIX_FILES = ("E", "A", "B", "C")


def save_model(model, directory, metadata=None):
    """Write a model as Matrix Market files plus a JSON sidecar.

    Returns the directory path. `metadata` entries must be JSON serializable;
    they are stored under the "metadata" key of model.json.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in _MATRIX_FILES:
        M = np.asarray(getattr(model, name))
        if np.isrealobj(M) or np.max(np.abs(M.imag), initial=0.0) == 0.0:
            M = M.real
        scipy.io.mmwrite(directory / f"{name}.mtx", np.atleast_2d(M), precision=17)
    sidecar = {
        "tau": model.tau,
        "order": model.order,
        "n_inputs": model.n_inputs,
        "n_outputs": model.n_outputs,
        "metadata": metadata or {},
    }
    with open(directory / "model.json", "w") as fh:
        json.dump(sidecar, fh, indent=2, default=str)
        fh.write("\n")
    return directory


def _read_sidecar(directory):
    with open(Path(directory) / "model.json") as fh:
        return json.load(fh)


def load_model(directory):
    """Read a model directory written by :func:`save_model`.

    Also accepts bare matrix directories with a minimal {"tau": ...} sidecar.
    """
    directory = Path(directory)
    mats = {}
    for name in _MATRIX_FILES:
        path = directory / f"{name}.mtx"
        if not path.exists():
            raise FileNotFoundError(f"missing matrix file: {path}")
        M = scipy.io.mmread(path)
        if hasattr(M, "todense"):
            M = np.asarray(M.todense())
        mats[name] = np.atleast_2d(np.asarray(M))
    sidecar = _read_sidecar(directory)
    return DelayDescriptorModel(tau=float(sidecar.get("tau", 0.0)), **mats)


def load_model_metadata(directory):
    return _read_sidecar(directory).get("metadata", {})


def _encode_complex_array(arr):
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def _decode_complex_array(obj):
    arr = np.asarray(obj, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def save_samples(path, points, values, derivative_values=None):
    """Write tabulated (s_i, H(s_i)[, H'(s_i)]) data as JSON.

    `values` stacks one (n_y, n_u) matrix per point; complex entries are
    encoded as [re, im].
    """
    points = np.asarray(points, dtype=complex).ravel()
    values = np.asarray(values, dtype=complex)
    if values.ndim == 1:
        values = values.reshape(-1, 1, 1)
    doc = {
        "points": _encode_complex_array(points),
        "values": _encode_complex_array(values),
    }
    if derivative_values is not None:
        derivative_values = np.asarray(derivative_values, dtype=complex)
        if derivative_values.ndim == 1:
            derivative_values = derivative_values.reshape(-1, 1, 1)
        doc["derivative_values"] = _encode_complex_array(derivative_values)
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")
    return Path(path)


def load_samples(path):
    """Read a samples JSON file; returns (points, values, derivative_values)."""
    with open(path) as fh:
        doc = json.load(fh)
    points = _decode_complex_array(doc["points"])
    values = _decode_complex_array(doc["values"])
    derivs = None
    if "derivative_values" in doc:
        derivs = _decode_complex_array(doc["derivative_values"])
    return points, values, derivs


def write_report(path, report):
    """Dump a machine-readable run report as JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    def _default(obj):
        if isinstance(obj, complex):
            return [obj.real, obj.imag]
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        if isinstance(obj, np.complexfloating):
            return [obj.real.item(), obj.imag.item()]
        return str(obj)

    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, default=_default)
        fh.write("\n")
    return path
