"""Frame and signal generation, quality diagnostics, and serialization.

A frame is a full-rank M x N matrix whose columns are the measurement
vectors; spanning is enforced at construction.  All file formats are JSON
with complex scalars as [re, im] pairs; real frames may also round-trip
through headerless CSV (M rows, N comma-separated columns).  Floats are
written with Python's shortest round-trip repr, so save/load is bit-exact.

Randomness: all streams come from numpy's PCG64 seeded through
``SeedSequence(entropy=seed, spawn_key=(stream_index,))`` (see
:func:`rng_stream`), so every Monte Carlo result is reproducible from
(seed, stream index) pairs alone.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FileFormatError, ValidationError

logger = logging.getLogger(__name__)

_EPS = float(np.finfo(np.float64).eps)


def rng_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Deterministic PCG64 generator for (seed, stream-index)."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
    )


def _validate_frame_matrix(matrix: np.ndarray, what: str) -> None:
    if matrix.ndim != 2:
        raise ValidationError(f"{what} matrix must be 2-D, got shape {matrix.shape}")
    m, n = matrix.shape
    if m < 1:
        raise ValidationError(f"{what} needs at least one row")
    if n < m:
        raise ValidationError(f"{what} needs n >= m columns, got {m}x{n}")
    if not np.all(np.isfinite(matrix)):
        raise ValidationError(f"{what} has non-finite entries")
    sv = np.linalg.svd(matrix, compute_uv=False)
    tol = m * _EPS * 64
    if sv[0] == 0.0 or np.sum(sv > tol * sv[0]) < m:
        raise ValidationError(f"{what} does not span: numeric rank < {m}")


@dataclass(frozen=True)
class RealFrame:
    """M x N real matrix whose columns are the measurement vectors."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.ascontiguousarray(np.asarray(self.matrix, dtype=np.float64))
        object.__setattr__(self, "matrix", mat)
        _validate_frame_matrix(mat, "real frame")

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    def column(self, k: int) -> np.ndarray:
        return self.matrix[:, k]


@dataclass(frozen=True)
class ComplexFrame:
    """M x N complex matrix whose columns are the measurement vectors."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.ascontiguousarray(np.asarray(self.matrix, dtype=np.complex128))
        object.__setattr__(self, "matrix", mat)
        _validate_frame_matrix(mat, "complex frame")

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    def column(self, k: int) -> np.ndarray:
        return self.matrix[:, k]


@dataclass(frozen=True)
class Measurement:
    """Magnitude-squared measurements, optionally tagged with a noise level."""

    values: np.ndarray
    noise_sigma: float | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1:
            raise ValidationError("measurement values must be 1-D")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("measurement values have non-finite entries")
        if self.noise_sigma is not None and self.noise_sigma < 0:
            raise ValidationError("noise_sigma must be nonnegative")
        if not self.noise_sigma and np.any(vals < 0):
            raise ValidationError("noiseless measurements must be nonnegative")

    @property
    def n(self) -> int:
        return self.values.shape[0]


def random_frame(m: int, n: int, seed: int = 0, distribution: str = "gaussian") -> RealFrame:
    """Real frame with i.i.d. standard normal entries, deterministic in seed.

    Draws come from ``rng_stream(seed, 0)``; in the measure-zero event the
    draw is rank deficient it is redrawn from the same stream (count logged).
    """
    if distribution != "gaussian":
        raise ValidationError(f"unknown distribution {distribution!r}")
    if n < m:
        raise ValidationError(f"need n >= m, got m={m}, n={n}")
    rng = rng_stream(seed, 0)
    resamples = 0
    while True:
        mat = rng.standard_normal((m, n))
        try:
            frame = RealFrame(mat)
        except ValidationError:
            resamples += 1
            logger.info("rank-deficient draw, resampling (count=%d)", resamples)
            continue
        return frame


def generic_cpr_size(m: int) -> int:
    """Vector count at which a generic real frame retrieves conjugate classes.

    3 in dimension 2, 6 in dimension 3, and 4m - 6 for m >= 4.
    """
    if m < 2:
        raise ValidationError("generic size is defined for m >= 2")
    if m == 2:
        return 3
    if m == 3:
        return 6
    return 4 * m - 6


def frame_bounds(frame) -> tuple[float, float]:
    """Tight frame bounds (A, B): the extreme squared singular values."""
    sv = np.linalg.svd(frame.matrix, compute_uv=False)
    return float(sv[-1] ** 2), float(sv[0] ** 2)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _complex_to_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _pair_to_complex(pair, field_name: str) -> complex:
    if (
        not isinstance(pair, (list, tuple))
        or len(pair) != 2
        or not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in pair)
    ):
        raise FileFormatError(f"field '{field_name}': complex entries must be [re, im] pairs")
    return complex(float(pair[0]), float(pair[1]))


def _require(doc: dict, key: str, kind) -> object:
    if key not in doc:
        raise FileFormatError(f"missing field '{key}'")
    val = doc[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise FileFormatError(f"field '{key}' must be a number")
        return float(val)
    if not isinstance(val, kind):
        raise FileFormatError(f"field '{key}' has wrong type")
    return val


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise FileFormatError(f"top-level JSON value in {path} must be an object")
    return doc


def _dump_json(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _check_finite_nested(values, field_name: str) -> None:
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise FileFormatError(f"field '{field_name}' has non-finite values")


def save_frame(frame, path) -> None:
    """Write a frame; `.csv` extension selects CSV (real frames only)."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        if not isinstance(frame, RealFrame):
            raise FileFormatError("CSV frames must be real-valued")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            for row in frame.matrix:
                writer.writerow([repr(float(v)) for v in row])
        return
    is_real = isinstance(frame, RealFrame)
    if is_real:
        cols = [[float(v) for v in frame.matrix[:, k]] for k in range(frame.n)]
    else:
        cols = [[_complex_to_pair(v) for v in frame.matrix[:, k]] for k in range(frame.n)]
    _dump_json(
        {
            "m": frame.m,
            "n": frame.n,
            "field": "real" if is_real else "complex",
            "columns": cols,
        },
        path,
    )


def load_frame(path):
    """Read a frame file (JSON, or CSV for real frames)."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        rows = []
        with open(path, "r", newline="", encoding="utf-8") as fh:
            for line in csv.reader(fh):
                if not line:
                    continue
                try:
                    rows.append([float(v) for v in line])
                except ValueError as exc:
                    raise FileFormatError(f"bad CSV number: {exc}") from exc
        if not rows or len({len(r) for r in rows}) != 1:
            raise FileFormatError("CSV frame must be a nonempty rectangular table")
        _check_finite_nested(rows, "csv")
        return RealFrame(np.array(rows, dtype=np.float64))
    doc = _load_json(path)
    m = int(_require(doc, "m", int))
    n = int(_require(doc, "n", int))
    field = _require(doc, "field", str)
    cols = _require(doc, "columns", list)
    if field not in ("real", "complex"):
        raise FileFormatError("field 'field' must be 'real' or 'complex'")
    if len(cols) != n:
        raise FileFormatError(f"field 'columns' has {len(cols)} columns, expected n={n}")
    mat = np.empty((m, n), dtype=np.float64 if field == "real" else np.complex128)
    for k, col in enumerate(cols):
        if not isinstance(col, list) or len(col) != m:
            raise FileFormatError(f"field 'columns[{k}]' must list m={m} entries")
        for j, entry in enumerate(col):
            if field == "real":
                if isinstance(entry, bool) or not isinstance(entry, (int, float)):
                    raise FileFormatError(f"field 'columns[{k}][{j}]' must be a number")
                mat[j, k] = float(entry)
            else:
                mat[j, k] = _pair_to_complex(entry, f"columns[{k}][{j}]")
    if not np.all(np.isfinite(mat)):
        raise FileFormatError("field 'columns' has non-finite values")
    return RealFrame(mat) if field == "real" else ComplexFrame(mat)


def save_signal(x, path) -> None:
    x = np.asarray(x, dtype=np.complex128)
    _dump_json({"m": int(x.shape[0]), "entries": [_complex_to_pair(v) for v in x]}, path)


def load_signal(path) -> np.ndarray:
    doc = _load_json(path)
    m = int(_require(doc, "m", int))
    entries = _require(doc, "entries", list)
    if len(entries) != m:
        raise FileFormatError(f"field 'entries' has {len(entries)} entries, expected m={m}")
    out = np.array(
        [_pair_to_complex(e, f"entries[{j}]") for j, e in enumerate(entries)],
        dtype=np.complex128,
    )
    if not np.all(np.isfinite(out)):
        raise FileFormatError("field 'entries' has non-finite values")
    return out


def save_measurement(meas: Measurement, path) -> None:
    doc = {"values": [float(v) for v in meas.values]}
    doc["noise_sigma"] = None if meas.noise_sigma is None else float(meas.noise_sigma)
    _dump_json(doc, path)


def load_measurement(path) -> Measurement:
    doc = _load_json(path)
    values = _require(doc, "values", list)
    for j, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise FileFormatError(f"field 'values[{j}]' must be a number")
    _check_finite_nested(values, "values")
    sigma = doc.get("noise_sigma")
    if sigma is not None:
        sigma = _require(doc, "noise_sigma", float)
    try:
        return Measurement(np.array(values, dtype=np.float64), sigma)
    except ValidationError as exc:
        raise FileFormatError(f"field 'values': {exc}") from exc


def save_matrix(matrix: np.ndarray, path) -> None:
    """Write a real symmetric matrix as {"m", "rows"}."""
    matrix = np.asarray(matrix, dtype=np.float64)
    _dump_json(
        {"m": int(matrix.shape[0]), "rows": [[float(v) for v in row] for row in matrix]},
        path,
    )


def load_matrix(path) -> np.ndarray:
    doc = _load_json(path)
    m = int(_require(doc, "m", int))
    rows = _require(doc, "rows", list)
    if len(rows) != m or any(not isinstance(r, list) or len(r) != m for r in rows):
        raise FileFormatError(f"field 'rows' must be an {m}x{m} table")
    _check_finite_nested(rows, "rows")
    mat = np.array(rows, dtype=np.float64)
    if not np.array_equal(mat, mat.T):
        raise FileFormatError("field 'rows' must be exactly symmetric")
    return mat


def save_witness(pair, path) -> None:
    _dump_json(
        {
            "x": [_complex_to_pair(v) for v in pair.x],
            "y": [_complex_to_pair(v) for v in pair.y],
            "target": [[float(v) for v in row] for row in pair.target],
            "residual": float(pair.residual),
        },
        path,
    )


def load_witness(path):
    from .witness import WitnessPair

    doc = _load_json(path)
    xs = _require(doc, "x", list)
    ys = _require(doc, "y", list)
    target = _require(doc, "target", list)
    residual = _require(doc, "residual", float)
    x = np.array([_pair_to_complex(e, f"x[{j}]") for j, e in enumerate(xs)], dtype=np.complex128)
    y = np.array([_pair_to_complex(e, f"y[{j}]") for j, e in enumerate(ys)], dtype=np.complex128)
    if x.shape != y.shape:
        raise FileFormatError("fields 'x' and 'y' must have equal length")
    m = x.shape[0]
    if len(target) != m or any(not isinstance(r, list) or len(r) != m for r in target):
        raise FileFormatError(f"field 'target' must be an {m}x{m} table")
    _check_finite_nested(target, "target")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise FileFormatError("fields 'x'/'y' have non-finite values")
    return WitnessPair(x, y, np.array(target, dtype=np.float64), residual)


def save_certificate(cert, path, witness_file=None) -> None:
    _dump_json(
        {
            "verdict": cert.verdict,
            "method": cert.method,
            "det_value": None if cert.det_value is None else float(cert.det_value),
            "kernel_dim": cert.kernel_dim,
            "witness_file": None if witness_file is None else str(witness_file),
            "trials": cert.trials,
            "violating_subset": None
            if cert.violating_subset is None
            else [int(i) for i in cert.violating_subset],
        },
        path,
    )


def load_certificate(path):
    from .certify import CERT_METHODS, CERT_VERDICTS, Certificate

    doc = _load_json(path)
    verdict = _require(doc, "verdict", str)
    method = _require(doc, "method", str)
    if verdict not in CERT_VERDICTS:
        raise FileFormatError(f"field 'verdict' has unknown value {verdict!r}")
    if method not in CERT_METHODS:
        raise FileFormatError(f"field 'method' has unknown value {method!r}")
    det = doc.get("det_value")
    if det is not None:
        det = _require(doc, "det_value", float)
    kdim = doc.get("kernel_dim")
    if kdim is not None and (isinstance(kdim, bool) or not isinstance(kdim, int)):
        raise FileFormatError("field 'kernel_dim' must be an integer")
    subset = doc.get("violating_subset")
    if subset is not None:
        subset = tuple(int(i) for i in _require(doc, "violating_subset", list))
    cert = Certificate(
        verdict=verdict,
        method=method,
        det_value=det,
        kernel_dim=kdim,
        trials=doc.get("trials"),
        violating_subset=subset,
    )
    return cert, doc.get("witness_file")
