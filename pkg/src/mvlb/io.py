"""Field snapshots and key=value sidecars.

Snapshot layout (little-endian): ``b"MVLB"``, version u32, n u32, d f64,
ncomp u32, then ``ncomp * n * n`` f64 samples in row-major order.  Complex
fields are written with their real components first and imaginary
components after, so ``ncomp`` doubles.
"""

from __future__ import annotations

import ast
import json
import struct
from pathlib import Path
from typing import Union

import numpy as np

from .spectral import Grid, ScalarField, SolenoidalField, VectorField

MAGIC = b"MVLB"
VERSION = 1
_HEADER = struct.Struct("<4sIIdI")


class IoError(OSError):
    """File-system or format problem, always carrying the offending path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = str(path)


Field = Union[ScalarField, VectorField]


def write_snapshot(path, field: Field) -> Path:
    path = Path(path)
    vals = np.asarray(field.values)
    if vals.ndim == 2:
        vals = vals[None]
    if np.iscomplexobj(vals):
        vals = np.concatenate([vals.real, vals.imag])
    g = field.grid
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, VERSION, g.n, float(g.d), vals.shape[0]))
            fh.write(np.ascontiguousarray(vals, dtype="<f8").tobytes())
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    return path


def read_raw(path) -> tuple[Grid, np.ndarray]:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    if len(data) < _HEADER.size:
        raise IoError(path, "truncated header")
    magic, version, n, d, ncomp = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise IoError(path, f"bad magic {magic!r}")
    if version != VERSION:
        raise IoError(path, f"unsupported version {version}")
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    if body.size != ncomp * n * n:
        raise IoError(path, f"expected {ncomp * n * n} samples, found {body.size}")
    return Grid(int(n), float(d)), body.reshape(ncomp, n, n).astype(float)


def read_snapshot(path, kind: str = "auto", complex_values: bool = False) -> Field:
    """Load a snapshot as a scalar, vector or solenoidal field."""
    grid, vals = read_raw(path)
    if complex_values:
        h = vals.shape[0] // 2
        vals = vals[:h] + 1j * vals[h:]
    if vals.shape[0] == 1 and kind in ("auto", "scalar"):
        return ScalarField(grid, vals[0])
    if kind == "solenoidal":
        return SolenoidalField(grid, vals)
    return VectorField(grid, vals)


def _fmt(v) -> str:
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(v)
    if isinstance(v, (complex, np.complexfloating)):
        return repr(complex(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_sidecar(path, record: dict) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(f"{k}={_fmt(v)}\n" for k, v in record.items()))
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    return path


def _parse(text: str):
    try:
        return json.loads(text)
    except ValueError:
        pass
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def read_sidecar(path) -> dict:
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    out = {}
    for line in lines:
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise IoError(path, f"malformed line {line!r}")
        out[key.strip()] = _parse(val.strip())
    return out


def save_state(directory, state, stem: str = "state") -> dict:
    """Persist a steady state as velocity and forcing snapshots plus a sidecar."""
    directory = Path(directory)
    paths = {
        "velocity": write_snapshot(directory / f"{stem}_velocity.mvlb", state.velocity),
        "forcing": write_snapshot(directory / f"{stem}_forcing.mvlb", state.forcing),
    }
    paths["meta"] = write_sidecar(directory / f"{stem}.meta", state.metadata())
    return paths


def load_state(directory, stem: str = "state"):
    from .steady import Lattice, SteadyState, VortexSpec

    directory = Path(directory)
    u = read_snapshot(directory / f"{stem}_velocity.mvlb", "solenoidal")
    f = read_snapshot(directory / f"{stem}_forcing.mvlb", "vector")
    meta = read_sidecar(directory / f"{stem}.meta")
    spec = None
    if "family" in meta:
        spec = VortexSpec(meta["family"], float(meta["a"]), float(meta["r0"]), smoothing=float(meta["smoothing"]))
    lat = None
    if "offsets" in meta:
        lat = Lattice(float(meta["L"]), tuple(tuple(o) for o in meta["offsets"]))
    return SteadyState(u, f, float(meta["nu"]), float(meta["mu"]), float(meta["residual"]), spec, lat)


def save_pair(directory, pair, stem: str = "pair") -> dict:
    directory = Path(directory)
    paths = {
        "phi": write_snapshot(directory / f"{stem}_phi.mvlb", pair.phi),
        "psi": write_snapshot(directory / f"{stem}_psi.mvlb", pair.psi),
        "psi_tilde": write_snapshot(directory / f"{stem}_psi_tilde.mvlb", pair.psi_tilde),
    }
    paths["meta"] = write_sidecar(directory / f"{stem}.meta", pair.metadata())
    return paths


def load_pair(directory, stem: str = "pair"):
    from .oseen import SpectralPair

    directory = Path(directory)
    meta = read_sidecar(directory / f"{stem}.meta")
    phi = read_snapshot(directory / f"{stem}_phi.mvlb", "solenoidal", complex_values=True)
    psi = read_snapshot(directory / f"{stem}_psi.mvlb", "solenoidal", complex_values=True)
    pt = read_snapshot(directory / f"{stem}_psi_tilde.mvlb", "vector", complex_values=True)
    lam = complex(meta["lambda_re"], meta["lambda_im"])
    res = (float(meta["residual_direct"]), float(meta["residual_adjoint"]))
    return SpectralPair(lam, phi, psi, pt, res, tuple(meta.get("center", (0.0, 0.0))))


__all__ = ["IoError", "write_snapshot", "read_snapshot", "read_raw", "write_sidecar", "read_sidecar",
           "save_state", "load_state", "save_pair", "load_pair", "MAGIC", "VERSION"]
