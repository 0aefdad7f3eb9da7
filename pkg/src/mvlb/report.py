"""CSV / JSON / SVG emission of experiment records and log-log slope fits."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .io import IoError

COLUMNS = [
    "study", "case", "nu", "mu", "L", "count", "box", "n", "grashof", "unstable_count",
    "leading_eigenvalues", "cluster_radius", "neutral_radius", "frame_residual", "projector_distance",
    "norm_L12", "norm_L21", "norm_L22", "inv_L11_bound", "amplitude", "seed", "config_hash", "wall_time",
]


def slope_fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares slope of ``log y`` on ``log x`` with its 95% half-width and intercept.

    The half-width is ``nan`` when fewer than three points are given.
    """
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if lx.size < 2:
        raise ValueError("need at least two points")
    res = stats.linregress(lx, ly)
    dof = lx.size - 2
    half = float(stats.t.ppf(0.975, dof) * res.stderr) if dof > 0 else float("nan")
    return float(res.slope), half, float(res.intercept)


def _cell(v):
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(v)
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def _dicts(records) -> list[dict]:
    return [r.to_dict() if hasattr(r, "to_dict") else dict(r) for r in records]


def write_csv(records, path) -> Path:
    rows = _dicts(records)
    if not rows:
        raise ValueError("no records to write")
    path = Path(path)
    cols = [c for c in COLUMNS if any(c in r for r in rows)]
    cols += sorted({k for r in rows for k in r} - set(cols))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for r in rows:
                w.writerow([_cell(r.get(c)) for c in cols])
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    return path


def write_json(records, path) -> Path:
    rows = _dicts(records)
    if not rows:
        raise ValueError("no records to write")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(rows, indent=2, allow_nan=True))
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    return path


def read_json(path) -> list[dict]:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc


def write_svg(records, path, *, x: str = "grashof", y: str = "unstable_count", title: str | None = None) -> Path:
    """Log-log scatter of ``y`` against ``x`` with the fitted line and its slope."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = _dicts(records)
    if not rows:
        raise ValueError("no records to write")
    xs = np.array([float(r[x]) for r in rows])
    ys = np.array([float(r[y]) for r in rows])
    good = (xs > 0) & (ys > 0)
    path = Path(path)
    # keep text as <text> nodes rather than glyph paths
    plt.rcParams["svg.fonttype"] = "none"
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(xs[good], ys[good], "o", label="records")
    label = "slope n/a"
    if good.sum() >= 2:
        s, h, b = slope_fit(xs[good], ys[good])
        xx = np.geomspace(xs[good].min(), xs[good].max(), 50)
        ax.loglog(xx, np.exp(b) * xx**s, "-", label="fit")
        label = f"slope = {s:.3f}" + ("" if math.isnan(h) else f" +/- {h:.3f}")
    ax.text(0.05, 0.92, label, transform=ax.transAxes, gid="slope")
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg")
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    finally:
        plt.close(fig)
    return path


def emit_report(records, fmt: str, path, **kw) -> Path:
    records = list(records)
    if not records:
        raise ValueError("records must be non-empty")
    if fmt == "csv":
        return write_csv(records, path)
    if fmt == "json":
        return write_json(records, path)
    if fmt in ("svg", "svg-plot"):
        return write_svg(records, path, **kw)
    raise ValueError(f"unknown format {fmt!r}")


__all__ = ["slope_fit", "write_csv", "write_json", "read_json", "write_svg", "emit_report", "COLUMNS"]
