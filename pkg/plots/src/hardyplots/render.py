"""Render laboratory CSV files into raster figures.

Each plot kind expects the documented CSV header of the command that wrote
it; anything else is a SchemaError. Rendering is read-only and makes no
numerical claims about the data.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


class SchemaError(Exception):
    """The CSV header does not match the requested plot kind."""


@dataclass
class PlotJob:
    kind: str
    csv_path: str
    out_path: str
    title: str = ""
    labels: dict = field(default_factory=dict)


def _read_csv(path: str) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0]:
        raise SchemaError(f"{path}: empty CSV")
    header = rows[0]
    if len(rows) < 2:
        raise SchemaError(f"{path}: header only, no data rows")
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:]])
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric cell ({exc})") from exc
    if data.shape[1] != len(header):
        raise SchemaError(f"{path}: ragged rows")
    return header, data


def _render_iteration_fan(header, data, ax, job):
    if header[0] != "t" or len(header) < 2 or any(
            h != f"a_{i + 1}" for i, h in enumerate(header[1:])):
        raise SchemaError(f"iteration-fan wants t,a_1,...,a_k; got {header}")
    t = data[:, 0]
    n = data.shape[1] - 1
    for j in range(n - 1):
        ax.plot(t, data[:, j + 1], color="steelblue",
                alpha=0.3 + 0.5 * j / max(n - 1, 1), lw=1.0)
    # the last iterate doubles as the converged limit curve
    ax.plot(t, data[:, n], "k--", lw=1.5, label=f"a_{n} (limit)")
    ax.set_xlabel("t")
    ax.set_ylabel("a_k(t)")
    ax.legend(loc="upper right")
    ax.set_title(job.title or "weight-profile iteration")


def _render_htrace(header, data, ax, job):
    if header != ["t", "H", "norm2", "admissible_flag"]:
        raise SchemaError(f"htrace wants t,H,norm2,admissible_flag; got {header}")
    t, H = data[:, 0], data[:, 1]
    if np.any(H <= 0):
        raise SchemaError("htrace needs strictly positive H")
    ax.plot(t, np.log(H), color="firebrick", lw=1.5, label="log H(t)")
    ax.plot(t, np.log(data[:, 2]), color="gray", lw=1.0, ls=":", label="log ||u||^2")
    ax.set_xlabel("t")
    ax.set_ylabel("log H")
    ax.legend(loc="best")
    ax.set_title(job.title or "weighted-norm trace")


def _render_residual(header, data, ax, job):
    if header != ["x", "y", "z", "t", "h", "rel_residual"]:
        raise SchemaError(f"residual wants x,y,z,t,h,rel_residual; got {header}")
    r = np.sqrt(data[:, 0] ** 2 + data[:, 1] ** 2 + data[:, 2] ** 2)
    ax.semilogy(r, data[:, 5], "o", ms=4, color="seagreen")
    ax.set_xlabel("|p|")
    ax.set_ylabel("relative residual")
    ax.set_title(job.title or "PDE residuals of the closed-form solution")


def _render_gauge(header, data, ax, job):
    if not header or header[-1] != "x_dot_A" or any(
            h != f"x{i}" for i, h in enumerate(header[:-1])):
        raise SchemaError(f"gauge wants x0,...,x_dot_A; got {header}")
    mag = np.abs(data[:, -1])
    ax.semilogy(np.arange(len(mag)), np.maximum(mag, 1e-18), "s", ms=4,
                color="darkorange")
    ax.set_xlabel("sample")
    ax.set_ylabel("|x . A~|")
    ax.set_title(job.title or "transverse-gauge defect per sample")


_RENDERERS = {
    "iteration-fan": _render_iteration_fan,
    "htrace": _render_htrace,
    "residual": _render_residual,
    "gauge": _render_gauge,
}

KINDS = tuple(_RENDERERS)


def render(job: PlotJob) -> str:
    """Render one job; returns the output path."""
    if job.kind not in _RENDERERS:
        raise SchemaError(f"unknown plot kind {job.kind!r} (kinds: {', '.join(KINDS)})")
    if not Path(job.csv_path).is_file():
        raise SchemaError(f"{job.csv_path}: no such file")
    header, data = _read_csv(job.csv_path)
    fig, ax = plt.subplots(figsize=(6.4, 4.0), dpi=120)
    try:
        _RENDERERS[job.kind](header, data, ax, job)
        fig.tight_layout()
        fig.savefig(job.out_path)
    finally:
        plt.close(fig)
    return job.out_path
