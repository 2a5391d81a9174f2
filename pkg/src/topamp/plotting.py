"""Static SVG rendering of emitted datasets.

SVG output is deterministic: a fixed hash salt controls generated ids
and the creation date is stripped, so identical datasets render to
identical bytes (diffable in CI). Data files remain the source of truth;
these plots exist for human inspection.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "topamp"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .dataio import read_csv  # noqa: E402
from .errors import UnsupportedSchema  # noqa: E402

RESPONSE_SCHEMA = ["omega_over_J", "gain_N_db", "rev_gain_N_db", "n_add_N", "asym_db"]
PHASE_SCHEMA = ["kappa_over_J", "gc_over_J", "class", "re_zeta", "e0", "gap"]


def _to_float(tok: str) -> float:
    try:
        return float(tok)
    except ValueError:
        return math.nan


def _save(fig, out_path: Path) -> Path:
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return out_path


def render_plot(dataset_csv: str | Path, kind: str, out_path: str | Path) -> Path:
    """Render ``dataset_csv`` as a line plot or heatmap SVG at ``out_path``."""
    out_path = Path(out_path)
    header, rows = read_csv(dataset_csv)

    if kind == "line":
        return _render_line(header, rows, out_path)
    if kind == "heatmap":
        return _render_heatmap(header, rows, out_path)
    raise UnsupportedSchema(f"unknown plot kind {kind!r}; expected 'line' or 'heatmap'")


def _render_line(header, rows, out_path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if not rows:
        ax.set_title("empty dataset")
        return _save(fig, out_path)

    if header == RESPONSE_SCHEMA:
        data = np.array([[_to_float(v) for v in row] for row in rows])
        w = data[:, 0]
        ax.plot(w, data[:, 1], color="tab:blue", label="gain (dB)")
        ax.plot(w, data[:, 2], color="tab:cyan", label="reverse gain (dB)")
        ax.set_xlabel("omega / J")
        ax.set_ylabel("power ratio (dB)")
        ax2 = ax.twinx()
        ax2.plot(w, data[:, 3] - 1.0, color="tab:red", label="added noise - 1")
        ax2.set_ylabel("added photons above the quantum limit")
        ax.legend(loc="upper left")
        ax2.legend(loc="upper right")
        fig.tight_layout()
        return _save(fig, out_path)

    if len(header) < 2:
        raise UnsupportedSchema("line plot needs at least two columns")
    data = np.array([[_to_float(v) for v in row] for row in rows])
    for i, name in enumerate(header[1:], start=1):
        ax.plot(data[:, 0], data[:, i], label=name)
    ax.set_xlabel(header[0])
    ax.legend()
    fig.tight_layout()
    return _save(fig, out_path)


def _render_heatmap(header, rows, out_path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    if not rows:
        ax.set_title("empty dataset")
        return _save(fig, out_path)
    if header != PHASE_SCHEMA:
        raise UnsupportedSchema(
            f"heatmap expects columns {PHASE_SCHEMA}, got {header}")

    kappas = sorted({_to_float(r[0]) for r in rows})
    gcs = sorted({_to_float(r[1]) for r in rows})
    k_index = {v: i for i, v in enumerate(kappas)}
    g_index = {v: i for i, v in enumerate(gcs)}
    grid = np.full((len(kappas), len(gcs)), np.nan)
    unstable = np.zeros_like(grid, dtype=bool)
    for row in rows:
        a = k_index[_to_float(row[0])]
        b = g_index[_to_float(row[1])]
        if row[2] == "topological":
            grid[a, b] = _to_float(row[3])
        elif row[2] == "unstable":
            unstable[a, b] = True

    mesh = ax.pcolormesh(gcs, kappas, grid, shading="nearest", cmap="viridis")
    hatch = np.where(unstable, 1.0, np.nan)
    ax.pcolormesh(gcs, kappas, hatch, shading="nearest", cmap="Greys",
                  vmin=0.0, vmax=2.0)
    fig.colorbar(mesh, ax=ax, label="Re zeta")
    ax.set_xlabel("g_c / J")
    ax.set_ylabel("kappa / J")
    fig.tight_layout()
    return _save(fig, out_path)
