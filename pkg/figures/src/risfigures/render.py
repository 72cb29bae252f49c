"""Deterministic renderers for the risdecoy tabular exports.

The renderers never recompute physics: every plotted quantity comes straight
from the CSV columns.  Output is pixel-deterministic for fixed inputs (Agg
backend, pinned size, fonts, and color maps).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
}


class TableError(ValueError):
    """Input table missing, malformed, or column-mismatched."""


def load_table(path, required_prefix_columns):
    """Read one exported CSV: comment lines, one header, float rows.

    ``required_prefix_columns`` lists exact leading column names; the table
    may carry extra trailing columns (threshold/cap families are matched by
    the caller).
    """
    path = Path(path)
    if not path.exists():
        raise TableError(f"input table not found: {path}")
    header = None
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            fields = line.split(",")
            rows.append([float(v) if v != "" else np.nan for v in fields])
    if header is None:
        raise TableError(f"{path} has no header line")
    want = list(required_prefix_columns)
    if header[:len(want)] != want:
        raise TableError(f"{path} columns {header[:len(want)]} do not match "
                         f"expected {want}")
    if not rows:
        raise TableError(f"{path} contains a header but no data rows")
    data = np.asarray(rows, float)
    if data.shape[1] != len(header):
        raise TableError(f"{path} has ragged rows")
    return header, data


def _finish(fig, out_path):
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, metadata={"Software": "risdecoy-figures"})
    plt.close(fig)
    return out_path


def render_beampattern(table_path, out_path):
    header, data = load_table(
        table_path, ["angle_deg", "uniform_gain_db", "optimized_gain_db"])
    ang, uni, opt = data[:, 0], data[:, 1], data[:, 2]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.2, 3.4))
        ax.plot(ang, uni, label="uniform profile", color="#888888")
        ax.plot(ang, opt, label="optimized profile", color="#c02020")
        for x, tag, color in ((ang[np.argmax(uni)], "true return", "#5070c0"),
                              (ang[np.argmax(opt)], "decoy", "#208040")):
            ax.axvline(x, linestyle="--", linewidth=1.0, color=color, label=tag)
        ax.set_xlabel("outgoing angle (deg)")
        ax.set_ylabel("normalized gain (dB)")
        ax.set_ylim(max(-90.0, min(opt.min(), uni.min()) - 5), 3)
        ax.legend(loc="lower left", fontsize=8)
        ax.set_title("Reflection pattern")
        fig.tight_layout()
        return _finish(fig, out_path)


def render_ml_spectrum(table_path, out_path):
    header, data = load_table(
        table_path, ["angle_deg", "uniform_db", "optimized_db"])
    ang = data[:, 0]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.2, 3.4))
        ax.plot(ang, data[:, 1], label="before (uniform)", color="#888888")
        ax.plot(ang, data[:, 2], label="after (optimized)", color="#c02020")
        ax.set_xlabel("hypothesis angle (deg)")
        ax.set_ylabel("normalized ML objective (dB)")
        ax.legend(loc="lower left", fontsize=8)
        ax.set_title("Grid ML angle spectrum")
        fig.tight_layout()
        return _finish(fig, out_path)


def render_peb_map(table_path, out_path, field="ang"):
    cols = ["x_m", "y_m", "peb_pos_uniform_m", "peb_pos_optimized_m",
            "peb_ang_uniform_rad", "peb_ang_optimized_rad"]
    header, data = load_table(table_path, cols)
    xs = np.unique(data[:, 0])
    ys = np.unique(data[:, 1])
    if xs.size * ys.size != data.shape[0]:
        raise TableError("PEB table is not a complete grid")
    take = {"ang": (4, 5), "pos": (2, 3)}.get(field)
    if take is None:
        raise TableError(f"unknown PEB field '{field}' (use 'ang' or 'pos')")
    shape = (xs.size, ys.size)
    before = data[:, take[0]].reshape(shape)
    after = data[:, take[1]].reshape(shape)
    finite = np.concatenate([before[np.isfinite(before)],
                             after[np.isfinite(after)]])
    if finite.size == 0:
        raise TableError("PEB table holds no finite values")
    vmin, vmax = np.quantile(finite, [0.001, 0.92])
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, 2, figsize=(7.6, 3.4), sharey=True)
        for ax, grid, title in ((axes[0], before, "before"),
                                (axes[1], after, "after")):
            img = ax.imshow(grid.T, origin="lower", aspect="auto",
                            extent=(xs[0], xs[-1], ys[0], ys[-1]),
                            norm=matplotlib.colors.LogNorm(vmin=vmin, vmax=vmax),
                            cmap="viridis")
            ax.set_title(title)
            ax.set_xlabel("x (m)")
        axes[0].set_ylabel("y (m)")
        fig.colorbar(img, ax=axes, fraction=0.04, label="PEB (log scale)")
        return _finish(fig, out_path)


def render_leakage_ratio(table_path, out_path):
    header, data = load_table(table_path, ["decoy_angle_deg", "leakage_ratio"])
    thr_cols = [i for i, name in enumerate(header)
                if name.startswith("threshold_rho")]
    if not thr_cols:
        raise TableError("leakage table carries no threshold columns")
    ang = data[:, 0]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.2, 3.4))
        ax.semilogy(ang, data[:, 1], color="#c02020", label="leakage ratio")
        for i in thr_cols:
            ax.semilogy(ang, data[:, i], linestyle="--", linewidth=1.0,
                        label=header[i].replace("threshold_rho", "rho = "))
        ax.set_xlabel("decoy angle (deg)")
        ax.set_ylabel("worst leakage / decoy gain")
        ax.legend(loc="upper right", fontsize=7)
        ax.set_title("Band-robust deception thresholds")
        fig.tight_layout()
        return _finish(fig, out_path)


def render_rho_ub(table_path, out_path):
    header, data = load_table(table_path, ["decoy_angle_deg"])
    cap_cols = [i for i, name in enumerate(header) if name.startswith("rho_ub_cap")]
    if not cap_cols:
        raise TableError("rho_ub table carries no cap columns")
    ang = data[:, 0]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.2, 3.4))
        for i in cap_cols:
            ax.semilogy(ang, np.maximum(data[:, i], 1e-12),
                        label=header[i].replace("rho_ub_cap", "cap = "))
        ax.set_xlabel("decoy angle (deg)")
        ax.set_ylabel("deception upper bound")
        ax.legend(loc="lower left", fontsize=8)
        ax.set_title("Placement score sweep")
        fig.tight_layout()
        return _finish(fig, out_path)


RENDERERS = {
    "beampattern": render_beampattern,
    "ml_spectrum": render_ml_spectrum,
    "peb_map": render_peb_map,
    "leakage_ratio": render_leakage_ratio,
    "rho_ub": render_rho_ub,
}
