"""Artifact writers: JSON reports, CSV tables and static SVG plots.

Outputs carry no timestamps, so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

UNITS = {"time": "hours", "stress": "native units (degC for Arrhenius)", "value": "degradation units"}


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj) -> dict:
    cleaned = _clean(obj)
    Path(path).write_text(dumps_json(cleaned), encoding="utf-8")
    return cleaned


def write_csv(path, header, rows, provenance: dict | None = None, comment: str | None = None) -> None:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    if provenance:
        buf.write("# " + " ".join(f"{k}={v}" for k, v in sorted(provenance.items())) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "fbmadt"
    return plt


def _save_svg(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})


def plot_reliability(curve, path, title: str = "Reliability") -> None:
    plt = _figure()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(curve.times, curve.r_values, lw=1.5)
    ax.set_xlabel("time (h)")
    ax.set_ylabel("reliability")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    _save_svg(fig, path)
    plt.close(fig)


def plot_degradation_fans(data, bands, path) -> None:
    """Observations with the simulated mean and 5%/95% bands, one panel per level."""
    plt = _figure()
    k = len(data.levels)
    fig, axes = plt.subplots(1, k, figsize=(4 * k, 3.5), squeeze=False)
    for ax, lvl, (times, mean, upper, lower) in zip(axes[0], data.levels, bands):
        for u in lvl.units:
            ax.plot(u.times, u.values, "o", ms=2, color="0.5")
        ax.plot(times, mean, color="C0", label="trend")
        ax.plot(times, upper, "--", color="C3", label="95%")
        ax.plot(times, lower, "--", color="C2", label="5%")
        ax.set_title(f"stress {lvl.stress:g}")
        ax.set_xlabel("time (h)")
    axes[0][0].set_ylabel("degradation")
    axes[0][0].legend(fontsize=7)
    fig.tight_layout()
    _save_svg(fig, path)
    plt.close(fig)
