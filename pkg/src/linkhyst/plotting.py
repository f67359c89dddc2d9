"""Figures for sweep results: PDR and control overhead against mobile speed."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

LABELS = {"loss": "Hysteresis on Loss", "signal": "Hysteresis on Signal"}
MARKERS = {"loss": "s", "signal": "o"}


def _setup(ax, ylabel):
    ax.set_xlabel("mobile speed (km/h)")
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)


def plot_pdr(series, path):
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for algo, pts in sorted(series.items()):
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        err = [p[2] for p in pts]
        ax.errorbar(xs, ys, yerr=err, marker=MARKERS.get(algo, "^"), capsize=3, label=LABELS.get(algo, algo))
    _setup(ax, "packet delivery ratio")
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="lower left")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_overhead(series, path, unit="transmissions"):
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for algo, pts in sorted(series.items()):
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=MARKERS.get(algo, "^"), label=LABELS.get(algo, algo))
    _setup(ax, f"control overhead ({unit})")
    ax.set_ylim(bottom=0)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_figures(rows, csv_path, unit="transmissions"):
    """Write ``<stem>_pdr.png`` and ``<stem>_overhead.png`` next to ``csv_path``."""
    from .experiment import plot_series

    rows = list(rows)
    stem = os.path.splitext(csv_path)[0]
    return [
        plot_pdr(plot_series(rows, "mean_pdr"), f"{stem}_pdr.png"),
        plot_overhead(plot_series(rows, "mean_control_tx"), f"{stem}_overhead.png", unit),
    ]
