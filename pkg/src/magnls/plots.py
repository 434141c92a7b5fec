"""SVG figure rendering for experiment reports."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def observable_drift_plot(path, series, title):
    """Relative drift of each tracked functional against time, log scale."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    t = series.times
    for name in series.columns[1:]:
        vals = series.column(name)
        ref = vals[0]
        scale = abs(ref) if abs(ref) > 0 else 1.0
        drift = np.abs(vals - ref) / scale
        ax.semilogy(t, np.maximum(drift, 1e-18), label=name, lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel("relative drift")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7, ncol=2)
    _finish(fig, path)


def series_plot(path, series, names, ylabel, title, logy=False):
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    t = series.times
    for name in names:
        vals = series.column(name)
        if logy:
            ax.semilogy(t, np.abs(vals), label=name, lw=1.2)
        else:
            ax.plot(t, vals, label=name, lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    _finish(fig, path)


def convergence_plot(path, eps_values, gap_l2, gap_s1, slope, title):
    """log-log gap versus epsilon with the fitted power law."""
    eps_values = np.asarray(eps_values)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.loglog(eps_values, gap_l2, "o-", label="max filtered L2 gap")
    ax.loglog(eps_values, gap_s1, "s-", label="max filtered Sigma1 gap")
    if np.isfinite(slope) and len(eps_values) >= 2:
        anchor = gap_l2[0] * (eps_values / eps_values[0]) ** slope
        ax.loglog(eps_values, anchor, "k--", lw=0.8,
                  label=f"fit slope {slope:.2f}")
    ax.invert_xaxis()
    ax.set_xlabel("epsilon")
    ax.set_ylabel("gap")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    _finish(fig, path)


def value_vs_label_plot(path, labels, values, tolerances, title):
    """Measured check values against their tolerances, log scale."""
    fig, ax = plt.subplots(figsize=(7.2, 4.2))
    idx = np.arange(len(labels))
    vals = np.maximum(np.abs(np.asarray(values, dtype=float)), 1e-18)
    ax.semilogy(idx, vals, "o", label="measured")
    ax.semilogy(idx, tolerances, "_", ms=14, color="red", label="tolerance")
    ax.set_xticks(idx)
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=6)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    _finish(fig, path)
