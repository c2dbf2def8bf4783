"""Deterministic rendering of experiment CSVs to PNG heatmaps.

All figures use the Agg backend with pinned style parameters and stripped
metadata, so rendering the same CSV twice produces byte-identical files.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spec import SchemaError, read_noise_csv, read_phase_csv

#: Pinned style so output does not depend on user configuration.
_STYLE = {
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "figure.figsize": (5.0, 4.0),
    "svg.hashsalt": "figure-gen",
}

#: PNG text chunks are limited to this fixed software tag (no timestamps).
_METADATA = {"Software": "figure-gen"}


def phase_grid(table):
    """Pivot a phase table into (x values, y values, rate grid).

    The grid is indexed [y, x]; cells absent from the CSV are NaN.
    """
    xvals = np.array(sorted({r[0] for r in table.rows}))
    yvals = np.array(sorted({r[1] for r in table.rows}))
    grid = np.full((yvals.size, xvals.size), np.nan)
    for x, y, rate in table.rows:
        xi = int(np.searchsorted(xvals, x))
        yi = int(np.searchsorted(yvals, y))
        grid[yi, xi] = rate
    return xvals, yvals, grid


def overlay_points(xvals, yvals, n2):
    """Grid coordinates of the recovery-limit line m = s + n2 - 2.

    The x axis carries the sparsity values and the y axis the measurement
    counts; both are mapped to fractional cell indices by interpolation so
    the line lands on the correct cells for any grid resolution. Points
    whose limit value falls outside the y range are dropped.
    """
    xvals = np.asarray(xvals, dtype=float)
    yvals = np.asarray(yvals, dtype=float)
    limit = xvals + float(n2) - 2.0
    keep = (limit >= yvals[0]) & (limit <= yvals[-1])
    x_idx = np.arange(xvals.size, dtype=float)[keep]
    y_idx = np.interp(limit[keep], yvals, np.arange(yvals.size, dtype=float))
    return x_idx, y_idx


def _render_phase(spec):
    table = read_phase_csv(spec.input)
    xvals, yvals, grid = phase_grid(table)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        cmap = plt.get_cmap("gray").copy()
        cmap.set_bad("0.5")
        im = ax.imshow(
            np.ma.masked_invalid(grid),
            cmap=cmap,
            vmin=0.0,
            vmax=1.0,
            origin="lower",
            aspect="auto",
            interpolation="nearest",
        )
        ax.set_xticks(np.arange(xvals.size))
        ax.set_xticklabels([_fmt_tick(v) for v in xvals])
        ax.set_yticks(np.arange(yvals.size))
        ax.set_yticklabels([_fmt_tick(v) for v in yvals])
        ax.set_xlabel(spec.xlabel or table.axis1)
        ax.set_ylabel(spec.ylabel or table.axis2)
        if spec.title:
            ax.set_title(spec.title)
        fig.colorbar(im, ax=ax, label="success rate")
        if spec.overlay is not None:
            x_idx, y_idx = overlay_points(xvals, yvals, int(spec.overlay["n2"]))
            ax.plot(
                x_idx,
                y_idx,
                color="gold",
                linewidth=2.0,
                label=spec.overlay.get("label", "fundamental limit"),
            )
            ax.legend(loc="upper left", framealpha=0.9)
        fig.tight_layout()
        fig.savefig(spec.output, format="png", metadata=_METADATA)
        plt.close(fig)
    return spec.output


def _render_noise(spec):
    table = read_noise_csv(spec.input)
    nus = np.array([r["nu"] for r in table.rows])
    snr = np.array([r["median_snr_db"] for r in table.rows])
    amp = np.array([r["median_amp"] for r in table.rows])
    order = np.argsort(nus, kind="stable")
    with plt.rc_context(_STYLE):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True)
        ax1.plot(nus[order], snr[order], marker="o", color="black")
        ax1.set_ylabel(spec.ylabel or "median SNR (dB)")
        ax2.plot(nus[order], amp[order], marker="s", color="black")
        ax2.axhline(0.0, color="0.6", linewidth=1.0, linestyle="--")
        ax2.set_ylabel("median log10 amplification")
        ax2.set_xlabel(spec.xlabel or "relative noise level")
        if spec.title:
            ax1.set_title(spec.title)
        fig.tight_layout()
        fig.savefig(spec.output, format="png", metadata=_METADATA)
        plt.close(fig)
    return spec.output


def _fmt_tick(v):
    return str(int(v)) if float(v).is_integer() else f"{v:g}"


def render(spec):
    """Render one figure; returns the output path.

    The input CSV is only ever opened for reading. Raises SchemaError with
    the offending column named when the CSV does not match the experiment
    CLI's schema.
    """
    if spec.family == "phase":
        return _render_phase(spec)
    if spec.family == "noise":
        return _render_noise(spec)
    raise SchemaError(f"unknown figure family {spec.family!r}")
