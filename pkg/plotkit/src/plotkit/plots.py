"""Decay-curve and far-field-ratio figures from CSV series."""

import csv
import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["PlotSpec", "PlotResult", "decay_plot", "ratio_plot", "fit_log_slope"]

_FIGSIZE = (6.4, 4.8)
_DPI = 110


class PlotError(ValueError):
    pass


@dataclass(frozen=True)
class PlotSpec:
    csv_path: str
    columns: tuple
    out_path: str
    targets_path: str = None
    alpha: float = None
    title: str = None
    xlabel: str = None
    ylabel: str = None


@dataclass
class PlotResult:
    out_path: str
    slopes: dict = field(default_factory=dict)
    excluded: dict = field(default_factory=dict)


def fit_log_slope(times, values):
    """Closed-form least squares of log(values) on log(1 + times)."""
    x = np.log1p(np.asarray(times, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    xm = x.mean()
    ym = y.mean()
    return float(np.sum((x - xm) * (y - ym)) / np.sum((x - xm) ** 2))


def _read_csv(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and not row[0].startswith("#")]
    if not rows:
        raise PlotError(f"{path}: empty CSV")
    header = [name.strip() for name in rows[0]]
    if len(rows) == 1:
        raise PlotError(f"{path}: header only, no data rows")
    data = {}
    for j, name in enumerate(header):
        column = []
        for row in rows[1:]:
            cell = row[j].strip() if j < len(row) else ""
            column.append(float(cell) if cell else math.nan)
        data[name] = np.asarray(column)
    return header, data


def _read_targets(path):
    targets = {}
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "quantity,alpha,target_exponent":
            raise PlotError(f"{path}: unexpected targets header {header!r}")
        for line in fh:
            if not line.strip():
                continue
            quantity, alpha, exponent = line.strip().split(",")
            targets[(quantity, float(alpha))] = float(exponent)
    return targets


def decay_plot(spec: PlotSpec) -> PlotResult:
    """Log-log series with fitted slopes in the legend and target guides."""
    header, data = _read_csv(spec.csv_path)
    if "t" not in header:
        raise PlotError(f"{spec.csv_path}: no 't' column")
    for col in spec.columns:
        if col not in header:
            raise PlotError(f"{spec.csv_path}: no column {col!r} (have {header})")
    targets = None
    if spec.targets_path is not None:
        if spec.alpha is None:
            raise PlotError("target overlays need the dissipation order (alpha)")
        targets = _read_targets(spec.targets_path)

    t = data["t"]
    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI)
    result = PlotResult(out_path=spec.out_path)
    total_rows = t.size
    for col in spec.columns:
        v = data[col]
        good = np.isfinite(v) & (v > 0.0)
        result.excluded[col] = int(total_rows - good.sum())
        if good.sum() < 5:
            plt.close(fig)
            raise PlotError(f"{spec.csv_path}: fewer than 5 positive rows in {col!r}")
        slope = fit_log_slope(t[good], v[good])
        result.slopes[col] = slope
        (line,) = ax.loglog(
            1.0 + t[good], v[good], "o", ms=4, label=f"{col}: slope {slope:.6f}"
        )
        xs = np.array([1.0 + t[good].min(), 1.0 + t[good].max()])
        anchor = v[good][0] / (1.0 + t[good][0]) ** slope
        ax.loglog(xs, anchor * xs**slope, "-", lw=1, color=line.get_color())
        if targets is not None:
            key = (col, spec.alpha)
            if key in targets:
                target = targets[key]
                ax.loglog(
                    xs,
                    anchor * xs**target,
                    "--",
                    lw=1,
                    color=line.get_color(),
                    label=f"{col}: target {target:g}",
                )
    n_excluded = sum(result.excluded.values())
    if n_excluded:
        fig.text(0.01, 0.01, f"{n_excluded} nonpositive point(s) excluded", fontsize=7)
    ax.set_xlabel(spec.xlabel or "1 + t")
    ax.set_ylabel(spec.ylabel or "value")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    fig.savefig(spec.out_path, metadata={"Software": None} if spec.out_path.endswith(".png") else None)
    plt.close(fig)
    return result


def ratio_plot(spec: PlotSpec) -> PlotResult:
    """Far-field ratio against radius with the angular min-max band."""
    header, data = _read_csv(spec.csv_path)
    needed = ("r", "ratio_min", "ratio_mean", "ratio_max")
    for col in needed:
        if col not in header:
            raise PlotError(f"{spec.csv_path}: no column {col!r} (have {header})")
    mass = _mass_marker(spec.csv_path)
    if mass is not None and mass == 0.0:
        raise PlotError("far-field ratio undefined for zero-mass data")
    r = data["r"]
    lo, mid, hi = data["ratio_min"], data["ratio_mean"], data["ratio_max"]
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(mid)) and np.all(np.isfinite(hi))):
        raise PlotError(f"{spec.csv_path}: non-finite ratios")
    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI)
    ax.fill_between(r, lo, hi, alpha=0.3, label="angular min-max")
    ax.plot(r, mid, "o-", ms=4, label="angular mean")
    ax.axhline(1.0, color="k", ls="--", lw=1, label="far-field limit")
    ax.set_xlabel(spec.xlabel or "r")
    ax.set_ylabel(spec.ylabel or "weighted ratio")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.25)
    fig.savefig(spec.out_path, metadata={"Software": None} if spec.out_path.endswith(".png") else None)
    plt.close(fig)
    return PlotResult(out_path=spec.out_path)


def _mass_marker(path):
    """M recorded in the leading comment of a ratio CSV, if present."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    if not first.startswith("#"):
        return None
    for token in first[1:].split():
        if token.startswith("M="):
            return float(token[2:])
    return None
