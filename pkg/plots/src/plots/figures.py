"""Figure rendering from hitting-time sweep summary CSVs.

The harness writes one `summary.csv` per sweep (see the harness docs for the
schema); each figure kind maps one summary file onto one panel:

* Fig1 — median/mean T_x vs the stepsize parameter s, log-log
* Fig2a — mean T_x vs the friction alpha, linear axes
* Fig2b — mean T_x vs the saddle curvature gamma1, linear axes
* Fig3 — median T_x vs gamma1 under the gamma1 = alpha^2 coupling, log-log

Slope annotations are always recomputed from the CSV; if a `fit.json`
produced by the harness sits next to the CSV and disagrees by more than
1e-9, both values are shown.
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from enum import Enum

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from scipy.stats import linregress

__all__ = ["FigureKind", "FigureSpec", "SchemaError", "render"]

#: columns every harness summary CSV must carry
REQUIRED_COLUMNS = (
    "sweep_param", "value", "epsilon", "alpha", "gamma1", "n_trials",
    "censored_count", "flagged", "mean_T", "median_T", "ci95_half", "f_star",
)

#: disagreement beyond this between our slope and the harness fit.json slope
#: makes the annotation show both
FIT_AGREEMENT_TOL = 1e-9


class SchemaError(ValueError):
    """The input CSV does not match the harness summary schema, or a grid
    point carries no usable data."""


class FigureKind(Enum):
    FIG1 = "Fig1"
    FIG2A = "Fig2a"
    FIG2B = "Fig2b"
    FIG3 = "Fig3"


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    kind: FigureKind
    out_path: str
    show_theory_overlay: bool = False


@dataclass(frozen=True)
class SummaryTable:
    sweep_param: str
    value: np.ndarray
    epsilon: np.ndarray
    alpha: np.ndarray
    gamma1: np.ndarray
    mean_T: np.ndarray
    median_T: np.ndarray
    ci95_half: np.ndarray


def load_summary(path: str) -> SummaryTable:
    """Parse and validate a harness summary CSV."""
    if not os.path.exists(path):
        raise SchemaError(f"summary CSV not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file")
        missing = [c for c in REQUIRED_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}")
        rows = list(reader)
    if len(rows) < 3:
        raise SchemaError(f"{path}: need at least 3 grid points, got {len(rows)}")
    try:
        cols = {c: np.array([float(r[c]) for r in rows])
                for c in ("value", "epsilon", "alpha", "gamma1", "n_trials",
                          "mean_T", "median_T", "ci95_half")}
    except ValueError as e:
        raise SchemaError(f"{path}: non-numeric cell: {e}") from e
    for i, r in enumerate(rows):
        if cols["n_trials"][i] < 1 or not (math.isfinite(cols["mean_T"][i])
                                           and math.isfinite(cols["median_T"][i])):
            raise SchemaError(
                f"{path}: grid point {r['value']} has no usable trials")
    return SummaryTable(
        sweep_param=rows[0]["sweep_param"],
        value=cols["value"], epsilon=cols["epsilon"], alpha=cols["alpha"],
        gamma1=cols["gamma1"], mean_T=cols["mean_T"],
        median_T=cols["median_T"], ci95_half=cols["ci95_half"],
    )


def _harness_slope(input_csv: str):
    """Slope the harness itself fitted, from a fit.json next to the CSV."""
    path = os.path.join(os.path.dirname(os.path.abspath(input_csv)), "fit.json")
    if not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            return float(json.load(fh)["loglog_median"]["slope"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError):
        return None


def _loglog_annotation(table: SummaryTable, input_csv: str):
    if np.any(table.value <= 0) or np.any(table.median_T <= 0):
        raise SchemaError("log-log figure needs positive values and times")
    fit = linregress(np.log(table.value), np.log(table.median_T))
    text = f"slope = {fit.slope:.3f} ± {fit.stderr:.3f}"
    harness = _harness_slope(input_csv)
    if harness is not None and abs(harness - fit.slope) > FIT_AGREEMENT_TOL:
        text += f" (harness fit: {harness:.3f})"
    return fit, text


def _predicted_rate(gamma1: float, alpha: float) -> float:
    """(sqrt(alpha^2 + 4 gamma1) + alpha) / (4 gamma1), the single-saddle
    coefficient of eps^-1 ln(1/eps) in the predicted mean hitting time."""
    return (math.sqrt(alpha * alpha + 4.0 * gamma1) + alpha) / (4.0 * gamma1)


def render(spec: FigureSpec) -> str:
    """Render one figure; returns the annotation text placed on it.

    Raises SchemaError (and writes nothing) if the CSV does not match the
    harness schema or a grid point is empty.
    """
    table = load_summary(spec.input_csv)
    fig, ax = plt.subplots(figsize=(5.0, 3.6), constrained_layout=True)
    try:
        if spec.kind in (FigureKind.FIG1, FigureKind.FIG3):
            fit, annotation = _loglog_annotation(table, spec.input_csv)
            ax.errorbar(table.value, table.mean_T, yerr=table.ci95_half,
                        fmt="s", ms=3.5, lw=1, capsize=2, color="#888888",
                        label="mean ± 95% CI")
            ax.loglog(table.value, table.median_T, "o", ms=4, color="#1f4e9c",
                      label="median")
            grid = np.geomspace(table.value.min(), table.value.max(), 64)
            ax.loglog(grid, np.exp(fit.intercept) * grid ** fit.slope, "-",
                      color="#1f4e9c", lw=1, label=annotation)
            if spec.kind is FigureKind.FIG1:
                ax.set_xlabel(f"stepsize parameter {table.sweep_param}")
                if spec.show_theory_overlay:
                    eps = np.geomspace(table.epsilon.min(), table.epsilon.max(), 64)
                    rate = _predicted_rate(table.gamma1[0], table.alpha[0])
                    ax.loglog(eps ** 2, rate * np.log(1.0 / eps) / eps, "--",
                              color="#c23b22", lw=1,
                              label="predicted rate × ε⁻¹ ln ε⁻¹")
            else:
                ax.set_xlabel("saddle curvature γ₁ (= α²)")
        else:
            # Fig2 panels: linear axes, mean with CI bars, linear-fit slope
            fit = linregress(table.value, table.mean_T)
            annotation = f"slope = {fit.slope:.3f} ± {fit.stderr:.3f}"
            ax.errorbar(table.value, table.mean_T, yerr=table.ci95_half,
                        fmt="o-", ms=4, lw=1, capsize=2, color="#1f4e9c",
                        label=annotation)
            ax.set_xlabel("friction α" if spec.kind is FigureKind.FIG2A
                          else "saddle curvature γ₁")
        ax.set_ylabel("hitting time $T_x$ (iterations)")
        ax.legend(fontsize=8)
        fig.savefig(spec.out_path)
    finally:
        plt.close(fig)
    return annotation
