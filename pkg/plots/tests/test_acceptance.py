"""Acceptance gate for the plotting package.

Prints one ``ACCEPTANCE <name>: PASS|FAIL`` line.  The figure inputs are
genuine harness outputs produced by invoking the simulation CLI in a
subprocess (file-level coupling only); the slope-accuracy check uses an
exact synthetic power law.
"""
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from plots import cli
from .test_figures import PNG_MAGIC, synthetic_power_law, write_summary

MINI_SWEEPS = {
    "fig1": {
        "sweep_kind": "StepsizeSweep",
        "s_grid": [1e-4, 3e-4, 1e-3],
    },
    "fig2a": {
        "sweep_kind": "AlphaSweep",
        "alpha_grid": [0.5, 1.0, 2.0],
        "epsilon": 0.02,
    },
    "fig2b": {
        "sweep_kind": "Gamma1Sweep",
        "gamma1_grid": [2.0, 4.0, 8.0],
        "epsilon": 0.02,
    },
    "fig3": {
        "sweep_kind": "Gamma1EqAlphaSqSweep",
        "gamma1_grid": [2.0, 4.0, 8.0],
        "epsilon": 0.02,
    },
}

BASE_CONFIG = {
    "objective": {"kind": "cubic_reg_quadratic", "lambda": [2.0, -1.0]},
    "alpha": 1.0,
    "sigma2": 1.0,
    "threshold_C": 1e-3,
    "trials": 5,
    "master_seed": 1,
    "initial": {"center": None, "jitter_radius": 1e-3},
    "max_steps": 2000000,
}


def _run_harness_sweep(tmp_path, name, overrides):
    cfg = dict(BASE_CONFIG, **overrides)
    cfg_path = tmp_path / f"{name}.json"
    cfg_path.write_text(json.dumps(cfg))
    out_dir = tmp_path / name
    proc = subprocess.run(
        [sys.executable, "-m", "heavyball.cli", "sweep", str(cfg_path),
         str(out_dir)], capture_output=True, text=True)
    if proc.returncode != 0:
        pytest.skip(f"simulation harness unavailable: {proc.stderr.strip()}")
    return str(out_dir / "summary.csv")


def test_plot_regeneration_acceptance(tmp_path):
    """render produces the three figures from harness CSVs; on an exact
    synthetic -0.5 power-law CSV the annotated slope reads -0.500 +- 0.001;
    the files are nonzero and parse as valid PNG/SVG."""
    csvs = {name: _run_harness_sweep(tmp_path, name, overrides)
            for name, overrides in MINI_SWEEPS.items()}
    out = tmp_path / "figs"
    rc = cli.main([str(out),
                   "--fig1", csvs["fig1"], "--fig2a", csvs["fig2a"],
                   "--fig2b", csvs["fig2b"], "--fig3", csvs["fig3"]])
    files_ok = rc == 0
    for name in csvs:
        png = out / f"{name}.png"
        svg = out / f"{name}.svg"
        files_ok = files_ok and png.stat().st_size > 0 \
            and png.read_bytes()[:8] == PNG_MAGIC and svg.stat().st_size > 0 \
            and ET.parse(svg).getroot().tag.endswith("svg")

    synth = tmp_path / "synth.csv"
    write_summary(synth, synthetic_power_law(slope=-0.5))
    from plots import FigureKind, FigureSpec, render

    annotation = render(FigureSpec(str(synth), FigureKind.FIG1,
                                   str(tmp_path / "synth.png")))
    slope = float(annotation.split("=")[1].split("±")[0])
    slope_ok = abs(slope + 0.5) <= 1e-3

    ok = files_ok and slope_ok
    line = (f"ACCEPTANCE plot-regeneration: {'PASS' if ok else 'FAIL'} "
            f"(4 panels x png+svg rendered: {files_ok}; synthetic slope "
            f"{slope:.3f} within -0.500 ± 0.001: {slope_ok})")
    print(line)
    assert ok, line
