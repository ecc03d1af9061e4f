"""Experiment report writers: delimited rows, JSON summary, and figures.

Each experiment writes three sibling files from one output prefix:
``<prefix>.csv`` with the row data, ``<prefix>.json`` with the summary, and
``<prefix>.png`` with a rendered figure.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .experiments import ScalarFitResult, SweepReport  # noqa: E402


def write_sweep_report(report: SweepReport, out_prefix: str | Path) -> dict[str, Path]:
    prefix = Path(out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": prefix.with_suffix(".csv"),
        "json": prefix.with_suffix(".json"),
        "png": prefix.with_suffix(".png"),
    }
    with open(paths["csv"], "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["depth_mm", "measured_mm", "error_mm"])
        for row in report.rows:
            writer.writerow(
                [
                    f"{row.depth_mm:g}",
                    "" if row.measured_mm is None else f"{row.measured_mm:.6f}",
                    "" if row.error_mm is None else f"{row.error_mm:.6f}",
                ]
            )
    paths["json"].write_text(
        json.dumps(report.summary_dict(), indent=2) + "\n", encoding="utf-8"
    )
    fig = sweep_figure(report)
    fig.savefig(paths["png"], dpi=120)
    plt.close(fig)
    return paths


def sweep_figure(report: SweepReport):
    depths = [r.depth_mm for r in report.rows if r.measured_mm is not None]
    measured = [r.measured_mm for r in report.rows if r.measured_mm is not None]
    errors = [r.error_mm for r in report.rows if r.error_mm is not None]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(depths, measured, "o-", ms=3, label="measured")
    ax1.axhline(report.true_mm, color="gray", ls="--", lw=1, label="true size")
    ax1.set_xlabel("capture depth (mm)")
    ax1.set_ylabel("measured diameter (mm)")
    ax1.set_title(f"{report.true_mm:g} mm phantom across depth")
    ax1.legend(fontsize=8)

    ax2.plot(depths, [abs(e) for e in errors], "o-", ms=3, color="firebrick")
    for d in report.best_depths:
        ax2.axvline(d, color="seagreen", ls=":", lw=1)
    ax2.set_xlabel("capture depth (mm)")
    ax2.set_ylabel("|error| (mm)")
    ax2.set_title(
        "absolute error"
        + (f" (best at {', '.join(f'{d:g}' for d in report.best_depths)} mm)"
           if report.best_depths else "")
    )
    fig.tight_layout()
    return fig


def write_scalar_fit_report(
    result: ScalarFitResult, out_prefix: str | Path
) -> dict[str, Path]:
    prefix = Path(out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": prefix.with_suffix(".csv"),
        "json": prefix.with_suffix(".json"),
        "png": prefix.with_suffix(".png"),
    }
    with open(paths["csv"], "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["trial", "measured_px", "factor_mm_per_px"])
        for i, px in enumerate(result.measured_px):
            writer.writerow([i, f"{px:.6f}", f"{result.true_mm / px:.6f}"])
    paths["json"].write_text(
        json.dumps(result.summary_dict(), indent=2) + "\n", encoding="utf-8"
    )
    fig = scalar_fit_figure(result)
    fig.savefig(paths["png"], dpi=120)
    plt.close(fig)
    return paths


def scalar_fit_figure(result: ScalarFitResult):
    factors = [result.true_mm / px for px in result.measured_px]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(range(len(factors)), factors, "o", ms=4, label="per-trial factor")
    ax.axhline(result.fitted_factor, color="firebrick", lw=1.2,
               label=f"fitted {result.fitted_factor:.4f}")
    ax.set_xlabel("trial")
    ax.set_ylabel("mm per pixel")
    ax.set_title(f"scalar fit, {result.true_mm:g} mm phantom")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig
