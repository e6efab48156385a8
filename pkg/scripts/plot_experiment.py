"""
Experiment Visualization Script

This script plots result tables written by ``bbshift experiment``: median
weight-estimation error against sample size on log-log axes, the p-value
histogram of a detection run, or the per-replication accuracy of the
corrected model against the unweighted baseline.
"""

import argparse
import logging
import sys
from typing import Optional

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from bbshift.io.tables import read_table
from bbshift.pipeline.experiment import loglog_slope

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def plot_estimation(table: pd.DataFrame, column: str = "mse_w") -> None:
    """
    Median error per shift setting against n.

    Args:
        table: Experiment table
        column: Error column
    """
    for shift, rows in table.groupby("shift", sort=False):
        medians = rows.groupby("n")[column].median()
        label = shift
        if medians.size >= 2:
            label = f"{shift} (slope {loglog_slope(rows, column):.2f})"
        plt.loglog(medians.index, medians.to_numpy(), marker="o", label=label)
    plt.xlabel("n = m")
    plt.ylabel(f"median {column}")
    plt.legend(fontsize=8)


def plot_detection(table: pd.DataFrame) -> None:
    """Histogram of p-values with the uniform density for reference."""
    p_values = table["p_value"].dropna().to_numpy()
    plt.hist(p_values, bins=20, range=(0.0, 1.0), density=True, color="#A7C7E7", edgecolor="gray")
    plt.axhline(1.0, color="#FF9E9E", linestyle="--")
    plt.xlabel("p-value")
    plt.ylabel("density")
    plt.title(f"rejection rate {np.mean(table['reject'].astype(float)):.3f}")


def plot_correction(table: pd.DataFrame) -> None:
    """Corrected against baseline accuracy, one point per replication."""
    for shift, rows in table.groupby("shift", sort=False):
        plt.scatter(rows["acc_baseline"], rows["acc_corrected"], s=12, label=shift)
    lo = float(np.nanmin(table[["acc_baseline", "acc_corrected"]].to_numpy()))
    plt.plot([lo, 1.0], [lo, 1.0], color="gray", linewidth=1)
    plt.xlabel("baseline accuracy")
    plt.ylabel("corrected accuracy")
    plt.legend(fontsize=8)


def visualize_table(path: str, output_path: Optional[str] = None) -> None:
    """
    Plot an experiment table, choosing the view from the filled columns.

    Args:
        path: Table written by ``bbshift experiment`` (CSV or JSON)
        output_path: Path to save the figure
    """
    table = read_table(path)
    plt.figure(figsize=(8, 6))
    if table["acc_corrected"].notna().any():
        plot_correction(table)
    elif table["mse_w"].notna().any():
        plot_estimation(table)
    else:
        plot_detection(table)

    if output_path:
        plt.savefig(output_path, bbox_inches="tight")
        logger.info(f"Visualization saved to {output_path}")
    else:
        plt.show()


def main() -> int:
    parser = argparse.ArgumentParser(description="Plot a BBShift experiment table")
    parser.add_argument("table", help="Experiment table (CSV or JSON)")
    parser.add_argument("--output", "-o", help="Output image path")
    args = parser.parse_args()

    try:
        visualize_table(args.table, args.output)
    except (OSError, KeyError) as e:
        logger.error(f"Error visualizing {args.table}: {e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
