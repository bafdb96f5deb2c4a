#!/usr/bin/env python3
"""Render the CSV outputs of the hawkes CLI as PNG figures."""

import argparse
import glob
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def read_table(path):
    return pd.read_csv(path, comment="#", na_values=["NA"])


def plot_kernels(directory, out):
    data = read_table(os.path.join(directory, "kernel_curves.csv"))
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in data.columns[1:]:
        ax.plot(data["t"], data[name], label=name, lw=1.5 if name == "phi" else 1.0)
    ax.axhline(0.0, color="grey", lw=0.5)
    ax.set_xlabel("t")
    ax.set_ylabel("kernel")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def plot_paths(directory, out):
    files = sorted(glob.glob(os.path.join(directory, "path_*.csv")))
    fig, (ax_x, ax_l) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    for f in files:
        data = read_table(f)
        label = os.path.basename(f)[len("path_"):-len(".csv")]
        ax_x.plot(data["t"], data["x"], lw=0.9, label=label)
        ax_l.step(data["t"], data["lambda"], where="post", lw=0.9, label=label)
    ax_x.set_ylabel("X")
    ax_l.set_ylabel("lambda")
    ax_l.set_xlabel("t")
    ax_x.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def plot_convergence(directory, out):
    data = read_table(os.path.join(directory, "convergence.csv"))
    fig, ax = plt.subplots(figsize=(5, 4))
    for name in ("err_X", "err_lambda"):
        ax.errorbar(data["l1_dist"], data[name], yerr=data[name + "_se"], marker="o", label=name, capsize=2)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("||phi_n - phi||_1")
    ax.set_ylabel("coupled error")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def plot_portfolio(directory, out):
    data = read_table(os.path.join(directory, "portfolio.csv"))
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.errorbar(data["n"], data["V0n"], yerr=data["se"], marker="o", capsize=2)
    ax.set_xlabel("n")
    ax.set_ylabel("V0n")
    fig.tight_layout()
    fig.savefig(out, dpi=150)


PLOTS = {
    "kernel_curves.csv": ("kernels.png", plot_kernels),
    "path_kernel.csv": ("paths.png", plot_paths),
    "convergence.csv": ("convergence.png", plot_convergence),
    "portfolio.csv": ("portfolio.png", plot_portfolio),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("directories", nargs="+", help="CLI output directories")
    args = parser.parse_args()
    for directory in args.directories:
        for marker, (name, plot) in PLOTS.items():
            if os.path.exists(os.path.join(directory, marker)):
                target = os.path.join(directory, name)
                plot(directory, target)
                print(target)


if __name__ == "__main__":
    main()
