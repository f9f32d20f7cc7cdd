#!/usr/bin/env python3
"""Plot CSV tables written by the srpt CLI.

    srpt classical > classical.csv
    srpt meanfield --config configs/reference.cfg --boundary-out boundary.csv > meanfield.csv
    srpt fluct --lr0 0.1:1.0:451 > fluct.csv
    srpt ed --config configs/reference.cfg > ed.csv
    scripts/plot_results.py --classical classical.csv --meanfield meanfield.csv \
        --boundary boundary.csv --fluct fluct.csv --ed ed.csv -o figures.png

Any subset of the inputs may be given; one panel is drawn per input.
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def classical(ax, df):
    for ratio, g in df.groupby("L_R0_over_L_J"):
        ax.plot(g["phase_rad"], g["U_over_NEJ"], label=f"L_R0/L_J = {ratio:g}")
    ax.set_xlabel("2 pi phi / Phi0")
    ax.set_ylabel("U / (N E_J)")
    ax.legend(fontsize="small")


def meanfield(ax, df, boundary):
    grid = df.pivot(index="kBT_over_h_GHz", columns="L_R0_nH", values="alpha_over_sqrtN")
    mesh = ax.pcolormesh(grid.columns, grid.index, grid.values, shading="nearest")
    plt.colorbar(mesh, ax=ax, label="alpha / sqrt(N)")
    if boundary is not None:
        b = boundary[pd.to_numeric(boundary["Tc_kBT_over_h_GHz"], errors="coerce") < float("inf")]
        ax.plot(b["L_R0_nH"], b["Tc_kBT_over_h_GHz"], "w.-", label="T_c")
        ax.legend(fontsize="small")
    ax.set_xlabel("L_R0 (nH)")
    ax.set_ylabel("kB T / h (GHz)")


def fluct(ax, df):
    ax.plot(df["L_R0_nH"], df["omega_bar_minus_GHz"], label="omega_bar_-")
    ax.plot(df["L_R0_nH"], df["omega_bar_a_GHz"], "--", label="omega_bar_a")
    ax.set_xlabel("L_R0 (nH)")
    ax.set_ylabel("frequency (GHz)")
    ax.legend(fontsize="small")


def ed(ax, df):
    for n, g in df.groupby("N"):
        line = ax.plot(g["L_R0_nH"], g["transition_even_GHz"], label=f"N = {n} even")[0]
        ax.plot(g["L_R0_nH"], g["transition_odd_GHz"], ":", color=line.get_color(), label=f"N = {n} odd")
    ax.set_xlabel("L_R0 (nH)")
    ax.set_ylabel("transition frequency (GHz)")
    ax.legend(fontsize="small")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--classical")
    ap.add_argument("--meanfield")
    ap.add_argument("--boundary")
    ap.add_argument("--fluct")
    ap.add_argument("--ed")
    ap.add_argument("-o", "--output", default="figures.png")
    args = ap.parse_args()

    panels = []
    if args.classical:
        panels.append(lambda ax: classical(ax, pd.read_csv(args.classical)))
    if args.meanfield:
        boundary = pd.read_csv(args.boundary) if args.boundary else None
        panels.append(lambda ax: meanfield(ax, pd.read_csv(args.meanfield), boundary))
    if args.fluct:
        panels.append(lambda ax: fluct(ax, pd.read_csv(args.fluct)))
    if args.ed:
        panels.append(lambda ax: ed(ax, pd.read_csv(args.ed)))
    if not panels:
        ap.error("give at least one input table")

    fig, axes = plt.subplots(1, len(panels), figsize=(5 * len(panels), 4), squeeze=False)
    for draw, ax in zip(panels, axes[0]):
        draw(ax)
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
